"""Imperfection studies with pulses frozen at the ideal-case optima:
dissipation, mode disorder, qubit-qubit detuning, initial-state leakage
to the second excited level, and stray channel photons."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegratorConfig
from .model import ChannelSpec, QubitSpec, SystemSpec, transfer_spec
from .protocol import FIDELITY_CFG, make_schedule, run_transfer
from .statespace import QA, QA_PH, build_basis, sample_disorder

# pulses: mapping g_ratio -> (kappa, tau_d), frozen from the ideal-case
# optimization and never re-tuned inside a sweep
Pulses = dict[float, tuple[float, float]]

DEFAULT_SEED = 982_451_653


@dataclass
class SweepRow:
    param_value: float
    g_ratio: float
    infidelity: float
    stderr: float = 0.0


@dataclass
class SweepResult:
    """One robustness sweep: rows sorted by (g_ratio, parameter value).

    ``pulse_checksum`` fingerprints the frozen pulse parameters so that
    sweeps taken with different optima cannot be silently mixed.
    """

    param_name: str
    rows: list[SweepRow]
    pulse_checksum: str
    context: dict = field(default_factory=dict)

    def values(self, g_ratio: float):
        """(param_values, infidelities, stderrs) arrays for one ratio."""
        sel = [r for r in self.rows if r.g_ratio == g_ratio]
        return (np.array([r.param_value for r in sel]),
                np.array([r.infidelity for r in sel]),
                np.array([r.stderr for r in sel]))


def pulse_checksum(pulses: Pulses) -> str:
    """Deterministic fingerprint of the frozen (kappa, tau_d) per ratio."""
    parts = [f"{g:.17g}:{k:.17g}:{d:.17g}"
             for g, (k, d) in sorted(pulses.items())]
    return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]


def _sorted_pulses(pulses: Pulses):
    return sorted(pulses.items())


def _transfer_infidelity(spec: SystemSpec, kappa: float, tau_d: float,
                         cfg: IntegratorConfig, **kwargs) -> float:
    schedule = make_schedule(spec, kappa, tau_d)
    return 1.0 - run_transfer(spec, schedule, cfg, **kwargs).fidelity


def sweep_dissipation(pulses: Pulses, which: str, values,
                      n_modes: int = 51,
                      cfg: IntegratorConfig = FIDELITY_CFG) -> SweepResult:
    """Transfer infidelity versus a loss rate at frozen optimal pulses.

    ``which`` selects qubit relaxation ("gamma", applied to both qubits)
    or uniform mode decay ("kappa_c").
    """
    if which not in ("gamma", "kappa_c"):
        raise ValueError('which must be "gamma" or "kappa_c"')
    rows = []
    for g_ratio, (kappa, tau_d) in _sorted_pulses(pulses):
        for v in sorted(float(x) for x in values):
            if v < 0:
                raise ValueError(f"{which} must be >= 0")
            kw = {which: v}
            spec = transfer_spec(g_ratio, n_modes=n_modes, **kw)
            infid = _transfer_infidelity(spec, kappa, tau_d, cfg)
            rows.append(SweepRow(v, g_ratio, infid))
    return SweepResult(which, rows, pulse_checksum(pulses))


def disorder_average(pulses: Pulses, deltas, n_realizations: int = 100,
                     seed: int = DEFAULT_SEED, n_modes: int = 51,
                     cfg: IntegratorConfig = FIDELITY_CFG) -> SweepResult:
    """Mean infidelity over static mode-frequency disorder realizations.

    Realization ``r`` always draws with seed ``seed + r``, so results are
    identical however the loop is scheduled; delta = 0 short-circuits to
    the intrinsic value with zero spread.
    """
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    rows = []
    for g_ratio, (kappa, tau_d) in _sorted_pulses(pulses):
        for delta in sorted(float(x) for x in deltas):
            if delta == 0.0:
                spec = transfer_spec(g_ratio, n_modes=n_modes)
                infid = _transfer_infidelity(spec, kappa, tau_d, cfg)
                rows.append(SweepRow(delta, g_ratio, infid, 0.0))
                continue
            samples = np.empty(n_realizations)
            for r in range(n_realizations):
                offsets = tuple(sample_disorder(delta, n_modes, seed + r))
                spec = transfer_spec(g_ratio, n_modes=n_modes,
                                     disorder_offsets=offsets)
                samples[r] = _transfer_infidelity(spec, kappa, tau_d, cfg)
            stderr = (float(np.std(samples, ddof=1)) / np.sqrt(n_realizations)
                      if n_realizations > 1 else 0.0)
            rows.append(SweepRow(delta, g_ratio, float(np.mean(samples)),
                                 stderr))
    return SweepResult("disorder_delta", rows, pulse_checksum(pulses),
                       context={"seed": seed, "n_realizations": n_realizations})


def _detuned_spec(g_ratio: float, delta_omega: float, symmetric: bool,
                  n_modes: int) -> SystemSpec:
    if not symmetric:
        return transfer_spec(g_ratio, n_modes=n_modes,
                             detuning_b=delta_omega)
    channel = ChannelSpec(n_modes=n_modes)
    qa = QubitSpec(g_max=g_ratio, detuning=-0.5 * delta_omega)
    qb = QubitSpec(g_max=g_ratio, detuning=+0.5 * delta_omega)
    return SystemSpec(channel=channel, qubit_a=qa, qubit_b=qb)


def sweep_detuning(pulses: Pulses, delta_omegas, symmetric: bool = False,
                   n_modes: int = 51,
                   cfg: IntegratorConfig = FIDELITY_CFG) -> SweepResult:
    """Infidelity versus a static frequency offset between the qubits.

    By default the offset sits entirely on qubit B while A stays resonant
    with the central mode; ``symmetric`` splits it as -/+ delta/2.
    """
    rows = []
    for g_ratio, (kappa, tau_d) in _sorted_pulses(pulses):
        for dw in sorted(float(x) for x in delta_omegas):
            spec = _detuned_spec(g_ratio, dw, symmetric, n_modes)
            infid = _transfer_infidelity(spec, kappa, tau_d, cfg)
            rows.append(SweepRow(dw, g_ratio, infid))
    return SweepResult("delta_omega", rows, pulse_checksum(pulses),
                       context={"symmetric": symmetric})


def _branch_infidelity(spec: SystemSpec, kappa: float, tau_d: float,
                       start_kind: str, start_level: str, start_k: int,
                       cfg: IntegratorConfig) -> float:
    """Infidelity of one pure initial-state branch in manifolds {1, 2}."""
    basis = build_basis(spec, {1, 2})
    psi0 = np.zeros(basis.dim, dtype=complex)
    psi0[basis.i(start_kind, start_level, start_k)] = 1.0
    return _transfer_infidelity(spec, kappa, tau_d, cfg, initial=psi0,
                                manifolds={1, 2})


def leakage_infidelity(g_ratio: float, pulse: tuple[float, float],
                       epsilons, alpha: float, n_modes: int = 51,
                       cfg: IntegratorConfig = FIDELITY_CFG) -> SweepResult:
    """Infidelity when qubit A starts with weight epsilon in its second
    excited level, for a three-level qubit of anharmonicity ``alpha``.

    The |e> and |f> branches conserve excitation number separately, so the
    mixed-state result is their exact convex combination:
    1 - F(eps) = (1 - eps) * I_e + eps * I_f.
    """
    kappa, tau_d = pulse
    ideal = transfer_spec(g_ratio, n_modes=n_modes)
    i_e = _transfer_infidelity(ideal, kappa, tau_d, cfg)
    spec3 = transfer_spec(g_ratio, n_modes=n_modes, levels_a=3,
                          levels_b=3, alpha=alpha)
    i_f = _branch_infidelity(spec3, kappa, tau_d, QA, "f", -1, cfg)
    rows = [SweepRow(eps, g_ratio, (1.0 - eps) * i_e + eps * i_f)
            for eps in sorted(float(x) for x in epsilons)]
    for r in rows:
        if not 0.0 <= r.param_value <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
    return SweepResult("epsilon_f", rows, pulse_checksum({g_ratio: pulse}),
                       context={"alpha": alpha, "branch_infidelities":
                                {"e": i_e, "f": i_f}})


def stray_photon_infidelity(g_ratio: float, pulse: tuple[float, float],
                            epsilons, n_modes: int = 51,
                            weights=None,
                            cfg: IntegratorConfig = FIDELITY_CFG) -> SweepResult:
    """Infidelity with a residual single photon in the channel.

    The contaminated branches start in |e_A, one photon in mode k> with
    weights w_k (uniform 1/N by default); linearity of the master equation
    makes the result the exact convex combination
    1 - F(eps) = (1 - eps) * I_ideal + eps * sum_k w_k * I_k.
    """
    kappa, tau_d = pulse
    if weights is None:
        weights = np.full(n_modes, 1.0 / n_modes)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (n_modes,) or np.any(weights < 0) or \
            abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a length-n_modes distribution")
    spec = transfer_spec(g_ratio, n_modes=n_modes)
    i_ideal = _transfer_infidelity(spec, kappa, tau_d, cfg)
    i_branch = np.array([
        _branch_infidelity(spec, kappa, tau_d, QA_PH, "e", k, cfg)
        for k in range(n_modes)])
    i_mix = float(weights @ i_branch)
    rows = [SweepRow(eps, g_ratio, (1.0 - eps) * i_ideal + eps * i_mix)
            for eps in sorted(float(x) for x in epsilons)]
    for r in rows:
        if not 0.0 <= r.param_value <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
    return SweepResult("epsilon_p", rows, pulse_checksum({g_ratio: pulse}),
                       context={"branch_infidelities":
                                {"ideal": i_ideal,
                                 "photon_mean": i_mix}})
