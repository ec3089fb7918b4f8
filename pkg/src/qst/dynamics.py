"""Time propagation of pure states, no-jump states and density matrices.

The closed-system and no-jump paths share one compiled adaptive RK kernel;
the Lindblad path integrates the flattened density matrix with scipy and
is used at small dimension (cross-checks, open-system regressions).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _rk
from .model import Scheme, TransferSchedule
from .statespace import (VAC, QA, QA_PH, QAQB, QB, QB_PH, PH, PH2, Basis,
                         DissipatorSet, HamiltonianMatrix)

TWO_PI = 2.0 * np.pi


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    n_samples: int = 2001

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Drive:
    """Resolved time dependence of the two couplings for the kernel."""

    kind: int              # _rk.KIND_CONST or _rk.KIND_SECH3
    g0: float
    kappa: float = 1.0
    tau_d: float = 0.0
    dur: float = 0.0       # envelope support length (constant kind only)
    off_a: float = 0.0
    off_b: float = 0.0
    b_scale: float = 1.0
    t_end: float = 0.0

    @classmethod
    def from_schedule(cls, s: TransferSchedule, b_scale: float = 1.0) -> "Drive":
        off_b = s.offset if s.scheme is Scheme.DELAYED_MIRROR else 0.0
        return cls(kind=_rk.KIND_SECH3, g0=s.pulse.g0, kappa=s.pulse.kappa,
                   tau_d=s.pulse.tau_d, off_b=off_b, b_scale=b_scale,
                   t_end=s.t_end)

    @classmethod
    def constant(cls, g: float, dur: float, b_scale: float = 1.0) -> "Drive":
        return cls(kind=_rk.KIND_CONST, g0=g, dur=dur, b_scale=b_scale,
                   t_end=dur)

    def couplings(self, t: float) -> tuple[float, float]:
        ga = _rk._env.py_func(t - self.off_a, self.kind, self.g0, self.kappa,
                              self.tau_d, self.dur)
        gb = self.b_scale * _rk._env.py_func(t - self.off_b, self.kind, self.g0,
                                             self.kappa, self.tau_d, self.dur)
        return ga, gb

    def breakpoints(self, t_final: float) -> np.ndarray:
        if self.kind == _rk.KIND_CONST:
            edges = [self.dur]
        else:
            tau = 6.0 / self.kappa
            seg = [0.0, tau, tau + self.tau_d, 2.0 * tau + self.tau_d]
            edges = [self.off_a + s for s in seg]
            if self.off_b != self.off_a and self.b_scale != 0.0:
                edges += [self.off_b + s for s in seg]
        pts = sorted({e for e in edges if 1e-12 < e < t_final - 1e-12})
        return np.asarray(pts, dtype=float)


@dataclass
class SimResult:
    """Sampled observables of one propagation."""

    times: np.ndarray
    p_a: np.ndarray
    p_b: np.ndarray
    mode_pops: np.ndarray      # [n_samples, n_modes]
    p_f_a: np.ndarray
    p_vac: np.ndarray
    basis: Basis
    norm_drift: float
    edge_pop_max: float
    final_state: np.ndarray | None = None
    final_rho: np.ndarray | None = None
    n_steps: int = 0


def basis_weights(basis: Basis):
    """Population weight vectors (cached on the basis object)."""
    cached = getattr(basis, "_weights", None)
    if cached is not None:
        return cached
    d = basis.dim
    w_a = np.zeros(d)
    w_b = np.zeros(d)
    w_fa = np.zeros(d)
    w_vac = np.zeros(d)
    w_modes = np.zeros((d, basis.n_modes))
    for i, s in enumerate(basis.states):
        if s.kind == VAC:
            w_vac[i] = 1.0
        elif s.kind == QA:
            if s.level == "f":
                w_fa[i] = 1.0
            else:
                w_a[i] = 1.0
        elif s.kind == QB and s.level == "e":
            w_b[i] = 1.0
        elif s.kind == PH:
            w_modes[i, s.k] = 1.0
        elif s.kind == QA_PH:
            w_a[i] = 1.0
            w_modes[i, s.k] = 1.0
        elif s.kind == QB_PH:
            w_b[i] = 1.0
            w_modes[i, s.k] = 1.0
        elif s.kind == QAQB:
            w_a[i] = 1.0
            w_b[i] = 1.0
        elif s.kind == PH2:
            w_modes[i, s.k] += 1.0
            w_modes[i, s.l] += 1.0
    weights = (w_a, w_b, w_modes, w_fa, w_vac)
    basis._weights = weights
    return weights


def populations(state_or_rho: np.ndarray, basis: Basis):
    """(P_A, P_B, mode_pops, P_f_A, P_vac) for a state vector or density
    matrix; qubit populations count every basis state with that qubit in
    the excited level, mode populations are photon-number expectations."""
    w_a, w_b, w_modes, w_fa, w_vac = basis_weights(basis)
    x = np.asarray(state_or_rho)
    if x.ndim == 1:
        p = np.abs(x) ** 2
    else:
        p = np.real(np.diag(x))
    return (float(p @ w_a), float(p @ w_b), p @ w_modes,
            float(p @ w_fa), float(p @ w_vac))


def _sample_result(basis, times, samples, final_state, n_steps) -> SimResult:
    w_a, w_b, w_modes, w_fa, w_vac = basis_weights(basis)
    p = np.abs(samples) ** 2
    mode_pops = p @ w_modes
    edge = 0.0
    if basis.n_modes >= 2:
        edge = float(np.max(mode_pops[:, [0, -1]]))
    elif basis.n_modes == 1:
        edge = float(np.max(mode_pops))
    return SimResult(
        times=times, p_a=p @ w_a, p_b=p @ w_b, mode_pops=mode_pops,
        p_f_a=p @ w_fa, p_vac=p @ w_vac, basis=basis,
        norm_drift=float(abs(np.linalg.norm(final_state) - np.linalg.norm(samples[0]))),
        edge_pop_max=edge, final_state=final_state, n_steps=n_steps)


def _run_kernel(diag, ham, drive, psi0, t_final, cfg) -> SimResult:
    times = np.linspace(0.0, t_final, cfg.n_samples)
    va = (TWO_PI * ham.v_a).astype(complex)
    vb = (TWO_PI * ham.v_b).astype(complex)
    samples, y_final, status, n_steps = _rk.integrate(
        diag.astype(complex), va, vb, drive.kind, drive.g0, drive.kappa,
        drive.tau_d, drive.dur, drive.off_a, drive.off_b, drive.b_scale,
        drive.breakpoints(t_final), np.asarray(psi0, dtype=complex),
        float(t_final), times, cfg.rtol, cfg.atol, cfg.max_step)
    if status == _rk.STATUS_STEP_UNDERFLOW:
        raise PropagationError(f"step size underflow at t<= {t_final}")
    if status == _rk.STATUS_MAX_STEPS:
        raise PropagationError("step budget exhausted; tolerance not achieved")
    res = _sample_result(ham.basis, times, samples, y_final, n_steps)
    return res


def _as_drive(schedule_or_drive, t_final=None):
    if isinstance(schedule_or_drive, Drive):
        drive = schedule_or_drive
    elif isinstance(schedule_or_drive, TransferSchedule):
        drive = Drive.from_schedule(schedule_or_drive)
    else:
        raise TypeError(f"unsupported drive {type(schedule_or_drive)!r}")
    if t_final is None:
        t_final = drive.t_end
    return drive, float(t_final)


def propagate_pure(ham: HamiltonianMatrix, schedule, psi0, t_final=None,
                   cfg: IntegratorConfig = IntegratorConfig()) -> SimResult:
    """Closed-system Schrodinger propagation i dpsi/dt = H(t) psi."""
    drive, t_final = _as_drive(schedule, t_final)
    return _run_kernel(ham.diag, ham, drive, psi0, t_final, cfg)


def _check_vacuum_jumps(dissipators: DissipatorSet, basis: Basis):
    try:
        vac = basis.i(VAC)
    except KeyError:
        vac = -1
    for op, _rate in dissipators.jumps:
        rows = np.nonzero(np.any(op != 0.0, axis=1))[0]
        if any(r != vac for r in rows):
            raise ValueError(
                "no-jump shortcut requires every jump to land in the vacuum state")


def propagate_nonhermitian(ham: HamiltonianMatrix, schedule,
                           dissipators: DissipatorSet, psi0, t_final=None,
                           cfg: IntegratorConfig = IntegratorConfig()) -> SimResult:
    """No-jump evolution under H - (i/2) sum rate L^dag L.

    Exact for excited-manifold populations when every jump terminates in
    the decoupled vacuum, which is verified up front.
    """
    drive, t_final = _as_drive(schedule, t_final)
    diag = ham.diag.astype(complex).copy()
    if len(dissipators):
        _check_vacuum_jumps(dissipators, ham.basis)
        diag = diag - 0.5j * dissipators.decay_diagonal(ham.dim)
    return _run_kernel(diag, ham, drive, psi0, t_final, cfg)


def propagate_lindblad(ham: HamiltonianMatrix, schedule,
                       dissipators: DissipatorSet, rho0, t_final=None,
                       cfg: IntegratorConfig = IntegratorConfig()) -> SimResult:
    """Full Lindblad master equation on the flattened density matrix."""
    drive, t_final = _as_drive(schedule, t_final)
    basis = ham.basis
    d = ham.dim
    diag = np.real(ham.diag)
    va = TWO_PI * ham.v_a
    vb = TWO_PI * ham.v_b
    ops = [(op, op.conj().T @ op, rate) for op, rate in dissipators.jumps]

    def rhs(t, y):
        rho = y.reshape(d, d)
        ga, gb = drive.couplings(t)
        h_rho = diag[:, None] * rho
        rho_h = rho * diag[None, :]
        if ga != 0.0:
            h_rho = h_rho + ga * (va @ rho)
            rho_h = rho_h + ga * (rho @ va)
        if gb != 0.0:
            h_rho = h_rho + gb * (vb @ rho)
            rho_h = rho_h + gb * (rho @ vb)
        drho = -1j * (h_rho - rho_h)
        for op, opdop, rate in ops:
            drho = drho + rate * (op @ rho @ op.conj().T
                                  - 0.5 * (opdop @ rho + rho @ opdop))
        return drho.ravel()

    rho0 = np.asarray(rho0, dtype=complex)
    times = np.linspace(0.0, t_final, cfg.n_samples)
    sol = solve_ivp(rhs, (0.0, t_final), rho0.ravel(), method="DOP853",
                    t_eval=times, rtol=cfg.rtol, atol=cfg.atol,
                    max_step=cfg.max_step)
    if not sol.success:
        raise PropagationError(f"Lindblad integration failed: {sol.message}")

    w_a, w_b, w_modes, w_fa, w_vac = basis_weights(basis)
    rhos = sol.y.T.reshape(-1, d, d)
    rhos = 0.5 * (rhos + np.conj(np.swapaxes(rhos, 1, 2)))
    diag_pops = np.real(np.einsum("tii->ti", rhos))
    mode_pops = diag_pops @ w_modes
    final_rho = rhos[-1]
    edge = float(np.max(mode_pops[:, [0, -1]])) if basis.n_modes >= 2 else \
        float(np.max(mode_pops))
    return SimResult(
        times=times, p_a=diag_pops @ w_a, p_b=diag_pops @ w_b,
        mode_pops=mode_pops, p_f_a=diag_pops @ w_fa, p_vac=diag_pops @ w_vac,
        basis=basis,
        norm_drift=float(abs(np.trace(final_rho).real - np.trace(rho0).real)),
        edge_pop_max=edge, final_rho=final_rho)
