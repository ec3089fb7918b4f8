"""Physical specifications, unit conventions and coupling-pulse envelopes.

Unit convention
---------------
All user-facing frequencies and rates (couplings, free spectral range,
decay rates, detunings, anharmonicity, ramp rate) are ordinary frequencies
in units of the free spectral range; all times are in units of the inverse
free spectral range.  The factor 2*pi is applied exactly once, when the
Hamiltonian and dissipators are assembled, so a constant resonant coupling
``g`` to a single mode yields an excited-population period of exactly
``1/(2 g)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class Scheme(enum.Enum):
    """Timing relation between the two coupling pulses."""

    SIMULTANEOUS_IDENTICAL = "simultaneous"
    DELAYED_MIRROR = "delayed-mirror"


@dataclass(frozen=True)
class ChannelSpec:
    """Standing-wave mode ladder of the communication channel.

    ``n_modes`` must be odd so a unique central mode exists.
    ``disorder_offsets``, when given, holds one static frequency offset per
    mode.  ``kappa_c`` is the uniform mode decay rate.
    """

    n_modes: int = 51
    nu_fsr: float = 1.0
    central_detuning: float = 0.0
    disorder_offsets: tuple[float, ...] | None = None
    kappa_c: float = 0.0

    @property
    def central_index(self) -> int:
        return (self.n_modes - 1) // 2


@dataclass(frozen=True)
class QubitSpec:
    """One qubit: level count, frame detuning, loss rate and peak coupling."""

    g_max: float
    levels: int = 2
    detuning: float = 0.0
    anharmonicity_alpha: float | None = None
    gamma: float = 0.0


@dataclass(frozen=True)
class PulseParams:
    """Three-segment hyperbolic-secant coupling envelope.

    Ramp-up over [0, tau), plateau g0 over [tau, tau + tau_d), ramp-down
    over [tau + tau_d, 2 tau + tau_d), with ramp duration tau = 6 / kappa.
    """

    g0: float
    kappa: float
    tau_d: float = 0.0

    @property
    def tau(self) -> float:
        return 6.0 / self.kappa

    @property
    def t_cycle(self) -> float:
        return 2.0 * self.tau + self.tau_d

    @property
    def t_half(self) -> float:
        """Duration for which the envelope exceeds half its peak value:
        tau_d + 2*arccosh(2)/kappa."""
        return self.tau_d + 2.0 * math.acosh(2.0) / self.kappa


@dataclass(frozen=True)
class TransferSchedule:
    """Pulse pair driving the two qubit-channel couplings.

    SIMULTANEOUS_IDENTICAL applies the same envelope to both qubits;
    DELAYED_MIRROR starts the qubit-B envelope ``offset`` later.
    """

    pulse: PulseParams
    scheme: Scheme = Scheme.SIMULTANEOUS_IDENTICAL
    offset: float = 0.0

    @property
    def t_end(self) -> float:
        """Total protocol duration."""
        if self.scheme is Scheme.DELAYED_MIRROR:
            return self.pulse.t_cycle + self.offset
        return self.pulse.t_cycle


@dataclass(frozen=True)
class SystemSpec:
    """Full physical description consumed by every downstream module."""

    channel: ChannelSpec
    qubit_a: QubitSpec
    qubit_b: QubitSpec
    parity_origin: int | None = None

    @property
    def parity_index(self) -> int:
        if self.parity_origin is None:
            return self.channel.central_index
        return self.parity_origin


def transfer_spec(g_ratio: float, n_modes: int = 51, levels_a: int = 2,
                  levels_b: int = 2, alpha: float | None = None,
                  gamma: float = 0.0, kappa_c: float = 0.0,
                  detuning_b: float = 0.0,
                  disorder_offsets: tuple[float, ...] | None = None) -> SystemSpec:
    """Standard two-qubit setup: both qubits at g_max = g_ratio, qubit A
    resonant with the central mode, optional qubit-B detuning."""
    channel = ChannelSpec(n_modes=n_modes, kappa_c=kappa_c,
                          disorder_offsets=disorder_offsets)
    qa = QubitSpec(g_max=g_ratio, levels=levels_a, gamma=gamma,
                   anharmonicity_alpha=alpha if levels_a == 3 else None)
    qb = QubitSpec(g_max=g_ratio, levels=levels_b, gamma=gamma,
                   detuning=detuning_b,
                   anharmonicity_alpha=alpha if levels_b == 3 else None)
    return SystemSpec(channel=channel, qubit_a=qa, qubit_b=qb)


def validate_spec(spec: SystemSpec) -> list[str]:
    """Collect every invariant violation; an empty list means valid."""
    problems: list[str] = []
    ch = spec.channel
    if ch.n_modes < 1:
        problems.append("n_modes must be >= 1")
    if ch.n_modes % 2 == 0:
        problems.append("n_modes must be odd")
    if not math.isfinite(ch.nu_fsr) or ch.nu_fsr <= 0:
        problems.append("nu_fsr must be positive and finite")
    if ch.kappa_c < 0:
        problems.append("kappa_c must be >= 0")
    if ch.disorder_offsets is not None and len(ch.disorder_offsets) != ch.n_modes:
        problems.append("disorder_offsets length must equal n_modes")
    for name, q in (("qubit_a", spec.qubit_a), ("qubit_b", spec.qubit_b)):
        if q.levels not in (2, 3):
            problems.append(f"{name}: levels must be 2 or 3")
        if q.levels == 3 and q.anharmonicity_alpha is None:
            problems.append(f"{name}: anharmonicity required for a three-level qubit")
        if q.anharmonicity_alpha is not None and q.anharmonicity_alpha <= 0:
            problems.append(f"{name}: anharmonicity must be > 0")
        if q.gamma < 0:
            problems.append(f"{name}: gamma must be >= 0")
        if not q.g_max > 0:
            problems.append(f"{name}: g_max must be > 0")
        for fname in ("detuning", "gamma", "g_max"):
            if not math.isfinite(getattr(q, fname)):
                problems.append(f"{name}: {fname} must be finite")
    return problems


def mode_detunings(channel: ChannelSpec):
    """Frame detunings of the mode ladder: (k - k_c) * nu_fsr plus the
    central offset and any static disorder."""
    import numpy as np

    k = np.arange(channel.n_modes)
    det = (k - channel.central_index) * channel.nu_fsr + channel.central_detuning
    if channel.disorder_offsets is not None:
        det = det + np.asarray(channel.disorder_offsets, dtype=float)
    return det


def pulse_envelope(p: PulseParams, t: float) -> float:
    """Evaluate the three-segment sech envelope; zero outside [0, t_cycle]."""
    tau = p.tau
    if t < 0.0 or t > p.t_cycle:
        return 0.0
    if t < tau:
        return p.g0 / math.cosh(p.kappa * (t - tau))
    if t < tau + p.tau_d:
        return p.g0
    return p.g0 / math.cosh(p.kappa * (t - (tau + p.tau_d)))


def schedule_couplings(s: TransferSchedule, t: float) -> tuple[float, float]:
    """Instantaneous (g_A, g_B) under the schedule."""
    g_a = pulse_envelope(s.pulse, t)
    if s.scheme is Scheme.DELAYED_MIRROR:
        g_b = pulse_envelope(s.pulse, t - s.offset)
    else:
        g_b = g_a
    return g_a, g_b
