"""Excitation-conserving basis enumeration, Hamiltonian and dissipators.

Basis states are enumerated in a fixed, documented order so that results
are reproducible; the Hamiltonian is kept in the decomposed form
H(t) = H_diag + 2*pi * g_A(t) * V_A + 2*pi * g_B(t) * V_B with static,
real coupling matrices.  The rotating frame is static-diagonal: mode and
qubit detunings sit on the diagonal instead of appearing as explicit
interaction-picture phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SystemSpec, mode_detunings

SQRT2 = math.sqrt(2.0)

# state kinds
VAC = "vac"          # no excitation
QA = "qA"            # qubit A in |e> or |f>, channel vacuum
QB = "qB"
PH = "ph"            # single photon in mode k
QA_PH = "qA_ph"      # qubit A in |e> plus a photon in mode k
QB_PH = "qB_ph"
QAQB = "qAqB"        # both qubits in |e>
PH2 = "ph2"          # two photons in modes (k, l), k <= l


@dataclass(frozen=True)
class BasisState:
    kind: str
    level: str = "e"    # qubit level for QA/QB states
    k: int = -1
    l: int = -1

    def excitation(self) -> int:
        if self.kind == VAC:
            return 0
        if self.kind in (QA, QB):
            return 2 if self.level == "f" else 1
        if self.kind == PH:
            return 1
        return 2


@dataclass
class Basis:
    """Ordered basis over a union of excitation manifolds."""

    states: list[BasisState]
    n_modes: int
    manifolds: frozenset[int]
    index: dict[BasisState, int] = field(init=False)

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    def i(self, kind: str, level: str = "e", k: int = -1, l: int = -1) -> int:
        return self.index[BasisState(kind, level, k, l)]


def build_basis(spec: SystemSpec, manifolds={1}) -> Basis:
    """Enumerate basis states for the requested excitation manifolds.

    Ordering: vacuum; single-excitation qubit states; photons 0..N-1; then
    two-excitation states (f levels, both-excited, qubit+photon, two
    photons).  f-containing states are included only for three-level
    qubits.
    """
    manifolds = frozenset(manifolds)
    if not manifolds <= {0, 1, 2}:
        raise ValueError(f"manifolds must be a subset of {{0,1,2}}, got {sorted(manifolds)}")
    n = spec.channel.n_modes
    states: list[BasisState] = []
    if 0 in manifolds:
        states.append(BasisState(VAC))
    if 1 in manifolds:
        states.append(BasisState(QA, "e"))
        states.append(BasisState(QB, "e"))
        states.extend(BasisState(PH, k=k) for k in range(n))
    if 2 in manifolds:
        if spec.qubit_a.levels == 3:
            states.append(BasisState(QA, "f"))
        if spec.qubit_b.levels == 3:
            states.append(BasisState(QB, "f"))
        states.append(BasisState(QAQB))
        states.extend(BasisState(QA_PH, k=k) for k in range(n))
        states.extend(BasisState(QB_PH, k=k) for k in range(n))
        states.extend(BasisState(PH2, k=k, l=l)
                      for k in range(n) for l in range(k, n))
    return Basis(states=states, n_modes=n, manifolds=manifolds)


@dataclass
class HamiltonianMatrix:
    """H(t) = diag + 2*pi*(g_A(t) V_A + g_B(t) V_B); diag is already angular."""

    basis: Basis
    diag: np.ndarray          # complex128[d], 2*pi * detunings
    v_a: np.ndarray           # float64[d, d], pre-2*pi coupling matrix
    v_b: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim

    def at(self, g_a: float, g_b: float) -> np.ndarray:
        """Dense Hamiltonian for instantaneous coupling values."""
        h = np.diag(self.diag.astype(complex))
        h += 2.0 * np.pi * (g_a * self.v_a + g_b * self.v_b)
        return h


def _diag_energy(state: BasisState, det: np.ndarray, spec: SystemSpec) -> float:
    da, db = spec.qubit_a.detuning, spec.qubit_b.detuning
    if state.kind == VAC:
        return 0.0
    if state.kind == QA:
        if state.level == "f":
            return 2.0 * da - spec.qubit_a.anharmonicity_alpha
        return da
    if state.kind == QB:
        if state.level == "f":
            return 2.0 * db - spec.qubit_b.anharmonicity_alpha
        return db
    if state.kind == PH:
        return det[state.k]
    if state.kind == QA_PH:
        return da + det[state.k]
    if state.kind == QB_PH:
        return db + det[state.k]
    if state.kind == QAQB:
        return da + db
    if state.kind == PH2:
        return det[state.k] + det[state.l]
    raise ValueError(state.kind)


def build_hamiltonian(spec: SystemSpec, basis: Basis) -> HamiltonianMatrix:
    """Assemble the decomposed Hamiltonian on ``basis``.

    V_A carries unit matrix elements between qubit-A transitions and the
    photon ladder (sqrt(2) for e<->f and for two-photon annihilation on
    the same mode); V_B is identical up to the alternating mode-parity
    sign (-1)**(k - parity_origin).
    """
    n = basis.n_modes
    d = basis.dim
    det = mode_detunings(spec.channel)
    sign = np.array([(-1.0) ** (k - spec.parity_index) for k in range(n)])

    diag = np.array([2.0 * np.pi * _diag_energy(s, det, spec)
                     for s in basis.states], dtype=complex)
    v_a = np.zeros((d, d))
    v_b = np.zeros((d, d))
    idx = basis.index

    def put(v, s1: BasisState, s2: BasisState, amp: float):
        i, j = idx.get(s1), idx.get(s2)
        if i is not None and j is not None:
            v[i, j] += amp
            v[j, i] += amp

    for k in range(n):
        # single-excitation exchange: qubit e <-> photon k
        put(v_a, BasisState(QA, "e"), BasisState(PH, k=k), 1.0)
        put(v_b, BasisState(QB, "e"), BasisState(PH, k=k), sign[k])
        # e <-> f transition absorbing/emitting photon k (transmon sqrt(2))
        put(v_a, BasisState(QA, "f"), BasisState(QA_PH, k=k), SQRT2)
        put(v_b, BasisState(QB, "f"), BasisState(QB_PH, k=k), SQRT2 * sign[k])
        # both-excited <-> one qubit plus photon
        put(v_a, BasisState(QAQB), BasisState(QB_PH, k=k), 1.0)
        put(v_b, BasisState(QAQB), BasisState(QA_PH, k=k), sign[k])
    # qubit + photon <-> two photons
    if 2 in basis.manifolds:
        for k in range(n):
            for l in range(k, n):
                boson = SQRT2 if k == l else 1.0
                # annihilate photon k, qubit gains excitation -> (qubit, photon l)
                put(v_a, BasisState(QA_PH, k=l), BasisState(PH2, k=k, l=l), boson)
                put(v_b, BasisState(QB_PH, k=l), BasisState(PH2, k=k, l=l), boson * sign[k])
                if k != l:
                    put(v_a, BasisState(QA_PH, k=k), BasisState(PH2, k=k, l=l), 1.0)
                    put(v_b, BasisState(QB_PH, k=k), BasisState(PH2, k=k, l=l), sign[l])
    return HamiltonianMatrix(basis=basis, diag=diag, v_a=v_a, v_b=v_b)


@dataclass
class DissipatorSet:
    """Jump operators with their rates; empty when all rates vanish."""

    jumps: list[tuple[np.ndarray, float]]

    def __len__(self) -> int:
        return len(self.jumps)

    def decay_diagonal(self, dim: int) -> np.ndarray:
        """sum_j rate_j * diag(L_j^dag L_j), used by the no-jump propagator."""
        out = np.zeros(dim)
        for op, rate in self.jumps:
            out += rate * np.einsum("ij,ij->j", op.conj(), op).real
        return out


def build_dissipators(spec: SystemSpec, basis: Basis) -> DissipatorSet:
    """Qubit relaxation and uniform mode decay as Lindblad jumps.

    The rates gamma and kappa_c are e-folding rates in units of the free
    spectral range and enter the master equation as given — unlike the
    coherent frequencies, they carry no factor 2*pi, so an isolated
    excited qubit decays as exp(-gamma * t).  Every jump lowers the total
    excitation by one; decay out of the single-excitation manifold
    requires the vacuum state to be present.
    """
    jumps: list[tuple[np.ndarray, float]] = []
    idx = basis.index
    d = basis.dim

    def lower(pairs, rate):
        if rate <= 0.0:
            return
        op = np.zeros((d, d))
        any_set = False
        for src, dst, amp in pairs:
            i, j = idx.get(dst), idx.get(src)
            if j is None:
                continue
            if i is None:
                raise ValueError(
                    f"jump target {dst} missing from basis; include the lower manifold")
            op[i, j] = amp
            any_set = True
        if any_set:
            jumps.append((op, rate))

    n = basis.n_modes
    for q, kind, kind_ph, other in (
            (spec.qubit_a, QA, QA_PH, QAQB),
            (spec.qubit_b, QB, QB_PH, QAQB)):
        pairs = [(BasisState(kind, "e"), BasisState(VAC), 1.0),
                 (BasisState(kind, "f"), BasisState(kind, "e"), SQRT2)]
        pairs += [(BasisState(kind_ph, k=k), BasisState(PH, k=k), 1.0)
                  for k in range(n)]
        partner = QB if kind == QA else QA
        pairs.append((BasisState(QAQB), BasisState(partner, "e"), 1.0))
        lower(pairs, q.gamma)
    for k in range(n):
        pairs = [(BasisState(PH, k=k), BasisState(VAC), 1.0),
                 (BasisState(QA_PH, k=k), BasisState(QA, "e"), 1.0),
                 (BasisState(QB_PH, k=k), BasisState(QB, "e"), 1.0)]
        for l in range(n):
            kk, ll = min(k, l), max(k, l)
            amp = SQRT2 if k == l else 1.0
            pairs.append((BasisState(PH2, k=kk, l=ll), BasisState(PH, k=l), amp))
        lower(pairs, spec.channel.kappa_c)
    return DissipatorSet(jumps=jumps)


def sample_disorder(delta: float, n_modes: int, seed: int) -> np.ndarray:
    """Gaussian static mode-frequency offsets, std = delta / 3 (units of the
    free spectral range); deterministic per seed, no truncation."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, delta / 3.0, n_modes)
