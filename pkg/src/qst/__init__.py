"""Qubit state transfer through a multimode channel.

Simulation and optimization of a pulse-shaped pitch-and-catch protocol
between two qubits coupled to a ladder of standing-wave channel modes,
including robustness studies against dissipation, disorder, detuning and
imperfect initial states.
"""

__version__ = "0.1.0"

from .model import (ChannelSpec, PulseParams, QubitSpec, Scheme, SystemSpec,
                    TransferSchedule, mode_detunings, pulse_envelope,
                    schedule_couplings, transfer_spec, validate_spec)
from .statespace import (Basis, BasisState, DissipatorSet, HamiltonianMatrix,
                         build_basis, build_dissipators, build_hamiltonian,
                         sample_disorder)
from .dynamics import (Drive, IntegratorConfig, PropagationError, SimResult,
                       populations, propagate_lindblad,
                       propagate_nonhermitian, propagate_pure)
from .protocol import (RoundTripResult, TransferResult, make_schedule,
                       revival_peaks, run_round_trip, run_transfer,
                       transfer_fidelity)
from .optimize import (FitResult, OptimizationResult, ScanGrid, TrendFits,
                       fit_trends, grid_scan, interpolate_optimal,
                       optimize_transfer, refine_optimum)
from .robustness import (SweepResult, disorder_average, leakage_infidelity,
                         stray_photon_infidelity, sweep_detuning,
                         sweep_dissipation)

__all__ = [
    "ChannelSpec", "PulseParams", "QubitSpec", "Scheme", "SystemSpec",
    "TransferSchedule", "mode_detunings", "pulse_envelope",
    "schedule_couplings", "transfer_spec", "validate_spec",
    "Basis", "BasisState", "DissipatorSet", "HamiltonianMatrix",
    "build_basis", "build_dissipators", "build_hamiltonian",
    "sample_disorder",
    "Drive", "IntegratorConfig", "PropagationError", "SimResult",
    "populations", "propagate_lindblad", "propagate_nonhermitian",
    "propagate_pure",
    "RoundTripResult", "TransferResult", "make_schedule", "revival_peaks",
    "run_round_trip", "run_transfer", "transfer_fidelity",
    "FitResult", "OptimizationResult", "ScanGrid", "TrendFits",
    "fit_trends", "grid_scan", "interpolate_optimal", "optimize_transfer",
    "refine_optimum",
    "SweepResult", "disorder_average", "leakage_infidelity",
    "stray_photon_infidelity", "sweep_detuning", "sweep_dissipation",
]
