"""Schedules that cancel long-range Ising couplings in double-dot molecule arrays."""
from .geometry import Lattice, MoleculeGeometry, e_minus, e_plus, e_zero, g, residual_sum
from .kernels import BACKEND
from .schedule import (
    ChargeConfig,
    ChargeState,
    CouplingMatrix,
    Schedule,
    Step,
    gen_2d_three_step,
    gen_m_step,
    gen_one_step,
    gen_three_step,
    net_coupling,
    pair_sign,
    residual_ratio,
)
from .simulator import (
    QuantumState,
    cluster_state,
    evolve,
    fidelity,
    fidelity_analytic,
    initial_state,
    perturbed_run,
    schedule_fidelity,
)
from .synthesis import (
    PatternFamily,
    SynthesisResult,
    TargetProfile,
    enumerated_family,
    sign_vector,
    solve_durations,
    verify,
    window_family,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ChargeConfig",
    "ChargeState",
    "CouplingMatrix",
    "Lattice",
    "MoleculeGeometry",
    "PatternFamily",
    "QuantumState",
    "Schedule",
    "Step",
    "SynthesisResult",
    "TargetProfile",
    "cluster_state",
    "e_minus",
    "e_plus",
    "e_zero",
    "enumerated_family",
    "evolve",
    "fidelity",
    "fidelity_analytic",
    "g",
    "gen_2d_three_step",
    "gen_m_step",
    "gen_one_step",
    "gen_three_step",
    "initial_state",
    "net_coupling",
    "pair_sign",
    "perturbed_run",
    "residual_ratio",
    "residual_sum",
    "schedule_fidelity",
    "sign_vector",
    "solve_durations",
    "verify",
    "window_family",
]
