"""Quantum backflow for free positive-momentum particles: the standard
probability-current criterion and its measurement-smoothed variant,
with the machinery to compute maximal backflow probability transfers.
"""

from .specfun import (
    NoBracketError,
    NonConvergenceError,
    NonFiniteError,
    QuadratureGrid,
    QuadratureNotConvergedError,
    SymmetricMatrix,
    bisect,
    erfc,
    erfcx,
    gauss_legendre,
    sym_eig_max,
)
from .states import (
    MomentumState,
    PhasePoint,
    PhysicalScales,
    PrecisionSpec,
    bm_momentum_amplitude,
    bm_position_amplitude,
    husimi,
    load_sampled_state,
    phase_space_norm,
    standard_current_zero,
    wigner_moyal,
    wigner_moyal_position,
)
from .efexample import (
    ExampleWidth,
    critical_width,
    example_sweep,
    husimi_slice,
    integral_I,
    scaled_effective_current,
)
from .maxflow import (
    ApparatusSpec,
    DiscretizedKernel,
    EigenResult,
    MaxflowWidth,
    assemble,
    feasibility,
    integrated_transfer,
    kernel_entry,
    max_backflow,
    max_backflow_via_time,
    time_resolved_current,
    u_correction,
    varsigma_sweep,
)
from .results import SweepResult, SweepRow

__all__ = [
    "ApparatusSpec",
    "DiscretizedKernel",
    "EigenResult",
    "ExampleWidth",
    "MaxflowWidth",
    "MomentumState",
    "NoBracketError",
    "NonConvergenceError",
    "NonFiniteError",
    "PhasePoint",
    "PhysicalScales",
    "PrecisionSpec",
    "QuadratureGrid",
    "QuadratureNotConvergedError",
    "SweepResult",
    "SweepRow",
    "SymmetricMatrix",
    "assemble",
    "bisect",
    "bm_momentum_amplitude",
    "bm_position_amplitude",
    "critical_width",
    "erfc",
    "erfcx",
    "example_sweep",
    "feasibility",
    "gauss_legendre",
    "husimi",
    "husimi_slice",
    "integral_I",
    "integrated_transfer",
    "kernel_entry",
    "load_sampled_state",
    "max_backflow",
    "max_backflow_via_time",
    "phase_space_norm",
    "scaled_effective_current",
    "standard_current_zero",
    "sym_eig_max",
    "time_resolved_current",
    "u_correction",
    "varsigma_sweep",
    "wigner_moyal",
    "wigner_moyal_position",
]

__version__ = "0.1.0"
