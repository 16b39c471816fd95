"""Discrete-time quantum walks on oriented graphs.

Each tessellation of the host graph contributes a local unitary
``exp(i theta (e^{i alpha} A_k + e^{-i alpha} A_k^T))``; one walk step applies
them in cover order.
"""

from .graph import (
    Family,
    InputError,
    LatticeSpec,
    OrientedGraph,
    Tessellation,
    TessellationCover,
    Tile,
    ValidationReport,
    build_oriented_lattice,
    build_oriented_line,
    file_family,
    lattice_family,
    line_family,
    transpose,
    validate_cover,
    validate_oriented,
    validate_tessellation,
)
from .operators import (
    LocalUnitary,
    WalkParams,
    evolution_step_plan,
    hamiltonian_block,
    involutory_hamiltonian,
    local_unitary,
)
from .simulator import RunResult, apply_local, distribution, evolve, step, sweep
from .transport import LatticeStats, LineStats, convergence_report, moments_1d, moments_2d

__version__ = "0.1.0"
