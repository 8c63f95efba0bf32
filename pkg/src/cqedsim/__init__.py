"""Circuit-QED simulation toolkit: transmon-resonator Hamiltonians, Lindblad
dynamics, Jaynes-Cummings analytics and dispersive readout."""

from .circuits import (
    DriveParams,
    TransmonParams,
    coupled_duffing_hamiltonian,
    drive_term,
    jc_hamiltonian,
    transmon_frequencies,
)
from .dynamics import TimeGrid, collapse_set, evolve_master, evolve_schrodinger
from .errors import (
    ConfigError,
    ContractError,
    CQEDError,
    DimensionError,
    DomainError,
    RegimeWarning,
    StepSizeError,
    TruncationWarning,
)
from .jc import dispersive_shift, jc_block
from .operators import HamiltonianSpec, Operator, QuantumState

__version__ = "0.1.0"
