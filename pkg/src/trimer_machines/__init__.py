"""Exact thermodynamics and reversible quantum cycles of a Cu3-like spin-1/2 trimer."""

from .cycles import (
    CycleResult,
    OperationMode,
    StrokeRecord,
    carnot_cycle,
    classify_mode,
    efficiency_and_kappa,
    otto_cycle,
    run_cycle,
    stirling_cycle,
)
from .eigensolver import Spectrum, diagonalize
from .errors import (
    ConvergenceError,
    DomainError,
    NoRootError,
    NumericalError,
    ParameterError,
    UnknownPresetError,
    ValidationError,
)
from .spin_model import (
    BondExchange,
    CompoundParams,
    DMVector,
    GTensor,
    MagneticField,
    build_hamiltonian,
    preset,
    spin_operator,
)
from .sweep import GridAxis, SweepResult, export_csv, export_pgm, sweep_b0_b1, sweep_b1_th
from .thermodynamics import (
    ThermoPoint,
    boltzmann,
    entropy,
    internal_energy,
    isentropic_field,
    isentropic_temperature,
    log_partition,
    thermo_point,
    trace_isentrope,
)

__version__ = "0.1.0"
