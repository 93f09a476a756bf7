"""Quantum thermodynamic ledgers for driven and open few-level systems.

The package splits first-law bookkeeping (energy, two notions of work,
two notions of heat) from trajectory-resolved measures (irreversible
entropy, information backflow, charging power and its coherent part),
with a validated linear-algebra core underneath and two worked battery
models on top.
"""

from .qcore import (
    DensityMatrix,
    HermitianOperator,
    NumericError,
    PropertyViolation,
    PureState,
    QuantumChannel,
    ValidationError,
    apply_channel,
    hermitian_eig,
    hermitian_eigvals,
    matrix_from_json,
    matrix_log_hermitian,
    matrix_to_json,
    partial_trace,
    partial_trace_stack,
    tensor,
)
from .thermo import (
    GibbsSpec,
    ThermoLedger,
    adiabatic_work_gibbs,
    adiabatic_work_passive,
    delta_S_ir,
    delta_S_r,
    ergotropy,
    extractable_work,
    first_law_ledger,
    free_energy,
    gibbs_state,
    heat,
    operational_heat,
    passive_state,
    relative_entropy,
    von_neumann_entropy,
)
from .measures import (
    CSV_HEADER,
    MeasureSeries,
    Trajectory,
    charging_power_series,
    coherence,
    coherent_power_series,
    dephase,
    format_csv,
    incoherent_power_series,
    irreversible_entropy_series,
    measure_series,
    non_markovianity_series,
    read_csv,
    write_csv,
)
from .dynamics import GridSpec, LindbladSpec, lindblad_evolve, schrodinger_evolve
from .models import (
    Example1Params,
    Example2Params,
    example1_amplitude,
    example1_pseudomode_oracle,
    example2_build,
    run_example1,
    run_example2,
)
from .sampling import (
    gibbs_preserving_channel,
    ground_damping_channel,
    random_channel,
    random_density,
    random_hermitian,
    random_pure,
    spectral_span_bound,
)
from .svg import line_plot

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "DensityMatrix",
    "Example1Params",
    "Example2Params",
    "GibbsSpec",
    "GridSpec",
    "HermitianOperator",
    "LindbladSpec",
    "MeasureSeries",
    "NumericError",
    "PropertyViolation",
    "PureState",
    "QuantumChannel",
    "ThermoLedger",
    "Trajectory",
    "ValidationError",
    "adiabatic_work_gibbs",
    "adiabatic_work_passive",
    "apply_channel",
    "charging_power_series",
    "coherence",
    "coherent_power_series",
    "delta_S_ir",
    "delta_S_r",
    "dephase",
    "ergotropy",
    "example1_amplitude",
    "example1_pseudomode_oracle",
    "example2_build",
    "extractable_work",
    "first_law_ledger",
    "format_csv",
    "free_energy",
    "gibbs_preserving_channel",
    "gibbs_state",
    "ground_damping_channel",
    "heat",
    "hermitian_eig",
    "hermitian_eigvals",
    "incoherent_power_series",
    "irreversible_entropy_series",
    "line_plot",
    "lindblad_evolve",
    "matrix_from_json",
    "matrix_log_hermitian",
    "matrix_to_json",
    "measure_series",
    "non_markovianity_series",
    "operational_heat",
    "partial_trace",
    "partial_trace_stack",
    "passive_state",
    "random_channel",
    "random_density",
    "random_hermitian",
    "random_pure",
    "read_csv",
    "relative_entropy",
    "run_example1",
    "run_example2",
    "schrodinger_evolve",
    "spectral_span_bound",
    "tensor",
    "von_neumann_entropy",
    "write_csv",
]
