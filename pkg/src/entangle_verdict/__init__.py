"""Entanglement verdicts for two-qubit polarization states.

Peres partial-transpose test, the closed-form condition and explicit
product-state decomposition for X-form density matrices, plus the
tomography and simulation needed to run them on coincidence data.
"""

from .entanglement import (
    PptReport,
    SeparableDecomposition,
    Subsystem,
    Verdict,
    concurrence_x,
    negativity,
    partial_transpose,
    ppt_verdict,
    separable_decomposition,
    verify_decomposition,
    x_entanglement_condition,
)
from .linalg import hermitian_eigen, kron, max_entry_distance, trace_distance
from .report import AnalysisOptions, VerdictReport, analyze
from .simulate import (
    Regime,
    SimulationPlan,
    ideal_counts,
    random_density_matrix,
    random_x_state,
    sample_counts,
)
from .states import (
    BlochVector,
    DensityMatrix,
    XStateParams,
    bloch_state,
    fit_x_state,
    validate_density,
    x_state_to_density,
)
from .tomography import (
    CoincidenceRecord,
    MeasurementSetting,
    linear_reconstruct,
    predicted_probability,
    project_to_physical,
    standard_settings_16,
)

__version__ = "0.1.0"
