"""clocksim: frequency-measurement precision of n two-level ions under
dephasing, for uncorrelated, maximally entangled, and symmetric partially
entangled preparations.
"""

__version__ = "0.1.0"

from .collective import (
    evolved_sx2_mean,
    evolved_sx_mean,
    evolved_sx_slope,
    genramsey_opt_uncertainty,
    genramsey_uncertainty,
    precision_bound_chain,
    solve_topt,
)
from .evolution import DephasingParams, dephase_evolve, drho_ddelta, master_equation_oracle
from .exceptions import (
    BracketingError,
    ClocksimError,
    DegenerateStateError,
    NoInformationError,
    OptimizationFailureError,
    SingularOutcomeError,
    SingularPointError,
)
from .fisher import QfiResult, basis_projectors, classical_fi, qfi, qfi_uncertainty, qfi_value
from .optimize import (
    ImprovementCurvePoint,
    OptimizationReport,
    OptimizerConfig,
    fig3_scan,
    fig4_curve,
    grid_oracle_improvement,
    minimize_over_t,
    optimize_symmetric_coeffs,
)
from .qstate import (
    MAX_QUBITS,
    CollectiveMoments,
    DensityMatrix,
    StateVector,
    SymmetricFamilyState,
    collective_moments,
    ghz,
    ghz_via_network,
    product_superposition,
    symmetric_state,
    to_density,
    uniform_coefficients,
)
from .ramsey import (
    ExperimentBudget,
    PrecisionResult,
    pipeline_signal,
    reference_limit,
    shot_variance,
    signal_ghz,
    signal_uncorrelated,
    uncertainty_ghz,
    uncertainty_uncorrelated,
)

__all__ = [
    "__version__",
    "MAX_QUBITS",
    "StateVector",
    "DensityMatrix",
    "SymmetricFamilyState",
    "CollectiveMoments",
    "DephasingParams",
    "ExperimentBudget",
    "PrecisionResult",
    "QfiResult",
    "OptimizerConfig",
    "OptimizationReport",
    "ImprovementCurvePoint",
    "ClocksimError",
    "SingularPointError",
    "DegenerateStateError",
    "NoInformationError",
    "SingularOutcomeError",
    "BracketingError",
    "OptimizationFailureError",
    "product_superposition",
    "ghz",
    "symmetric_state",
    "uniform_coefficients",
    "ghz_via_network",
    "collective_moments",
    "to_density",
    "dephase_evolve",
    "master_equation_oracle",
    "drho_ddelta",
    "signal_uncorrelated",
    "signal_ghz",
    "shot_variance",
    "uncertainty_uncorrelated",
    "uncertainty_ghz",
    "reference_limit",
    "pipeline_signal",
    "evolved_sx_mean",
    "evolved_sx2_mean",
    "evolved_sx_slope",
    "genramsey_uncertainty",
    "solve_topt",
    "genramsey_opt_uncertainty",
    "precision_bound_chain",
    "qfi",
    "qfi_value",
    "qfi_uncertainty",
    "classical_fi",
    "basis_projectors",
    "minimize_over_t",
    "optimize_symmetric_coeffs",
    "grid_oracle_improvement",
    "fig3_scan",
    "fig4_curve",
]
