"""gdacube: min-max fixed-point instances on the hypercube, built from circuits and linear VIs."""

from .decoder import (
    AuditError,
    DichotomyReport,
    Inconclusive,
    LemmaAudit,
    LinViWitness,
    NotStationaryError,
    PcAssignment,
    decode,
    dichotomy_check,
    lemma_audit,
)
from .gates import (
    distance_threshold,
    distance_threshold_prime,
    nor_gate,
    nor_gate_prime,
    purify_gate,
    purify_gate_prime,
)
from .lin_vi import LinVIInstance, SlackReport, brute_force_solve, check_solution, gen_random
from .pure_circuit import (
    Assignment,
    PureCircuitInstance,
    Trit,
    gen_example,
    validate_instance,
    verify_assignment,
)
from .reduction import (
    Bounds,
    CapExceededError,
    GdaInstance,
    GdaParams,
    JointPoint,
    NodeDiagnostics,
    ValidationError,
    build_instance,
    diagnostics,
    eval_f,
    eval_grad,
    eval_grad_direct,
    finite_diff_grad,
    paper_params,
    parameter_premises,
)
from .solver import (
    SolverConfig,
    SolverResult,
    StationarityReport,
    check_stationary,
    extragradient,
    grid_search,
    projected_gda,
)

__version__ = "0.1.0"
