"""Primal-dual continuation solver for composite convex problems.

Thin python layer over the C++ core: linear operators with adjoints and
certified norm bounds, prox-simple convex functions, the continuation
primal-dual iteration with penalty-parameter schedules, trade-off frontier
validators and the desk-scale deblurring experiment driver.
"""

from ._core import (  # noqa: F401
    CertificateReport,
    ConvexityViolation,
    GridSpec,
    InexactnessReport,
    IterateState,
    LinearMap,
    MonotoneViolation,
    NormBound,
    ParamSchedule,
    ParetoRecord,
    ProblemSpec,
    ProxFunction,
    Schedule,
    SmoothTerm,
    Snapshot,
    StepCheck,
    StepSizes,
    TraceConfig,
    Trajectory,
    TrajectoryRow,
    __version__,
    certify,
    check_convex,
    check_monotone,
    compute_report,
    default_steps,
    dual_function_oracle,
    dual_inclusion_gap,
    estimate_M1,
    fixed_point_residual,
    initial_state,
    m_norm,
    moreau_conjugate_prox,
    norm_bound,
    pd_step,
    pd_step_dual_first,
    power_iteration_norm,
    prox_oracle,
    record,
    records_from,
    run,
    run_experiment,
    run_fixed,
    sample_conjugate_domain,
    subgradient_check,
    validate_records,
    validate_steps,
    value_function_oracle,
    write_trajectory_csv,
)
