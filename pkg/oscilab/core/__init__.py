from .bounds import BoundCertificate, BoundQuery, certify_coefficient_bound, theorem1_bound, within_bound
from .config import Config
from .counterexample import (
    ClosedFormState,
    CounterexampleSpec,
    LinearSystem,
    build_complex_spec,
    build_spec,
    build_system,
    certified_zero_count,
    choose_lambda,
    choose_lambda_complex,
    closed_form,
)
from .errors import *  # noqa: F401,F403
from .ode import (
    DenseSolution,
    IntegratorConfig,
    ZeroCountReport,
    count_hyperplane_crossings,
    count_sign_changes,
    integrate_linear,
    integrate_scalar_ode,
    refine_zero,
)
from .polynomial import (
    Enclosure,
    Polynomial,
    antidifferentiate,
    differentiate,
    evaluate,
    from_roots,
    sturm_count,
    sup_abs_on_disk,
    sup_abs_on_interval,
)
