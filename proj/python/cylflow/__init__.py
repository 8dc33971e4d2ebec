"""Python access to the cylflow library (rescaled mean curvature flow near cylinders)."""

from ._core import (
    CriterionResult,
    CylflowError,
    ShrinkerSpec,
    __version__,
    c1_profile,
    criterion_names,
    hermite_eval,
    make_shrinker,
    mode_eigenvalue,
    neutral_gamma,
    perturb_ode,
    regularization_time,
    riccati_closed_form,
    run_criterion,
    run_scenario,
    semigroup_at,
    sphere_extinction,
    triple_product,
    velazquez_factor,
)

__all__ = [
    "CriterionResult",
    "CylflowError",
    "ShrinkerSpec",
    "__version__",
    "c1_profile",
    "criterion_names",
    "hermite_eval",
    "make_shrinker",
    "mode_eigenvalue",
    "neutral_gamma",
    "perturb_ode",
    "regularization_time",
    "riccati_closed_form",
    "run_criterion",
    "run_scenario",
    "semigroup_at",
    "sphere_extinction",
    "triple_product",
    "velazquez_factor",
]
