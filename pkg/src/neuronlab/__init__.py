"""Numerical laboratory for single-neuron teacher-student learning."""

from .activations import (
    Activation,
    make_absolute,
    make_identity,
    make_leaky_relu,
    make_periodic,
    make_relu,
    make_sigmoid,
    make_softplus,
    parse_activation,
)
from .distributions import (
    AdversarialDataset,
    InputDistribution,
    adversarial_instance,
    gaussian,
    marginal_2d,
    parse_distribution,
    spread_params_for_gaussian,
    uniform_ball,
    uniform_sphere,
)
from .harness import (
    ExperimentSpec,
    RunManifest,
    builtin_fig1,
    builtin_registry,
    emit_plot_data,
    gaussian_certificate,
    get_spec,
    run_experiment,
)
from .objective import (
    GradEstimate,
    Problem,
    angle_between,
    finite_difference_gradient,
    gradient_closed_form_gaussian_relu,
    loss_closed_form_gaussian_relu,
    population_gradient_exact_discrete,
    population_gradient_mc,
    population_loss_exact_discrete,
    population_loss_mc,
    stochastic_gradient,
)
from .optimize import (
    Initializer,
    OptimizerConfig,
    Trajectory,
    fixed,
    gaussian_isotropic,
    initialize,
    product_uniform,
    run_gd,
    run_gradient_flow,
    run_sgd,
    zero,
)
from .theory import (
    RateConstants,
    SpreadCertificate,
    TheoremReport,
    check_adversarial_failure,
    check_angle_monotone,
    check_correlation,
    check_flow_rate,
    check_gd_rate,
    check_norm_safe_region,
    check_pie_slice_bound,
    check_sgd_convergence,
    check_strict_monotone_rate,
    check_variance_collapse,
    correlation_bound,
    gradient_variance_experiment,
    pie_slice_integral,
    pie_slice_lower_bound,
    rate_constants,
)

__version__ = "0.1.0"
