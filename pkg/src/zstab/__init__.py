"""Zero-stability toolkit for explicit multistep schemes.

Analyze the root condition and consistency of multistep discretizations,
generate the lambda-parameterized three-step family, integrate
initial-value problems, and simulate noisy deep feature propagation to
observe the divergence behavior that zero stability predicts.
"""

from .polyroots import (
    Polynomial,
    RootFindingError,
    RootSet,
    cluster_multiplicities,
    companion_power_modulus,
    find_roots,
)
from .schemes import (
    ConsistencyReport,
    Scheme,
    StabilityReport,
    characteristic_polynomial,
    companion_spectral_radius,
    consistency_check,
    first_order,
    lm_second_order,
    make_scheme,
    root_condition,
)
from .zerosnet import (
    OPTIMAL_LAMBDA,
    RegionScan,
    closed_form_roots,
    derive_from_pair,
    in_stability_region,
    max_nonprincipal_modulus,
    scan_region,
    zerosnet_coeffs,
)
from .ivp import (
    DivergenceSeries,
    IVPProblem,
    OrderEstimate,
    Trajectory,
    constant_problem,
    convergence_order,
    decay_problem,
    integrate,
    oscillator_problem,
    startup_states,
    zero_stability_probe,
)
from .propagation import (
    BlockMap,
    NoiseSpec,
    PropagationReport,
    SweepReport,
    growth_rate,
    inject_noise,
    lipschitz_estimate,
    make_block,
    propagate,
    robustness_sweep,
)
from .table8 import REFERENCE_ROWS, verify_reference_table

__version__ = "0.1.0"
