from .model import MeromorphicModel, PoleSpec, taylor_coefficients
from .pade import pade_approximant, pade_poles
from .precision import PrecisionOptions
from .region import sample_NF, scan_region, trace_boundaries
from .rowtheory import TorusSpec, analyze_poles, compute_cj, predicted_limit_poles
from .verify import (
    CompactSetSpec,
    convergence_experiment,
    pole_limit_experiment,
    subsequence_experiment,
)
