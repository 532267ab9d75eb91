"""Lower and upper bounds on prioritized risk."""

from .divergences import (dataset_tv_exact, information_upper, kl_bernoulli, kl_categorical,
                          mutual_information_upper, tv_exact, tv_product_exact, tv_product_upper)
from .errors import (DegenerateIndexSet, DomainError, EmptyActionSet, EnumerationTooLarge,
                     InvalidPacking, NonFiniteSupport, PriorBoundsError, UnsupportedMetric)
from .estimation import (BoundResult, assouad_bound, fano_bound, lambda_from_prior, lecam_bound,
                         lecam_optimize, logistic_closed_form, reduction_check)
from .experiments import (CurveSeries, bernoulli_experiment, logistic_experiment,
                          upper_bound_experiment, zipf_experiment)
from .families import Bernoulli, Categorical, DistributionFamily, LogisticLabels, Zipf
from .gfano import GFanoInstance, gfano_bayes_lower, gfano_prioritized_lower, rho_star
from .grid import ParamGrid, beta_prior, gaussian_bump, parse_prior, uniform_prior
from .learners import Learner, beta_posterior_mean, constant_learner, empirical_mean_learner
from .losses import ABSOLUTE, L1, LossMatrix, Pseudometric
from .oracle import (FiniteInstance, bayes_risk_exact, mutual_information_exact,
                     optimal_test_error, prioritized_risk_enumerated)
from .packing import HammingSeparation, Packing, scaled_hypercube, verify_hamming_separation, verify_packing
from .risk import MonteCarlo, learner_prioritized_risk, risk_exact, risk_mc
from .svg import emit_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
