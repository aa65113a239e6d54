"""Exact minimum error probability of Bayesian M-ary hypothesis testing and
the converse bounds derived from it, over finite alphabets."""

from .binary_ht import (
    NPSolution,
    alpha_beta,
    bayes_binary_error,
    poor_verdu_lemma_bound,
    relaxation_bound,
    type0_error,
    type1_error,
)
from .measures import (
    FiniteMeasure,
    JointDistribution,
    RandomizedKernel,
    ValidationError,
    Violation,
    marginals,
    product,
    validate,
)
from .mary_ht import (
    MapSolution,
    counting_meta_converse,
    decoder_error,
    decoder_meta_converse,
    decoder_spectrum_bound,
    map_solve,
    max_metric_decoder,
    metric_auxiliary,
    product_meta_converse,
    spectrum_bound,
)

__version__ = "0.1.0"
