"""Numerical lab for best constants of non-commutative martingale inequalities
on the triangular (upper-corner) filtration of n x n matrices."""

from .constants import (
    GrowthFit,
    InequalityKind,
    adversarial_search,
    growth_fit,
    hilbert_witness,
    ratio,
    replay,
)
from .estimate import ConstantEstimate, SolverOptions
from .filtration import FiltrationSpec, Kind, MartingaleSeq, increments, transform
from .hardy import hardy_max_norm_pos, hardy_norm, hardy_norm_high, hardy_norm_low
from .matcore import INF, Side, schatten_norm, singular_values, sq_fn_norm, weak_l1_norm
from .triproj import hilbert_matrix, triangular, triproj_norm_estimate

__version__ = "0.1.0"
