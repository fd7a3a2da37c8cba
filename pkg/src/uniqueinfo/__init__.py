"""Decomposition of the information two sources carry about a target.

Splits MI(X:(Y,Z)) into shared, unique (per source) and synergistic parts
by convex optimization over the polytope of joint distributions with the
same (X,Y) and (X,Z) pair marginals, with certified optimality.
"""

from .dist import Alphabet, JointDistribution, PairMarginals, from_table
from .polytope import (
    FeasiblePoint,
    GammaDirection,
    SliceSpec,
    apply_direction,
    basis,
    feasible_steps,
    membership,
    product_point,
    slice_decompose,
    transport_vertex,
)
from .solver import (
    SolverConfig,
    SolverResult,
    check_critical,
    directional_derivative,
    grid_oracle,
    objective,
    solve,
)
from .decomposition import (
    Decomposition,
    blackwell_le,
    blackwell_witness,
    decompose,
    merge_variables,
    structured_shortcuts,
    unique_info_multi,
)
from .canonical import (
    CANONICAL_NAMES,
    DiceParams,
    SweepRow,
    canonical,
    copy_distribution,
    dice,
    dice_sweep,
    i_min,
)
from . import errors

__all__ = [
    "Alphabet",
    "JointDistribution",
    "PairMarginals",
    "from_table",
    "FeasiblePoint",
    "GammaDirection",
    "SliceSpec",
    "apply_direction",
    "basis",
    "feasible_steps",
    "membership",
    "product_point",
    "slice_decompose",
    "transport_vertex",
    "SolverConfig",
    "SolverResult",
    "check_critical",
    "directional_derivative",
    "grid_oracle",
    "objective",
    "solve",
    "Decomposition",
    "blackwell_le",
    "blackwell_witness",
    "decompose",
    "merge_variables",
    "structured_shortcuts",
    "unique_info_multi",
    "CANONICAL_NAMES",
    "DiceParams",
    "SweepRow",
    "canonical",
    "copy_distribution",
    "dice",
    "dice_sweep",
    "i_min",
    "errors",
]

__version__ = "0.1.0"
