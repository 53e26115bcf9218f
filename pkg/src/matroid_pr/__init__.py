"""Push-relabel solvers for matroid union, base packing and covering."""

from types import ModuleType as _ModuleType

from .augment import hybrid_exact_union
from .graphic import (
    apx_forest_union,
    graphic_run,
    max_forest_union,
    tree_covering_decision,
    tree_packing_decision,
)
from .matroid import (
    ExplicitMatroid,
    Graph,
    GraphicMatroid,
    PartitionMatroid,
    QueryCounter,
    UniformMatroid,
    circuit_element,
    rank,
    spans,
)
from .pack_cover import (
    decide_covering,
    decide_packing,
    exact_covering,
    exact_covering_number,
    exact_packing,
    exact_strength,
)
from .push_relabel import PushRelabel, apx_union, exact_union
from .reinforce import reinforce, reinforce_greedy
from .rounding import (
    RoundingConfig,
    apx_union_value_real,
    decide_covering_real,
    decide_membership,
    decide_strength,
    round_capacities,
    search_covering_number,
    search_strength,
)

__all__ = [n for n, v in dict(globals()).items() if not n.startswith("_") and not isinstance(v, _ModuleType)]
