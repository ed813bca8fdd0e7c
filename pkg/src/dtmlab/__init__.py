"""Finite cell models for deficient topological measures.

Build a space (``grid1d``, ``grid2d``, ``discrete``), a compact set function
on it (``setfn``), take its variations (``variation``), and verify, classify
and transform the resulting DTMs (``dtm``, ``classify``, ``constructions``).
"""
from .classify import (
                       caratheodory_test,
                       classify,
                       extend_to_measure,
                       outer_measure,
                       subadditivity_test,
                       tm_test,
)
from .constructions import (
                       CellMap,
                       closed_part,
                       extend_from_closed_subspace,
                       open_part,
                       pushforward,
                       restrict_to_closed,
                       restrict_to_open_subspace,
)
from .dtm import (
                       DeficientTM,
                       check_dtm_axioms,
                       extend_from_compacts,
                       regularity_suite,
                       smallest_dominating_certificate,
)
from .errors import (
                       CapacityError,
                       ClassificationError,
                       ConsistencyError,
                       DTMLabError,
                       ExtArithmeticError,
                       InputError,
                       ResolutionError,
)
from .extreal import INF, NEG_INF, format_value, parse_value
from .gallery import build_example, closed_form_variation, gallery, run_gallery
from .setfn import (
                       CellSum,
                       ComponentRule,
                       ComponentWeights,
                       PointCounting,
                       SolidIndicator,
                       TableFunction,
                       cell_sum,
                       counting,
                       from_descriptor,
                       lebesgue,
                       point_mass,
)
from .topology import Region, SpaceModel, build_space, discrete, grid1d, grid2d, path
from .variation import (
                       variation_identities_suite,
                       negative_variation,
                       positive_variation,
                       total_variation,
)

__version__ = "0.1.0"

__all__ = [
    "Region", "SpaceModel", "build_space", "discrete", "grid1d", "grid2d", "path",
    "CapacityError", "CellMap", "CellSum", "ClassificationError", "ComponentRule",
    "ComponentWeights", "ConsistencyError", "DTMLabError", "DeficientTM", "ExtArithmeticError",
    "INF", "InputError", "NEG_INF", "PointCounting", "ResolutionError", "SolidIndicator",
    "TableFunction", "build_example", "caratheodory_test", "cell_sum", "check_dtm_axioms",
    "classify", "closed_form_variation", "closed_part", "counting",
    "extend_from_closed_subspace", "extend_from_compacts", "extend_to_measure", "format_value",
    "from_descriptor", "gallery", "lebesgue", "variation_identities_suite", "negative_variation",
    "open_part", "outer_measure", "parse_value", "point_mass", "positive_variation",
    "pushforward", "regularity_suite", "restrict_to_closed", "restrict_to_open_subspace",
    "run_gallery", "smallest_dominating_certificate", "subadditivity_test", "tm_test",
    "total_variation", "__version__",
]
