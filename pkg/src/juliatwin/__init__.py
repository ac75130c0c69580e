"""Rational-map dynamics on the Riemann sphere and maps sharing a Julia set."""
from .errors import (CoprimalityError, DegreeBudgetError, JuliaTwinError, MapFormatError,
                     ModeMismatchError, NotParabolicError, RootFinderError)
from .poly import Poly
from .ratmap import (RatMap, SpherePoint, chebyshev, compose, critical_points, derivative,
                     evaluate, example_pair, iterate, maps_equal, mobius_conjugate, parse_map,
                     power_map)
from .scalars import QI
from .spectrum import OrbitRecord, classify_multiplier, nonrepelling_census, periodic_points
from .julia import PointCloud, hausdorff_distance, inverse_iteration_sample, same_julia_test
from .funceq import FunEqWitness, commute_check, compose_word, search_functional_equation
from .localdyn import (ParabolicData, PetalSpec, PowerSeries, fatou_coordinate, koenigs_series,
                       normalize_alpha, parabolic_data)
from .geometry import (arc_or_circle_verdict, circle_fit, classify_pair, lamination_probe,
                       tangent_cone_directions)

__version__ = "0.1.0"

__all__ = [
    "CoprimalityError",
    "DegreeBudgetError",
    "FunEqWitness",
    "JuliaTwinError",
    "MapFormatError",
    "ModeMismatchError",
    "NotParabolicError",
    "OrbitRecord",
    "ParabolicData",
    "PetalSpec",
    "PointCloud",
    "Poly",
    "PowerSeries",
    "QI",
    "RatMap",
    "RootFinderError",
    "SpherePoint",
    "arc_or_circle_verdict",
    "chebyshev",
    "circle_fit",
    "classify_multiplier",
    "classify_pair",
    "commute_check",
    "compose",
    "compose_word",
    "critical_points",
    "derivative",
    "evaluate",
    "example_pair",
    "fatou_coordinate",
    "hausdorff_distance",
    "inverse_iteration_sample",
    "iterate",
    "koenigs_series",
    "lamination_probe",
    "maps_equal",
    "mobius_conjugate",
    "nonrepelling_census",
    "normalize_alpha",
    "parabolic_data",
    "parse_map",
    "periodic_points",
    "power_map",
    "same_julia_test",
    "search_functional_equation",
    "tangent_cone_directions",
]
