"""Self-similar polygonal tilings driven by generating pairs and symbol streams."""

__version__ = "0.1.0"

from .addresses import ThetaStream, frontier, inverse_prefix, map_of, parse_stream, weight
from .catalog import catalog
from .density import build_matrix, empirical_densities, limit_densities
from .geometry import Polygon, Similitude, Tolerance
from .pairs import GeneratingPair, check_reducible, infer_exponents, solve_scale, validate_pair
from .tiling import (
    Disk,
    check_nested,
    check_self_similar,
    conjugated_self_similarity,
    congruence_motion,
    fills_plane_certificate,
    generate_window,
    make_tile,
    patch,
    prototiles,
    quasiperiodicity_probe,
)

__all__ = [
    "Disk",
    "GeneratingPair",
    "Polygon",
    "Similitude",
    "ThetaStream",
    "Tolerance",
    "build_matrix",
    "catalog",
    "check_nested",
    "check_reducible",
    "check_self_similar",
    "conjugated_self_similarity",
    "congruence_motion",
    "empirical_densities",
    "fills_plane_certificate",
    "frontier",
    "generate_window",
    "infer_exponents",
    "inverse_prefix",
    "limit_densities",
    "make_tile",
    "map_of",
    "parse_stream",
    "patch",
    "prototiles",
    "quasiperiodicity_probe",
    "solve_scale",
    "validate_pair",
    "weight",
]
