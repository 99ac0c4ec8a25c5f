"""Computational toolkit for the volume product of origin-symmetric 3D
polytopes: exact and floating polytope kernels, polar duality, symmetric
shadow systems with certified persistence, admissible-speed dimension
bounds, minimizer classification, and a volume-product descent optimizer.
"""

from . import errors
from .combinatorics import (AFFINE_OCTAHEDRON, EXCLUDED, PARALLELEPIPED,
                            DimensionReport, MinimizerClassification, c_theta,
                            classify_minimizer_candidate, dimension_bound,
                            generic_direction, in_plane_direction)
from .geometry import (DOUBLE, RATIONAL, ConvexPolytope, FaceLattice,
                       SymPolytope, build_polytope, build_sym_polytope,
                       face_lattice, from_representatives, linear_image,
                       load_polytope, same_labeled_lattice, save_polytope,
                       snap_to_rational, to_double, volume)
from .optimizer import (DescentConfig, DescentStep, DescentTrace,
                        corpus_verify, descend, random_symmetric_polytope)
from .polarity import (MAHLER_BOUND, VolumeProductReport, polar,
                       santalo_point, santalo_polar,
                       verify_incidence_duality, volume_product)
from .shadow import (Direction, ShadowSystem, SpeedSpace, SpeedVector,
                     admissibility_residual, admissible_space,
                     check_inverse_polar_convexity, check_volume_affine,
                     deform, direction, is_trivial, nontrivial_component,
                     persistence_interval, shadow_system, speed_vector,
                     trivial_speed)

__version__ = "1.0.0"

__all__ = [
    "AFFINE_OCTAHEDRON", "EXCLUDED", "PARALLELEPIPED", "ConvexPolytope",
    "DOUBLE", "DescentConfig", "DescentStep", "DescentTrace",
    "DimensionReport", "Direction", "FaceLattice", "MAHLER_BOUND",
    "MinimizerClassification", "RATIONAL", "ShadowSystem", "SpeedSpace",
    "SpeedVector", "SymPolytope", "VolumeProductReport",
    "admissibility_residual", "admissible_space", "build_polytope",
    "build_sym_polytope", "c_theta", "check_inverse_polar_convexity",
    "check_volume_affine", "classify_minimizer_candidate", "corpus_verify",
    "deform", "descend", "dimension_bound", "direction", "errors",
    "face_lattice", "from_representatives", "generic_direction",
    "in_plane_direction", "is_trivial", "linear_image", "load_polytope",
    "nontrivial_component", "persistence_interval", "polar",
    "random_symmetric_polytope", "same_labeled_lattice", "santalo_point",
    "santalo_polar", "save_polytope", "shadow_system", "snap_to_rational",
    "speed_vector", "to_double", "trivial_speed", "verify_incidence_duality",
    "volume", "volume_product", "__version__",
]
