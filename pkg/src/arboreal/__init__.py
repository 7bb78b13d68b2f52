"""Universal groups with prescribed local action on regular trees.

Portraits of tree automorphisms, Cartan-type decompositions, parabolic
subgroups with their modular function, and finite-depth experiments on
matrix-coefficient bounds for parabolically induced representations.
"""

__version__ = "0.1.0"

from .tree import BoundaryPoint, Edge, dist, geodesic, half_tree_contains, ray_vertex  # noqa: E402
from .local_action import LocalGroup, dihedral_group, symmetric_group  # noqa: E402
from .automorphism import Portrait, build_hyperbolic, classify, fixes_boundary_point  # noqa: E402
from .parabolic import Kind, ParabolicSpec, minimal_hyperbolic, modular_value  # noqa: E402
from .decomposition import canonical_double_coset_rep, kak_decompose  # noqa: E402
from .cosets import enumerate_cosets, solve_cells  # noqa: E402
from .numerics import (DecayConfig, RhoFunction, bound_integral, decay_experiment,  # noqa: E402
                       sn_sequence)

__all__ = [
    "BoundaryPoint", "DecayConfig", "Edge", "Kind", "LocalGroup", "ParabolicSpec", "Portrait",
    "RhoFunction", "bound_integral", "build_hyperbolic", "canonical_double_coset_rep", "classify",
    "decay_experiment", "dihedral_group", "dist", "enumerate_cosets", "fixes_boundary_point",
    "geodesic", "half_tree_contains", "kak_decompose", "minimal_hyperbolic", "modular_value",
    "ray_vertex", "sn_sequence", "solve_cells", "symmetric_group",
]
