"""Site percolation experiments on negatively curved planar graph patches.

Combinatorial planar embeddings (rotation systems) with face tracing and
exact curvature / angle-sum checks; {p,q} tiling generators; self-avoiding
turn-rule walks; embedded degree-3/4 trees and chandeliers; matching (star)
adjacency; reproducible Bernoulli site percolation with union-find cluster
analysis; and the sharp-threshold phi machinery with subcritical
certificates and exponential-decay fits.
"""

from ._kernels import BACKEND
from .planar import (CyclePatch, FaceRecord, RotationGraph, curvature,
                     curvature_coefficient, euler_patch_check,
                     gauss_bonnet_deficit, load_graph, save_graph,
                     shortest_path, trace_faces)
from .tiling import (TilingSpec, build_ball, build_path, build_reference_tree,
                     build_square, build_star)
from .walks import WalkRule, faces_between, turn_walk
from .matching import MatchingGraph, matching_graph, star_neighborhood
from .embedded_tree import (Chandelier, TreeEmbedding, build_chandelier,
                            chandelier_sequence, grow_tree, tree_pc)
from .percolation import (ClusterLabeling, Configuration,
                          boundary_cluster_count, exact_connection_poly,
                          label_clusters, outer_boundary, sample, two_point)
from .critical import (DecayFit, PhiRegion, decay_fit, phi,
                       russo_inequality_check, subcritical_certificate,
                       theta_lower_bound)

__version__ = "0.1.0"
