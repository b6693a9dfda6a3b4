"""Certified covering functionals, Banach-Mazur bounds and diameter partitions of convex bodies."""

__version__ = "0.1.0"

from .banach_mazur import bm_distance_upper
from .betanet import (CapCover, NetParams, SnapResult, cap_cover, f_bound, net_cardinality_log_bound,
                      net_params, radial_grid, snap_to_net)
from .bodies import (AffineImage, Cone, ConvexBody, DegenerateBodyError, HPolytope, LpBall, Polytope,
                     ReuleauxPolygon, VPolytope, body_from_json, convert)
from .borsuk import (PartitionResult, PointCloud, conflict_colorable, constant_width_radii_check,
                     hausdorff_distance, mu_n, phi_upper, reuleaux_polygon)
from .budget import SearchBudget
from .covering import (CoverCertificate, CoverConfig, SearchResult, arc_covered, beta_for_gap,
                       cone_cover_thm1, gamma_upper, levi_c, lpball_cover_thm2, rogers_zong_bound,
                       thm2_inequalities, verify_cover, volume_lower_bound)
from .geometry import diameter, euclidean_radii, volume
from .hexagon import AffineHexagon, inscribe_affine_hexagon
from .john import AffineCert, Ellipsoid, john_normalize, lowner_ellipsoid

gauge = ConvexBody.gauge
support = ConvexBody.support
