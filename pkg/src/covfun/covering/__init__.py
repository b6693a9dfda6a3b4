"""Coverings by homothets: verification, search and explicit constructions."""

from .constructions import (arc_covered, base_slice_translates, beta_for_gap, cone_cover_thm1,
                            cube_octant_config, known_config, levi_c, lpball_cover_thm2,
                            rogers_zong_bound, thm2_equality_at_2, thm2_inequalities,
                            thm2_inequality_values)
from .search import SearchResult, gamma_chain, gamma_upper, sample_body, volume_lower_bound
from .verify import (COVERED, DELTA_MAX, TAU_COV, UNCOVERED, UNKNOWN, CoverCertificate, CoverConfig,
                     outer_fan_simplex, trivial_certificate, verify_cover)
