"""Spectral geometry of polygons: forward spectra, heat invariants and inverse problems."""
from .exact_spectra import Spectrum, bessel_zero, disk_spectrum, rectangle_spectrum, string_spectrum, weyl_ratio
from .heat_trace import HeatInvariants, corner_term, fit_heat_invariants, geometric_heat_invariants, truncated_heat_trace
from .inverse_hearing import (NotInClassError, detect_regular, hear_acute_trapezoid, hear_parallelogram,
                              solve_angle_system, uniqueness_scan)
from .isoperimetric import edge_translate, f_first_variation, maximize_f, steiner_side_equalize
from .mesh_fem import dirichlet_eigenvalues, fundamental_gap, rayleigh_quotient, triangulate
from .polygon import (ParallelogramParams, Polygon, TrapezoidParams, congruent, extents, make_regular_ngon,
                      measurements, shape_functional)
from .billiards import bouncing_ball_length, search_triangular_orbits, shortest_closed_geodesic

__version__ = "0.1.0"
