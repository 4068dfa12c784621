"""Discrete conformal structures and exterior calculus on voxel surfaces."""

from .conformal import (ConformalStructure, compute_rho, estimate_normals, face_normals,
                        project_surfel, validate_structure)
from .dec import (Cochain, coboundary, form_type, function, hodge_star, is_holomorphic_form,
                  residue, type_decompose, wedge)
from .double_graph import DoubleGraph, boundary, build_double_graph
from .errors import *  # noqa: F401,F403
from .moves import (Hexagon, apply_flip, find_hexagon, flip_extend, flip_function,
                    star_triangle, triangle_from_star)
from .operators import (EnergyReport, SparseOperator, energies, laplacian_closed_complex,
                        laplacian_closed_real, laplacian_compositional, scalar_product,
                        scalar_product_weighted)
from .solver import (BoundaryCondition, SolveReport, harmonicity_report, parametrize,
                     solve_dirichlet)
from .surface import (Surfel, SurfelSurface, bicolor, euler_genus, extract_surface,
                      surface_from_surfels)

__version__ = "0.1.0"
