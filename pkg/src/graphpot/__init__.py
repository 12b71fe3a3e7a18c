"""Discrete nonlinear potential theory on weighted graphs.

Capacities and parabolicity of ends, end potentials, bounded p-harmonic
functions on graphs with several hyperbolic ends, and numerical checks of
Sobolev-type inequalities on truncations of infinite graph families.
"""

__version__ = "0.1.0"

from .capacity import (Classification, CapacitySequence, Condenser, capacity,  # noqa: E402
                       capacity_sequence, classify, classify_ends, end_capacity_sequence,
                       end_potential, multi_end_harmonic, poincare_witness)
from .energy import (DirichletProblem, Potential, SolverConfig, p_energy,  # noqa: E402
                     p_laplacian, solve_dirichlet, verify_subharmonic)
from .families import FamilySpec, generate, glue_swap  # noqa: E402
from .graph import (End, Truncation, WeightedGraph, ball, double_of_end,  # noqa: E402
                    end_decomposition, volume)
from .inequalities import (SchrodingerSpec, SobolevParams, VolumeGrowthConstants,  # noqa: E402
                           check_lambda_volume_lower, lambda_ball_upper, rayleigh_lambda,
                           schrodinger_bottom, sobolev_glue_check, sobolev_upper_bound,
                           volume_growth_check, volume_growth_constants)

__all__ = [
    "FamilySpec", "generate", "glue_swap", "WeightedGraph", "Truncation", "End", "ball", "volume",
    "end_decomposition", "double_of_end", "SolverConfig", "DirichletProblem", "Potential",
    "p_energy", "p_laplacian", "solve_dirichlet", "verify_subharmonic", "Condenser", "capacity",
    "capacity_sequence", "end_capacity_sequence", "classify", "classify_ends", "Classification",
    "CapacitySequence", "poincare_witness", "end_potential", "multi_end_harmonic",
    "SobolevParams", "VolumeGrowthConstants", "SchrodingerSpec", "sobolev_upper_bound",
    "rayleigh_lambda", "check_lambda_volume_lower", "lambda_ball_upper",
    "volume_growth_constants", "volume_growth_check", "sobolev_glue_check", "schrodinger_bottom",
]
