"""Exact Jaynes-Cummings dynamics and trace-distance measures of system-environment correlations."""

from .distance import (correlations, gibbs_correlations, helstrom_probability, outside_information,
                       trace_distance_qubit, trace_distance_total)
from .dynamics import dynamical_map, evolve_total, reduced_state_at, reduced_trajectory
from .experiments import (SweepTable, TimeGrid, distance_trajectory, gibbs_product_distance,
                          large_coupling_estimate, level_diagram, pure_state_asymptotic,
                          pure_state_bound, pure_state_distance_closed_form, supremum_over_time,
                          sweep, zero_temperature_correlations)
from .model import (ModelParams, critical_coupling, dressed_level, ground_level_index,
                    jc_coefficients, rabi_frequency)
from .numerics import hermitian_eigenvalues, hermitian_function, trace_norm_hermitian
from .states import (FieldState, QubitState, TotalState, gibbs_state, marginals, product_of_marginals,
                     product_state, pure_entangled)

__all__ = [
    "ModelParams", "QubitState", "FieldState", "TotalState", "TimeGrid", "SweepTable",
    "rabi_frequency", "jc_coefficients", "dressed_level", "critical_coupling", "ground_level_index",
    "hermitian_eigenvalues", "hermitian_function", "trace_norm_hermitian",
    "marginals", "product_state", "product_of_marginals", "pure_entangled", "gibbs_state",
    "reduced_state_at", "reduced_trajectory", "evolve_total", "dynamical_map",
    "trace_distance_qubit", "trace_distance_total", "correlations", "gibbs_correlations",
    "outside_information", "helstrom_probability",
    "distance_trajectory", "pure_state_distance_closed_form", "pure_state_asymptotic",
    "pure_state_bound", "gibbs_product_distance", "large_coupling_estimate", "supremum_over_time",
    "zero_temperature_correlations", "level_diagram", "sweep",
]
