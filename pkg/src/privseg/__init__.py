"""Attainable consumer/producer utilities of market segmentation when the
seller only sees a masked version of each segment."""

from .analysis import (
    Diagnostics,
    crossing_condition,
    diagnose,
    dp_epsilon_ratio,
    extrema_curves,
    max_producer_monotone,
    min_consumer_monotone,
    min_producer_sprime,
    privacy_leakage,
    prop7_case,
    q_inclusion,
)
from .geometry import (
    PolytopeLP,
    SurplusPolygon,
    build_polytope,
    k2_sprime_triangle,
    k2_theorem1_triangle,
    project_polygon,
    project_sprime,
    surplus_objective,
    surplus_set,
)
from .lp import LinearProgram, LpSolution, NumericalError, solve, solve_exact
from .measure import McEstimate, ShiftVector, region_probabilities, shift_vector
from .model import Market, Segmentation, SurplusPoint, ValueGrid, total_surplus, uniform_monopoly
from .oracle import GridCloud, containment_report, enumerate_cloud
from .pricing import PricingRegions, bar_beta_all, optimal_price_set, polytope_row_feasible, threshold_tstar
from .segmentation import (
    PricedSegmentation,
    build_segmentation,
    first_degree_segmentation,
    k2_expected_utilities,
    merge_to_canonical,
)
from .simulation import SimReport, simulate, simulate_branch

__version__ = "0.1.0"

__all__ = [
    "Diagnostics",
    "GridCloud",
    "LinearProgram",
    "LpSolution",
    "Market",
    "McEstimate",
    "NumericalError",
    "PolytopeLP",
    "PricedSegmentation",
    "PricingRegions",
    "Segmentation",
    "ShiftVector",
    "SimReport",
    "SurplusPoint",
    "SurplusPolygon",
    "ValueGrid",
    "bar_beta_all",
    "build_polytope",
    "build_segmentation",
    "containment_report",
    "crossing_condition",
    "diagnose",
    "dp_epsilon_ratio",
    "enumerate_cloud",
    "extrema_curves",
    "first_degree_segmentation",
    "k2_expected_utilities",
    "k2_sprime_triangle",
    "k2_theorem1_triangle",
    "max_producer_monotone",
    "merge_to_canonical",
    "min_consumer_monotone",
    "min_producer_sprime",
    "optimal_price_set",
    "polytope_row_feasible",
    "privacy_leakage",
    "project_polygon",
    "project_sprime",
    "prop7_case",
    "q_inclusion",
    "region_probabilities",
    "shift_vector",
    "simulate",
    "simulate_branch",
    "solve",
    "solve_exact",
    "surplus_objective",
    "surplus_set",
    "threshold_tstar",
    "total_surplus",
    "uniform_monopoly",
]
