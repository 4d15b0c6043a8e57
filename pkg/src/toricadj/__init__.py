"""Exact intersection theory and adjoint-series classification on smooth toric surfaces."""
from .adjoint import AdjointReport, Witness, WitnessKind, bpf_witnesses, ample_witnesses, classify, fujita_check
from .enumeration import CampaignConfig, enumerate_ample, enumerate_box_polygons, generate_surfaces, run_campaign
from .errors import *  # noqa: F401,F403  (re-exported)
from .fan import CompleteFan, blow_up, fan_from_rays, is_smooth, normal_fan, seed_hirzebruch, seed_p1xp1, seed_p2
from .intersection import (
    TorusDivisor,
    adjoint_numbers,
    canonical_divisor,
    degree_on_curve,
    intersect,
    intersection_table,
    is_ample,
    is_nef,
    polytope_of_divisor,
    prime_divisor,
)
from .lattice import LatticePolygon, canonical_form, convex_hull, count_points, normalized_volume

__version__ = "0.1.0"
