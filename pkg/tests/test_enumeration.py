import json

import numpy as np
import pytest

from toricadj import intersection
from toricadj.enumeration import (
    ALL_CHECKS,
    CampaignConfig,
    ample_box_oracle,
    batch_canonical_keys,
    batch_stats,
    box_polygon_arrays,
    box_polygon_classes,
    d4_reduce,
    enumerate_ample,
    enumerate_box_polygons,
    generate_surfaces,
    random_hulls,
    report_json,
    run_campaign,
    surface_catalog,
)
from toricadj.errors import BoxTooLarge, DegenerateInput, FlagError
from toricadj.fan import blow_up, fan_key, is_smooth, seed_hirzebruch, seed_p1xp1, seed_p2
from toricadj.intersection import IntersectionTable, intersect, is_ample
from toricadj.lattice import LatticePolygon, canonical_form, canonical_key, convex_hull, count_points, normalized_volume

SMALL = dict(max_blowups=1, max_hirzebruch_r=2, max_degree=20, box_size=3, pentagon_box=4, random_hulls=20)


def subset_hull_classes(box):
    """Independent oracle: hull every subset of the grid and dedup by canonical key."""
    grid = [(x, y) for x in range(box + 1) for y in range(box + 1)]
    hulls = set()
    for mask in range(1, 1 << len(grid)):
        pts = [grid[i] for i in range(len(grid)) if mask >> i & 1]
        if len(pts) < 3:
            continue
        try:
            hulls.add(convex_hull(pts).vertices)
        except DegenerateInput:
            pass
    return {canonical_key(LatticePolygon(v)) for v in hulls}


# ---- surfaces


def test_zero_blowups_gives_seeds():
    fans = list(generate_surfaces(CampaignConfig(max_blowups=0, max_hirzebruch_r=4)))
    assert [F.tag for F in fans] == ["P2", "P1xP1", "F1", "F2", "F3", "F4"]


def test_p2_blowup_collapses_onto_f1():
    cat = surface_catalog(1, 1)
    assert "P2/1" not in cat.counts
    assert cat.duplicates >= 1 and cat.non_isomorphic_collisions == []
    assert fan_key(blow_up(seed_p2(), 0)) == fan_key(seed_hirzebruch(1))


def test_surface_counts_are_stable_and_smooth():
    a, b = surface_catalog(3, 4), surface_catalog(3, 4)
    assert a.counts == b.counts
    assert [F.rays for F in a.fans] == [F.rays for F in b.fans]
    assert len({fan_key(F) for F in a.fans}) == len(a.fans)
    assert all(is_smooth(F) and sum(F.b) == 3 * F.n - 12 for F in a.fans)


# ---- ample divisors


def test_p1xp1_rectangles():
    got = sorted(L.coeffs[2:] for L in enumerate_ample(seed_p1xp1(), 8))
    assert got == sorted([(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (1, 4), (4, 1), (2, 2)])


def test_p2_multiples_of_hyperplane():
    got = [L.coeffs for L in enumerate_ample(seed_p2(), 9)]
    assert sorted(got) == [(0, 0, 1), (0, 0, 2), (0, 0, 3)]


@pytest.mark.parametrize("r", [1, 2, 3])
def test_hirzebruch_closed_form(r):
    # aD_2 + bD_3 is ample iff a, b > 0, with L^2 = 2ab + r b^2
    V = 60
    expected = {(0, 0, a, b) for a in range(1, V + 1) for b in range(1, V + 1) if 2 * a * b + r * b * b <= V}
    got = {L.coeffs for L in enumerate_ample(seed_hirzebruch(r), V)}
    assert got == expected


@pytest.mark.parametrize(
    "fan",
    [seed_p2(), seed_hirzebruch(1), blow_up(seed_p1xp1(), 0), blow_up(blow_up(seed_p1xp1(), 0), 2)],
    ids=["P2", "F1", "P1xP1+0", "P1xP1+0+2"],
)
def test_enumerate_ample_matches_brute_force(fan):
    V = 16
    got = sorted(L.coeffs for L in enumerate_ample(fan, V))
    oracle = sorted(ample_box_oracle(fan, V, 2 * V))
    assert got == oracle
    assert all(max(c) < 2 * V for c in got)


def test_enumerated_divisors_are_ample_and_distinct():
    for F in surface_catalog(2, 2).fans:
        seen = set()
        for L in enumerate_ample(F, 40):
            assert L.coeffs[:2] == (0, 0)
            assert is_ample(L) and intersect(L, L) <= 40
            seen.add(L.coeffs)
        assert all(len(c) == F.n for c in seen)


# ---- box polygons


def test_box_one_has_triangle_and_square():
    polys = list(enumerate_box_polygons(1))
    assert sorted(len(P) for P in polys) == [3, 4]


@pytest.mark.parametrize("box", [2, 3])
def test_box_classes_match_subset_hull_oracle(box):
    got = {P.vertices for P in enumerate_box_polygons(box)}
    assert got == subset_hull_classes(box)


def test_box_four_class_count():
    assert sum(len(R) for R in box_polygon_classes(4).values()) == 1517


def test_box_outputs_are_canonical_fixed_points():
    for P in enumerate_box_polygons(3):
        assert len(P) >= 3 and normalized_volume(P) > 0
        assert canonical_form(P) == P


def test_box_cap():
    with pytest.raises(BoxTooLarge):
        list(enumerate_box_polygons(9))


def test_batch_canonical_matches_scalar():
    rng = np.random.default_rng(0)
    for k, P in box_polygon_arrays(5).items():
        R = d4_reduce(P, 5)
        sample = R[rng.choice(len(R), size=min(60, len(R)), replace=False)]
        keys = batch_canonical_keys(sample)
        for poly, key in zip(sample, keys):
            scalar = sorted(canonical_key(LatticePolygon(tuple(map(tuple, poly.tolist())))))
            decoded = sorted(divmod(int(c), 1 << 21) for c in key)
            assert [(x - (1 << 20), y - (1 << 20)) for x, y in decoded] == [tuple(p) for p in scalar]


def test_batch_stats_match_scalar_counts():
    classes = box_polygon_classes(4)
    for k, R in classes.items():
        st = batch_stats(R, 4)
        for i in range(0, len(R), 7):
            P = LatticePolygon(tuple(map(tuple, R[i].tolist())))
            assert (st.boundary[i], st.interior[i]) == tuple(count_points(P))
            assert st.volume[i] == normalized_volume(P)
            assert list(st.edge_lengths[i]) == P.edge_lengths()


def test_random_hulls_are_reproducible():
    a = [P.vertices for P in random_hulls(30, seed=5)]
    b = [P.vertices for P in random_hulls(30, seed=5)]
    assert a == b and len(a) == 30


# ---- campaigns


def test_config_validation():
    with pytest.raises(FlagError):
        CampaignConfig(max_blowups=6).validate()
    with pytest.raises(FlagError):
        CampaignConfig(max_degree=9).validate()
    with pytest.raises(BoxTooLarge):
        CampaignConfig(box_size=9).validate()
    with pytest.raises(FlagError):
        CampaignConfig(checks=("pick", "nonsense")).validate()


def test_small_campaign_passes():
    report = run_campaign(CampaignConfig(**SMALL))
    assert report["passed"]
    assert list(report["checks"]) == list(ALL_CHECKS)
    assert all(c["failed"] == 0 for c in report["invariants"].values())
    assert report["observations"]["p2_O1_part1_agrees"] is False


def test_pick_only_campaign():
    report = run_campaign(CampaignConfig(checks=("pick",), box_size=4, random_hulls=10))
    assert list(report["checks"]) == ["pick"]
    assert report["totals"]["divisors"] == 0
    assert report["checks"]["pick"]["passed"] == 1517 + 10


def test_injected_fault_is_reported(monkeypatch):
    real = intersection.intersection_table

    def broken(F):
        rows = [list(r) for r in real(F).pairing]
        rows[1][1] -= 1
        return IntersectionTable(F, tuple(map(tuple, rows)))

    monkeypatch.setattr(intersection, "intersection_table", broken)
    report = run_campaign(CampaignConfig(**{**SMALL, "checks": ("hodge", "proposition_part1")}))
    assert not report["passed"]
    failed = [c for c in report["checks"].values() if c["failed"]]
    failed += [c for c in report["invariants"].values() if c["failed"]]
    assert failed
    assert all(c["counterexamples"] for c in failed)
    example = report["invariants"]["adjoint_paths"]["counterexamples"][0]
    assert {"surface", "L", "direct", "formula"} <= set(example)


def test_report_is_deterministic_across_workers():
    a = report_json(run_campaign(CampaignConfig(**SMALL, workers=1)))
    b = report_json(run_campaign(CampaignConfig(**SMALL, workers=2)))
    assert a == b
    assert "timing" not in json.loads(a)
