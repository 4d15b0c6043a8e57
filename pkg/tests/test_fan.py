import pytest
from hypothesis import given
from hypothesis import strategies as st

from toricadj.errors import DegenerateInput, IndexOutOfRange, InvalidParameter, NotSmooth
from toricadj.fan import (
    CompleteFan,
    angle_key,
    blow_up,
    check_smooth,
    fan_from_rays,
    fan_key,
    fans_isomorphic,
    is_smooth,
    normal_fan,
    seed,
    seed_hirzebruch,
    seed_p1xp1,
    seed_p2,
    wall_data,
)
from toricadj.lattice import convex_hull

SEEDS = [seed_p2(), seed_p1xp1()] + [seed_hirzebruch(r) for r in range(1, 6)]


@st.composite
def blown_up_fans(draw, max_depth=4):
    F = draw(st.sampled_from(SEEDS))
    for _ in range(draw(st.integers(0, max_depth))):
        F = blow_up(F, draw(st.integers(0, F.n - 1)))
    return F


def test_seed_wall_data():
    assert seed_p2().b == (-1, -1, -1)
    assert seed_p1xp1().b == (0, 0, 0, 0)
    for r in range(1, 6):
        assert seed_hirzebruch(r).b == (0, r, 0, -r)


def test_wall_relation_holds():
    for F in SEEDS:
        for i, bi in enumerate(F.b):
            u = F.rays[i]
            w = (F.rays[i - 1][0] + F.rays[(i + 1) % F.n][0], F.rays[i - 1][1] + F.rays[(i + 1) % F.n][1])
            assert w == (bi * u[0], bi * u[1])


def test_p2_blowup_is_f1():
    G = blow_up(seed_p2(), 0)
    assert G.rays == ((1, 0), (1, 1), (0, 1), (-1, -1))
    assert fan_key(G) == fan_key(seed_hirzebruch(1))
    assert fans_isomorphic(G, seed_hirzebruch(1))


def test_blowup_inserts_minus_one_curve():
    F = seed_hirzebruch(2)
    G = blow_up(F, 1)
    assert G.rays[2] == (-1, 3)
    assert G.self_intersections[2] == -1
    assert G.tag == "F2+1"
    with pytest.raises(IndexOutOfRange):
        blow_up(F, 4)


@given(blown_up_fans())
def test_smooth_and_sum_of_b(F):
    assert is_smooth(F)
    assert sum(F.b) == 3 * F.n - 12


@given(blown_up_fans(), st.sampled_from([((0, 1), (1, 0)), ((1, 1), (0, 1)), ((2, 1), (1, 1)), ((0, -1), (1, 0))]))
def test_fan_key_and_isomorphism_are_gl2z_invariant(F, m):
    (a, b), (c, d) = m
    G, _ = fan_from_rays([(a * x + b * y, c * x + d * y) for x, y in F.rays])
    assert fan_key(G) == fan_key(F)
    assert fans_isomorphic(F, G)


def test_nonisomorphic_fans_differ():
    assert not fans_isomorphic(seed_hirzebruch(1), seed_hirzebruch(2))
    assert fan_key(seed_p1xp1()) != fan_key(seed_hirzebruch(2))


def test_not_smooth_reports_cone():
    F = CompleteFan(((1, 0), (0, 1), (-1, -2)))
    assert not is_smooth(F)
    with pytest.raises(NotSmooth) as exc:
        check_smooth(F)
    assert exc.value.cone == 2
    with pytest.raises(NotSmooth):
        wall_data(F)


def test_fan_validation():
    with pytest.raises(DegenerateInput):
        CompleteFan(((1, 0), (0, 1)))
    with pytest.raises(DegenerateInput):
        CompleteFan(((2, 0), (0, 1), (-1, -1)))
    with pytest.raises(DegenerateInput):
        CompleteFan(((1, 0), (-1, -1), (0, 1)))  # clockwise
    with pytest.raises(DegenerateInput):
        fan_from_rays([(1, 0), (1, 0), (0, 1), (-1, -1)])


def test_fan_from_rays_sorts_and_carries_coeffs():
    F, a = fan_from_rays([(0, -1), (-1, 2), (1, 0), (0, 1)], [4, 3, 1, 2])
    assert F.rays == ((1, 0), (0, 1), (-1, 2), (0, -1))
    assert a == (1, 2, 3, 4)


def test_angle_key_orders_counterclockwise():
    rays = [(0, -1), (1, 1), (-1, 0), (1, 0), (-1, -1), (0, 1)]
    assert sorted(rays, key=angle_key) == [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]


def test_normal_fan_of_square_and_hexagon():
    F, a = normal_fan(convex_hull([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert F.rays == ((1, 0), (0, 1), (-1, 0), (0, -1))
    assert a == (0, 0, 1, 1)
    H, _ = normal_fan(convex_hull([(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1)]))
    assert H.n == 6 and is_smooth(H) and H.b == (1,) * 6


def test_seed_lookup():
    assert seed("p2") == seed_p2()
    assert seed("hirzebruch", 3) == seed_hirzebruch(3)
    with pytest.raises(InvalidParameter):
        seed_hirzebruch(0)
    with pytest.raises(InvalidParameter):
        seed("dp6")
