"""Desk-scale generators and verification campaigns.

Surfaces come from the seeds P^2, P^1 x P^1 and the Hirzebruch surfaces by
repeated toric blowups. Ample divisors are enumerated as lattice polygons with
prescribed edge normals. Box polygons are enumerated with numpy so that the
box-6 class enumeration and the box-8 pentagon sweep stay in the tens of
seconds.
"""
from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from . import adjoint
from .errors import BoxTooLarge, FlagError, InvariantViolation, ToricError
from .fan import (
    CompleteFan,
    blow_up,
    check_smooth,
    fan_key,
    fans_isomorphic,
    is_smooth,
    normal_fan,
    seed_hirzebruch,
    seed_p1xp1,
    seed_p2,
)
from .intersection import (
    TorusDivisor,
    adjoint_numbers,
    canonical_divisor,
    hodge_check,
    intersect,
    is_ample,
    polytope_vertices,
    prime_divisor,
    principal_divisor,
)
from .lattice import (
    LatticePolygon,
    convex_hull,
    count_points,
    det,
    ext_gcd,
    lattice_length,
    normalized_volume,
)

log = logging.getLogger(__name__)

# Check names are a stable interface of the report:
#   pick               V = B + 2I - 2 and B = sum of edge lengths
#   lemma31            every polygon with >= 5 vertices has an interior point
#   lemma33            >= 5 vertices and an edge of length 4 (or more) force V >= 9
#   lemma34            L^2 >= L.D_i + 4 on surfaces with >= 5 rays
#   hodge              (L.D_i)^2 >= L^2 D_i^2
#   proposition_part1  K+L not nef  <=> some ray has (L.D, D^2) = (1, 0)
#   proposition_part2  K+L not ample <=> some ray has a pair in the ample obstruction set
#   refinement_L2ge10  for L^2 >= 10 the pair (3, 1) can be dropped
#   fujita_*           degree bounds that force K+L nef or ample, and K+2A, K+4A
ALL_CHECKS = (
    "pick",
    "lemma31",
    "lemma33",
    "lemma34",
    "hodge",
    "proposition_part1",
    "proposition_part2",
    "refinement_L2ge10",
    "fujita_bpf",
    "fujita_vample",
    "fujita_2A_4A",
)
SURFACE_CHECKS = frozenset(ALL_CHECKS) - {"pick", "lemma31", "lemma33"}
MAX_BLOWUPS_CAP = 5
BOX_CAP = 8
SCHEMA = 1


@dataclass
class CampaignConfig:
    max_blowups: int = 3
    max_hirzebruch_r: int = 4
    max_degree: int = 100
    box_size: int = 6
    pentagon_box: int = 8
    random_hulls: int = 1000
    seed: int = 0
    checks: tuple[str, ...] = ALL_CHECKS
    workers: int = 1
    max_counterexamples: int = 20

    def validate(self) -> "CampaignConfig":
        self.checks = parse_checks(self.checks)
        if not 0 <= self.max_blowups <= MAX_BLOWUPS_CAP:
            raise FlagError(f"max_blowups must lie in 0..{MAX_BLOWUPS_CAP}")
        if self.max_hirzebruch_r < 1:
            raise FlagError("max_hirzebruch_r must be at least 1")
        if self.max_degree < 10:
            raise FlagError("max_degree must be at least 10 so the L^2 >= 10 clause is exercised")
        for name in ("box_size", "pentagon_box"):
            value = getattr(self, name)
            if value > BOX_CAP:
                raise BoxTooLarge(f"{name} {value} exceeds the cap {BOX_CAP}")
            if value < 1:
                raise FlagError(f"{name} must be positive")
        if self.random_hulls < 0 or self.workers < 1 or self.max_counterexamples < 0:
            raise FlagError("random_hulls and max_counterexamples must be nonnegative, workers positive")
        return self

    def to_json(self) -> dict:
        d = asdict(self)
        d["checks"] = list(self.checks)
        d.pop("workers")  # parallelism never changes the report
        return d


def parse_checks(names: Sequence[str]) -> tuple[str, ...]:
    bad = [c for c in names if c not in ALL_CHECKS]
    if bad:
        raise FlagError(f"unknown checks {bad}; choose from {', '.join(ALL_CHECKS)}")
    return tuple(c for c in ALL_CHECKS if c in set(names))


# ---------------------------------------------------------------- surfaces


def seeds(max_hirzebruch_r: int) -> list[CompleteFan]:
    return [seed_p2(), seed_p1xp1()] + [seed_hirzebruch(r) for r in range(1, max_hirzebruch_r + 1)]


@dataclass
class SurfaceCatalog:
    fans: list[CompleteFan]
    depth: dict[str, int]
    counts: dict[str, int]
    duplicates: int = 0
    non_isomorphic_collisions: list = field(default_factory=list)


def surface_catalog(max_blowups: int, max_hirzebruch_r: int) -> SurfaceCatalog:
    """Breadth-first blowups of the seeds, deduplicated by :func:`fan_key`.

    Every collision is confirmed with an exact GL(2, Z) isomorphism test.
    """
    fans: list[CompleteFan] = []
    seen: dict[tuple, CompleteFan] = {}
    depth: dict[str, int] = {}
    counts: dict[str, int] = {}
    cat = SurfaceCatalog(fans, depth, counts)

    def add(F: CompleteFan, d: int) -> bool:
        key = fan_key(F)
        if key in seen:
            cat.duplicates += 1
            if not fans_isomorphic(F, seen[key]):
                cat.non_isomorphic_collisions.append([F.tag, seen[key].tag])
            return False
        seen[key] = F
        fans.append(F)
        depth[F.tag] = d
        label = f"{F.tag.split('+')[0]}/{d}"
        counts[label] = counts.get(label, 0) + 1
        return True

    level = [F for F in seeds(max_hirzebruch_r) if add(F, 0)]
    for d in range(1, max_blowups + 1):
        nxt = []
        for F in level:
            for i in range(F.n):
                G = blow_up(F, i)
                if add(G, d):
                    nxt.append(G)
        level = nxt
    return cat


def generate_surfaces(cfg: CampaignConfig) -> Iterator[CompleteFan]:
    yield from surface_catalog(cfg.max_blowups, cfg.max_hirzebruch_r).fans


# ---------------------------------------------------------------- divisors


def enumerate_ample(F: CompleteFan, max_degree: int) -> Iterator[TorusDivisor]:
    """Every ample class with L^2 <= max_degree, normalized by a_0 = a_1 = 0.

    The polygon of such a class has the vertex of cone 0 at the origin; its
    edges are walked counterclockwise with lengths l_1, ..., l_{n-2} chosen
    freely and the last two forced by closing up. Pruning uses that the
    partial polygon's double area can only grow and never exceeds L^2, and
    that any edge length is at most L^2.
    """
    check_smooth(F)
    n = F.n
    dirs = [(u[1], -u[0]) for u in F.rays]
    V = max_degree
    verts = [(0, 0)] * n

    def finish(v, area):
        w = (-v[0], -v[1])
        l_last = det(w, dirs[0])
        l_0 = det(dirs[n - 1], w)
        if l_last < 1 or l_0 < 1:
            return None
        c = det(v, dirs[n - 1])
        total = area + l_last * c
        if c <= 0 or total > V:
            return None
        verts[n - 1] = (v[0] + l_last * dirs[n - 1][0], v[1] + l_last * dirs[n - 1][1])
        return tuple(-(u[0] * m[0] + u[1] * m[1]) for u, m in zip(F.rays, verts))

    def rec(k, v, area):
        if k == n - 1:
            coeffs = finish(v, area)
            if coeffs is not None:
                yield TorusDivisor(F, coeffs)
            return
        c = det(v, dirs[k])
        if k >= 2 and c <= 0:
            return
        step = dirs[k]
        ell = 1
        while True:
            new_area = area + ell * c
            if ell > V or new_area > V:
                break
            m = (v[0] + ell * step[0], v[1] + ell * step[1])
            verts[k] = m
            yield from rec(k + 1, m, new_area)
            ell += 1

    yield from rec(1, (0, 0), 0)


def ample_box_oracle(F: CompleteFan, max_degree: int, bound: int) -> list[tuple[int, ...]]:
    """Brute force over a_0 = a_1 = 0, 0 <= a_i <= bound. Test oracle only."""
    import itertools

    out = []
    for rest in itertools.product(range(bound + 1), repeat=F.n - 2):
        L = TorusDivisor(F, (0, 0) + rest)
        if is_ample(L) and intersect(L, L) <= max_degree:
            out.append(L.coeffs)
    return out


# ---------------------------------------------------------------- box polygons


def _cross(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0])


def _grid(box: int) -> np.ndarray:
    return np.array([(x, y) for y in range(box + 1) for x in range(box + 1)], dtype=np.int64)


def box_polygon_arrays(box: int, sizes: Optional[Sequence[int]] = None) -> dict[int, np.ndarray]:
    """All strictly convex lattice polygons in [0, box]^2 up to translation.

    Returns {k: array of shape (M, k, 2)} with vertices counterclockwise from
    the lowest-then-leftmost one, translated so min x = min y = 0.
    """
    g = _grid(box)
    kmax = max(sizes) if sizes else None
    out: dict[int, list] = {}
    for x0 in range(box + 1):
        p0 = np.array([x0, 0], dtype=np.int64)
        cand = g[(g[:, 1] > 0) | (g[:, 0] > x0)]
        chains = cand[:, None, :]
        while len(chains):
            k = chains.shape[1] + 1
            if k >= 3 and (sizes is None or k in sizes):
                a, b = chains[:, -2, :], chains[:, -1, :]
                P0 = np.broadcast_to(p0, a.shape)
                ok = (_cross(a, b, P0) > 0) & (_cross(b, P0, chains[:, 0, :]) > 0)
                full = np.concatenate(
                    [np.broadcast_to(p0, (int(ok.sum()), 1, 2)), chains[ok]], axis=1
                )
                full = full[full[:, :, 0].min(axis=1) == 0]
                if len(full):
                    out.setdefault(k, []).append(full)
            if kmax is not None and k >= kmax:
                break
            last = chains[:, -1, :][:, None, :]
            prev = chains[:, -2, :][:, None, :] if chains.shape[1] >= 2 else np.broadcast_to(p0, last.shape)
            P = cand[None, :, :]
            ok = (_cross(np.broadcast_to(p0, last.shape), last, P) > 0) & (_cross(prev, last, P) > 0)
            i, j = np.nonzero(ok)
            chains = np.concatenate([chains[i], cand[j][:, None, :]], axis=1)
    return {k: np.concatenate(v) for k, v in sorted(out.items())}


def _lex_min_rows(cands: list[np.ndarray]) -> np.ndarray:
    best = cands[0]
    rows = np.arange(len(best))
    for v in cands[1:]:
        diff = v != best
        first = diff.argmax(axis=1)
        less = diff.any(axis=1) & (v[rows, first] < best[rows, first])
        best = np.where(less[:, None], v, best)
    return best


_OFF = 1 << 20


def _encode_sorted(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return np.sort((X + _OFF) * (2 * _OFF) + (Y + _OFF), axis=1)


def _decode(codes: np.ndarray) -> np.ndarray:
    return np.stack([codes // (2 * _OFF) - _OFF, codes % (2 * _OFF) - _OFF], axis=-1)


def d4_reduce(P: np.ndarray, box: int) -> np.ndarray:
    """One representative per orbit under translations and the symmetries of the square."""
    x, y = P[:, :, 0], P[:, :, 1]
    cands = []
    for a, b in ((x, y), (box - x, y), (x, box - y), (box - x, box - y),
                 (y, x), (box - y, x), (y, box - x), (box - y, box - x)):
        cands.append(_encode_sorted(a - a.min(1, keepdims=True), b - b.min(1, keepdims=True)))
    keys = _lex_min_rows(cands)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return P[np.sort(idx)]


def batch_canonical_keys(P: np.ndarray) -> np.ndarray:
    """Vectorized counterpart of :func:`lattice.canonical_form`.

    Returns the sorted vertex codes of the canonical representative, one row
    per polygon; rows agree exactly when the polygons are unimodularly
    equivalent.
    """
    M, k, _ = P.shape
    mirrored = P[:, ::-1, ::-1]
    cands = []
    for Q in (P, mirrored):
        for i in range(k):
            v = Q[:, i, :]
            e = Q[:, (i + 1) % k, :] - v
            f = Q[:, i - 1, :] - v
            e = e // np.gcd(e[:, 0], e[:, 1])[:, None]
            f = f // np.gcd(f[:, 0], f[:, 1])[:, None]
            ex, ey = e[:, 0], e[:, 1]
            s, t = _ext_gcd_table(ex, ey)
            d = -ey * f[:, 0] + ex * f[:, 1]
            p = s * f[:, 0] + t * f[:, 1]
            shear = -(p // d)
            dx = Q[:, :, 0] - v[:, None, 0]
            dy = Q[:, :, 1] - v[:, None, 1]
            X = s[:, None] * dx + t[:, None] * dy
            Y = -ey[:, None] * dx + ex[:, None] * dy
            cands.append(_encode_sorted(X + shear[:, None] * Y, Y))
    return _lex_min_rows(cands)


def _ext_gcd_table(ex: np.ndarray, ey: np.ndarray):
    pairs = np.stack([ex, ey], axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    st = np.array([ext_gcd(int(a), int(b))[1:] for a, b in uniq], dtype=np.int64)
    inv = inv.reshape(-1)
    return st[inv, 0], st[inv, 1]


@dataclass
class PolygonStats:
    """Exact invariants of a batch of polygons lying in [0, box]^2."""

    polygons: np.ndarray
    volume: np.ndarray
    edge_lengths: np.ndarray
    boundary: np.ndarray
    interior: np.ndarray

    @property
    def boundary_from_edges(self) -> np.ndarray:
        return self.edge_lengths.sum(axis=1)


def batch_stats(P: np.ndarray, box: int, chunk: int = 20000) -> PolygonStats:
    """Shoelace volumes, edge lattice lengths and grid-scan point counts.

    Counts test every point of the (box+1)^2 grid against every edge with
    exact integer orientation predicates.
    """
    nxt = np.roll(P, -1, axis=1)
    volume = (P[:, :, 0] * nxt[:, :, 1] - P[:, :, 1] * nxt[:, :, 0]).sum(axis=1)
    edges = np.gcd(np.abs(nxt[:, :, 0] - P[:, :, 0]), np.abs(nxt[:, :, 1] - P[:, :, 1]))
    g = _grid(box).astype(np.int32)
    boundary = np.empty(len(P), dtype=np.int64)
    interior = np.empty(len(P), dtype=np.int64)
    P32, N32 = P.astype(np.int32), nxt.astype(np.int32)
    for s in range(0, len(P), chunk):
        Q, Qn = P32[s : s + chunk], N32[s : s + chunk]
        c = (Qn[:, None, :, 0] - Q[:, None, :, 0]) * (g[None, :, None, 1] - Q[:, None, :, 1]) - (
            Qn[:, None, :, 1] - Q[:, None, :, 1]
        ) * (g[None, :, None, 0] - Q[:, None, :, 0])
        m = c.min(axis=2)
        interior[s : s + chunk] = (m > 0).sum(axis=1)
        boundary[s : s + chunk] = (m == 0).sum(axis=1)
    return PolygonStats(P, volume, edges, boundary, interior)


def box_polygon_classes(box: int, sizes: Optional[Sequence[int]] = None) -> dict[int, np.ndarray]:
    """One in-box representative per unimodular class, grouped by vertex count.

    Representatives are ordered by their canonical key.
    """
    out = {}
    for k, P in box_polygon_arrays(box, sizes).items():
        R = d4_reduce(P, box)
        keys = batch_canonical_keys(R)
        _, idx = np.unique(keys, axis=0, return_index=True)
        out[k] = R[idx]
    return out


def enumerate_box_polygons(box_size: int) -> Iterator[LatticePolygon]:
    """Canonical forms of all lattice polygons with vertices in [0, box_size]^2."""
    if box_size > BOX_CAP:
        raise BoxTooLarge(f"box {box_size} exceeds the cap {BOX_CAP}")
    if box_size < 1:
        return
    for k, R in box_polygon_classes(box_size).items():
        for codes in batch_canonical_keys(R):
            yield convex_hull(map(tuple, _decode(codes).tolist()))


def random_hulls(count: int, seed: int, radius: int = 12) -> Iterator[LatticePolygon]:
    rng = random.Random(seed)
    made = 0
    while made < count:
        pts = [(rng.randint(-radius, radius), rng.randint(-radius, radius)) for _ in range(rng.randint(3, 10))]
        try:
            P = convex_hull(pts)
        except ToricError:
            continue
        made += 1
        yield P


# ---------------------------------------------------------------- tallies


class Tally:
    """Per-check pass/fail counts with a capped counterexample list.

    Merging is associative and order-preserving, so splitting work across
    processes and merging in item order gives identical results.
    """

    def __init__(self, cap: int = 20):
        self.cap = cap
        self.data: dict[str, dict] = {}

    def _entry(self, name: str) -> dict:
        return self.data.setdefault(name, {"passed": 0, "failed": 0, "counterexamples": [], "variants": {}})

    def record(self, name: str, ok: bool, example=None, variant: Optional[str] = None) -> bool:
        e = self._entry(name)
        e["passed" if ok else "failed"] += 1
        if not ok and len(e["counterexamples"]) < self.cap:
            e["counterexamples"].append(example)
        if variant is not None:
            v = e["variants"].setdefault(variant, {"passed": 0, "failed": 0})
            v["passed" if ok else "failed"] += 1
        return ok

    def bulk(self, name: str, ok: np.ndarray, examples, variant: Optional[str] = None):
        e = self._entry(name)
        ok = np.asarray(ok, dtype=bool)
        npass = int(ok.sum())
        nfail = int(len(ok) - npass)
        e["passed"] += npass
        e["failed"] += nfail
        for i in np.nonzero(~ok)[0][: max(0, self.cap - len(e["counterexamples"]))]:
            e["counterexamples"].append(examples(int(i)))
        if variant is not None:
            v = e["variants"].setdefault(variant, {"passed": 0, "failed": 0})
            v["passed"] += npass
            v["failed"] += nfail

    def merge(self, other: "Tally") -> "Tally":
        for name, o in other.data.items():
            e = self._entry(name)
            e["passed"] += o["passed"]
            e["failed"] += o["failed"]
            room = self.cap - len(e["counterexamples"])
            e["counterexamples"].extend(o["counterexamples"][: max(0, room)])
            for vn, vo in o["variants"].items():
                v = e["variants"].setdefault(vn, {"passed": 0, "failed": 0})
                v["passed"] += vo["passed"]
                v["failed"] += vo["failed"]
        return self

    @property
    def failed(self) -> int:
        return sum(e["failed"] for e in self.data.values())


# ---------------------------------------------------------------- per-surface work


def _rotation_match(F: CompleteFan, a, G: CompleteFan, b) -> bool:
    n = F.n
    if G.n != n:
        return False
    for r in range(n):
        if all(G.rays[(j + r) % n] == F.rays[j] and b[(j + r) % n] == a[j] for j in range(n)):
            return True
    return False


def _surface_invariants(F: CompleteFan, inv: Tally) -> None:
    ex = {"surface": F.tag, "rays": [list(u) for u in F.rays]}
    inv.record("smooth", is_smooth(F), ex)
    inv.record("sum_b", sum(F.b) == 3 * F.n - 12, {**ex, "b": list(F.b)})
    K = canonical_divisor(F)
    kd = [intersect(K, prime_divisor(F, i)) for i in range(F.n)]
    inv.record("canonical_wall", kd == [bi - 2 for bi in F.b], {**ex, "K.D": kd, "b": list(F.b)})
    trivial = all(
        intersect(principal_divisor(m, F), prime_divisor(F, i)) == 0
        for m in ((1, 0), (0, 1))
        for i in range(F.n)
    )
    inv.record("principal_trivial", trivial, ex)


def _divisor_invariants(L: TorusDivisor, inv: Tally) -> None:
    F = L.fan
    ex = {"surface": F.tag, "L": list(L.coeffs)}
    inv.record("ample", is_ample(L), ex)
    adj = adjoint_numbers(L)
    inv.record("adjoint_paths", adj.agree, {**ex, "direct": list(adj.direct), "formula": list(adj.formula)})
    m = polytope_vertices(L)
    lengths = [lattice_length(m[i - 1], m[i]) for i in range(F.n)]
    degs = [intersect(L, prime_divisor(F, i)) for i in range(F.n)]
    inv.record("edge_length_degree", lengths == degs, {**ex, "lengths": lengths, "degrees": degs})
    try:
        P = convex_hull(m)
        ok = len(P) == F.n and normalized_volume(P) == intersect(L, L)
        G, b = normal_fan(P)
        ok = ok and _rotation_match(F, L.coeffs, G, b)
    except ToricError:
        ok = False
    inv.record("polytope_roundtrip", ok, ex)


def _check_pair(L: TorusDivisor, checks, tally: Tally, inv: Tally, obs: dict) -> None:
    F = L.fan
    n = F.n
    L2 = intersect(L, L)
    ex = {"surface": F.tag, "rays": [list(u) for u in F.rays], "L": list(L.coeffs), "L2": L2}
    excluded = adjoint.is_excluded_surface(F)

    _divisor_invariants(L, inv)

    if "lemma34" in checks and n >= 5:
        degs = [intersect(L, prime_divisor(F, i)) for i in range(n)]
        tally.record("lemma34", all(L2 >= d + 4 for d in degs), {**ex, "degrees": degs})
    if "hodge" in checks:
        for i in range(n):
            tally.record("hodge", hodge_check(L, prime_divisor(F, i)), {**ex, "ray": i})

    needs_report = checks & {"proposition_part1", "proposition_part2", "refinement_L2ge10",
                             "fujita_bpf", "fujita_vample"}
    if needs_report or excluded:
        try:
            rep = adjoint.classify(L)
        except InvariantViolation as exc:
            for name in sorted(needs_report):
                tally.record(name, False, {**ex, "error": str(exc)})
            return
        for w in rep.witnesses:
            if w.pair == (3, 1):
                obs["witness_3_1"] += 1
                if len(obs["witness_3_1_examples"]) < 10:
                    obs["witness_3_1_examples"].append({**ex, "ray": w.ray})
        if excluded:
            obs["p2_pairs"] += 1
            obs["p2_part1_failures"] += int(not rep.part1_agrees)
            obs["p2_part2_failures"] += int(not rep.part2_agrees)
            if L2 == 1:
                obs["p2_O1_part1_agrees"] = rep.part1_agrees
            return
        if "proposition_part1" in checks:
            tally.record("proposition_part1", rep.part1_agrees, {**ex, "adjoint": rep.adjoint})
        if "proposition_part2" in checks:
            tally.record("proposition_part2", rep.part2_agrees, {**ex, "adjoint": rep.adjoint})
        if "refinement_L2ge10" in checks and L2 >= adjoint.REFINEMENT_DEGREE:
            tally.record("refinement_L2ge10", bool(rep.refined_agrees), {**ex, "adjoint": rep.adjoint})
        if checks & {"fujita_bpf", "fujita_vample"}:
            fj = adjoint.fujita_check(L)
            if "fujita_bpf" in checks and fj.bpf_guarantee:
                tally.record("fujita_bpf", rep.adjoint_nef, ex)
            if "fujita_vample" in checks and fj.vample_guarantee:
                tally.record("fujita_vample", rep.adjoint_ample, ex)

    if "fujita_2A_4A" in checks and not excluded:
        try:
            ok2 = adjoint.classify(2 * L).adjoint_nef
            ok4 = adjoint.classify(4 * L).adjoint_ample
        except InvariantViolation as exc:
            ok2 = ok4 = False
            ex = {**ex, "error": str(exc)}
        tally.record("fujita_2A_4A", ok2, ex, variant="2A_nef")
        tally.record("fujita_2A_4A", ok4, ex, variant="4A_ample")


def _new_observations() -> dict:
    return {
        "witness_3_1": 0,
        "witness_3_1_examples": [],
        "p2_pairs": 0,
        "p2_part1_failures": 0,
        "p2_part2_failures": 0,
        "p2_O1_part1_agrees": None,
    }


def _merge_observations(a: dict, b: dict, cap: int = 10) -> dict:
    for key in ("witness_3_1", "p2_pairs", "p2_part1_failures", "p2_part2_failures"):
        a[key] += b[key]
    a["witness_3_1_examples"].extend(b["witness_3_1_examples"][: max(0, cap - len(a["witness_3_1_examples"]))])
    if b["p2_O1_part1_agrees"] is not None:
        a["p2_O1_part1_agrees"] = b["p2_O1_part1_agrees"]
    return a


def surface_item(F: CompleteFan, cfg: CampaignConfig) -> dict:
    """All surface-level work for one fan; returns plain data for merging."""
    checks = set(cfg.checks)
    tally, inv, obs = Tally(cfg.max_counterexamples), Tally(cfg.max_counterexamples), _new_observations()
    _surface_invariants(F, inv)
    count = 0
    max_L2 = 0
    for L in enumerate_ample(F, cfg.max_degree):
        count += 1
        max_L2 = max(max_L2, intersect(L, L))
        _check_pair(L, checks, tally, inv, obs)
    return {
        "surface": {"tag": F.tag, "rays": [list(u) for u in F.rays], "b": list(F.b), "ample_classes": count},
        "checks": tally.data,
        "invariants": inv.data,
        "observations": obs,
    }


def _run_surface_item(args):
    return surface_item(*args)


# ---------------------------------------------------------------- polygon work


def _poly_example(arr: np.ndarray, i: int, **extra) -> dict:
    return {"vertices": arr[i].tolist(), **extra}


def _polygon_checks(cfg: CampaignConfig, tally: Tally, totals: dict) -> None:
    checks = set(cfg.checks)
    if not checks & {"pick", "lemma31", "lemma33"}:
        return
    sweeps = []
    if checks & {"pick", "lemma31", "lemma33"}:
        classes = box_polygon_classes(cfg.box_size)
        totals["box_polygons"] = int(sum(len(R) for R in classes.values()))
        sweeps.append((f"box{cfg.box_size}", cfg.box_size, classes))
    if checks & {"lemma31", "lemma33"}:
        pent = box_polygon_classes(cfg.pentagon_box, sizes=(5,))
        totals["pentagon_classes"] = int(sum(len(R) for R in pent.values()))
        sweeps.append((f"box{cfg.pentagon_box}_pentagons", cfg.pentagon_box, pent))

    for label, box, classes in sweeps:
        for k, R in classes.items():
            st = batch_stats(R, box)
            if "pick" in checks and label == f"box{cfg.box_size}":
                ok = (st.volume == st.boundary + 2 * st.interior - 2) & (st.boundary == st.boundary_from_edges)
                tally.bulk("pick", ok, lambda i: _poly_example(R, i, volume=int(st.volume[i]),
                                                               boundary=int(st.boundary[i]),
                                                               interior=int(st.interior[i])), variant=label)
            if k < 5:
                continue
            if "lemma31" in checks:
                tally.bulk("lemma31", st.interior >= 1,
                           lambda i: _poly_example(R, i, interior=int(st.interior[i])), variant=label)
            if "lemma33" in checks:
                longest = st.edge_lengths.max(axis=1)
                for variant, mask in (("edge_eq4", (st.edge_lengths == 4).any(axis=1)),
                                      ("edge_gt4", longest > 4)):
                    idx = np.nonzero(mask)[0]
                    sub = st.volume[idx] >= 9
                    tally.bulk("lemma33", sub,
                               lambda i: _poly_example(R, int(idx[i]), volume=int(st.volume[idx[i]])),
                               variant=f"{label}/{variant}")

    if "pick" in checks and cfg.random_hulls:
        for P in random_hulls(cfg.random_hulls, cfg.seed):
            c = count_points(P)
            ok = normalized_volume(P) == c.boundary + 2 * c.interior - 2 and c.boundary == sum(P.edge_lengths())
            tally.record("pick", ok, {"vertices": [list(v) for v in P.vertices]}, variant="random_hulls")
        totals["random_hulls"] = cfg.random_hulls


# ---------------------------------------------------------------- campaign


def run_campaign(cfg: CampaignConfig) -> dict:
    """Run the selected checks and return a JSON-ready report.

    Failures are data: the report's ``passed`` flag is False and each failed
    check carries reproducible counterexample records.
    """
    cfg.validate()
    t0 = time.perf_counter()
    tally, inv = Tally(cfg.max_counterexamples), Tally(cfg.max_counterexamples)
    obs = _new_observations()
    totals = {"surfaces": 0, "divisors": 0, "box_polygons": 0, "pentagon_classes": 0, "random_hulls": 0}

    cat = surface_catalog(cfg.max_blowups, cfg.max_hirzebruch_r)
    inv.record("dedup_isomorphism", not cat.non_isomorphic_collisions,
               {"collisions": cat.non_isomorphic_collisions})
    surfaces = []
    if set(cfg.checks) & SURFACE_CHECKS:
        work = [(F, cfg) for F in cat.fans]
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(_run_surface_item, work))
        else:
            results = [surface_item(F, cfg) for F, _ in work]
        for res in results:
            surfaces.append(res["surface"])
            tally.merge(_as_tally(res["checks"], cfg))
            inv.merge(_as_tally(res["invariants"], cfg))
            _merge_observations(obs, res["observations"])
        totals["surfaces"] = len(cat.fans)
        totals["divisors"] = sum(s["ample_classes"] for s in surfaces)
    t1 = time.perf_counter()

    _polygon_checks(cfg, tally, totals)
    t2 = time.perf_counter()

    for name in cfg.checks:
        tally._entry(name)
    checks = {name: tally.data[name] for name in cfg.checks}
    passed = all(c["failed"] == 0 for c in checks.values()) and inv.failed == 0
    log.info("campaign finished in %.1fs (surfaces %.1fs, polygons %.1fs)", t2 - t0, t1 - t0, t2 - t1)
    return {
        "schema": SCHEMA,
        "config": cfg.to_json(),
        "totals": totals,
        "surface_counts": dict(sorted(cat.counts.items())),
        "dedup": {"collisions": cat.duplicates, "non_isomorphic": cat.non_isomorphic_collisions},
        "surfaces": surfaces,
        "checks": checks,
        "invariants": dict(sorted(inv.data.items())),
        "observations": obs,
        "passed": passed,
        "timing": {"total_s": t2 - t0, "surfaces_s": t1 - t0, "polygons_s": t2 - t1},
    }


def _as_tally(data: dict, cfg: CampaignConfig) -> Tally:
    t = Tally(cfg.max_counterexamples)
    t.data = data
    return t


def report_json(report: dict, include_timing: bool = False) -> str:
    import json

    body = dict(report)
    if not include_timing:
        body.pop("timing", None)
    return json.dumps(body, indent=2, sort_keys=True)


def summary_table(report: dict) -> str:
    lines = [f"{'check':<22}{'passed':>10}{'failed':>8}"]
    for name, c in report["checks"].items():
        lines.append(f"{name:<22}{c['passed']:>10}{c['failed']:>8}")
    lines.append("")
    for name, c in report["invariants"].items():
        lines.append(f"{'[inv] ' + name:<22}{c['passed']:>10}{c['failed']:>8}")
    t = report["totals"]
    lines.append("")
    lines.append(
        f"surfaces {t['surfaces']}  divisors {t['divisors']}  box polygons {t['box_polygons']}  "
        f"pentagon classes {t['pentagon_classes']}  random hulls {t['random_hulls']}"
    )
    lines.append("PASS" if report["passed"] else "FAIL")
    return "\n".join(lines)
