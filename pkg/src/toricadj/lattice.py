"""Exact integer geometry of lattice polygons in the character lattice M = Z^2.

Everything here is integer arithmetic; there is no floating point anywhere
in this module.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import DegenerateInput, InputTooLarge, PreconditionViolated

COORD_LIMIT = 10**6


class Point(NamedTuple):
    x: int
    y: int


class PointCounts(NamedTuple):
    boundary: int
    interior: int

    @property
    def total(self) -> int:
        return self.boundary + self.interior


def as_point(p) -> Point:
    x, y = p
    if isinstance(x, bool) or isinstance(y, bool) or int(x) != x or int(y) != y:
        raise DegenerateInput(f"non-integer lattice point {p!r}")
    x, y = int(x), int(y)
    if abs(x) > COORD_LIMIT or abs(y) > COORD_LIMIT:
        raise InputTooLarge(f"coordinate of {p!r} exceeds {COORD_LIMIT}")
    return Point(x, y)


def cross(o: Sequence[int], a: Sequence[int], b: Sequence[int]) -> int:
    """Twice the signed area of the triangle (o, a, b); > 0 for a left turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def det(u: Sequence[int], v: Sequence[int]) -> int:
    return u[0] * v[1] - u[1] * v[0]


def collinear(a, b, c) -> bool:
    return cross(a, b, c) == 0


def primitive(v: Sequence[int]) -> tuple[int, int]:
    g = gcd(v[0], v[1])
    if g == 0:
        raise DegenerateInput("zero vector has no primitive direction")
    return (v[0] // g, v[1] // g)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class LatticePolygon:
    """Strictly convex lattice polygon, vertices listed counterclockwise.

    Use :func:`convex_hull` (or :meth:`from_points`) to build one from an
    arbitrary point cloud; the constructor only validates.
    """

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise DegenerateInput("a polygon needs at least 3 vertices")
        if len(set(verts)) != n:
            raise DegenerateInput("repeated vertex")
        for i in range(n):
            if cross(verts[i - 1], verts[i], verts[(i + 1) % n]) <= 0:
                raise DegenerateInput(
                    f"vertices are not strictly convex and counterclockwise at index {i}"
                )
        if _double_area(verts) <= 0:
            raise DegenerateInput("polygon winds more than once or clockwise")

    @classmethod
    def from_points(cls, points: Iterable) -> "LatticePolygon":
        return convex_hull(points)

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def edge_lengths(self) -> list[int]:
        return [lattice_length(p, q) for p, q in self.edges()]

    def bounding_box(self) -> tuple[int, int, int, int]:
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, p) -> bool:
        """Closed membership test (boundary counts as inside)."""
        return all(cross(a, b, p) >= 0 for a, b in self.edges())

    def translate(self, dx: int, dy: int) -> "LatticePolygon":
        return LatticePolygon(tuple(Point(v.x + dx, v.y + dy) for v in self.vertices))

    def transform(self, matrix: Sequence[Sequence[int]]) -> "LatticePolygon":
        """Image under an integer 2x2 matrix acting on column vectors."""
        (a, b), (c, d) = matrix
        return convex_hull([(a * v.x + b * v.y, c * v.x + d * v.y) for v in self.vertices])

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices]}


def _double_area(verts: Sequence[Sequence[int]]) -> int:
    n = len(verts)
    return sum(det(verts[i], verts[(i + 1) % n]) for i in range(n))


def convex_hull(points: Iterable) -> LatticePolygon:
    """Andrew's monotone chain. Collinear boundary points are dropped.

    The vertex list starts at the lexicographically smallest vertex.
    """
    pts = sorted(set(as_point(p) for p in points))
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")

    def half(seq):
        chain: list[Point] = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return LatticePolygon(tuple(hull))


def lattice_length(p, q) -> int:
    """Number of lattice points on the segment pq minus one."""
    return gcd(abs(q[0] - p[0]), abs(q[1] - p[1]))


def lattice_points(P: LatticePolygon) -> Iterator[tuple[Point, bool]]:
    """Yield every lattice point of P with a flag telling whether it lies on the boundary.

    Iterates the integer bounding box and classifies each point with exact
    orientation predicates.
    """
    x0, y0, x1, y1 = P.bounding_box()
    edges = P.edges()
    for y in range(y0, y1 + 1):
        for x in range(x0, x1 + 1):
            on_edge = False
            for a, b in edges:
                c = (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0])
                if c < 0:
                    break
                if c == 0:
                    on_edge = True
            else:
                yield Point(x, y), on_edge


def count_points(P: LatticePolygon) -> PointCounts:
    boundary = interior = 0
    for _, on_boundary in lattice_points(P):
        if on_boundary:
            boundary += 1
        else:
            interior += 1
    return PointCounts(boundary, interior)


def normalized_volume(P: LatticePolygon) -> int:
    """Twice the Euclidean area (shoelace); equals L^2 for the polarized surface."""
    return _double_area(P.vertices)


def area(P: LatticePolygon) -> Fraction:
    return Fraction(normalized_volume(P), 2)


def find_extra_lattice_point(points: Sequence) -> Point:
    """Lattice point in the hull of five points that is none of the five.

    Two of five lattice points share a class in (Z/2)^2, so their midpoint is
    integral. Pairs are scanned in input order and the first same-parity pair
    wins. The midpoint may land on the hull boundary.
    """
    pts = [as_point(p) for p in points]
    if len(pts) != 5 or len(set(pts)) != 5:
        raise PreconditionViolated("expected 5 distinct lattice points")
    for a, b, c in itertools.combinations(pts, 3):
        if collinear(a, b, c):
            raise PreconditionViolated(f"points {a}, {b}, {c} are collinear")
    for p, q in itertools.combinations(pts, 2):
        if (p.x - q.x) % 2 == 0 and (p.y - q.y) % 2 == 0:
            return Point((p.x + q.x) // 2, (p.y + q.y) // 2)
    raise AssertionError("unreachable: pigeonhole over (Z/2)^2")


def _normal_images(verts: Sequence[Point]) -> Iterator[tuple[Point, ...]]:
    """Images of a ccw vertex list, one per vertex, under the affine unimodular map
    sending that vertex to the origin, its outgoing edge to the positive x-axis and
    its incoming edge into the strip 0 <= x < height.
    """
    n = len(verts)
    for i in range(n):
        v = verts[i]
        ex, ey = primitive((verts[(i + 1) % n].x - v.x, verts[(i + 1) % n].y - v.y))
        fx, fy = primitive((verts[i - 1].x - v.x, verts[i - 1].y - v.y))
        _, s, t = ext_gcd(ex, ey)
        # rows (s, t) and (-ey, ex): e -> (1, 0), determinant s*ex + t*ey = 1
        p = s * fx + t * fy
        d = -ey * fx + ex * fy
        k = -(p // d)
        img = []
        for w in verts:
            dx, dy = w.x - v.x, w.y - v.y
            x = s * dx + t * dy
            y = -ey * dx + ex * dy
            img.append(Point(x + k * y, y))
        yield tuple(sorted(img))


def canonical_form(P: LatticePolygon) -> LatticePolygon:
    """Representative of the orbit of P under GL(2, Z) and lattice translations."""
    best = None
    mirrored = convex_hull((v.y, v.x) for v in P.vertices)
    for Q in (P, mirrored):
        for img in _normal_images(Q.vertices):
            if best is None or img < best:
                best = img
    return convex_hull(best)


def canonical_key(P: LatticePolygon) -> tuple[Point, ...]:
    return canonical_form(P).vertices
