"""Complete fans in N = Z^2 and the smooth toric surfaces they define."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, cmp_to_key
from math import gcd
from typing import Optional, Sequence

from .errors import DegenerateInput, IndexOutOfRange, InvalidParameter, NotSmooth
from .lattice import LatticePolygon, det, primitive

Ray = tuple[int, int]


def _half(u: Sequence[int]) -> int:
    return 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1


def angle_cmp(u: Sequence[int], v: Sequence[int]) -> int:
    """Compare the polar angles of two nonzero vectors, measured in [0, 2*pi)."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    d = det(u, v)
    return -1 if d > 0 else (1 if d < 0 else 0)


angle_key = cmp_to_key(angle_cmp)


@dataclass(frozen=True)
class CompleteFan:
    """Complete fan given by its rays u_0..u_{n-1} in counterclockwise order.

    ``tag`` records provenance (seed plus blowup positions) and takes no part
    in equality.
    """

    rays: tuple[Ray, ...]
    tag: str = field(default="", compare=False)

    def __post_init__(self):
        rays = tuple((int(x), int(y)) for x, y in self.rays)
        object.__setattr__(self, "rays", rays)
        n = len(rays)
        if n < 3:
            raise DegenerateInput("a complete fan in the plane has at least 3 rays")
        for u in rays:
            if gcd(u[0], u[1]) != 1:
                raise DegenerateInput(f"ray {u} is not a primitive nonzero vector")
        wraps = 0
        for i in range(n):
            u, v = rays[i], rays[(i + 1) % n]
            if det(u, v) <= 0:
                raise DegenerateInput(
                    f"rays {u}, {v} do not span a strictly convex cone counterclockwise"
                )
            if angle_cmp(v, u) < 0:
                wraps += 1
        if wraps != 1:
            raise DegenerateInput("ray sequence winds around the origin more than once")

    @property
    def n(self) -> int:
        return len(self.rays)

    def cone(self, i: int) -> tuple[Ray, Ray]:
        """Maximal cone spanned by u_i and u_{i+1}."""
        return self.rays[i % self.n], self.rays[(i + 1) % self.n]

    @cached_property
    def b(self) -> tuple[int, ...]:
        return wall_data(self)

    @cached_property
    def self_intersections(self) -> tuple[int, ...]:
        return tuple(-x for x in self.b)

    def to_json(self) -> dict:
        return {"rays": [list(u) for u in self.rays]}


def fan_from_rays(rays: Sequence, coeffs: Optional[Sequence[int]] = None, tag: str = ""):
    """Build a fan from rays in any order; coefficients follow their rays.

    Returns ``(fan, coeffs)`` with ``coeffs`` None when none were given.
    """
    rays = [tuple(u) for u in rays]
    if coeffs is not None and len(coeffs) != len(rays):
        raise DegenerateInput("coeffs and rays differ in length")
    for u in rays:
        if len(u) != 2 or any(isinstance(c, bool) or int(c) != c for c in u):
            raise DegenerateInput(f"ray {u!r} is not an integer vector in Z^2")
        if gcd(int(u[0]), int(u[1])) != 1:
            raise DegenerateInput(f"ray {u!r} is not primitive")
    rays = [(int(x), int(y)) for x, y in rays]
    if len(set(rays)) != len(rays):
        raise DegenerateInput("repeated ray")
    order = sorted(range(len(rays)), key=lambda i: angle_key(rays[i]))
    fan = CompleteFan(tuple(rays[i] for i in order), tag=tag)
    if coeffs is None:
        return fan, None
    return fan, tuple(int(coeffs[i]) for i in order)


def cone_determinants(F: CompleteFan) -> list[int]:
    return [det(*F.cone(i)) for i in range(F.n)]


def is_smooth(F: CompleteFan) -> bool:
    return all(d == 1 for d in cone_determinants(F))


def check_smooth(F: CompleteFan) -> None:
    for i, d in enumerate(cone_determinants(F)):
        if d != 1:
            raise NotSmooth(
                f"cone {i} spanned by {F.cone(i)[0]} and {F.cone(i)[1]} has determinant {d}",
                cone=i,
            )


def wall_data(F: CompleteFan) -> tuple[int, ...]:
    """The integers b_i with u_{i-1} + u_{i+1} = b_i * u_i."""
    check_smooth(F)
    n = F.n
    out = []
    for i in range(n):
        u = F.rays[i]
        w0 = F.rays[i - 1][0] + F.rays[(i + 1) % n][0]
        w1 = F.rays[i - 1][1] + F.rays[(i + 1) % n][1]
        # smoothness forces w parallel to u; u primitive so one coordinate is nonzero
        bi = w0 // u[0] if u[0] else w1 // u[1]
        if (w0, w1) != (bi * u[0], bi * u[1]):
            raise NotSmooth(f"no integer wall relation at ray {i}", cone=i)
        out.append(bi)
    return tuple(out)


def blow_up(F: CompleteFan, i: int) -> CompleteFan:
    """Star subdivision of cone i, inserting u_i + u_{i+1} after position i."""
    check_smooth(F)
    if not 0 <= i < F.n:
        raise IndexOutOfRange(f"cone index {i} outside 0..{F.n - 1}")
    u, v = F.cone(i)
    new = (u[0] + v[0], u[1] + v[1])
    rays = F.rays[: i + 1] + (new,) + F.rays[i + 1 :]
    return CompleteFan(rays, tag=f"{F.tag}+{i}" if F.tag else "")


def fan_key(F: CompleteFan) -> tuple[int, ...]:
    """Cyclic b-sequence up to rotation and reflection.

    For smooth complete fans this determines the fan up to GL(2, Z).
    """
    b = F.b
    candidates = []
    for seq in (b, b[::-1]):
        for k in range(len(seq)):
            candidates.append(seq[k:] + seq[:k])
    return min(candidates)


def fans_isomorphic(F: CompleteFan, G: CompleteFan) -> bool:
    """Exact test for a GL(2, Z) map carrying the rays of F onto those of G."""
    if F.n != G.n:
        return False
    target = set(G.rays)
    u0, u1 = F.rays[0], F.rays[1]
    d = det(u0, u1)
    if d == 0:
        return False
    for j in range(G.n):
        for step in (1, -1):
            v0, v1 = G.rays[j], G.rays[(j + step) % G.n]
            # A with A u0 = v0, A u1 = v1:  A = [v0 v1] [u0 u1]^-1
            inv = ((u1[1], -u1[0]), (-u0[1], u0[0]))
            a = [[v0[r] * inv[0][c] + v1[r] * inv[1][c] for c in range(2)] for r in range(2)]
            if any(x % d for row in a for x in row):
                continue
            a = [[x // d for x in row] for row in a]
            if abs(a[0][0] * a[1][1] - a[0][1] * a[1][0]) != 1:
                continue
            image = {(a[0][0] * u[0] + a[0][1] * u[1], a[1][0] * u[0] + a[1][1] * u[1]) for u in F.rays}
            if image == target:
                return True
    return False


def normal_fan(P: LatticePolygon) -> tuple[CompleteFan, tuple[int, ...]]:
    """Inner normal fan of P together with the facet constants a_i.

    P = {m : <m, u_i> >= -a_i}. Rays are listed counterclockwise starting from
    the one of smallest polar angle.
    """
    verts = P.vertices
    n = len(verts)
    rays, coeffs = [], []
    for j in range(n):
        p, q = verts[j], verts[(j + 1) % n]
        dx, dy = primitive((q.x - p.x, q.y - p.y))
        u = (-dy, dx)
        rays.append(u)
        coeffs.append(-(u[0] * p.x + u[1] * p.y))
    start = min(range(n), key=lambda i: angle_key(rays[i]))
    rays = rays[start:] + rays[:start]
    coeffs = coeffs[start:] + coeffs[:start]
    return CompleteFan(tuple(rays)), tuple(coeffs)


def seed_p2() -> CompleteFan:
    return CompleteFan(((1, 0), (0, 1), (-1, -1)), tag="P2")


def seed_p1xp1() -> CompleteFan:
    return CompleteFan(((1, 0), (0, 1), (-1, 0), (0, -1)), tag="P1xP1")


def seed_hirzebruch(r: int) -> CompleteFan:
    if isinstance(r, bool) or int(r) != r or r < 1:
        raise InvalidParameter(f"Hirzebruch parameter must be an integer >= 1, got {r!r}")
    return CompleteFan(((1, 0), (0, 1), (-1, int(r)), (0, -1)), tag=f"F{int(r)}")


def seed(name: str, r: Optional[int] = None) -> CompleteFan:
    name = name.lower()
    if name == "p2":
        return seed_p2()
    if name in ("p1xp1", "p1p1"):
        return seed_p1xp1()
    if name in ("hirzebruch", "f"):
        return seed_hirzebruch(1 if r is None else r)
    raise InvalidParameter(f"unknown seed surface {name!r}")
