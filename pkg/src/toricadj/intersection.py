"""Divisors and the intersection pairing on a smooth complete toric surface.

Two independent routes compute degrees of divisors on the invariant curves:

* :func:`intersect` expands bilinearly over the :class:`IntersectionTable`
  (``D_i.D_{i+-1} = 1``, ``D_i^2 = -b_i``, zero otherwise);
* :func:`degree_on_curve` uses the wall relation directly,
  ``L.D_i = a_{i-1} - b_i a_i + a_{i+1}``.

The adjoint numbers are computed both ways and compared.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import DegenerateInput, FanMismatch, IndexOutOfRange, NotAmple, NotNef
from .fan import CompleteFan, check_smooth
from .lattice import LatticePolygon, Point, convex_hull


@dataclass(frozen=True)
class TorusDivisor:
    """D = sum a_i D_i on the surface of ``fan``."""

    fan: CompleteFan
    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.fan.n:
            raise DegenerateInput(
                f"{len(coeffs)} coefficients given for a fan with {self.fan.n} rays"
            )

    def _check(self, other: "TorusDivisor"):
        if other.fan != self.fan:
            raise FanMismatch("divisors live on different fans")

    def __add__(self, other: "TorusDivisor") -> "TorusDivisor":
        self._check(other)
        return TorusDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TorusDivisor") -> "TorusDivisor":
        self._check(other)
        return TorusDivisor(self.fan, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TorusDivisor":
        return TorusDivisor(self.fan, tuple(-a for a in self.coeffs))

    def __rmul__(self, k: int) -> "TorusDivisor":
        return TorusDivisor(self.fan, tuple(k * a for a in self.coeffs))

    __mul__ = __rmul__

    def degrees(self) -> tuple[int, ...]:
        """(D.D_0, ..., D.D_{n-1}) via the wall relation."""
        return tuple(degree_on_curve(self, i) for i in range(self.fan.n))

    def self_intersection(self) -> int:
        return intersect(self, self)


def prime_divisor(F: CompleteFan, i: int) -> TorusDivisor:
    if not 0 <= i < F.n:
        raise IndexOutOfRange(f"ray index {i} outside 0..{F.n - 1}")
    return TorusDivisor(F, tuple(1 if j == i else 0 for j in range(F.n)))


def zero_divisor(F: CompleteFan) -> TorusDivisor:
    return TorusDivisor(F, (0,) * F.n)


@dataclass(frozen=True)
class IntersectionTable:
    fan: CompleteFan
    pairing: tuple[tuple[int, ...], ...]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.pairing[i][j]

    def as_lists(self) -> list[list[int]]:
        return [list(row) for row in self.pairing]


@lru_cache(maxsize=4096)
def intersection_table(F: CompleteFan) -> IntersectionTable:
    b = F.b  # raises NotSmooth
    n = F.n
    rows = []
    for i in range(n):
        row = [0] * n
        row[(i + 1) % n] += 1
        row[(i - 1) % n] += 1
        row[i] = -b[i]
        rows.append(tuple(row))
    return IntersectionTable(F, tuple(rows))


def intersect(D: TorusDivisor, E: TorusDivisor) -> int:
    if D.fan != E.fan:
        raise FanMismatch("divisors live on different fans")
    table = intersection_table(D.fan).pairing
    total = 0
    for i, a in enumerate(D.coeffs):
        if a:
            row = table[i]
            total += a * sum(r * c for r, c in zip(row, E.coeffs))
    return total


def degree_on_curve(L: TorusDivisor, i: int) -> int:
    F = L.fan
    n = F.n
    if not 0 <= i < n:
        raise IndexOutOfRange(f"ray index {i} outside 0..{n - 1}")
    a = L.coeffs
    return a[i - 1] - F.b[i] * a[i] + a[(i + 1) % n]


def canonical_divisor(F: CompleteFan) -> TorusDivisor:
    check_smooth(F)
    return TorusDivisor(F, (-1,) * F.n)


@dataclass(frozen=True)
class AdjointNumbers:
    """(L + K_X).D_i per ray, by the pairing table and by L.D_i - D_i^2 - 2."""

    direct: tuple[int, ...]
    formula: tuple[int, ...]

    @property
    def values(self) -> tuple[int, ...]:
        return self.direct

    @property
    def agree(self) -> bool:
        return self.direct == self.formula


def adjoint_numbers(L: TorusDivisor) -> AdjointNumbers:
    F = L.fan
    check_smooth(F)
    LK = L + canonical_divisor(F)
    direct = tuple(intersect(LK, prime_divisor(F, i)) for i in range(F.n))
    # D_i^2 = -b_i straight from the wall relation, independent of the table
    formula = tuple(degree_on_curve(L, i) + F.b[i] - 2 for i in range(F.n))
    return AdjointNumbers(direct, formula)


def is_nef(D: TorusDivisor) -> bool:
    return all(d >= 0 for d in D.degrees())


def is_ample(D: TorusDivisor) -> bool:
    return all(d > 0 for d in D.degrees())


# On smooth complete toric surfaces nef <=> globally generated and ample <=> very ample.
is_basepoint_free = is_nef
is_very_ample = is_ample


def polytope_vertices(D: TorusDivisor) -> list[Point]:
    """The points m_sigma, one per maximal cone, solving the two tight facet equations.

    For nef D these are the vertices of the divisor polytope, with repeats where
    an edge has length zero.
    """
    F = D.fan
    check_smooth(F)
    a = D.coeffs
    out = []
    for i in range(F.n):
        (p, q), (r, s) = F.cone(i)
        c0, c1 = -a[i], -a[(i + 1) % F.n]
        # [[p, q], [r, s]] has determinant 1
        out.append(Point(s * c0 - q * c1, -r * c0 + p * c1))
    return out


def polytope_of_divisor(D: TorusDivisor) -> LatticePolygon:
    """P_D = {m : <m, u_i> >= -a_i} for nef D.

    Raises NotNef when D is not nef and DegenerateInput when P_D is a point or a
    segment (nef but far from ample).
    """
    if not is_nef(D):
        raise NotNef(f"divisor {D.coeffs} is not nef; its polytope is not spanned by the m_sigma")
    try:
        return convex_hull(polytope_vertices(D))
    except DegenerateInput as exc:
        raise DegenerateInput(f"polytope of {D.coeffs} is lower-dimensional") from exc


def principal_divisor(m: Sequence[int], F: CompleteFan) -> TorusDivisor:
    """div(chi^m) = sum <m, u_i> D_i."""
    return TorusDivisor(F, tuple(m[0] * u[0] + m[1] * u[1] for u in F.rays))


def hodge_check(L: TorusDivisor, D: TorusDivisor) -> bool:
    """(L.D)^2 >= L^2 D^2 for ample L. False means the pairing is broken."""
    if not is_ample(L):
        raise NotAmple(f"divisor {L.coeffs} is not ample")
    ld = intersect(L, D)
    return ld * ld >= intersect(L, L) * intersect(D, D)
