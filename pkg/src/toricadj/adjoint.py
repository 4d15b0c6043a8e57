"""Numerical criterion for the adjoint series |K_X + L| on smooth toric surfaces.

Witnesses are prime invariant divisors D_i whose pair (L.D_i, D_i^2) lies in an
obstruction set:

* basepoint freeness fails iff some D_i has (L.D_i, D_i^2) = (1, 0);
* ampleness fails iff some D_i has a pair in {(1,-1), (1,0), (2,0), (3,1)},
  and (3,1) can be dropped when L^2 >= 10.

Both statements exclude the projective plane.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import ExcludedSurface, InvariantViolation, NotAmple
from .fan import check_smooth
from .intersection import TorusDivisor, adjoint_numbers, intersect, is_ample

BPF_OBSTRUCTIONS = frozenset({(1, 0)})
AMPLE_OBSTRUCTIONS = frozenset({(1, -1), (1, 0), (2, 0), (3, 1)})
REFINED_AMPLE_OBSTRUCTIONS = AMPLE_OBSTRUCTIONS - {(3, 1)}
REFINEMENT_DEGREE = 10


class WitnessKind(str, enum.Enum):
    BPF = "BpfObstruction"
    AMPLE = "AmpleObstruction"


@dataclass(frozen=True)
class Witness:
    ray: int
    dL: int
    dSq: int
    kind: WitnessKind

    @property
    def pair(self) -> tuple[int, int]:
        return (self.dL, self.dSq)

    def to_json(self) -> dict:
        return {"ray": self.ray, "dL": self.dL, "dSq": self.dSq, "kind": self.kind.value}


def _require_ample(L: TorusDivisor):
    check_smooth(L.fan)
    if not is_ample(L):
        raise NotAmple(f"divisor {L.coeffs} is not ample on {L.fan.tag or L.fan.rays}")


def _pairs(L: TorusDivisor) -> list[tuple[int, int]]:
    F = L.fan
    return [(d, -bi) for d, bi in zip(L.degrees(), F.b)]


def is_excluded_surface(L_or_fan) -> bool:
    """True for the projective plane: every smooth complete fan with 3 rays."""
    fan = getattr(L_or_fan, "fan", L_or_fan)
    return fan.n == 3


def bpf_witnesses(L: TorusDivisor) -> list[Witness]:
    _require_ample(L)
    return [
        Witness(i, dl, dsq, WitnessKind.BPF)
        for i, (dl, dsq) in enumerate(_pairs(L))
        if (dl, dsq) in BPF_OBSTRUCTIONS
    ]


def ample_witnesses(L: TorusDivisor, obstructions=AMPLE_OBSTRUCTIONS) -> list[Witness]:
    _require_ample(L)
    found = [
        Witness(i, dl, dsq, WitnessKind.AMPLE)
        for i, (dl, dsq) in enumerate(_pairs(L))
        if (dl, dsq) in obstructions
    ]
    if intersect(L, L) >= REFINEMENT_DEGREE and any(w.pair == (3, 1) for w in found):
        # (L.D)^2 = 9 < L^2 D^2 would break the Hodge inequality
        raise InvariantViolation(f"(3,1) witness with L^2 >= 10 for {L.coeffs}")
    return found


@dataclass
class AdjointReport:
    surface: str
    rays: list[tuple[int, int]]
    L: list[int]
    L2: int
    degrees: list[int]
    self_intersections: list[int]
    adjoint: list[int]
    adjoint_nef: bool
    adjoint_ample: bool
    witnesses: list[Witness]
    part1_agrees: bool
    part2_agrees: bool
    refined_agrees: Optional[bool]
    criterion_agrees: bool
    excluded_surface: bool
    polytope: Optional[list[tuple[int, int]]] = None
    schema: int = field(default=1)

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "surface": self.surface,
            "rays": [list(u) for u in self.rays],
            "L": list(self.L),
            "L2": self.L2,
            "rays_data": [
                {"ray": i, "L_dot_D": d, "D_sq": s, "adjoint": a}
                for i, (d, s, a) in enumerate(zip(self.degrees, self.self_intersections, self.adjoint))
            ],
            "adjoint_nef": self.adjoint_nef,
            "adjoint_ample": self.adjoint_ample,
            "witnesses": [w.to_json() for w in self.witnesses],
            "part1_agrees": self.part1_agrees,
            "part2_agrees": self.part2_agrees,
            "refined_agrees": self.refined_agrees,
            "criterion_agrees": self.criterion_agrees,
            "excluded_surface": self.excluded_surface,
            "polytope": None if self.polytope is None else [list(p) for p in self.polytope],
        }


def classify(L: TorusDivisor) -> AdjointReport:
    """Decide nefness and ampleness of K_X + L directly and by witnesses.

    Raises NotSmooth or NotAmple when the preconditions fail. Agreement flags are
    computed on every surface; only off the projective plane are they
    guaranteed to hold.
    """
    _require_ample(L)
    F = L.fan
    adj = adjoint_numbers(L)
    if not adj.agree:
        raise InvariantViolation(
            f"adjoint numbers disagree on {F.rays}: direct {adj.direct}, formula {adj.formula}"
        )
    nef = min(adj.values) >= 0
    ample = min(adj.values) > 0
    bpf = bpf_witnesses(L)
    amp = ample_witnesses(L)
    L2 = intersect(L, L)
    part1 = (not nef) == bool(bpf)
    part2 = (not ample) == bool(amp)
    refined = None
    if L2 >= REFINEMENT_DEGREE:
        refined = (not ample) == bool(ample_witnesses(L, REFINED_AMPLE_OBSTRUCTIONS))

    bpf_rays = {w.ray for w in bpf}
    witnesses = bpf + [w for w in amp if w.ray not in bpf_rays]
    witnesses.sort(key=lambda w: w.ray)
    return AdjointReport(
        surface=F.tag,
        rays=list(F.rays),
        L=list(L.coeffs),
        L2=L2,
        degrees=list(L.degrees()),
        self_intersections=list(F.self_intersections),
        adjoint=list(adj.values),
        adjoint_nef=nef,
        adjoint_ample=ample,
        witnesses=witnesses,
        part1_agrees=part1,
        part2_agrees=part2,
        refined_agrees=refined,
        criterion_agrees=part1 and part2,
        excluded_surface=is_excluded_surface(F),
    )


@dataclass(frozen=True)
class FujitaResult:
    bpf_guarantee: bool
    vample_guarantee: bool


def fujita_check(L: TorusDivisor) -> FujitaResult:
    """Degree conditions that force K_X + L to be globally generated / very ample."""
    _require_ample(L)
    if is_excluded_surface(L):
        raise ExcludedSurface("the Fujita-type bounds fail on the projective plane")
    low = min(L.degrees())
    return FujitaResult(
        bpf_guarantee=low >= 2,
        vample_guarantee=intersect(L, L) >= REFINEMENT_DEGREE and low >= 3,
    )
