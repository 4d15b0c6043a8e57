"""Command-line front end: ``toricadj {analyze,fan-info,blowup,catalog,verify}``.

Exit codes: 0 success, 1 counterexample found, 2 input error, 3 precondition
violation (for instance a polygon whose normal fan is singular).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import adjoint
from .enumeration import (
    ALL_CHECKS,
    BOX_CAP,
    MAX_BLOWUPS_CAP,
    CampaignConfig,
    parse_checks,
    report_json,
    run_campaign,
    summary_table,
)
from .errors import FlagError, InputError, ParseError, PreconditionViolated, ToricError
from .fan import CompleteFan, blow_up, check_smooth, fan_from_rays, normal_fan, seed
from .intersection import (
    TorusDivisor,
    canonical_divisor,
    intersect,
    intersection_table,
    is_ample,
    is_nef,
)
from .lattice import LatticePolygon

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3

log = logging.getLogger("toricadj")


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return data


def _int_pairs(data, what: str) -> list[tuple[int, int]]:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{what} must be a nonempty list of [x, y] pairs")
    out = []
    for p in data:
        if (
            not isinstance(p, list)
            or len(p) != 2
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in p)
        ):
            raise ParseError(f"{what}: {p!r} is not an integer pair")
        out.append((p[0], p[1]))
    return out


def load_polygon(path: str) -> LatticePolygon:
    data = _load_json(path)
    if "vertices" not in data:
        raise ParseError(f"{path}: missing 'vertices'")
    return LatticePolygon.from_points(_int_pairs(data["vertices"], "vertices"))


def load_fan(path: str) -> tuple[CompleteFan, Optional[tuple[int, ...]]]:
    data = _load_json(path)
    if "rays" not in data:
        raise ParseError(f"{path}: missing 'rays'")
    rays = _int_pairs(data["rays"], "rays")
    coeffs = data.get("coeffs")
    if coeffs is not None and (
        not isinstance(coeffs, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in coeffs)
    ):
        raise ParseError("coeffs must be a list of integers")
    return fan_from_rays(rays, coeffs, tag=data.get("tag", ""))


def _pairing_rows(F: CompleteFan) -> list[list[int]]:
    return intersection_table(F).as_lists()


def _format_report(rep: adjoint.AdjointReport) -> str:
    lines = [
        f"surface: {rep.surface or 'polygon'}  ({len(rep.rays)} rays)",
        f"L = {rep.L}   L^2 = {rep.L2}",
        f"{'i':>3} {'ray':>10} {'L.D':>5} {'D^2':>5} {'(K+L).D':>8}",
    ]
    for i, u in enumerate(rep.rays):
        lines.append(
            f"{i:>3} {str(tuple(u)):>10} {rep.degrees[i]:>5} {rep.self_intersections[i]:>5} {rep.adjoint[i]:>8}"
        )
    lines.append(f"K+L nef: {rep.adjoint_nef}   K+L ample: {rep.adjoint_ample}")
    if rep.witnesses:
        lines.append(
            "witnesses: " + ", ".join(f"ray {w.ray} {w.pair} [{w.kind.value}]" for w in rep.witnesses)
        )
    lines.append(f"criterion agrees: {rep.criterion_agrees}")
    if rep.excluded_surface:
        lines.append("note: this is the projective plane, where the criterion does not apply")
    if rep.polytope is not None:
        lines.append(f"polytope: {[tuple(p) for p in rep.polytope]}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    data = _load_json(args.path)
    if "rays" in data:
        F, coeffs = load_fan(args.path)
        if coeffs is None:
            raise ParseError("a fan file passed to analyze needs 'coeffs'")
        polytope = None
    else:
        P = load_polygon(args.path)
        F, coeffs = normal_fan(P)
        polytope = list(P.vertices)
    check_smooth(F)
    L = TorusDivisor(F, coeffs)
    rep = adjoint.classify(L)
    if polytope is None:
        from .intersection import polytope_of_divisor

        polytope = list(polytope_of_divisor(L).vertices)
    rep.polytope = polytope
    if args.pretty:
        print(_format_report(rep))
    else:
        print(json.dumps(rep.to_json(), indent=2))
    return EXIT_OK


def cmd_fan_info(args) -> int:
    F, coeffs = load_fan(args.path)
    check_smooth(F)
    K = canonical_divisor(F)
    out = {
        "schema": 1,
        "rays": [list(u) for u in F.rays],
        "n": F.n,
        "smooth": True,
        "b": list(F.b),
        "self_intersections": list(F.self_intersections),
        "pairing": _pairing_rows(F),
        "K": list(K.coeffs),
        "K2": intersect(K, K),
    }
    if coeffs is not None:
        L = TorusDivisor(F, coeffs)
        out["coeffs"] = list(coeffs)
        out["degrees"] = list(L.degrees())
        out["L2"] = intersect(L, L)
        out["nef"] = is_nef(L)
        out["ample"] = is_ample(L)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_blowup(args) -> int:
    F, coeffs = load_fan(args.path)
    G = blow_up(F, args.cone)
    out = {"rays": [list(u) for u in G.rays], "b": list(G.b)}
    if coeffs is not None:
        # pullback: the new ray gets a_i + a_{i+1}
        i = args.cone
        new = coeffs[i] + coeffs[(i + 1) % F.n]
        out["coeffs"] = list(coeffs[: i + 1]) + [new] + list(coeffs[i + 1 :])
    print(json.dumps(out, indent=2))
    return EXIT_OK


def catalog_entry(name: str, r: Optional[int] = None) -> dict:
    F = seed(name, r)
    K = canonical_divisor(F)
    entry = {
        "surface": F.tag,
        "rays": [list(u) for u in F.rays],
        "b": list(F.b),
        "self_intersections": list(F.self_intersections),
        "pairing": _pairing_rows(F),
        "K": list(K.coeffs),
        "K2": intersect(K, K),
    }
    if F.tag.startswith("F"):
        entry["nef_cone"] = {
            "divisor": "a*D_2 + b*D_3 (rays indexed from 0)",
            "nef": "a >= 0 and b >= 0",
            "ample": "a > 0 and b > 0",
        }
    return entry


def cmd_catalog(args) -> int:
    if args.surface != "hirzebruch" and args.r is not None:
        raise FlagError("--r only applies to hirzebruch")
    entry = catalog_entry(args.surface, args.r)
    if args.json:
        print(json.dumps(entry, indent=2))
        return EXIT_OK
    print(f"{entry['surface']}: rays {[tuple(u) for u in entry['rays']]}")
    print(f"b = {entry['b']}   D_i^2 = {entry['self_intersections']}")
    print("pairing:")
    for row in entry["pairing"]:
        print("  " + " ".join(f"{x:>3}" for x in row))
    print(f"K = {entry['K']}   K^2 = {entry['K2']}")
    if "nef_cone" in entry:
        nc = entry["nef_cone"]
        print(f"{nc['divisor']} is nef iff {nc['nef']}, ample iff {nc['ample']}")
    return EXIT_OK


_VERIFY_FLAGS = {
    "max_blowups": "max_blowups",
    "max_hirzebruch_r": "max_hirzebruch_r",
    "max_degree": "max_degree",
    "box": "box_size",
    "pentagon_box": "pentagon_box",
    "random_hulls": "random_hulls",
    "seed": "seed",
    "workers": "workers",
    "max_counterexamples": "max_counterexamples",
}


def build_config(args) -> CampaignConfig:
    cfg = CampaignConfig()
    if args.config:
        data = _load_json(args.config)
        known = set(CampaignConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise FlagError(f"unknown config keys {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, tuple(value) if key == "checks" else value)
    for flag, field_name in _VERIFY_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            setattr(cfg, field_name, value)
    if args.checks is not None:
        cfg.checks = parse_checks([c.strip() for c in args.checks.split(",") if c.strip()])
    if cfg.max_blowups > MAX_BLOWUPS_CAP:
        raise FlagError(f"--max-blowups {cfg.max_blowups} exceeds the cap {MAX_BLOWUPS_CAP}")
    return cfg.validate()


def cmd_verify(args) -> int:
    cfg = build_config(args)
    report = run_campaign(cfg)
    text = report_json(report, include_timing=args.timing)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    print(summary_table(report), file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_COUNTEREXAMPLE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricadj", description="Adjoint series on smooth toric surfaces.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="classify |K+L| for a polygon (or fan with coeffs) file")
    a.add_argument("path")
    a.add_argument("--pretty", action="store_true", help="human-readable table instead of JSON")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("fan-info", help="wall data, pairing and canonical class of a fan file")
    f.add_argument("path")
    f.set_defaults(func=cmd_fan_info)

    b = sub.add_parser("blowup", help="blow up one torus-fixed point of a fan file")
    b.add_argument("path")
    b.add_argument("--cone", type=int, required=True, help="cone index i (between rays i and i+1)")
    b.set_defaults(func=cmd_blowup)

    c = sub.add_parser("catalog", help="seed surfaces and their intersection data")
    c.add_argument("surface", choices=["p2", "p1xp1", "hirzebruch"])
    c.add_argument("--r", type=int, default=None, help="Hirzebruch parameter (default 1)")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", help="run the verification campaign")
    v.add_argument("--max-blowups", type=int, help=f"blowup depth (cap {MAX_BLOWUPS_CAP}, default 3)")
    v.add_argument("--max-hirzebruch-r", type=int, help="largest Hirzebruch seed (default 4)")
    v.add_argument("--max-degree", type=int, help="bound on L^2 (>= 10, default 100)")
    v.add_argument("--box", type=int, help=f"polygon box size (cap {BOX_CAP}, default 6)")
    v.add_argument("--pentagon-box", type=int, help=f"pentagon sweep box size (cap {BOX_CAP}, default 8)")
    v.add_argument("--random-hulls", type=int, help="random hulls for the Pick check (default 1000)")
    v.add_argument("--checks", help="comma-separated subset of: " + ",".join(ALL_CHECKS))
    v.add_argument("--workers", type=int, help="worker processes (default 1)")
    v.add_argument("--seed", type=int, help="seed for the random hulls (default 0)")
    v.add_argument("--max-counterexamples", type=int, help="stored counterexamples per check (default 20)")
    v.add_argument("--config", help="JSON file with CampaignConfig fields; flags override it")
    v.add_argument("--out", help="write the JSON report here instead of stdout")
    v.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionViolated as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ToricError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE


if __name__ == "__main__":
    sys.exit(main())
