"""Command-line front end.

Subcommands cover projector construction, twirling, PPT and bound checks,
region scans, pair reduction, hull vertices, and the dense verification
suite.  Data goes to stdout (or --out where available) with reproducible
formatting; diagnostics go to stderr.  Exit codes: 0 success, 1 failed
verification, 2 argument errors, 3 capacity, 4 domain errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .dense import CapacityError, ComplexOperator, DomainError, PSD_TOL
from .jsonio import dumps, format_float
from .projectors import build_multipartite, multipartite_trace
from .simplex import (
    FidelityVector,
    all_masks,
    all_multi_indices,
    default_grid_resolution,
    grid_points,
    hull_vertices,
    intersection_point,
    ppt_check,
    reduce_pair,
    sep_bound_check,
    twirl_coords,
)
from .verify import DEFAULT_SEED, first_failure, run_suite

SEED_ENV_VAR = "ORTHOSYM_SEED"


def _digits_string(digits) -> str:
    return "".join(str(int(g)) for g in digits)


def _parse_mask(text: str, K: int) -> tuple[int, ...]:
    if len(text) != K or any(ch not in "01" for ch in text):
        raise ValueError(f"mask must be {K} binary digits, got {text!r}")
    return tuple(int(ch) for ch in text)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_projectors(args) -> int:
    alpha = tuple(int(tok) for tok in args.alpha.split(","))
    op = build_multipartite(args.d, args.K, alpha)
    doc = {
        "d": args.d,
        "K": args.K,
        "alpha": list(alpha),
        "trace": str(multipartite_trace(args.d, alpha)),
    }
    doc.update(op.to_json())
    _emit(args, dumps(doc) + "\n")
    return 0


def cmd_twirl(args) -> int:
    op = ComplexOperator.from_json(_load_json(args.state))
    f = twirl_coords(op, args.d, args.K)
    _emit(args, dumps(f.to_json()) + "\n")
    return 0


def cmd_ppt(args) -> int:
    f = FidelityVector.from_json(_load_json(args.fid))
    masks = [_parse_mask(args.mask, f.K)] if args.mask else all_masks(f.K)
    verdicts = []
    for mask in masks:
        verdict = ppt_check(f, mask, args.tol)
        verdicts.append(
            {
                "mask": _digits_string(mask),
                "is_ppt": verdict.is_ppt,
                "pi": list(verdict.transformed.pi),
                "violations": [
                    {"alpha": _digits_string(digits), "value": value}
                    for digits, value in verdict.violations
                ],
            }
        )
    _emit(args, dumps({"d": f.d, "K": f.K, "tol": args.tol, "verdicts": verdicts}) + "\n")
    return 0


def cmd_sep(args) -> int:
    f = FidelityVector.from_json(_load_json(args.fid))
    result = sep_bound_check(f)
    rows = [
        {
            "sigma": _digits_string(alpha),
            "pi": float(f.pi[rank]),
            "bound": float(result.bounds[rank]),
            "ok": bool(f.pi[rank] <= result.bounds[rank] + PSD_TOL),
        }
        for rank, alpha in enumerate(all_multi_indices(f.K))
    ]
    doc = {
        "d": f.d,
        "K": f.K,
        "passes": result.passes,
        "scope": "sufficient" if result.sufficient else "necessary-only",
        "violated": [_digits_string(a) for a in result.violated],
        "coordinates": rows,
    }
    _emit(args, dumps(doc) + "\n")
    return 0


def cmd_scan(args) -> int:
    n = args.grid if args.grid else default_grid_resolution(args.K)
    masks = all_masks(args.K)
    header = (
        [f"pi_{_digits_string(a)}" for a in all_multi_indices(args.K)]
        + ["sep_bound"]
        + [f"ppt_{_digits_string(m)}" for m in masks]
        + ["class"]
    )
    lines = [",".join(header)]
    for f in grid_points(args.d, args.K, n):
        verdicts = [ppt_check(f, m, args.tol) for m in masks]
        bound_ok = sep_bound_check(f).passes
        if not all(v.is_ppt for v in verdicts):
            label = "NPT"
        elif bound_ok:
            label = "bound-pass"
        else:
            label = "PPT-all"
        fields = (
            [format_float(x) for x in f.pi]
            + ["1" if bound_ok else "0"]
            + ["1" if v.is_ppt else "0" for v in verdicts]
            + [label]
        )
        lines.append(",".join(fields))
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_reduce(args) -> int:
    f = FidelityVector.from_json(_load_json(args.fid))
    _emit(args, dumps(reduce_pair(f, args.pair).to_json()) + "\n")
    return 0


def cmd_vertices(args) -> int:
    crossing = intersection_point(args.d)
    doc = {
        "d": args.d,
        "K": args.K,
        "vertices": [
            {"pairs": list(labels), "pi": list(f.pi)}
            for labels, f in hull_vertices(args.d, args.K)
        ],
        "intersection": {
            "q": crossing.q,
            "p": crossing.p,
            "coords": list(crossing.coords),
            "coords_isotropic": list(crossing.coords_isotropic),
        },
    }
    _emit(args, dumps(doc) + "\n")
    return 0


def cmd_verify(args) -> int:
    seed = args.seed
    if seed is None and SEED_ENV_VAR in os.environ:
        seed = int(os.environ[SEED_ENV_VAR])
    if seed is None:
        seed = DEFAULT_SEED
    if args.d is not None or args.K is not None:
        combos = ((args.d if args.d is not None else 2, args.K if args.K is not None else 1),)
    else:
        combos = ((2, 1), (2, 2), (3, 1))
    reports = run_suite(seed=seed, combos=combos)
    _emit(args, dumps([r.to_json() for r in reports]) + "\n")
    failed = first_failure(reports)
    if failed is not None:
        print(
            f"verification failed: {failed.check} {failed.params} "
            f"residual {failed.max_residual:.3e} > tol {failed.tolerance:.1e}",
            file=sys.stderr,
        )
        return 1
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthosym",
        description="Invariant-simplex toolkit: projectors, twirling, PPT and "
        "separability analysis, region scans, and dense verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("projectors", help="emit one dense pair projector as JSON")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--K", type=_positive_int, required=True)
    p.add_argument("--alpha", required=True, help="comma-separated trinary digits, e.g. 0,2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_projectors)

    p = sub.add_parser("twirl", help="project a dense state onto the simplex")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--K", type=_positive_int, required=True)
    p.add_argument("--state", required=True, help="dense operator JSON file")
    p.set_defaults(func=cmd_twirl)

    p = sub.add_parser("ppt", help="partial-transposition positivity verdicts")
    p.add_argument("--fid", required=True, help="fidelity vector JSON file")
    p.add_argument("--mask", help="binary digit string, e.g. 01 (default: all masks)")
    p.add_argument("--tol", type=float, default=PSD_TOL)
    p.set_defaults(func=cmd_ppt)

    p = sub.add_parser("sep", help="per-coordinate separability bounds")
    p.add_argument("--fid", required=True)
    p.set_defaults(func=cmd_sep)

    p = sub.add_parser("scan", help="classify a lattice over the simplex into CSV")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--K", type=_positive_int, required=True)
    p.add_argument("--grid", type=_positive_int, help="lattice resolution n (default: <= 1e5 points)")
    p.add_argument("--tol", type=float, default=PSD_TOL)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("reduce", help="sum out one Alice-Bob pair")
    p.add_argument("--fid", required=True)
    p.add_argument("--pair", type=int, required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("vertices", help="hull-generator vertices and line crossing")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--K", type=_positive_int, default=1)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("verify", help="run the dense verification suite")
    p.add_argument("--d", type=_positive_int)
    p.add_argument("--K", type=_positive_int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, IndexError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
