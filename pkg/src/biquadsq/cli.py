"""Command-line surface: one subcommand per library operation plus a
resumable JSONL survey over (m, n) ranges.

Exit codes: 0 success, 2 invalid input, 3 search or factorization budget
exhausted, 4 internal consistency failure.  All integers in JSON output are
emitted as strings so arbitrary-precision values survive lossy consumers.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

from .arith import FactorizationBudgetError
from .classify import RoutesDisagreeError, certify_g3, classify_m
from .field import (
    IntegralCoords,
    integral_basis,
    make_params,
    to_integral_coords,
)
from .pell import NoConsistentBranchError, fundamental_solution, solve_target
from .squares import (
    SearchExhaustedError,
    compress,
    min_squares_bounded,
    represent_any,
    s_level,
    two_square_obstruction,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _parse_coords(raw: str, params) -> IntegralCoords:
    parts = raw.split(",")
    if len(parts) != 4:
        raise ValueError(f"--coords expects four comma-separated integers, got {raw!r}")
    return IntegralCoords(params, tuple(int(p.strip()) for p in parts))


def _cmd_basis(args) -> int:
    params = make_params(args.m, args.n)
    elements = []
    for i, e in enumerate(integral_basis(params), start=1):
        xc = to_integral_coords(e)
        assert xc is not None
        elements.append(
            {
                "index": str(i),
                "coords_uvw": [str(c) for c in e.coords],
                "coords_module": [str(c) for c in xc.x],
            }
        )
    _emit(
        {
            "m": str(params.m),
            "n": str(params.n),
            "g": str(params.g),
            "ell": str(params.ell),
            "basis": elements,
        }
    )
    return EXIT_OK


def _cmd_pell(args) -> int:
    if args.target == 1:
        sol = fundamental_solution(args.D)
    else:
        sol = solve_target(args.D, args.target)
    out = {"D": str(args.D), "target": str(args.target)}
    if sol is None:
        out["solution"] = "none"
        out["note"] = (
            "convergent scan over two periods, complete for N^2 < D; "
            "direct scan up to the fundamental height otherwise"
        )
    else:
        out["x"] = str(sol.x)
        out["y"] = str(sol.y)
    _emit(out)
    return EXIT_OK


def _cmd_s_level(args) -> int:
    params = make_params(args.m, args.n)
    _emit(s_level(params, args.box).to_dict())
    return EXIT_OK


def _cmd_decompose(args) -> int:
    params = make_params(args.m, args.n)
    coords = _parse_coords(args.coords, params)
    rep = represent_any(coords) if args.raw else compress(coords, args.box)
    _emit(rep.to_dict())
    return EXIT_OK


def _cmd_min_squares(args) -> int:
    params = make_params(args.m, args.n)
    coords = _parse_coords(args.coords, params)
    t = min_squares_bounded(coords, t_max=args.tmax, box=args.box)
    _emit(
        {
            "m": str(params.m),
            "n": str(params.n),
            "coords": [str(c) for c in coords.x],
            "t": None if t is None else str(t),
            "t_max": str(args.tmax),
            "box": str(args.box),
        }
    )
    return EXIT_OK


def _cmd_obstruct(args) -> int:
    params = make_params(args.m, args.n)
    coords = _parse_coords(args.coords, params)
    obstructed = two_square_obstruction(coords, k=args.k)
    _emit(
        {
            "m": str(params.m),
            "n": str(params.n),
            "coords": [str(c) for c in coords.x],
            "k": str(args.k),
            "obstructed": obstructed,
            "meaning": (
                "certified not a sum of two integral squares"
                if obstructed
                else "inconclusive"
            ),
        }
    )
    return EXIT_OK


def _cmd_classify(args) -> int:
    _emit(classify_m(args.m).to_dict())
    return EXIT_OK


def _cmd_certify(args) -> int:
    params = make_params(args.m, args.n)
    _emit(certify_g3(params, search_box=args.box).to_dict())
    return EXIT_OK


def _survey_record(m: int, n: int, box: int | None) -> dict:
    start = time.perf_counter()
    params = make_params(m, n)
    level = s_level(params, box)
    report = certify_g3(params, search_box=box, scan_obstruction=False)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return {
        "m": str(m),
        "n": str(n),
        "g": str(params.g),
        "ell": str(params.ell),
        "s_level": str(level.s),
        "s_method": level.method,
        "pattern": report.pattern,
        "g3_certified": report.conclusion == "g = 3",
        "pell_xy": (
            None
            if report.pell_witness is None
            else {"x": str(report.pell_witness.x), "y": str(report.pell_witness.y)}
        ),
        "timing_ms": round(elapsed_ms, 3),
    }


def _survey_worker(job: tuple[int, int, int | None]):
    m, n, box = job
    try:
        return ("ok", m, n, _survey_record(m, n, box))
    except ValueError as exc:
        return ("skip", m, n, str(exc))


def _cmd_survey(args) -> int:
    out_path = Path(args.out)
    done: set[tuple[int, int]] = set()
    if out_path.exists():
        with out_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rec = json.loads(line)
                    done.add((int(rec["m"]), int(rec["n"])))
    jobs = [
        (m, n, args.box)
        for m in range(args.m_from, args.m_to + 1)
        for n in range(args.n_from, args.n_to + 1)
        if (m, n) not in done
    ]
    written = 0
    skipped = 0
    with out_path.open("a", encoding="utf-8") as fh:

        def handle(result) -> None:
            nonlocal written, skipped
            status, m, n, payload = result
            if status == "ok":
                fh.write(json.dumps(payload, sort_keys=True) + "\n")
                fh.flush()
                written += 1
            else:
                skipped += 1
                print(f"skip m={m} n={n}: {payload}", file=sys.stderr)

        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                futures = [pool.submit(_survey_worker, job) for job in jobs]
                for fut in as_completed(futures):
                    handle(fut.result())
        else:
            for job in jobs:
                handle(_survey_worker(job))
    print(
        f"survey: {written} records written, {skipped} pairs skipped, "
        f"{len(done)} already present",
        file=sys.stderr,
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biquadsq",
        description=(
            "Exact sums-of-squares arithmetic in the ring of integers of "
            "Q(sqrt(-m), sqrt(n))"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", help="print the module basis of the ring of integers")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("pell", help="solve x^2 - D*y^2 = N for N in {1, -1, 2, -2}")
    p.add_argument("D", type=int)
    p.add_argument("--target", type=int, default=1, choices=(1, -1, 2, -2))
    p.set_defaults(func=_cmd_pell)

    p = sub.add_parser("s-level", help="level of -1 with a verified witness")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--box", type=int, default=None)
    p.set_defaults(func=_cmd_s_level)

    p = sub.add_parser("decompose", help="sum-of-squares representation of an element")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--coords", required=True, help="x1,x2,x3,x4 over the module basis")
    p.add_argument("--raw", action="store_true", help="skip length compression")
    p.add_argument("--box", type=int, default=None)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("min-squares", help="bounded minimal-length oracle")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--coords", required=True)
    p.add_argument("--tmax", type=int, default=3)
    p.add_argument("--box", type=int, required=True)
    p.set_defaults(func=_cmd_min_squares)

    p = sub.add_parser("obstruct", help="residue-ring two-square obstruction")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--coords", required=True)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(func=_cmd_obstruct)

    p = sub.add_parser("classify", help="match m against the certified prime patterns")
    p.add_argument("m", type=int)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("certify", help="full g = 3 certification for (m, n)")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--box", type=int, default=None)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("survey", help="sweep (m, n) ranges into a resumable JSONL file")
    p.add_argument("--m-from", type=int, required=True)
    p.add_argument("--m-to", type=int, required=True)
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--box", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_survey)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FactorizationBudgetError, SearchExhaustedError) as exc:
        print(f"error: budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RoutesDisagreeError, NoConsistentBranchError, AssertionError) as exc:
        print(f"error: internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: invalid-input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
