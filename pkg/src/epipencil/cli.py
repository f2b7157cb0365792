"""Command-line front door.

The ``solve`` command is a thin client over the same pydantic models and
handler functions that back the HTTP routes, so both paths emit
byte-identical JSON. Exit codes: 0 success, 2 malformed input or flags,
3 solver degeneracy (with a machine-readable error payload on stderr).
"""

from __future__ import annotations

import argparse
import sys

from pydantic import ValidationError

from .errors import GeometryError
from .scenes import bench_csv, bench_noise, generate_scene
from .service.models import ErrorBody, ErrorResponse, ProblemFile


def _print_error(code: str, message: str, detail=None) -> None:
    body = ErrorResponse(error=ErrorBody(code=code, message=message, detail=detail))
    print(body.model_dump_json(exclude_none=True), file=sys.stderr)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _cmd_solve(args) -> int:
    from .service.handlers import solve_problem

    try:
        with open(args.problem, "r", encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as err:
        _print_error("io_error", f"cannot read {args.problem}: {err}")
        return 2
    try:
        problem = ProblemFile.model_validate_json(raw)
    except ValidationError as err:
        first = err.errors()[0]
        loc = ".".join(str(p) for p in first.get("loc", []))
        _print_error("invalid_input", f"{loc}: {first['msg']}" if loc else first["msg"])
        return 2
    try:
        resp = solve_problem(problem, with_fmatrix=args.fmatrix, n_samples=args.samples)
    except ValueError as err:
        _print_error("invalid_input", str(err))
        return 2
    except GeometryError as err:
        _print_error(err.code, err.message, err.detail or None)
        return 3
    _emit(resp.model_dump_json(), args.out)
    return 0


def _cmd_simulate(args) -> int:
    try:
        scene = generate_scene(
            mode=args.mode,
            n_points=args.n_points,
            image_size=tuple(args.image_size),
            seed=args.seed,
        )
    except GeometryError as err:
        _print_error(err.code, err.message, err.detail or None)
        return 3
    _emit(scene.to_json(), args.out)
    return 0


def _cmd_bench(args) -> int:
    try:
        sigmas = [float(s) for s in args.sigmas.split(",") if s != ""]
    except ValueError:
        _print_error("invalid_input", f"cannot parse sigma list {args.sigmas!r}")
        return 2
    if not sigmas or args.trials < 1:
        _print_error("invalid_input", "need at least one sigma and one trial")
        return 2
    rows = bench_noise(
        args.method,
        sigmas,
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        n_points=args.n_points,
    )
    _emit(bench_csv(rows), args.out)
    return 0


def _cmd_serve(args) -> int:
    from .service.app import main as serve_main

    serve_main(host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epipencil",
        description="Two-view epipolar geometry from 4-6 correspondences "
        "and a known epipole or epipolar line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file (JSON)")
    p.add_argument("problem", help="path to the problem JSON file")
    p.add_argument(
        "--fmatrix",
        action="store_true",
        help="also recover the fundamental matrix (5 or 6 correspondences)",
    )
    p.add_argument("--samples", type=int, default=256, help="conic polyline samples")
    p.add_argument("--out", default=None, help="write the result here instead of stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("simulate", help="generate a synthetic ground-truth scene")
    p.add_argument("--mode", choices=("facing", "lateral"), default="facing")
    p.add_argument("--n-points", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--image-size", type=int, nargs=2, default=(640, 480), metavar=("W", "H")
    )
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="noise sweep for one solver; CSV output")
    p.add_argument("--method", choices=("solve4", "solve5", "solve6"), required=True)
    p.add_argument("--sigmas", default="0,0.5,1,2", help="comma-separated pixel sigmas")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("facing", "lateral"), default="facing")
    p.add_argument("--n-points", type=int, default=12)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP JSON service and UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None, help="default: $EPIPENCIL_PORT or 8000")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
