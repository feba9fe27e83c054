"""Command line front end.

Exit codes: 0 success (and every suite criterion green), 1 when the
acceptance suite has a failing criterion, 2 for input or model errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import TorsionLabError
from .workbench import COMMANDS, RunOptions, emit, run

_SUITE_BUDGET_NOTE = "suite runs pinned tolerances; --tol is not accepted there"


def _color_enabled() -> bool:
    if os.environ.get("TORSION_NO_COLOR"):
        return False
    return sys.stdout.isatty()


def _style(text: str, code: str, enable: bool) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if enable else text


def _suite_text(report) -> str:
    enable = _color_enabled()
    lines = ["torsion suite"]
    for c in report.result["criteria"]:
        tag = (
            _style("PASS", "32", enable)
            if c["passed"]
            else _style("FAIL", "31", enable)
        )
        lines.append(f"  {tag}  {c['id']:>2}  {c['title']}: {c['detail']}")
    n = len(report.result["criteria"])
    good = sum(1 for c in report.result["criteria"] if c["passed"])
    verdict = "all criteria passed" if good == n else f"{n - good} of {n} criteria failed"
    lines.append(f"  {verdict}")
    if "wall_seconds" in report.timings:
        lines.append(f"  wall time: {report.timings['wall_seconds']:.3f} s")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torsion",
        description=(
            "Torsion invariants of finite cochain complexes: graded and "
            "flux-twisted torsion, circle-bundle models, and the duality "
            "inversion check."
        ),
    )
    parser.add_argument(
        "command",
        choices=list(COMMANDS) + ["suite"],
        help="operation to run",
    )
    parser.add_argument(
        "model",
        nargs="?",
        default=None,
        help="model file (.json) or builder expression such as cycle(12), "
        "lens(5,1,2), hopf(1,2,1), random(7,3); ignored by suite",
    )
    parser.add_argument("--flux", default="zero", help="zero, top, top(c), or a cochain.v1 file")
    parser.add_argument("--radius", type=float, default=None, help="override the fiber radius")
    parser.add_argument("--tol", type=float, default=None, help="kernel tolerance override")
    parser.add_argument("--seed", type=int, default=None, help="seed for random bundle models")
    parser.add_argument("--steps", type=int, default=8, help="steps for deformation paths")
    parser.add_argument("--format", dest="fmt", choices=("json", "text"), default="text")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "suite":
        if args.tol is not None:
            parser.error(_SUITE_BUDGET_NOTE)
        from .suite import run_suite

        report = run_suite()
        if args.fmt == "json":
            sys.stdout.buffer.write(emit(report, "json"))
        else:
            sys.stdout.write(_suite_text(report))
        return 0 if report.result["all_passed"] else 1

    if args.model is None:
        parser.error(f"command {args.command!r} needs a model argument")

    options = RunOptions(
        flux=args.flux,
        radius=args.radius,
        kernel_tol=args.tol,
        seed=args.seed,
        steps=args.steps,
    )
    try:
        report = run(args.command, args.model, options)
    except TorsionLabError as exc:
        print(f"torsion: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.buffer.write(emit(report, args.fmt))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
