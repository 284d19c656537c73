"""Command-line entry point for rendering benchmark artifacts."""

from __future__ import annotations

import argparse
from pathlib import Path

from .render import PlotSpec, render_convergence, render_table, render_tfreeze_sweep


def build_spec(args: argparse.Namespace, kind: str) -> PlotSpec:
    return PlotSpec(
        input_dir=Path(args.in_dir),
        kind=kind,
        problem=args.problem,
        alphas=tuple(args.alpha) if args.alpha else (),
        algorithms=tuple(args.algo) if args.algo else (),
        out=Path(args.out) if args.out else None,
        image_format=args.format,
        recompute=getattr(args, "recompute", False),
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description="Render benchmark CSV artifacts")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("table", "markdown success-rate table"),
        ("convergence", "median best-so-far curves"),
        ("tfreeze", "success rate vs warm-start factor"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--in", dest="in_dir", required=True, help="directory with runs.csv/table.csv")
        cmd.add_argument("--out", help="output path (table: text; figures: image)")
        cmd.add_argument("--problem", help="filter by problem kind")
        cmd.add_argument("--alpha", type=float, action="append", help="filter by alpha (repeatable)")
        cmd.add_argument("--algo", action="append", help="filter by algorithm (repeatable)")
        cmd.add_argument("--format", default="png", help="image format (default png)")
        if name == "table":
            cmd.add_argument("--recompute", action="store_true",
                             help="aggregate from runs.csv instead of reading table.csv")
    args = parser.parse_args(argv)

    if args.command == "table":
        print(render_table(build_spec(args, "table")), end="")
    elif args.command == "convergence":
        series = render_convergence(build_spec(args, "convergence"))
        for algorithm, (evals, _) in series.items():
            print(f"{algorithm}: {len(evals)} grid points")
    else:
        factors, rates = render_tfreeze_sweep(build_spec(args, "tfreeze-sweep"))
        for factor, rate in zip(factors, rates):
            print(f"A={factor:g}: {rate:.2f}")
    if args.out:
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
