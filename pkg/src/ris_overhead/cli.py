"""Command-line entry point ``ris-alloc``.

Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .experiment import (
    PRESETS,
    SUMMARY_HEADER,
    ConfigError,
    emit_csv,
    format_config,
    load_config,
    run_experiment,
    summarize_rows,
    summary_path,
)

_OBJECTIVE = {"rate-sweep": "rate", "ee-sweep": "ee", "pareto": "pareto"}

# flag -> config key
_OVERRIDES = {
    "objective": "objective",
    "schemes": "schemes",
    "n_list": "n_list",
    "trials": "trials",
    "seed": "seed",
    "out": "out",
    "t0_us": "t0_us",
    "p0_mw": "p0_mw",
    "protocol": "protocol",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ris-alloc", description="Overhead-aware RIS resource-allocation sweeps.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("rate-sweep", "ee-sweep", "pareto", "show-config"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="start from a built-in preset")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        p.add_argument("--objective", choices=["rate", "ee", "pareto"])
        p.add_argument("--schemes", help="comma list from a,b,c,d")
        p.add_argument("--n-list", help="comma list or lo:hi:step ranges")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="CSV path; the summary goes next to it")
        p.add_argument("--t0-us", type=float)
        p.add_argument("--p0-mw", type=float)
        p.add_argument("--protocol", choices=["a", "b", "sequential", "parallel"])
        if name != "show-config":
            p.add_argument("--workers", type=int, help="worker processes (capped by RIS_ALLOC_THREADS)")
    return ap


def _resolve(args) -> "ExperimentConfig":  # noqa: F821
    overrides = {}
    if args.command in _OBJECTIVE:
        overrides["objective"] = _OBJECTIVE[args.command]
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v
    for attr, key in _OVERRIDES.items():
        v = getattr(args, attr, None)
        if v is not None:
            if key == "objective" and args.command in _OBJECTIVE and v != _OBJECTIVE[args.command]:
                raise ConfigError(f"--objective {v} conflicts with subcommand {args.command}")
            overrides[key] = v
    return load_config(args.config, overrides=overrides, preset=args.preset)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2

    if args.command == "show-config":
        sys.stdout.write(format_config(cfg))
        return 0

    try:
        rows = run_experiment(cfg, workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        emit_csv(rows, cfg.output_path)
        emit_csv(summarize_rows(rows), summary_path(cfg.output_path), header=SUMMARY_HEADER)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(rows)} rows to {cfg.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
