"""Command-line entry point: ``plasmonsr <command> [--config PATH] ...``.

Failures exit nonzero with a JSON error report on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import sweep

COMMANDS = {
    "steady": "steady",
    "dynamics": "dynamics",
    "oracle": "oracle-compare",
    "field": "field-map",
    "fig2": "figure2",
    "fig3": "figure3",
    "fig4": "figure4",
}
# commands that have a complete default configuration
_CONFIG_OPTIONAL = {"fig2", "fig3", "fig4"}

EXIT_CONFIG = 2
EXIT_RUNTIME = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plasmonsr",
        description="Superradiant plasmon generation by two pumped emitters: sweeps and figure data.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, mode in COMMANDS.items():
        sp = sub.add_parser(name, help=f"run a {mode} sweep")
        sp.add_argument("--config", type=Path, required=name not in _CONFIG_OPTIONAL,
                        help="JSON sweep configuration")
        sp.add_argument("--out", default=None, help="output file ('-' or omitted: stdout)")
        sp.add_argument("--workers", type=int, default=None, help="worker processes")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
    return parser


def _report(kind: str, messages, code: int) -> int:
    json.dump({"status": "error", "kind": kind, "errors": list(messages)}, sys.stderr)
    sys.stderr.write("\n")
    return code


def _summary_path(out: Optional[str]) -> Optional[Path]:
    if out is None or out == "-":
        return None
    p = Path(out)
    return p.with_name(p.stem + ".summary.json")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    mode = COMMANDS[args.command]
    try:
        if args.config is not None:
            cfg = sweep.load_config(args.config, mode)
        else:
            cfg = sweep.parse_config({}, mode)
        if args.workers is not None and args.workers < 1:
            raise sweep.ConfigError(["--workers: must be a positive integer"])
    except sweep.ConfigError as exc:
        return _report("config", exc.errors, EXIT_CONFIG)

    out = args.out if args.out is not None else cfg.output
    fmt = args.format or cfg.format
    try:
        rows = sweep.run(cfg, workers=args.workers)
        sweep.emit(rows, out, cfg.mode, fmt)
        if cfg.mode == "oracle-compare":
            summary = json.dumps(sweep.oracle_summary(rows), indent=1, allow_nan=False) + "\n"
            path = _summary_path(out)
            if path is None:
                sys.stderr.write(summary)
            else:
                path.write_text(summary)
    except OSError as exc:
        return _report("io", [str(exc)], EXIT_RUNTIME)
    except Exception as exc:  # noqa: BLE001 - turned into a machine-readable report
        return _report("runtime", [f"{type(exc).__name__}: {exc}"], EXIT_RUNTIME)
    return 0


if __name__ == "__main__":
    sys.exit(main())
