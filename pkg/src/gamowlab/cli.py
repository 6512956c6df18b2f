"""Command-line entry point.

    gamowlab <command> --config PATH [--output PATH] [--format csv|json] [--kind decaying|growing]

Exit status is 0 on success, 1 for invalid input and 2 when a numerical
procedure fails. Failures print one JSON object on a single stderr line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import FORMATS, KINDS, default_config, loads, parse_yaml, validate
from .errors import ConfigError, NumericalError, ParseError, ValidationError
from .runner import COMMANDS, render, run

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gamowlab", description="Resonance poles, Gamow states and decay laws.")
    p.add_argument("--version", action="version", version=f"gamowlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, type=Path)
        sp.add_argument("--output", help="output file, '-' for stdout (default: output.path from the config)")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--kind", choices=KINDS, default="decaying")
    sp = sub.add_parser("validate", help="list config violations and exit 1 if any")
    sp.add_argument("--config", required=True, type=Path)
    sp.add_argument("--kind", choices=KINDS, default="decaying")
    sub.add_parser("default-config", help="print a well-formed default config")
    return p


def error_record(exc: BaseException, status: int) -> str:
    rec: dict = {"status": "error", "exit": status, "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        rec["violations"] = [{"field": v.field, "message": v.message} for v in exc.violations]
    if isinstance(exc, ParseError):
        rec["line"], rec["column"] = exc.line, exc.column
    return json.dumps(rec, separators=(",", ":"))


def _fail(exc: BaseException, status: int) -> int:
    print(error_record(exc, status), file=sys.stderr)
    return status


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {str(path)!r}: {exc.strerror}") from None


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ValidationError(f"cannot write output {path!r}: {exc.strerror}") from None


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "default-config":
            sys.stdout.write(default_config().to_yaml())
            return EXIT_OK
        text = _read(args.config)
        if args.command == "validate":
            violations = validate(parse_yaml(text), args.kind)
            if violations:
                raise ConfigError(violations)
            return EXIT_OK
        cfg = loads(text, args.kind)
        fmt = args.format or cfg.output.format
        table = run(args.command, cfg, args.kind)
        _write(render(table, cfg, fmt, args.kind), args.output or cfg.output.path)
    except ValidationError as exc:
        return _fail(exc, EXIT_VALIDATION)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
