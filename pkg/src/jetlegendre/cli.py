"""Command-line entry point: ``jetlegendre <command> [--manifest PATH] ...``.

Exit codes: 0 success, 2 validation error, 3 mathematical obstruction,
4 acceptance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import report
from .errors import IntegrabilityError, JetLegendreError, ObstructionError
from .manifest import FIXTURES, load_fixture, load_manifest

EXIT_OK, EXIT_INVALID, EXIT_OBSTRUCTION, EXIT_ACCEPTANCE = 0, 2, 3, 4
SECTIONS = ("el", "ostrogradsky", "schmidt", "dirac_chain", "canonical_map", "numeric")
COMMANDS = ("el", "ostro", "schmidt", "dirac", "bridge", "simulate", "verify")


def build_parser():
    p = argparse.ArgumentParser(prog="jetlegendre",
                                description="Legendre transformations for higher-order Lagrangians.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--manifest", help=f"manifest path, or a bundled example: {', '.join(FIXTURES)}")
    p.add_argument("--out", help="directory for trajectory CSV files")
    p.add_argument("--dt", type=float, help="integration step (overrides the manifest)")
    p.add_argument("--T", type=float, help="integration horizon (overrides the manifest)")
    p.add_argument("--json", action="store_true", help="machine-readable output for verify")
    p.add_argument("--mode", choices=("auto", "even", "odd"), help="override the manifest mode")
    return p


def open_manifest(ref):
    if ref is None:
        raise JetLegendreError("this command needs --manifest")
    path = Path(ref)
    if not path.exists() and ref in FIXTURES:
        return load_fixture(ref)
    return load_manifest(path)


def run_command(args):
    """Return the report dictionary for every command except ``verify``."""
    m = open_manifest(args.manifest)
    doc = dict.fromkeys(SECTIONS)
    cmd = args.command
    if cmd == "el":
        doc["el"] = report.el_section(m)
    elif cmd == "ostro":
        doc["ostrogradsky"] = report.ostro_section(m)
    elif cmd == "schmidt":
        doc["schmidt"] = report.schmidt_section(m, args.mode)
    elif cmd == "dirac":
        doc["schmidt"] = report.schmidt_section(m, "odd")
        doc["dirac_chain"] = report.dirac_section(m)
    elif cmd == "bridge":
        doc["canonical_map"] = report.bridge_section(m, args.mode)
    elif cmd == "simulate":
        doc["numeric"], _ = report.simulate(m, args.dt, args.T, args.out)
    return doc


def _error_doc(exc):
    doc = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            doc[attr] = getattr(exc, attr)
    if isinstance(exc, IntegrabilityError) and exc.witness:
        i, j, diff = exc.witness
        doc["witness"] = {"i": i, "j": j, "difference": str(diff)}
    return doc


def cmd_verify(args, stdout):
    from .verify import run_all

    results = run_all()
    if args.json:
        json.dump([r.__dict__ for r in results], stdout, indent=2)
        stdout.write("\n")
    else:
        for r in results:
            stdout.write(r.line() + "\n")
        failed = sum(not r.passed for r in results)
        stdout.write(f"{len(results) - failed} passed, {failed} failed\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args, stdout)
    try:
        doc = run_command(args)
    except ObstructionError as exc:
        json.dump(_error_doc(exc), stderr)
        stderr.write("\n")
        return EXIT_OBSTRUCTION
    except JetLegendreError as exc:
        json.dump(_error_doc(exc), stderr)
        stderr.write("\n")
        return EXIT_INVALID
    except OSError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, stderr)
        stderr.write("\n")
        return EXIT_INVALID
    json.dump(doc, stdout, indent=2)
    stdout.write("\n")
    return EXIT_OK


def entry():
    sys.exit(main())
