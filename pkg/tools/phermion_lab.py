#!/usr/bin/env python3
"""
phermion_lab.py — Build fermion / phermion / abnormal-phermion systems and verify their algebra.

Every identity is checked numerically and reported with its residual and
tolerance. Exit status: 0 when every check passes, 1 when a check fails or
the requested algebra has no representation, 2 on a usage or config error.

Usage examples:
    # Single-species relations
    python tools/phermion_lab.py verify-algebra --species fermion
    python tools/phermion_lab.py verify-algebra --species phermion --eta diag:4,1
    python tools/phermion_lab.py verify-algebra --species abnormal-phermion

    # Composite oscillators: pseudo-SUSY algebra, pairing, sign theorem
    python tools/phermion_lab.py oscillator --kind boson-fermion --E 1 --truncation 6
    python tools/phermion_lab.py oscillator --kind boson-abnormal-phermion --E -1

    # ell abnormal phermions
    python tools/phermion_lab.py multi --ell 3

    # su(2) / su(1,1)
    python tools/phermion_lab.py lie --epsilon -1

    # Everything, as JSON
    python tools/phermion_lab.py all --format json > report.json
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import textwrap
from typing import List

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), ".."))

from utils.config import (  # noqa: E402
    DEFAULT_TRUNCATION, FORMATS, KINDS, SPECIES, RunConfig, seed_from_env,
)
from utils.errors import (  # noqa: E402
    AlgebraObstruction, NumericError, PhermionLabError, SingularMatrixError, StructureError,
)
from utils.matops import DEFAULT_SEED, DEFAULT_TOL  # noqa: E402
from utils.reports import SCHEMA, Check, RelationResidual, SuiteReport  # noqa: E402
from utils.suites import run  # noqa: E402

RULE = "=" * 68

# Sections longer than this print a one-line summary plus failures unless --verbose.
SECTION_DETAIL_LIMIT = 12


# ── Table output ─────────────────────────────────────────────────────────────

def _mark(ok: bool) -> str:
    return "✓" if ok else "✗"


def format_check(c: Check, verbose: bool) -> str:
    line = f"    {_mark(c.passed)} {c.name}"
    if isinstance(c, RelationResidual) and (verbose or not c.passed):
        line += f"   residual {c.residual:.2e} (tol {c.tolerance:.1e})"
    return line


def print_section(name: str, checks: List[Check], verbose: bool) -> None:
    n_pass = sum(1 for c in checks if c.passed)
    print(f"  {_mark(n_pass == len(checks))} {name}  [{n_pass}/{len(checks)}]")
    if verbose or len(checks) <= SECTION_DETAIL_LIMIT:
        for c in checks:
            print(format_check(c, verbose))
    else:
        for c in checks:
            if not c.passed:
                print(format_check(c, verbose))


def print_spectrum(doc: dict) -> None:
    signs = {}
    for p in doc["pairing"]["pairs"]:
        signs[round(p["value"][0], 9)] = f"{p['signPlus']:+d}/{p['signMinus']:+d}"
    print("  Spectrum:")
    print(f"    {'E':>10}  {'mult':>4}  {'grades +/-':>10}  {'eta signs +/-':>13}")
    for lvl in doc["spectrum"]:
        re, im = lvl["value"]
        value = f"{re:.4f}" if abs(im) < 1e-9 else f"{re:.3f}{im:+.3f}i"
        grades = f"{lvl['grades']['+']}/{lvl['grades']['-']}"
        sign = signs.get(round(re, 9), "")
        edge = "  edge" if lvl["edge"] else ""
        print(f"    {value:>10}  {lvl['multiplicity']:>4}  {grades:>10}  {sign:>13}{edge}")
    print()


def print_report(report: SuiteReport, verbose: bool) -> None:
    print(f"\n{RULE}")
    print(f"  phermion-lab {report.command}")
    print(RULE)
    for k, v in report.config.items():
        if k != "command" and v is not None:
            print(f"  {k + ':':<14}{v}")
    print()

    data = report.data
    if report.command == "verify-algebra":
        rep = data["rep"]
        print(f"  Species: {rep['species']}  (dim {rep['dim']}, eps {rep['epsilon']:+d})")
        if rep["flags"]:
            print(f"  Flags:   {', '.join(rep['flags'])}")
        metric = data["metric"]
        inertia = metric["inertia"]
        print(f"  Metric:  inertia ({inertia['nPlus']}, {inertia['nMinus']}, {inertia['nZero']}), "
              f"condition {metric['condition']:.3g}")
        print(f"  Positive-norm number eigenstates: {data['physicalStates']}")
        audit = data.get("unifiedCommutatorAudit")
        if audit:
            printed = audit["printed"]
            note = "holds" if printed["pass"] else f"does not hold (residual {printed['residual']:.2e})"
            print(f"  Audit: [c, c#] = 1 - 2 eps N {note}; asserted form is eps (1 - 2N)")
        print()
    elif report.command == "oscillator":
        print_spectrum(data["system"])
    elif report.command == "multi":
        m = data["system"]
        diag = ", ".join(f"{s:+d}" for s in m["innerProductDiagonal"])
        print(f"  dim {m['dim']}, physical dim {m['physicalDim']}")
        print(f"  inner-product diagonal: ({diag})")
        print()
    elif report.command == "lie":
        t = data["triple"]
        print(f"  Algebra: {t['algebra']}   delta = {tuple(t['deltaVector'])}   Casimir = {t['casimir'][0]:+.4f}")
        print()

    for section, checks in report.sections.items():
        print_section(section, checks, verbose)

    counts = report.counts()
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\n{RULE}")
    print(f"  Result: {verdict}  ({counts['passed']}/{counts['total']} checks)   "
          f"{report.wall_time_ms:.0f} ms")
    print(RULE)


def print_error_json(kind: str, message: str, explanation: str = None) -> None:
    doc = {"schema": SCHEMA, "pass": False, "error": {"type": kind, "message": message}}
    if explanation:
        doc["error"]["explanation"] = explanation
    print(json.dumps(doc, indent=2))


# ── Argument parsing ─────────────────────────────────────────────────────────

def parse_seed(text: str) -> int:
    """Decimal or 0x-prefixed seed."""
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOL,
                        help=f"Residual tolerance, scaled by operand norms (default: {DEFAULT_TOL:g})")
    common.add_argument("--seed", type=parse_seed, default=DEFAULT_SEED,
                        help="PRNG seed for property suites (default: 0xC0FFEE; PHERMION_SEED overrides)")
    common.add_argument("--format", choices=FORMATS, default="table", dest="output_format",
                        help="Output format (default: table)")
    common.add_argument("--verbose", "-v", action="store_true",
                        help="Print every check with its residual and tolerance")

    parser = argparse.ArgumentParser(
        description="Numerical workbench for fermion, phermion and abnormal-phermion algebras.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=textwrap.dedent("""\
            metric specs (--eta):
              identity          2x2 identity
              sigma3            diag(1, -1)
              diag:4,1          diagonal metric
              file:eta.json     JSON rows of numbers or [re, im] pairs

            exit status: 0 all checks pass, 1 a check failed or no representation exists,
                         2 usage or config error
        """),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("verify-algebra", parents=[common], help="Check one species' defining relations")
    p.add_argument("--species", choices=SPECIES, default="fermion")
    p.add_argument("--eta", dest="eta_spec", metavar="SPEC", help="Metric for the phermion species")
    p.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION, help="Boson truncation level")

    p = sub.add_parser("oscillator", parents=[common], help="Composite oscillator + pseudo-SUSY checks")
    p.add_argument("--kind", choices=KINDS, default="boson-fermion")
    p.add_argument("--E", type=float, default=None, help="Energy scale (default: +1, or -1 for abnormal)")
    p.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION)
    p.add_argument("--eta", dest="eta_spec", metavar="SPEC", help="Phermion metric (boson-phermion only)")

    p = sub.add_parser("multi", parents=[common], help="ell abnormal phermions")
    p.add_argument("--ell", type=int, default=3)

    p = sub.add_parser("lie", parents=[common], help="J-operator brackets: su(2) or su(1,1)")
    p.add_argument("--epsilon", type=int, choices=[1, -1], default=1)

    p = sub.add_parser("all", parents=[common], help="Every suite with defaults plus property sweeps")
    p.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None}
    fields["seed"] = seed_from_env(args.seed)
    return RunConfig(**fields)


def main(argv: List[str] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = args.output_format == "json"

    try:
        cfg = config_from_args(args)
        report = run(cfg)
    except AlgebraObstruction as e:
        print(f"Error: {e}", file=sys.stderr)
        print(f"  {e.explanation}", file=sys.stderr)
        if as_json:
            print_error_json("AlgebraObstruction", str(e), e.explanation)
        return 1
    except (StructureError, NumericError) as e:
        print(f"Error: {e}", file=sys.stderr)
        if as_json:
            print_error_json(type(e).__name__, str(e))
        return 1
    except (PhermionLabError, SingularMatrixError) as e:
        # config, shape, range, size and domain problems, and singular metrics from --eta
        print(f"Error: {e}", file=sys.stderr)
        if as_json:
            print_error_json(type(e).__name__, str(e))
        return 2

    if as_json:
        print(report.to_json())
    else:
        print_report(report, cfg.verbose)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
