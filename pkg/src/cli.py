"""
hopfcheck Command Line Interface
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from src.archive import RunArchive
from src.bialgebra import CheckReport, Verifier, specialize
from src.certification import certify
from src.config import APP_NAME, APP_VERSION, DEFAULT_DEGREE_BOUND, DEFAULT_SEED, DEFAULT_TRIALS, ORACLE_DEGREE_CAP, SCHEMA_VERSION, EngineSettings
from src.dsl import parse_assignment, parse_element, print_presentation
from src.errors import HopfcheckError
from src.freealg import format_element
from src.library import PresentationLibrary
from src.report import emit_report
from src.rewrite import format_trace, ideal_membership

logger = logging.getLogger(__name__)

EXIT_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 3 like every other error"""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


class CLI:
    def __init__(self, args):
        self.args = args
        order = tuple(x.strip() for x in args.order.split(",")) if args.order else None
        self.settings = EngineSettings(
            degree_bound=args.degree_bound,
            order=order,
            seed=args.seed,
            trials=args.trials,
            oracle_cap=args.oracle_cap,
            oracle=not args.no_oracle,
            trace=args.trace,
        )
        self.library = PresentationLibrary(order=order)
        self.verifier = Verifier(self.settings)
        self._archive: Optional[RunArchive] = None

    @property
    def archive(self) -> RunArchive:
        if self._archive is None:
            self._archive = RunArchive()
        return self._archive

    @property
    def format(self) -> str:
        return "json" if self.args.json else "text"

    def emit(self, report: CheckReport, summary=()) -> int:
        """Print a report, archive it on --record, return its exit code"""
        text = emit_report(report, self.format, details=self.settings.trace, summary=summary)
        sys.stdout.write(text)
        if self.args.record:
            data = emit_report(report, "json", summary=summary)
            run_id = self.archive.record(
                " ".join(self.args.argv), report.overall.value, self.settings.degree_bound, self.settings.seed, data
            )
            print(f"✓ Recorded as run {run_id}", file=sys.stderr)
        return report.exit_code

    def cmd_check_bialgebra(self, args) -> int:
        """Δ-homomorphism, coassociativity and counit checks"""
        p = self.library.load(args.presentation)
        return self.emit(self.verifier.check_bialgebra(p))

    def cmd_check_equiv(self, args) -> int:
        """Bialgebra isomorphism through a generator map"""
        p = self.library.load(args.presentation)
        q = self.library.load(args.other)
        m = self.library.map(args.map, p, q)
        return self.emit(self.verifier.check_equivalence(p, q, m))

    def cmd_specialize(self, args) -> int:
        """Evaluate parameters and print the resulting presentation"""
        p = self.library.load(args.presentation)
        special = specialize(p, parse_assignment(args.set or []), name=args.name)
        text = print_presentation(special)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(text)
            print(f"✓ Wrote {special.name} to {args.out}")
        else:
            sys.stdout.write(text)
        return 0

    def cmd_reduce(self, args) -> int:
        """Normal form of an expression modulo the completed relations"""
        p = self.library.load(args.presentation)
        system = self.verifier.system(p)
        x = parse_element(args.expr, p.alphabet, p.field)
        verdict = ideal_membership(x, system)
        remainder = format_element(verdict.remainder)
        if self.args.json:
            data = {
                "schema": SCHEMA_VERSION,
                "presentation": p.name,
                "input": format_element(x),
                "normal_form": remainder,
                "verdict": verdict.verdict.value,
                "rules": len(system.rules),
                "status": system.status.value,
            }
            if self.settings.trace:
                data["trace"] = format_trace(verdict, system)
            print(json.dumps(data, indent=2))
            return 0
        print(remainder)
        if self.settings.trace:
            for line in format_trace(verdict, system):
                print(f"  {line}")
        return 0

    def cmd_paper(self, args) -> int:
        """Run the full certification chain"""
        result = certify(self.verifier, self.library)
        return self.emit(result.report, result.summary)

    def cmd_show(self, args) -> int:
        """Print a presentation in DSL form"""
        sys.stdout.write(print_presentation(self.library.load(args.presentation)))
        return 0

    def cmd_history(self, args) -> int:
        """List or show archived runs"""
        if args.delete is not None:
            if self.archive.delete(args.delete):
                print(f"✓ Run {args.delete} deleted.")
                return 0
            print(f"Run {args.delete} not found.", file=sys.stderr)
            return EXIT_ERROR
        if args.show is not None:
            run = self.archive.get(args.show)
            if not run:
                print(f"Run {args.show} not found.", file=sys.stderr)
                return EXIT_ERROR
            sys.stdout.write(run.report)
            return 0
        runs = self.archive.recent(args.limit)
        if not runs:
            print("No archived runs. Record one with --record.")
            return 0
        print("\nRuns:")
        print("-" * 60)
        for run in runs:
            stamp = run.created_at.strftime("%Y-%m-%d %H:%M:%S") if run.created_at else "-"
            print(f"  {run.id}. {stamp}  {run.overall:<12} bound {run.degree_bound}  {run.command}")
        return 0


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree-bound", type=int, default=DEFAULT_DEGREE_BOUND, help="Completion degree bound")
    common.add_argument("--order", help="Generator order, e.g. a,b,c,d")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Oracle random seed")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="Oracle random points")
    common.add_argument("--oracle-cap", type=int, default=ORACLE_DEGREE_CAP, help="Oracle degree cap")
    common.add_argument("--json", action="store_true", help="Machine-readable output")
    common.add_argument("--trace", action="store_true", help="Print rewrite traces and oracle trials")
    common.add_argument("--no-oracle", action="store_true", help="Skip linear-algebra cross-validation")
    common.add_argument("--record", action="store_true", help="Store the report in the run archive")
    common.add_argument("--verbose", "-v", action="count", default=0, help="-v for info, -vv for debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(
        prog=APP_NAME,
        description="hopfcheck - verify bialgebra presentations by noncommutative rewriting",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} v{APP_VERSION}")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # check
    check_p = subparsers.add_parser("check", help="Run a check")
    check_sub = check_p.add_subparsers(dest="check", help="Checks")
    bialg = check_sub.add_parser("bialgebra", parents=[common], help="Bialgebra axioms of a presentation")
    bialg.add_argument("presentation", help="Built-in name or .hopf file")
    equiv = check_sub.add_parser("equiv", parents=[common], help="Equivalence of two presentations")
    equiv.add_argument("presentation", help="Source presentation")
    equiv.add_argument("other", help="Target presentation")
    equiv.add_argument("--map", "-m", required=True, help="exchange, identity or inline a=d;b=c;...")

    # specialize
    spec_p = subparsers.add_parser("specialize", parents=[common], help="Evaluate parameters")
    spec_p.add_argument("presentation", help="Built-in name or .hopf file")
    spec_p.add_argument("--set", action="append", metavar="NAME=VALUE", help="Parameter value (repeatable)")
    spec_p.add_argument("--name", help="Name of the specialized presentation")
    spec_p.add_argument("--out", "-o", help="Write the presentation to this file")

    # reduce
    red_p = subparsers.add_parser("reduce", parents=[common], help="Normal form of an expression")
    red_p.add_argument("presentation", help="Built-in name or .hopf file")
    red_p.add_argument("--expr", "-e", required=True, help="Expression, e.g. \"ba\"")

    # paper
    subparsers.add_parser("paper", parents=[common], help="Certify glgh at g=0, h=1 is illy up to exchange")

    # show
    show_p = subparsers.add_parser("show", parents=[common], help="Print a presentation")
    show_p.add_argument("presentation", help="Built-in name or .hopf file")

    # history
    hist_p = subparsers.add_parser("history", parents=[common], help="Archived runs")
    hist_p.add_argument("--limit", type=int, default=20, help="Number of runs to list")
    hist_p.add_argument("--show", type=int, metavar="ID", help="Print a stored report")
    hist_p.add_argument("--delete", type=int, metavar="ID", help="Delete a stored run")

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    root.setLevel(level)


def run_command(argv: List[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR

    if not args.command or (args.command == "check" and not args.check):
        parser.print_help()
        return EXIT_ERROR

    args.argv = list(argv)
    _configure_logging(args.verbose)

    try:
        cli = CLI(args)
        commands = {
            "bialgebra": cli.cmd_check_bialgebra,
            "equiv": cli.cmd_check_equiv,
            "specialize": cli.cmd_specialize,
            "reduce": cli.cmd_reduce,
            "paper": cli.cmd_paper,
            "show": cli.cmd_show,
            "history": cli.cmd_history,
        }
        key = args.check if args.command == "check" else args.command
        return commands[key](args)
    except HopfcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
