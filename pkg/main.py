"""
MicroSlice command line
Validates, plans, replays and draws micro-operator network slicing plans from JSON documents.

Exit status: 0 when the resulting plan has no error-severity violations, 1 when it has some,
2 when the input cannot be read, parsed or replayed.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from document import PlanDocument, load_document
from errors import DocumentError, SlicingError
from graph import export_graph
from models import NetworkPlan
from replay import replay
from reports import FORMATS, render_plan, render_replay, render_report
from scenarios import error_violations, scenario_report, validate_network_plan
from settings import Settings, get_settings

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT_ERROR = 2


class CommandResult(NamedTuple):
    exit_code: int
    output: str


# ==================== COMMANDS ====================

def run_validate(document: PlanDocument, fmt: str = "text", settings: Optional[Settings] = None) -> CommandResult:
    """Replay the document and report every rule against the resulting plan"""
    result = replay(document, settings)
    report = scenario_report(result.plan, document.scenario)
    logger.info(f"validate: {report.error_count} error(s), {report.warning_count} warning(s)")
    return CommandResult(EXIT_OK if report.passed else EXIT_VIOLATIONS, render_report(report, fmt))


def _status(document: PlanDocument, plan: NetworkPlan) -> int:
    errors = error_violations(validate_network_plan(plan, document.scenario))
    return EXIT_VIOLATIONS if errors else EXIT_OK


def run_plan(document: PlanDocument, fmt: str = "text", settings: Optional[Settings] = None) -> CommandResult:
    plan = replay(document, settings).plan
    return CommandResult(_status(document, plan), render_plan(plan, fmt))


def run_graph(document: PlanDocument, fmt: str = "text", settings: Optional[Settings] = None) -> CommandResult:
    plan = replay(document, settings).plan
    return CommandResult(_status(document, plan), export_graph(plan))


def run_replay(document: PlanDocument, fmt: str = "text", settings: Optional[Settings] = None) -> CommandResult:
    result = replay(document, settings)
    return CommandResult(_status(document, result.plan), render_replay(result, fmt))


COMMANDS: Dict[str, Callable[..., CommandResult]] = {
    "validate": run_validate,
    "plan": run_plan,
    "graph": run_graph,
    "replay": run_replay,
}


# ==================== MAIN ====================

def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microslice",
        description="Micro-operator network slicing planner and validator",
        epilog="Exit status: 0 = no violations, 1 = violations, 2 = input error",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    helps = {
        "validate": "replay the document and print the scenario report",
        "plan": "replay the document and print the resulting plan",
        "graph": "replay the document and print the plan as a DOT graph",
        "replay": "print the per-step replay log",
    }
    for name, help_text in helps.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("file", type=Path, help="plan document (JSON)")
        sub.add_argument("--format", choices=FORMATS, default=settings.default_format, dest="fmt")
        sub.add_argument("--out", type=Path, default=None, help="write output to this path instead of stdout")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser(settings).parse_args(argv)

    try:
        document = load_document(args.file)
        result = COMMANDS[args.command](document, args.fmt, settings)
    except DocumentError as e:
        logger.error(f"Could not parse {args.file}: {len(e.issues)} issue(s)")
        for issue in e.issues:
            print(f"{args.file}: {issue.render()}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (SlicingError, OSError, ValidationError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"{args.file}: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    if args.out is not None:
        args.out.write_text(result.output, encoding="utf-8")
        logger.info(f"Wrote {args.command} output to {args.out}")
    else:
        sys.stdout.write(result.output)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
