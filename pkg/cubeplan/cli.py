import argparse
import logging
import os
import sys
from typing import List, Optional

from cubeplan.commands import (EXIT_GUARD, EXIT_REFUTED, EXIT_USAGE, cmd_check, cmd_enumerate, cmd_geodesic,
                               cmd_oracle, cmd_pip, cmd_render, cmd_stats)
from cubeplan.errors import CubePlanError, InvariantViolation, NotCat0Error, ResourceGuardError
from cubeplan.geodesic import METRICS
from cubeplan.monitoring import RunMonitor, RunStep
from cubeplan.settings import get_settings, reset_settings

logger = logging.getLogger("cubeplan")


def _arm_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--height", "-m", type=int, required=required, help="Tunnel height m")
    parser.add_argument("--length", "-n", type=int, required=required, help="Arm length n (number of links)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubeplan",
        description="Optimal motion planning on CAT(0) cube complexes through their PIPs")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log each step with its duration")
    parser.add_argument("--stats", action="store_true", help="Print the JSON step record to standard error")
    parser.add_argument("--config", help="YAML settings file (default: cubeplan.yaml if present)")
    parser.add_argument("--limit", type=int, help="Resource ceiling for this run (default from settings)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="List the states of the arm R_{m,n}")
    _arm_arguments(p)
    p.add_argument("--count-only", action="store_true", help="Print only the number of states")
    p.add_argument("--workers", type=int, default=1, help="Threads used to enumerate (default: 1)")

    p = sub.add_parser("pip", help="Export the certified PIP of the arm")
    _arm_arguments(p)
    p.add_argument("--root", help="Root state (default: the straight arm)")
    p.add_argument("--format", choices=["json", "dot"], default="json")

    p = sub.add_parser("check", help="Certify a complex as CAT(0)")
    _arm_arguments(p, required=False)
    p.add_argument("--pip", dest="pip_file", help="PIP JSON file (a complex JSON file is also accepted)")
    p.add_argument("--complex", dest="complex_file", help="Complex JSON file")

    p = sub.add_parser("geodesic", help="Plan an optimal motion between two states")
    _arm_arguments(p)
    p.add_argument("--from", dest="start", required=True, help="Start state, e.g. RRURDR")
    p.add_argument("--to", dest="goal", required=True, help="Goal state")
    p.add_argument("--metric", choices=METRICS, default="l1")
    p.add_argument("--frames-dir", help="Write one frame per step into this directory")
    p.add_argument("--format", choices=["svg", "ascii"], default="svg", help="Frame format")

    p = sub.add_parser("oracle", help="Breadth-first distance between two states")
    _arm_arguments(p)
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="goal", required=True)
    p.add_argument("--metric", choices=METRICS, default="l1")

    p = sub.add_parser("render", help="Draw one state of the arm")
    _arm_arguments(p)
    p.add_argument("--state", required=True)
    p.add_argument("--format", choices=["svg", "ascii"], default="ascii")
    return parser


def _log_step(event_type: str, step: RunStep) -> None:
    if event_type == "step_completed":
        logger.info("%s completed in %.3fs %s", step.name, step.seconds, step.detail or "")
    elif event_type == "step_error":
        logger.info("%s failed after %.3fs: %s", step.name, step.seconds, step.error)


def _dispatch(args: argparse.Namespace, monitor: RunMonitor):
    if args.command == "enumerate":
        return cmd_enumerate(args.height, args.length, args.count_only, args.limit, args.workers, monitor)
    if args.command == "pip":
        return cmd_pip(args.height, args.length, args.root, args.format, args.limit, monitor)
    if args.command == "check":
        return cmd_check(args.height, args.length, args.pip_file, args.complex_file, args.limit, monitor)
    if args.command == "geodesic":
        return cmd_geodesic(args.height, args.length, args.start, args.goal, args.metric,
                            args.frames_dir, args.format, args.limit, monitor)
    if args.command == "oracle":
        return cmd_oracle(args.height, args.length, args.start, args.goal, args.metric, args.limit, monitor)
    return cmd_render(args.height, args.length, args.state, args.format)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.config:
        os.environ["CUBEPLAN_CONFIG"] = args.config
        reset_settings()

    monitor = RunMonitor()
    try:
        settings = get_settings()
        logging.basicConfig(level=logging.INFO if args.verbose else settings.log_level.upper(),
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        if args.verbose:
            monitor.subscribe(_log_step)
        result = _dispatch(args, monitor)
    except KeyboardInterrupt:
        print("\ninterrupted", file=sys.stderr)
        return 130
    except ResourceGuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (NotCat0Error, InvariantViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REFUTED
    except (CubePlanError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if args.stats:
            print(cmd_stats(monitor), file=sys.stderr)

    sys.stdout.write(result.output)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
