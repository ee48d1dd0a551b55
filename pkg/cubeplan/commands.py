"""
The cubeplan subcommands. Each returns its exit code and standard output so
the argument parser stays thin and the commands stay testable.
"""

import json
from dataclasses import dataclass
from typing import List, Optional, Union

from cubeplan import cube_complex, pip_core
from cubeplan.arm_model import (ArmSpec, RemoteControl, arm_pip, build_complex, count_states, enumerate_states,
                                require_state)
from cubeplan.cube_complex import Certificate, CubeComplex, Refutation, is_cat0, vertex_name
from cubeplan.errors import InvalidStateError
from cubeplan.geodesic import METRICS, oracle_l1, oracle_linf, plan_to_json
from cubeplan.monitoring import RunMonitor
from cubeplan.render import FrameSet, render_frame
from cubeplan.settings import get_settings
from cubeplan.states import ComplexDocument, PipDocument
from cubeplan.tools import read_json, write_frames

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


@dataclass
class CommandResult:
    exit_code: int
    output: str


def _lines(items: List[str]) -> str:
    return "".join(f"{item}\n" for item in items)


def cmd_enumerate(height: int, length: int, count_only: bool = False, limit: int = None,
                  workers: int = 1, monitor: Optional[RunMonitor] = None) -> CommandResult:
    monitor = monitor or RunMonitor()
    spec = ArmSpec(height, length)
    with monitor.step("enumerate") as detail:
        if count_only:
            count = count_states(spec)
            detail["count"] = count
            return CommandResult(EXIT_OK, f"{count}\n")
        states = enumerate_states(spec, limit, workers=workers)
        detail["count"] = len(states)
    return CommandResult(EXIT_OK, _lines(states))


def cmd_pip(height: int, length: int, root: Optional[str] = None, fmt: str = "json", limit: int = None,
            monitor: Optional[RunMonitor] = None) -> CommandResult:
    monitor = monitor or RunMonitor()
    spec = ArmSpec(height, length)
    with monitor.step("certify") as detail:
        pip = arm_pip(spec, root, limit)
        detail["elements"] = len(pip)
    if fmt == "dot":
        return CommandResult(EXIT_OK, pip_core.to_dot(pip))
    return CommandResult(EXIT_OK, pip_core.to_json(pip) + "\n")


def load_document(path: str) -> Union[pip_core.Pip, CubeComplex]:
    """A PIP or complex JSON file, told apart by its keys."""
    data = read_json(path)
    if isinstance(data, dict) and "vertices" in data:
        return cube_complex.from_document(ComplexDocument.model_validate(data))
    return pip_core.from_document(PipDocument.model_validate(data))


def _report(x: CubeComplex, verdict: Union[Certificate, Refutation]) -> CommandResult:
    if isinstance(verdict, Certificate):
        return CommandResult(EXIT_OK, _lines([
            "certified: yes",
            f"vertices: {len(x.vertices)}",
            f"edges: {len(x.edges)}",
            f"hyperplanes: {verdict.hyperplane_count}",
            f"inconsistent pairs: {len(verdict.pip.inconsistent)}",
            f"max cube dimension: {verdict.max_dimension}",
            f"Euler characteristic: {verdict.euler_characteristic}",
        ]))
    witness = " ".join(vertex_name(w) if not isinstance(w, tuple) else " ".join(map(vertex_name, w))
                       for w in verdict.witness)
    return CommandResult(EXIT_REFUTED, _lines([
        "certified: no",
        f"refutation: {verdict.kind}",
        f"reason: {verdict.message}",
        f"witness: {witness}",
    ]))


def cmd_check(height: Optional[int] = None, length: Optional[int] = None, pip_file: Optional[str] = None,
              complex_file: Optional[str] = None, limit: int = None,
              monitor: Optional[RunMonitor] = None) -> CommandResult:
    monitor = monitor or RunMonitor()
    path = pip_file or complex_file
    with monitor.step("build") as detail:
        if path:
            document = load_document(path)
            if isinstance(document, CubeComplex):
                x = document
            else:
                x = cube_complex.from_pip(pip_core.require_valid(document), limit=limit)
        elif height is not None and length is not None:
            x = build_complex(ArmSpec(height, length), limit)
        else:
            raise InvalidStateError("check needs --height and --length, --pip FILE or --complex FILE")
        detail["vertices"] = len(x.vertices)
    with monitor.step("certify") as detail:
        verdict = is_cat0(x, x.root if x.root is not None else x.vertices[0], limit=limit)
        detail["certified"] = bool(verdict)
    return _report(x, verdict)


def _arm_endpoints(spec: ArmSpec, start: str, goal: str) -> None:
    if len(start) != len(goal):
        raise InvalidStateError(f"states {start} and {goal} have different lengths")
    for word in (start, goal):
        require_state(spec, word)


def _check_metric(metric: str) -> None:
    if metric not in METRICS:
        raise InvalidStateError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")


def cmd_geodesic(height: int, length: int, start: str, goal: str, metric: str = "l1",
                 frames_dir: Optional[str] = None, fmt: str = "svg", limit: int = None,
                 monitor: Optional[RunMonitor] = None) -> CommandResult:
    monitor = monitor or RunMonitor()
    spec = ArmSpec(height, length)
    _check_metric(metric)
    _arm_endpoints(spec, start, goal)
    with monitor.step("certify") as detail:
        remote = RemoteControl.build(spec, limit=limit)
        detail["elements"] = len(remote.pip)
    with monitor.step("plan") as detail:
        plan, states = remote.plan(start, goal, metric)
        detail["distance"] = plan.distance
    if frames_dir:
        with monitor.step("render") as detail:
            frames = FrameSet.from_states(spec, states, fmt)
            written = write_frames(frames_dir, frames.frames, frames.extension, get_settings().frame_digits)
            detail["frames"] = len(written)
    return CommandResult(EXIT_OK, plan_to_json(plan, states) + "\n")


def cmd_oracle(height: int, length: int, start: str, goal: str, metric: str = "l1", limit: int = None,
               monitor: Optional[RunMonitor] = None) -> CommandResult:
    monitor = monitor or RunMonitor()
    spec = ArmSpec(height, length)
    _check_metric(metric)
    _arm_endpoints(spec, start, goal)
    with monitor.step("build") as detail:
        x = build_complex(spec, limit)
        detail["vertices"] = len(x.vertices)
    with monitor.step("search"):
        oracle = oracle_l1 if metric == "l1" else oracle_linf
        distance = oracle(x, start, goal)
    return CommandResult(EXIT_OK, f"{distance}\n")


def cmd_render(height: int, length: int, state: str, fmt: str = "ascii") -> CommandResult:
    return CommandResult(EXIT_OK, render_frame(ArmSpec(height, length), state, fmt))


def cmd_stats(monitor: RunMonitor) -> str:
    return json.dumps(monitor.to_dict(), indent=2, default=str)

