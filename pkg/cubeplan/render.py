"""
Deterministic drawings of arm states, one per step of a plan.
"""

from dataclasses import dataclass
from typing import Iterable, Literal, Tuple

from cubeplan.arm_model import ArmSpec, ArmState, path_points, require_state

FrameFormat = Literal["svg", "ascii"]

UNIT = 40
MARGIN = 20
EXTENSIONS = {"svg": "svg", "ascii": "txt"}


def render_ascii(spec: ArmSpec, state: ArmState) -> str:
    width = 2 * spec.length + 1
    canvas = [[" "] * width for _ in range(2 * spec.height + 1)]
    for row in range(0, 2 * spec.height + 1, 2):
        for col in range(0, width, 2):
            canvas[row][col] = "."

    def cell(x: int, y: int) -> Tuple[int, int]:
        return 2 * (spec.height - y), 2 * x

    points = path_points(state)
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        r0, c0 = cell(x0, y0)
        r1, c1 = cell(x1, y1)
        canvas[(r0 + r1) // 2][(c0 + c1) // 2] = "-" if r0 == r1 else "|"
    for x, y in points:
        r, c = cell(x, y)
        canvas[r][c] = "+"

    wall = "=" * width
    return "\n".join([wall] + ["".join(row) for row in canvas] + [wall]) + "\n"


def render_svg(spec: ArmSpec, state: ArmState) -> str:
    width = spec.length * UNIT + 2 * MARGIN
    height = spec.height * UNIT + 2 * MARGIN

    def px(x: int) -> int:
        return MARGIN + x * UNIT

    def py(y: int) -> int:
        return MARGIN + (spec.height - y) * UNIT

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>']
    for x in range(spec.length + 1):
        parts.append(f'  <line x1="{px(x)}" y1="{py(0)}" x2="{px(x)}" y2="{py(spec.height)}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
    for y in range(1, spec.height):
        parts.append(f'  <line x1="{px(0)}" y1="{py(y)}" x2="{px(spec.length)}" y2="{py(y)}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
    for y in (0, spec.height):
        parts.append(f'  <line x1="{px(0)}" y1="{py(y)}" x2="{px(spec.length)}" y2="{py(y)}" '
                     f'stroke="#333333" stroke-width="3"/>')
    coords = " ".join(f"{px(x)},{py(y)}" for x, y in path_points(state))
    parts.append(f'  <polyline points="{coords}" fill="none" stroke="#1f77b4" stroke-width="6" '
                 f'stroke-linecap="round" stroke-linejoin="round"/>')
    parts.append(f'  <circle cx="{px(0)}" cy="{py(0)}" r="7" fill="#d62728"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_frame(spec: ArmSpec, state: ArmState, fmt: str = "svg") -> str:
    require_state(spec, state)
    if fmt == "svg":
        return render_svg(spec, state)
    if fmt == "ascii":
        return render_ascii(spec, state)
    raise ValueError(f"format must be svg or ascii, got {fmt!r}")


@dataclass(frozen=True)
class FrameSet:
    """One rendered frame per visited state, start and end included."""

    fmt: FrameFormat
    frames: Tuple[str, ...]

    @classmethod
    def from_states(cls, spec: ArmSpec, states: Iterable[ArmState], fmt: str = "svg") -> "FrameSet":
        return cls(fmt, tuple(render_frame(spec, s, fmt) for s in states))

    @property
    def extension(self) -> str:
        return EXTENSIONS[self.fmt]

    def __len__(self) -> int:
        return len(self.frames)
