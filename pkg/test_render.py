import pytest

from cubeplan.arm_model import ArmSpec
from cubeplan.errors import InvalidStateError
from cubeplan.render import FrameSet, render_ascii, render_frame, render_svg


def test_straight_arm_lies_on_the_floor():
    text = render_ascii(ArmSpec(2, 6), "RRRRRR")
    lines = text.splitlines()
    assert lines[0] == lines[-1] == "=" * 13
    assert lines[-2] == "+-+-+-+-+-+-+"
    assert lines[1] == ". . . . . . ."


def test_single_upright_link():
    assert render_ascii(ArmSpec(1, 1), "U") == "===\n+ .\n|  \n+ .\n===\n"


def test_svg_polyline_follows_the_arm():
    svg = render_svg(ArmSpec(2, 6), "RRRRRR")
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" width="280" height="120"')
    assert 'points="20,100 60,100 100,100 140,100 180,100 220,100 260,100"' in svg
    assert svg.rstrip().endswith("</svg>")

    svg = render_svg(ArmSpec(1, 1), "U")
    assert 'points="20,60 20,20"' in svg


def test_render_frame_checks_its_input():
    with pytest.raises(InvalidStateError):
        render_frame(ArmSpec(1, 2), "UU")
    with pytest.raises(ValueError):
        render_frame(ArmSpec(1, 2), "RU", "png")


def test_frame_set_has_one_frame_per_state():
    spec = ArmSpec(1, 3)
    frames = FrameSet.from_states(spec, ["RRR", "RRU", "RUR", "URR", "URD", "URR"], "ascii")
    assert len(frames) == 6
    assert frames.extension == "txt"
    assert frames.frames[0] == render_ascii(spec, "RRR")
    assert FrameSet.from_states(spec, ["RRR"]).extension == "svg"
