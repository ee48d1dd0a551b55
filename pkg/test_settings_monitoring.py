import json

import pytest
from pydantic import ValidationError

from cubeplan.monitoring import RunMonitor
from cubeplan.settings import Settings, get_settings, load_settings, resource_limit
from cubeplan.tools import read_json, safe_path_in, write_frames


# ---------------------------------------------------------------------------
# settings
# ---------------------------------------------------------------------------

def test_defaults(clean_env):
    settings = load_settings()
    assert settings == Settings()
    assert settings.resource_limit == 10_000_000
    assert settings.log_level == "WARNING"
    assert settings.frame_digits == 4


def test_yaml_then_environment(clean_env, tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text("resource_limit: 500\nframe_digits: 6\n", encoding="utf-8")
    assert load_settings(str(config)).resource_limit == 500

    clean_env.setenv("CUBEPLAN_RESOURCE_LIMIT", "7")
    settings = load_settings(str(config))
    assert settings.resource_limit == 7
    assert settings.frame_digits == 6


def test_config_path_from_environment(clean_env, tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text("log_level: DEBUG\n", encoding="utf-8")
    clean_env.setenv("CUBEPLAN_CONFIG", str(config))
    assert get_settings().log_level == "DEBUG"


def test_bad_settings_are_rejected(clean_env, tmp_path):
    config = tmp_path / "settings.yaml"
    config.write_text("- not\n- a mapping\n", encoding="utf-8")
    with pytest.raises(ValueError, match="mapping"):
        load_settings(str(config))

    clean_env.setenv("CUBEPLAN_RESOURCE_LIMIT", "0")
    with pytest.raises(ValidationError):
        load_settings()


def test_resource_limit_override(clean_env):
    assert resource_limit(12) == 12
    assert resource_limit() == 10_000_000


# ---------------------------------------------------------------------------
# monitoring
# ---------------------------------------------------------------------------

def test_monitor_tracks_steps_and_notifies():
    monitor = RunMonitor()
    events = []
    monitor.subscribe(lambda kind, step: events.append((kind, step.name)))

    with monitor.step("build") as detail:
        detail["vertices"] = 4
    with pytest.raises(RuntimeError):
        with monitor.step("certify"):
            raise RuntimeError("boom")

    assert events == [("step_started", "build"), ("step_completed", "build"),
                      ("step_started", "certify"), ("step_error", "certify")]
    build, certify = monitor.steps
    assert build.status == "completed" and build.detail == {"vertices": 4}
    assert certify.status == "error" and certify.error == "boom"
    assert build.seconds >= 0


def test_monitor_serializes_to_json():
    monitor = RunMonitor()
    with monitor.step("plan"):
        pass
    data = json.loads(json.dumps(monitor.to_dict()))
    assert data["steps"][0]["name"] == "plan"
    assert data["steps"][0]["detail"] is None
    assert data["steps"][0]["end_time"] is not None


# ---------------------------------------------------------------------------
# tools
# ---------------------------------------------------------------------------

def test_frames_are_numbered(tmp_path):
    written = write_frames(str(tmp_path / "out"), ["a", "b", "c"], "txt", digits=3)
    assert [p.name for p in written] == ["000.txt", "001.txt", "002.txt"]
    assert written[1].read_text(encoding="utf-8") == "b"


def test_frame_numbers_widen_for_long_plans(tmp_path):
    written = write_frames(str(tmp_path), [""] * 12, "svg", digits=1)
    assert written[0].name == "00.svg"
    assert written[-1].name == "11.svg"


def test_paths_stay_inside_the_output_directory(tmp_path):
    assert safe_path_in(tmp_path, "0001.svg") == (tmp_path / "0001.svg").resolve()
    with pytest.raises(ValueError):
        safe_path_in(tmp_path, "../escape.svg")


def test_read_json(tmp_path):
    good = tmp_path / "good.json"
    good.write_text('{"a": 1}', encoding="utf-8")
    assert read_json(str(good)) == {"a": 1}
    with pytest.raises(ValueError, match="no such file"):
        read_json(str(tmp_path / "absent.json"))
