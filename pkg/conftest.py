from pathlib import Path

import pytest
from hypothesis import strategies as st

from cubeplan.pip_core import Pip, random_pip
from cubeplan.settings import reset_settings

FIXTURES = Path(__file__).parent / "fixtures"

SETTINGS_ENV = ("CUBEPLAN_CONFIG", "CUBEPLAN_RESOURCE_LIMIT", "CUBEPLAN_LOG_LEVEL", "CUBEPLAN_FRAME_DIGITS")


@st.composite
def pips(draw, max_size: int = 10) -> Pip:
    """Valid closed PIPs: a random DAG plus random conflicts between unrelated up-sets."""
    rng = draw(st.randoms(use_true_random=False))
    size = draw(st.integers(min_value=0, max_value=max_size))
    order_density = draw(st.floats(min_value=0.1, max_value=0.6))
    conflict_density = draw(st.floats(min_value=0.1, max_value=0.6))
    return random_pip(rng, size, order_density, conflict_density)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def clean_env(monkeypatch):
    """No CUBEPLAN_* variables and a fresh settings cache, restored afterwards."""
    for name in SETTINGS_ENV:
        # recorded by monkeypatch, so writes from the CLI are undone too
        monkeypatch.setenv(name, "")
        monkeypatch.delenv(name)
    reset_settings()
    yield monkeypatch
    reset_settings()


@pytest.fixture
def antichain():
    return Pip.build(["a", "b", "c"])


@pytest.fixture
def chain():
    return Pip.build(["a", "b"], [("a", "b")])


@pytest.fixture
def conflict_pair():
    return Pip.build(["a", "b"], inconsistent=[("a", "b")])
