import json

import pytest

from ntangle import qstate


@pytest.fixture
def seed() -> int:
    return 7


@pytest.fixture
def write_state(tmp_path):
    """Write a QState (or a raw dict) as a StateSpec file and return its path."""
    def write(state, name: str = "state.json"):
        path = tmp_path / name
        if isinstance(state, dict):
            path.write_text(json.dumps(state))
        else:
            qstate.save_state(state, path)
        return path

    return write
