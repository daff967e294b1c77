from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture()
def data_root(tmp_path) -> Path:
    return tmp_path / "data"
