import json
import os
import tempfile
from pathlib import Path

import pytest

# the app creates its tables on import; keep them out of the working tree
os.environ.setdefault(
    "DATABASE_URL", f"sqlite:///{Path(tempfile.mkdtemp(prefix='dsverify-')) / 'runs.db'}"
)

from backend.fixedpoint import FxFormat  # noqa: E402
from backend.schemas import parse_system  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def third_order_path() -> Path:
    return DATA / "third_order.json"


@pytest.fixture
def third_order_doc(third_order_path) -> dict:
    return json.loads(third_order_path.read_text())


@pytest.fixture
def third_order(third_order_doc):
    return parse_system(third_order_doc)


@pytest.fixture
def q2_13() -> FxFormat:
    return FxFormat(2, 13, dyn_min=-1, dyn_max=1)


@pytest.fixture
def q12_3() -> FxFormat:
    return FxFormat(12, 3, dyn_min=-1, dyn_max=1)


@pytest.fixture
def q2_4() -> FxFormat:
    return FxFormat(2, 4)
