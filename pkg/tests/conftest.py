import os

# Environment BEFORE any src import reads settings
os.environ["LOG_LEVEL"] = "WARNING"
os.environ["OTEL_ENABLED"] = "false"
os.environ["AUDIT_LOG_ENABLED"] = "false"
os.environ.pop("REGULUS_SEED", None)
os.environ.pop("METRICS_TEXTFILE", None)

import pytest  # noqa: E402

from src.graph.config_graph import Matching  # noqa: E402
from src.schemas import Params  # noqa: E402
from src.shared.streams import RandomStream  # noqa: E402


@pytest.fixture
def stream():
    return RandomStream(seed=12345, index=0)


@pytest.fixture
def small_params():
    return Params(n=50, d=3, p=0.5)


@pytest.fixture
def critical_params():
    return Params(n=200, d=4, lambda_=0.0, A=1.0)


@pytest.fixture
def hand_matching():
    """
    n=2, d=3. Pairs: (0,3) deleted, (1,2) retained, (4,5) retained.
    Each vertex carries one retained self-loop; the edge between them is deleted.
    """
    return Matching.from_pairs(2, 3, [(0, 3), (1, 2), (4, 5)], [False, True, True])
