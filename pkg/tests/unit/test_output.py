import json
from fractions import Fraction

import pytest

from src.harness.output import (
    CONFIG_PREFIX,
    fmt_float,
    from_csv,
    from_json,
    plain,
    to_csv,
    to_json,
)
from src.schemas import TAIL_CSV_FIELDS, AuditReport, TailEstimate


@pytest.fixture
def estimate():
    return TailEstimate(
        d=3, n=1000, p=0.5, lambda_=0.0, A=1.0, mode="MAX", simple=False, trials=3,
        successes=1, p_hat=1 / 3, ci_lo=0.06, ci_hi=0.79, seed=11, elapsed_s=0.5,
    )


def test_floats_keep_twelve_significant_digits():
    assert fmt_float(1 / 3) == "0.333333333333"
    assert plain(2 / 3) == 0.666666666667


def test_plain_handles_rationals_and_infinities():
    assert plain(Fraction(3, 8)) == "3/8"
    assert plain(float("inf")) == "inf"
    assert plain({"a": (1, 2.5)}) == {"a": [1, 2.5]}


def test_csv_round_trip(estimate):
    text = to_csv([estimate], TAIL_CSV_FIELDS, {"seed": 11, "n": 1000})
    assert text.startswith(CONFIG_PREFIX)
    assert text.splitlines()[1] == ",".join(TAIL_CSV_FIELDS)
    config, records = from_csv(text, TailEstimate)
    assert config == {"n": 1000, "seed": 11}
    (back,) = records
    assert back.successes == estimate.successes
    assert back.lambda_ == 0.0
    assert back.p_hat == pytest.approx(estimate.p_hat, rel=1e-11)


def test_csv_blank_optional_cells(estimate):
    row = estimate.model_copy(update={"A": None, "lambda_": None})
    _, (back,) = from_csv(to_csv([row], TAIL_CSV_FIELDS, {}), TailEstimate)
    assert back.A is None and back.lambda_ is None


def test_json_round_trip():
    report = AuditReport(
        audit="fresh-excess", status="PASS", trials=10, exceedances=0, frequency=0.0,
        standard_error=0.0, rhs=0.005, horizon=827, tunables={"m": 100.0}, seed=1,
    )
    text = to_json(report, {"command": "verify"})
    assert json.loads(text)["config"] == {"command": "verify"}
    config, (back,) = from_json(text, AuditReport)
    assert config == {"command": "verify"}
    assert back == report


def test_json_list_goes_under_records(estimate):
    data = json.loads(to_json([estimate, estimate], {}))
    assert len(data["records"]) == 2
    _, records = from_json(json.dumps(data), TailEstimate)
    assert len(records) == 2
