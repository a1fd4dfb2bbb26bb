import pytest
from pydantic import ValidationError

from src.schemas import CheckReport, Params, TailEstimate, Violation, critical_p


def test_lambda_derives_p():
    params = Params(n=1000, d=3, **{"lambda": 1.0})
    assert params.p == pytest.approx(critical_p(1000, 3, 1.0))
    assert params.p == pytest.approx(0.55)


def test_consistent_p_and_lambda_accepted():
    p = critical_p(1000, 4, -0.5)
    assert Params(n=1000, d=4, p=p, lambda_=-0.5).lambda_ == -0.5


def test_inconsistent_p_and_lambda_rejected():
    with pytest.raises(ValidationError):
        Params(n=1000, d=4, p=0.5, lambda_=0.0)


def test_odd_stub_count_rejected():
    with pytest.raises(ValidationError):
        Params(n=5, d=3, p=0.5)


@pytest.mark.parametrize("field, value", [("d", 2), ("p", 1.5), ("n", 0), ("A", 0.0)])
def test_out_of_range_fields_rejected(field, value):
    kwargs = {"n": 10, "d": 4, "p": 0.5, field: value}
    with pytest.raises(ValidationError):
        Params(**kwargs)


def test_threshold():
    assert Params(n=1000, d=3, p=0.5).threshold is None
    assert Params(n=1000, d=3, p=0.5, A=2.0).threshold == pytest.approx(200.0)


def _tail(**overrides):
    row = dict(
        d=3, n=100, p=0.5, mode="VERTEX", trials=10, successes=4,
        p_hat=0.4, ci_lo=0.1, ci_hi=0.7, seed=1,
    )
    row.update(overrides)
    return TailEstimate(**row)


def test_tail_estimate_parses_blank_cells():
    est = TailEstimate.model_validate(
        {
            "d": "3", "n": "100", "p": "0.5", "lambda": "", "A": "", "mode": "MAX",
            "simple": "false", "trials": "10", "successes": "4", "p_hat": "0.4",
            "ci_lo": "0.1", "ci_hi": "0.7", "seed": "1", "elapsed_s": "0.25",
        }
    )
    assert est.lambda_ is None and est.A is None
    assert est.simple is False


def test_tail_estimate_checks_p_hat():
    with pytest.raises(ValidationError):
        _tail(p_hat=0.5)


def test_tail_estimate_checks_interval():
    with pytest.raises(ValidationError):
        _tail(ci_lo=0.45)


def test_check_report_merge():
    bad = CheckReport(name="a", passed=False, checks=2, violations=[Violation(check="x")])
    good = CheckReport(name="b", checks=3)
    merged = CheckReport.merge("all", [bad, good])
    assert not merged.passed
    assert merged.checks == 5
    assert [v.check for v in merged.violations] == ["x"]
