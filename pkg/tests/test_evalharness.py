import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercpd.evalharness import (
    DEFAULT_GRID,
    EvaluationReport,
    MethodScores,
    average_f1_range,
    f1_at_fraction,
    f1_score,
    match_predictions,
    score_run,
    timing_error,
)


def test_matching_examples():
    assert match_predictions([30], [29], 2) == [(30, 29)]
    assert len(match_predictions([29, 31], [30], 2)) == 1
    assert match_predictions([27], [30], 2) == []
    with pytest.raises(ValueError):
        match_predictions([1], [1], -1)


def test_matching_prefers_nearest():
    assert match_predictions([31, 33], [32, 30], 2) == [(31, 30), (33, 32)]


def test_f1_examples():
    truth = [30, 60, 90, 120]
    assert f1_score(truth, truth) == 1
    assert f1_score([30, 60, 5, 10], truth) == pytest.approx(0.5)
    assert f1_score([1, 2], truth) == 0
    with pytest.raises(ValueError):
        f1_score([1], [])


def _spikes(length, at):
    z = np.zeros(length)
    for rank, t in enumerate(at):
        z[t] = 10.0 - rank
    return z


def test_f1_at_fraction_ceiling_and_count():
    truth = [30, 60, 90, 120]
    z = _spikes(150, truth)
    # 5 predictions: 4 hits, P = 4/5, R = 1
    assert f1_at_fraction(z, truth, 0.03) == pytest.approx(2 * 0.8 / 1.8)
    assert f1_at_fraction(z, truth, 0.03, count=4) == 1.0


def test_average_f1_range():
    truth = [30, 60, 90, 120]
    z = _spikes(150, truth)
    # independent evaluation: recall 1, precision 4/ceil(f*150)
    expected = []
    for pct in range(3, 16):
        k = -(-pct * 150 // 100)
        p = 4 / k
        expected.append(2 * p / (p + 1))
    assert len(DEFAULT_GRID) == 13
    avg = average_f1_range(z, truth)
    assert avg == pytest.approx(np.mean(expected), abs=1e-12)
    assert avg < 1
    assert average_f1_range(z, truth, [0.03]) == f1_at_fraction(z, truth, 0.03)
    # all-zero scores pick the first time points, far from any truth
    assert average_f1_range(np.zeros(150), truth) == 0


def test_timing_error_examples():
    assert timing_error([30, 60], [30, 60]) == 0
    assert timing_error([32, 100], [30, 60]) == 15
    assert timing_error([30, 999], [30]) == 0
    with pytest.raises(ValueError):
        timing_error([], [1])


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.integers(0, 100), min_size=1, max_size=8),
    st.lists(st.integers(0, 100), min_size=1, max_size=5),
    st.lists(st.integers(0, 100), max_size=5),
)
def test_metric_properties(pred, truth, extra):
    assert timing_error(pred + extra, truth) <= timing_error(pred, truth)
    assert f1_score(pred, truth, 0) <= f1_score(pred, truth, 2)
    assert f1_score(pred[::-1], truth) == f1_score(pred, truth)
    assert len(match_predictions(pred, truth)) <= min(len(pred), len(truth))
    assert 0 <= f1_score(pred, truth) <= 1


def test_report_table(tmp_path):
    report = EvaluationReport()
    report.add("star", "d0", MethodScores(0.5, 0.5, 0.4, 3.0))
    report.add("star", "d1", MethodScores(1.0, 1.0, 0.6, 1.0))
    report.add("clique", "d0", MethodScores(0.0, 0.0, 0.1, 9.0))
    mean = report.mean("star")
    assert mean.f1_at_3pct == 0.75 and mean.timing_error == 2.0
    path = tmp_path / "t.csv"
    report.write_table(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "method,f1_at_3pct,f1_at_count,avg_f1,timing_error,datasets"
    assert lines[1].startswith("star,0.750000")
    assert len(lines) == 3


def test_score_run_uses_fraction_for_timing():
    truth = [30, 60, 90, 120]
    s = score_run(_spikes(150, truth), truth)
    assert s.timing_error == 0
    assert s.f1_at_count == 1.0
