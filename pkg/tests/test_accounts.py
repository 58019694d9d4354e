import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partisan_graph.accounts import (
    AccountClass,
    BotScoreTable,
    MissingReason,
    classify,
    load_scores,
    parse_scores,
    read_classes,
    score_histogram,
    write_classes,
    write_scores,
)


def test_empty_file(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("")
    assert len(load_scores(p)) == 0


def test_parse_scores_and_missing(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("u1,0.05\nu2,0.45\nu3,MISSING,Suspended\n")
    t = load_scores(p)
    assert t.scores == {"u1": 0.05, "u2": 0.45}
    assert t.missing == {"u3": MissingReason.SUSPENDED}


def test_out_of_range_row_rejected(caplog):
    t = parse_scores([["u4", "1.7"]])
    assert "u4" not in t.scores and "u4" not in t.missing
    assert "outside" in caplog.text


def test_duplicate_last_wins(caplog):
    t = parse_scores([["u1", "0.1"], ["u1", "MISSING", "Protected"], ["u2", "0.2"], ["u2", "0.9"]])
    assert t.missing == {"u1": MissingReason.PROTECTED}
    assert t.scores == {"u2": 0.9}
    assert "duplicate" in caplog.text


def test_header_and_default_reason():
    t = parse_scores([["account_id", "score", "missing_reason"], ["u1", "MISSING"]])
    assert t.missing == {"u1": MissingReason.NOT_QUERIED}


def test_table_invariants():
    with pytest.raises(ValueError):
        BotScoreTable({"a": 0.1}, {"a": MissingReason.SUSPENDED})
    with pytest.raises(ValueError):
        BotScoreTable({"a": 1.5})


@pytest.mark.parametrize(
    "score,expected",
    [(0.30, AccountClass.HUMAN), (0.300001, AccountClass.BOT), (0.31, AccountClass.BOT), (0.29, AccountClass.HUMAN)],
)
def test_threshold_is_strict(score, expected):
    assert classify(BotScoreTable({"u": score}), 0.3, ["u"])["u"] is expected


def test_absent_account_unknown():
    t = BotScoreTable({"u": 0.1}, {"m": MissingReason.SUSPENDED})
    assert classify(t, 0.3, ["x", "m", "u"]) == {
        "x": AccountClass.UNKNOWN,
        "m": AccountClass.UNKNOWN,
        "u": AccountClass.HUMAN,
    }


def test_threshold_range_checked():
    with pytest.raises(ValueError):
        classify(BotScoreTable(), 1.2, [])


@settings(max_examples=200, deadline=None)
@given(
    st.dictionaries(st.text("abc", min_size=1, max_size=3), st.floats(0, 1), max_size=30),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_monotone_and_partition(scores, t1, t2):
    lo, hi = sorted((t1, t2))
    table = BotScoreTable(scores)
    ids = list(scores) + ["nobody"]
    a = classify(table, lo, ids)
    b = classify(table, hi, ids)
    assert set(a) == set(ids)
    for acc in ids:
        if a[acc] is AccountClass.HUMAN:
            assert b[acc] is AccountClass.HUMAN


def test_histogram_right_skewed_fixture():
    rng = random.Random(3)
    scores = {f"u{i}": min(rng.betavariate(1.2, 8.0), 1.0) for i in range(2000)}
    hist = score_histogram(BotScoreTable(scores))
    assert len(hist) == 20
    assert hist[0][:2] == (0.0, 0.05) and hist[-1][:2] == (0.95, 1.0)
    assert sum(c for *_, c in hist) == 2000
    low = sum(c for lo, hi, c in hist if hi <= 0.2 + 1e-12)
    assert low / 2000 > 0.5


def test_histogram_edges():
    hist = score_histogram(BotScoreTable({"a": 0.0, "b": 0.15, "c": 0.3, "d": 1.0}))
    counts = {lo: c for lo, _, c in hist}
    assert counts[0.0] == 1 and counts[0.15] == 1 and counts[0.3] == 1 and counts[0.95] == 1


def test_write_read_roundtrip(tmp_path):
    t = BotScoreTable({"a": 0.1, "b": 0.7}, {"c": MissingReason.PROTECTED})
    write_scores(t, tmp_path / "s.csv")
    assert load_scores(tmp_path / "s.csv") == t
    classes = classify(t, 0.3)
    write_classes(classes, t, tmp_path / "c.csv")
    assert read_classes(tmp_path / "c.csv") == classes
