import csv
import random
from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_of, rec
from partisan_graph.graph import Group
from partisan_graph.hashtags import (
    DEFAULT_EXCLUSIONS,
    divergence,
    hashtag_report,
    top_hashtags,
    write_report,
)

LB, LH = Group.LIBERAL_BOT, Group.LIBERAL_HUMAN


def tagged(*tag_lists, author="b"):
    return corpus_of(*(rec(f"{author}{i}", author, tags=tags) for i, tags in enumerate(tag_lists)))


def test_simple_ranking():
    corpus = tagged(("a",), ("a", "b"), ("a",))
    groups = {"b": LB}
    assert top_hashtags(corpus, groups, LB, 2, ()) == [("a", 3), ("b", 1)]
    assert top_hashtags(corpus, groups, LB, 2, {"a"}) == [("b", 1)]
    assert top_hashtags(corpus, groups, LB, 2, {"#A"}) == [("b", 1)]
    assert top_hashtags(corpus, groups, LH, 2, ()) == []


def test_counted_once_per_record():
    assert top_hashtags(tagged(("a", "a"), ("b",)), {"b": LB}, LB, 5, ()) == [("a", 1), ("b", 1)]


def test_default_exclusions_applied():
    corpus = tagged(("midterms", "x"), ("trump",))
    assert top_hashtags(corpus, {"b": LB}, LB, 5) == [("x", 1)]
    assert "midterms" in DEFAULT_EXCLUSIONS


def test_thirty_tags_against_tally():
    rng = random.Random(11)
    tags = [f"tag{i:02d}" for i in range(30)]
    records = []
    for i in range(600):
        author = rng.choice(["p", "q", "h"])
        records.append(rec(str(i), author, tags=tuple(rng.sample(tags, rng.randint(0, 3)))))
    groups = {"p": LB, "q": LB, "h": LH}
    tally = Counter(t for r in records if r.author_id in ("p", "q") for t in set(r.hashtags))
    expected = sorted(tally.items(), key=lambda kv: (-kv[1], kv[0]))[:20]
    assert top_hashtags(corpus_of(*records), groups, LB, 20, ()) == expected


def test_divergence_cases():
    assert divergence(["x", "y"], ["x"]) == {"y"}
    assert divergence([("x", 3), ("y", 2)], [("x", 9), ("y", 1)]) == set()


def test_report_flags_against_human_top():
    corpus = corpus_of(
        rec("1", "b", tags=("flipthehouse", "resist")),
        rec("2", "b", tags=("resist",)),
        rec("3", "h", tags=("resist", "bluewave")),
    )
    rep = hashtag_report(corpus, {"b": LB, "h": LH}, LB, k=20, human_k=50)
    assert rep.ranked == [("resist", 2), ("flipthehouse", 1)]
    assert rep.flags == {"flipthehouse"}
    human = hashtag_report(corpus, {"b": LB, "h": LH}, LH)
    assert human.flags == frozenset()


def test_write_report(tmp_path):
    corpus = tagged(("x", "y"), ("x",))
    rep = hashtag_report(corpus, {"b": LB}, LB)
    write_report(rep, tmp_path / "h.csv")
    rows = list(csv.reader(open(tmp_path / "h.csv")))
    assert rows == [["rank", "hashtag", "count", "flagged"], ["1", "x", "2", "1"], ["2", "y", "1", "1"]]


_tag_lists = st.lists(st.lists(st.sampled_from("abcdefgh"), max_size=3), max_size=40)


@settings(max_examples=150, deadline=None)
@given(_tag_lists, st.sets(st.sampled_from("abcdefgh")), st.sets(st.sampled_from("abcdefgh")), st.integers(0, 8))
def test_exclusion_monotone_and_flags_sound(tag_lists, excl, extra, k):
    corpus = tagged(*map(tuple, tag_lists))
    groups = {"b": LB}
    small = {t for t, _ in top_hashtags(corpus, groups, LB, k, excl)}
    big = {t for t, _ in top_hashtags(corpus, groups, LB, k, excl | extra)}
    assert big - small <= set("abcdefgh") - (excl | extra)
    full_small = {t for t, _ in top_hashtags(corpus, groups, LB, 100, excl)}
    full_big = {t for t, _ in top_hashtags(corpus, groups, LB, 100, excl | extra)}
    assert full_big <= full_small
    human = sorted(extra)
    for flag in divergence(sorted(small), human):
        assert flag not in human
