from __future__ import annotations

import json
import sys
from datetime import datetime, timezone

import pytest

from partisan_graph.corpus import Corpus, Kind, TweetRecord

TS = datetime(2018, 11, 6, 12, 0, tzinfo=timezone.utc)


def rec(
    tweet_id: str,
    author: str,
    kind: str = "original",
    ref: str | None = None,
    ref_author: str | None = None,
    *,
    lang: str = "en",
    text: str = "",
    tags: tuple[str, ...] = (),
    urls: tuple[str, ...] = (),
) -> TweetRecord:
    k = Kind(kind)
    if k is Kind.RETWEET and ref is None:
        ref = f"src-of-{tweet_id}"
    return TweetRecord(
        tweet_id=tweet_id,
        author_id=author,
        kind=k,
        referenced_tweet_id=ref,
        referenced_author_id=ref_author,
        language=lang,
        text=text,
        hashtags=tuple(tags),
        urls=tuple(urls),
        created_at=TS,
    )


def raw(tweet_id, author, kind="original", ref=None, ref_author=None, lang="en", text="", tags=(), urls=()):
    return json.dumps(
        {
            "id": tweet_id,
            "author_id": author,
            "kind": kind,
            "ref_tweet_id": ref,
            "ref_author_id": ref_author,
            "lang": lang,
            "text": text,
            "hashtags": list(tags),
            "urls": list(urls),
            "created_at": "2018-11-06T12:00:00Z",
        }
    )


def corpus_of(*records: TweetRecord) -> Corpus:
    return Corpus(records)


@pytest.fixture
def star_corpus():
    """B retweets A twice, C retweets A once, D replies to A."""
    return corpus_of(
        rec("a1", "A"),
        rec("a2", "A"),
        rec("b1", "B", "retweet", "a1", "A"),
        rec("b2", "B", "retweet", "a2", "A"),
        rec("c1", "C", "retweet", "a1", "A"),
        rec("d1", "D", "reply", "a1", "A"),
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
