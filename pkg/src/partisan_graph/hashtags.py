"""Per-group hashtag rankings and the bot-vs-human divergence flags."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Corpus
from .graph import Group

# general election hashtags left out of the rankings by default
DEFAULT_EXCLUSIONS = frozenset(
    {
        "elections",
        "midterms",
        "democrats",
        "liberals",
        "voteredtosaveamerica",
        "votebluetosaveamerica",
        "trump",
    }
)

COUNTERPART = {
    Group.LIBERAL_BOT: Group.LIBERAL_HUMAN,
    Group.CONSERVATIVE_BOT: Group.CONSERVATIVE_HUMAN,
}


def normalize_tag(tag: str) -> str:
    return tag.strip().lstrip("#").lower()


def top_hashtags(
    corpus: Corpus,
    groups: Mapping[str, Group],
    group: Group,
    k: int,
    exclusions: Iterable[str] = DEFAULT_EXCLUSIONS,
) -> list[tuple[str, int]]:
    """Top ``k`` hashtags over records authored by ``group``; a tag counts once per record."""
    if k < 0:
        raise ValueError("k must be >= 0")
    excluded = {normalize_tag(t) for t in exclusions}
    counts: Counter[str] = Counter()
    for r in corpus.records:
        if r.hashtags and groups.get(r.author_id) is group:
            counts.update({t for t in r.hashtags if t not in excluded})
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


def divergence(bot_top: Iterable[tuple[str, int] | str], human_top: Iterable[tuple[str, int] | str]) -> set[str]:
    human = {h if isinstance(h, str) else h[0] for h in human_top}
    return {h for h in (b if isinstance(b, str) else b[0] for b in bot_top) if h not in human}


@dataclass(frozen=True)
class HashtagReport:
    group: Group
    ranked: list[tuple[str, int]]
    flags: frozenset[str]


def hashtag_report(
    corpus: Corpus,
    groups: Mapping[str, Group],
    group: Group,
    k: int = 20,
    human_k: int = 50,
    exclusions: Iterable[str] = DEFAULT_EXCLUSIONS,
) -> HashtagReport:
    exclusions = frozenset(exclusions)
    ranked = top_hashtags(corpus, groups, group, k, exclusions)
    flags: frozenset[str] = frozenset()
    if group in COUNTERPART:
        human = top_hashtags(corpus, groups, COUNTERPART[group], human_k, exclusions)
        flags = frozenset(divergence(ranked, human))
    return HashtagReport(group, ranked, flags)


def write_report(rep: HashtagReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "hashtag", "count", "flagged"])
        for i, (tag, cnt) in enumerate(rep.ranked, 1):
            w.writerow([i, tag, cnt, int(tag in rep.flags)])
