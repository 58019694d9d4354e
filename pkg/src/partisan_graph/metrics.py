"""Bot effectiveness metrics: retweet pervasiveness (RTP), reply rate (RR),
human-to-bot rate (H2BR) and tweet success rate (TSR).

By default humans and bots are taken from the same political side; counts in the
denominators cover all activity of those humans, including interactions with
Residual or opposite-side accounts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import Corpus, Kind
from .graph import Group
from .ideology import Leaning

METRICS = ("rtp", "rr", "h2br", "tsr")


@dataclass(frozen=True)
class Ratio:
    numerator: int
    denominator: int

    @property
    def value(self) -> float | None:
        return self.numerator / self.denominator if self.denominator else None

    def __str__(self) -> str:
        v = self.value
        return "undefined" if v is None else f"{v:.4f}"


@dataclass(frozen=True)
class EffectivenessReport:
    side: Leaning | None  # None for the pooled both-sides variant
    rtp: Ratio
    rr: Ratio
    h2br: Ratio
    tsr: Ratio

    @property
    def label(self) -> str:
        return self.side.value if self.side is not None else "Both"

    def as_dict(self) -> dict[str, float | None]:
        return {m: getattr(self, m).value for m in METRICS}


def _members(groups: Mapping[str, Group], wanted: Iterable[Group]) -> set[str]:
    wanted = set(wanted)
    return {a for a, g in groups.items() if g in wanted}


def effectiveness(
    corpus: Corpus, groups: Mapping[str, Group], side: Leaning | None, both_sides: bool = False
) -> EffectivenessReport:
    """Tally the four metrics in one pass over the corpus.

    Retweets and replies are credited to ``referenced_author_id``, i.e. the author of the
    origin tweet. TSR counts distinct bot-authored originals and replies that at least one
    human retweeted, over all originals and replies the bots authored.
    """
    if both_sides or side is None:
        humans = _members(groups, (Group.LIBERAL_HUMAN, Group.CONSERVATIVE_HUMAN))
        bots = _members(groups, (Group.LIBERAL_BOT, Group.CONSERVATIVE_BOT))
        side = None
    else:
        if side is Leaning.UNLABELED:
            raise ValueError("side must be Liberal or Conservative")
        humans = _members(groups, (Group.of(side, bot=False),))
        bots = _members(groups, (Group.of(side, bot=True),))

    rt_num = rt_den = rp_num = rp_den = activity = 0
    bot_tweets: set[str] = set()
    retweeted: set[str] = set()
    for r in corpus.records:
        author = r.author_id
        if author in humans:
            activity += 1
            if r.kind is Kind.RETWEET:
                rt_den += 1
                if r.referenced_author_id in bots:
                    rt_num += 1
                    retweeted.add(r.referenced_tweet_id)
            elif r.kind is Kind.REPLY:
                rp_den += 1
                if r.referenced_author_id in bots:
                    rp_num += 1
        elif author in bots and r.kind is not Kind.RETWEET:
            bot_tweets.add(r.tweet_id)

    return EffectivenessReport(
        side=side,
        rtp=Ratio(rt_num, rt_den),
        rr=Ratio(rp_num, rp_den),
        h2br=Ratio(rt_num + rp_num, activity),
        tsr=Ratio(len(retweeted & bot_tweets), len(bot_tweets)),
    )


def write_reports(reports: Iterable[EffectivenessReport], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["side", "metric", "value", "numerator", "denominator"])
        for rep in reports:
            for m in METRICS:
                ratio: Ratio = getattr(rep, m)
                v = ratio.value
                w.writerow([rep.label, m.upper(), "undefined" if v is None else f"{v:.6f}", ratio.numerator, ratio.denominator])
