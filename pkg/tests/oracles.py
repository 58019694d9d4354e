"""Slow, obviously-correct reference implementations used to check the fast paths."""

from __future__ import annotations

import random
from collections import defaultdict

from partisan_graph.corpus import Kind, TweetRecord
from partisan_graph.graph import Group


def undirected_neighbours(edges) -> dict[str, set[str]]:
    nb: dict[str, set[str]] = defaultdict(set)
    for s, t in edges:
        if s != t:
            nb[s].add(t)
            nb[t].add(s)
    return nb


def k_core_by_deletion(nodes, edges, k: int) -> set[str]:
    """Repeatedly delete any node with fewer than k surviving neighbours."""
    nb = undirected_neighbours(edges)
    alive = set(nodes)
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            if len(nb[v] & alive) < k:
                alive.discard(v)
                changed = True
    return alive


def core_numbers_by_deletion(nodes, edges, k_max: int) -> dict[str, int]:
    core = {v: 0 for v in nodes}
    for k in range(1, k_max + 1):
        for v in k_core_by_deletion(nodes, edges, k):
            core[v] = k
    return core


def in_out_degree(nodes, edges) -> dict[str, tuple[int, int]]:
    out = {}
    for v in nodes:
        ins = sum(1 for (s, t) in edges if t == v)
        outs = sum(1 for (s, t) in edges if s == v)
        out[v] = (ins, outs)
    return out


def effectiveness_tally(records: list[TweetRecord], groups: dict[str, Group], side: str | None):
    """Literal reading of the four ratios; returns {metric: (numerator, denominator)}."""

    def is_human(a):
        g = groups.get(a, Group.RESIDUAL)
        return g.is_human and (side is None or g.side.value == side)

    def is_bot(a):
        g = groups.get(a, Group.RESIDUAL)
        return g.is_bot and (side is None or g.side.value == side)

    human_recs = [r for r in records if is_human(r.author_id)]
    human_rts = [r for r in human_recs if r.kind == Kind.RETWEET]
    human_rps = [r for r in human_recs if r.kind == Kind.REPLY]
    rts_of_bots = [r for r in human_rts if is_bot(r.referenced_author_id)]
    rps_to_bots = [r for r in human_rps if is_bot(r.referenced_author_id)]
    bot_posts = [r.tweet_id for r in records if is_bot(r.author_id) and r.kind != Kind.RETWEET]
    human_rt_targets = {r.referenced_tweet_id for r in rts_of_bots}
    successful = sum(1 for tid in set(bot_posts) if tid in human_rt_targets)
    return {
        "rtp": (len(rts_of_bots), len(human_rts)),
        "rr": (len(rps_to_bots), len(human_rps)),
        "h2br": (len(rts_of_bots) + len(rps_to_bots), len(human_recs)),
        "tsr": (successful, len(set(bot_posts))),
    }


def random_graph_edges(rng: random.Random, n: int, p: float) -> list[tuple[str, str]]:
    nodes = [f"n{i}" for i in range(n)]
    return [(a, b) for a in nodes for b in nodes if a != b and rng.random() < p]


def random_labelled_corpus(rng: random.Random, n_records: int, n_users: int = 60):
    """Random records over a random group assignment, with dangling references mixed in."""
    from datetime import datetime, timezone

    ts = datetime(2018, 11, 6, tzinfo=timezone.utc)
    users = [f"a{i}" for i in range(n_users)]
    pool = list(Group)
    groups = {u: rng.choice(pool) for u in users if rng.random() < 0.9}
    records: list[TweetRecord] = []
    for i in range(n_records):
        author = rng.choice(users)
        kind = rng.choice((Kind.ORIGINAL, Kind.RETWEET, Kind.RETWEET, Kind.REPLY))
        ref = ref_author = None
        if kind is not Kind.ORIGINAL:
            if records and rng.random() < 0.85:
                target = rng.choice(records)
                ref, ref_author = target.tweet_id, target.author_id
                if kind is Kind.RETWEET and target.kind is Kind.RETWEET:
                    ref, ref_author = target.referenced_tweet_id, target.referenced_author_id
            else:
                ref, ref_author = f"gone{i}", rng.choice(users + ["outsider"])
        records.append(
            TweetRecord(f"t{i}", author, kind, ref, ref_author, "en", "", (), (), ts)
        )
    return records, groups
