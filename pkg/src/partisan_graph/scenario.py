"""Synthetic election corpora with known ground truth.

A :class:`ScenarioSpec` fixes group sizes, per-account activity, who retweets and
replies to whom, hashtag pools and bot-score distributions. The generated files
look like real pipeline inputs (corpus, score file, outlet lists, URL cache) and
come with the true group labels plus closed-form expectations for the interaction
matrix and the effectiveness metrics.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .graph import GROUPS, Group

START = datetime(2018, 10, 6, tzinfo=timezone.utc)
SPAN_SECONDS = 42 * 24 * 3600

_PREFIX = {
    Group.LIBERAL_HUMAN: "lh",
    Group.CONSERVATIVE_HUMAN: "ch",
    Group.LIBERAL_BOT: "lb",
    Group.CONSERVATIVE_BOT: "cb",
}

DEFAULT_LIBERAL_OUTLETS = ("nytimes.com", "washingtonpost.com", "cnn.com", "msnbc.com", "theguardian.com")
DEFAULT_CONSERVATIVE_OUTLETS = ("foxnews.com", "breitbart.com", "dailycaller.com", "nypost.com", "washingtontimes.com")


@dataclass
class ScenarioSpec:
    sizes: dict[str, int]
    activity: dict[str, dict[str, float]]  # group -> {"original", "retweet", "reply"} mean per account
    propensity: dict[str, dict[str, float]]  # source group -> target group -> probability
    hashtag_pools: dict[str, list[str]] = field(default_factory=dict)
    # (low, high, alpha, beta): Beta(alpha, beta) rescaled to [low, high]
    score_dist: dict[str, list[float]] = field(
        default_factory=lambda: {"human": [0.0, 0.3, 1.3, 5.0], "bot": [0.31, 1.0, 2.0, 2.0]}
    )
    n_unscored: int = 0
    seed_fraction: float = 0.3
    liberal_outlets: list[str] = field(default_factory=lambda: list(DEFAULT_LIBERAL_OUTLETS))
    conservative_outlets: list[str] = field(default_factory=lambda: list(DEFAULT_CONSERVATIVE_OUTLETS))
    rng_seed: int = 42

    def __post_init__(self):
        names = {g.value for g in GROUPS}
        for key in ("sizes", "activity", "propensity", "hashtag_pools"):
            unknown = set(getattr(self, key)) - names
            if unknown:
                raise ValueError(f"{key}: unknown groups {sorted(unknown)}")
        for g in names:
            self.sizes.setdefault(g, 0)
            self.activity.setdefault(g, {})
            for k in ("original", "retweet", "reply"):
                self.activity[g].setdefault(k, 0.0)
            self.propensity.setdefault(g, {})
            self.hashtag_pools.setdefault(g, [])
        for g, n in self.sizes.items():
            if n < 0:
                raise ValueError(f"negative size for {g}")
        if self.n_unscored < 0:
            raise ValueError("n_unscored must be >= 0")
        for g, row in self.propensity.items():
            bad = set(row) - names
            if bad:
                raise ValueError(f"propensity[{g}]: unknown groups {sorted(bad)}")
            if any(p < 0 for p in row.values()):
                raise ValueError(f"propensity[{g}] has negative entries")
            total = sum(row.values())
            active = self.sizes[g] > 0 and (self.activity[g]["retweet"] > 0 or self.activity[g]["reply"] > 0)
            if active and total == 0:
                raise ValueError(f"group {g} retweets or replies but its propensity row is all zero")
            if total and abs(total - 1.0) > 1e-9:
                raise ValueError(f"propensity[{g}] sums to {total}, not 1")
            if active:
                for tgt, p in row.items():
                    if p > 0 and (self.sizes[tgt] == 0 or self.activity[tgt]["original"] <= 0):
                        raise ValueError(f"{g} targets {tgt}, which has no original tweets to interact with")
        if not 0.0 <= self.seed_fraction <= 1.0:
            raise ValueError("seed_fraction must lie in [0,1]")

    @classmethod
    def load(cls, path: str | Path) -> ScenarioSpec:
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def p(self, src: Group, tgt: Group) -> float:
        return self.propensity[src.value].get(tgt.value, 0.0)

    def rate(self, g: Group, kind: str) -> float:
        return self.activity[g.value][kind]


def _scaled_beta(rng: np.random.Generator, params: list[float], n: int) -> np.ndarray:
    lo, hi, a, b = params
    return lo + (hi - lo) * rng.beta(a, b, size=n)


def _short_url(target: str) -> str:
    return "https://bit.ly/" + hashlib.sha1(target.encode()).hexdigest()[:8]


def expected_values(spec: ScenarioSpec) -> dict:
    """Closed-form expectations implied by a scenario spec (means over the generator's randomness)."""
    out: dict = {"row_propensity": {}, "metrics": {}}
    for g in GROUPS:
        out["row_propensity"][g.value] = {t.value: spec.p(g, t) for t in GROUPS}
    for side, (hum, bot) in {
        "Liberal": (Group.LIBERAL_HUMAN, Group.LIBERAL_BOT),
        "Conservative": (Group.CONSERVATIVE_HUMAN, Group.CONSERVATIVE_BOT),
    }.items():
        p = spec.p(hum, bot)
        o, rt, rp = (spec.rate(hum, k) for k in ("original", "retweet", "reply"))
        act = o + rt + rp
        n_rt_to_bots = spec.sizes[hum.value] * rt * p
        bot_orig = spec.sizes[bot.value] * spec.rate(bot, "original")
        bot_rep = spec.sizes[bot.value] * spec.rate(bot, "reply")
        tsr = None
        if bot_orig + bot_rep > 0:
            hit = bot_orig * (1 - math.exp(-n_rt_to_bots / bot_orig)) if bot_orig else 0.0
            tsr = hit / (bot_orig + bot_rep)
        out["metrics"][side] = {
            "rtp": p if rt > 0 else None,
            "rr": p if rp > 0 else None,
            "h2br": (rt + rp) * p / act if act > 0 else None,
            "tsr": tsr,
        }
    return out


def generate_scenario(spec: ScenarioSpec, out_dir: str | Path) -> dict[str, Path]:
    """Write corpus, scores, outlet lists, URL cache and ground truth under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.rng_seed)

    accounts: dict[Group, list[str]] = {
        g: [f"{_PREFIX[g]}{i:06d}" for i in range(spec.sizes[g.value])] for g in GROUPS
    }
    unscored = [f"xx{i:06d}" for i in range(spec.n_unscored)]
    outlets = {"Liberal": spec.liberal_outlets, "Conservative": spec.conservative_outlets}

    records: list[dict] = []
    cache: dict[str, str] = {}
    originals: dict[Group, list[tuple[str, str]]] = {g: [] for g in GROUPS}  # (tweet_id, author)
    counter = 0

    def new_id() -> str:
        nonlocal counter
        counter += 1
        return f"t{counter:08d}"

    def ts() -> str:
        return (START + timedelta(seconds=int(rng.integers(SPAN_SECONDS)))).strftime("%Y-%m-%dT%H:%M:%SZ")

    def tags_for(g: Group | None) -> list[str]:
        pool = spec.hashtag_pools.get(g.value, []) if g is not None else []
        if not pool:
            return []
        k = int(rng.integers(0, 3))
        return sorted({pool[int(i)] for i in rng.integers(0, len(pool), size=k)})

    for g in GROUPS:
        side = g.side.value
        for acc in accounts[g]:
            n_orig = int(rng.poisson(spec.rate(g, "original")))
            is_seed = spec.rate(g, "original") > 0 and rng.random() < spec.seed_fraction
            if is_seed:
                n_orig = max(n_orig, 1)
            for j in range(n_orig):
                urls = []
                if is_seed and (j == 0 or rng.random() < 0.5):
                    dom = outlets[side][int(rng.integers(len(outlets[side])))]
                    target = f"https://www.{dom}/story/{int(rng.integers(10_000))}"
                    if rng.random() < 0.5:
                        short = _short_url(target)
                        cache[short] = target
                        urls.append(short)
                    else:
                        urls.append(target)
                tid = new_id()
                records.append(
                    {"id": tid, "author_id": acc, "kind": "original", "lang": "en", "text": f"post {tid}",
                     "hashtags": tags_for(g), "urls": urls, "created_at": ts()}
                )
                originals[g].append((tid, acc))
    for acc in unscored:
        for _ in range(int(rng.poisson(1.0))):
            tid = new_id()
            records.append(
                {"id": tid, "author_id": acc, "kind": "original", "lang": "en", "text": f"post {tid}",
                 "hashtags": [], "urls": [], "created_at": ts()}
            )

    target_groups = list(GROUPS)
    for kind in ("retweet", "reply"):
        for g in GROUPS:
            row = np.array([spec.p(g, t) for t in target_groups])
            for acc in accounts[g]:
                n = int(rng.poisson(spec.rate(g, kind)))
                if n == 0:
                    continue
                chosen = rng.choice(len(target_groups), size=n, p=row)
                for ti in chosen.tolist():
                    pool = originals[target_groups[ti]]
                    for _ in range(20):
                        ref_id, ref_author = pool[int(rng.integers(len(pool)))]
                        if ref_author != acc:
                            break
                    else:
                        continue
                    tid = new_id()
                    rec = {"id": tid, "author_id": acc, "kind": kind, "ref_tweet_id": ref_id,
                           "ref_author_id": ref_author, "lang": "en", "created_at": ts()}
                    if kind == "retweet":
                        rec.update(text=f"RT {ref_id}", hashtags=[], urls=[])
                    else:
                        rec.update(text=f"reply {tid}", hashtags=tags_for(g), urls=[])
                    records.append(rec)

    paths = {
        "corpus": out_dir / "corpus.jsonl",
        "scores": out_dir / "scores.csv",
        "liberal_outlets": out_dir / "liberal_outlets.txt",
        "conservative_outlets": out_dir / "conservative_outlets.txt",
        "url_cache": out_dir / "url_cache.tsv",
        "truth": out_dir / "groups_truth.csv",
        "expected": out_dir / "expected.json",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")

    with open(paths["scores"], "w", encoding="utf-8") as fh:
        fh.write("account_id,score,missing_reason\n")
        for g in GROUPS:
            params = spec.score_dist["bot" if g.is_bot else "human"]
            for acc, s in zip(accounts[g], _scaled_beta(rng, params, len(accounts[g])).tolist()):
                fh.write(f"{acc},{s:.6f},\n")
        for acc in unscored:
            fh.write(f"{acc},MISSING,Suspended\n")

    paths["liberal_outlets"].write_text("".join(d + "\n" for d in spec.liberal_outlets), encoding="utf-8")
    paths["conservative_outlets"].write_text("".join(d + "\n" for d in spec.conservative_outlets), encoding="utf-8")
    with open(paths["url_cache"], "w", encoding="utf-8") as fh:
        for k in sorted(cache):
            fh.write(f"{k}\t{cache[k]}\n")
    with open(paths["truth"], "w", encoding="utf-8") as fh:
        fh.write("account_id,group\n")
        for g in GROUPS:
            for acc in accounts[g]:
                fh.write(f"{acc},{g.value}\n")
        for acc in unscored:
            fh.write(f"{acc},{Group.RESIDUAL.value}\n")
    paths["expected"].write_text(json.dumps(expected_values(spec), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths


def write_bulk_corpus(
    path: str | Path,
    n_records: int = 2_600_000,
    n_users: int = 1_000_000,
    rng_seed: int = 0,
    shares: tuple[float, float, float] = (0.175, 0.72, 0.105),
) -> None:
    """Large unstructured corpus for load testing; kind shares default to the midterm dataset's.

    Retweet and reply targets are drawn with a heavy-tailed preference so the graph
    has a nontrivial core structure.
    """
    rng = np.random.default_rng(rng_seed)
    kinds = rng.choice(3, size=n_records, p=np.array(shares) / sum(shares))
    authors = rng.integers(0, n_users, size=n_records)
    # popular accounts: Zipf-ish ranks folded into the user range
    targets = (rng.zipf(1.6, size=n_records) - 1) % n_users
    targets = np.where(rng.random(n_records) < 0.5, targets, rng.integers(0, n_users, size=n_records))
    secs = rng.integers(0, SPAN_SECONDS, size=n_records)
    base = int(START.timestamp())
    with open(path, "w", encoding="utf-8") as fh:
        buf = []
        for i, (k, a, t, s) in enumerate(zip(kinds.tolist(), authors.tolist(), targets.tolist(), secs.tolist())):
            created = datetime.fromtimestamp(base + s, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
            if k == 0:
                buf.append(
                    f'{{"id":"{i}","author_id":"u{a}","kind":"original","lang":"en","text":"post {i} #midterms",'
                    f'"hashtags":["midterms"],"urls":[],"created_at":"{created}"}}\n'
                )
            else:
                kind = "retweet" if k == 1 else "reply"
                buf.append(
                    f'{{"id":"{i}","author_id":"u{a}","kind":"{kind}","ref_tweet_id":"r{t}",'
                    f'"ref_author_id":"u{t}","lang":"en","text":"{kind} {i}","hashtags":[],"urls":[],'
                    f'"created_at":"{created}"}}\n'
                )
            if len(buf) >= 100_000:
                fh.writelines(buf)
                buf.clear()
        fh.writelines(buf)
