"""Political-leaning inference.

Accounts that share links to partisan media outlets get seed labels by majority
vote over their tweets; everybody else inherits a leaning through label
propagation over the (undirected, weighted) retweet graph.
"""

from __future__ import annotations

import csv
import enum
import functools
import logging
import random
import urllib.request
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Protocol

from .corpus import Corpus
from .errors import InputError

if TYPE_CHECKING:
    from .graph import RetweetGraph

log = logging.getLogger(__name__)


class Leaning(str, enum.Enum):
    LIBERAL = "Liberal"
    CONSERVATIVE = "Conservative"
    UNLABELED = "Unlabeled"

    def flipped(self) -> Leaning:
        return {Leaning.LIBERAL: Leaning.CONSERVATIVE, Leaning.CONSERVATIVE: Leaning.LIBERAL}.get(self, self)


class Provenance(str, enum.Enum):
    SEED = "Seed"
    PROPAGATED = "Propagated"
    UNLABELED = "Unlabeled"


# ---------------------------------------------------------------------------
# outlets and URL resolution


@functools.lru_cache(maxsize=1)
def _extractor():
    import tldextract

    # bundled public-suffix snapshot only; never touch the network
    return tldextract.TLDExtract(suffix_list_urls=(), cache_dir=None)


@functools.lru_cache(maxsize=262144)
def registrable_domain(url_or_host: str) -> str:
    """Public-suffix-aware registrable domain, lowercased (``edition.cnn.com`` -> ``cnn.com``).

    Falls back to the bare host for names without a known suffix.
    """
    ext = _extractor()(url_or_host.strip())
    dom = ext.top_domain_under_public_suffix
    if not dom:
        dom = ".".join(p for p in (ext.subdomain, ext.domain, ext.suffix) if p)
    return dom.lower()


@dataclass(frozen=True)
class MediaOutletLists:
    liberal_domains: frozenset[str]
    conservative_domains: frozenset[str]

    def __post_init__(self):
        lib = frozenset(registrable_domain(d) for d in self.liberal_domains if d.strip())
        con = frozenset(registrable_domain(d) for d in self.conservative_domains if d.strip())
        both = lib & con
        if both:
            raise ValueError(f"domains listed on both sides: {sorted(both)[:5]}")
        object.__setattr__(self, "liberal_domains", lib)
        object.__setattr__(self, "conservative_domains", con)

    def side_of(self, domain: str) -> Leaning | None:
        if domain in self.liberal_domains:
            return Leaning.LIBERAL
        if domain in self.conservative_domains:
            return Leaning.CONSERVATIVE
        return None

    def flipped(self) -> MediaOutletLists:
        return MediaOutletLists(self.conservative_domains, self.liberal_domains)

    @classmethod
    def load(cls, liberal_path: str | Path, conservative_path: str | Path) -> MediaOutletLists:
        return cls(_read_domains(liberal_path), _read_domains(conservative_path))


def _read_domains(path: str | Path) -> frozenset[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise InputError(f"cannot read outlet list {path}: {e}") from e
    return frozenset(line.strip() for line in lines if line.strip() and not line.startswith("#"))


@dataclass
class UrlResolutionCache:
    expanded: dict[str, str] = field(default_factory=dict)
    unresolved: set[str] = field(default_factory=set)

    def __post_init__(self):
        empty = [k for k, v in self.expanded.items() if not v]
        if empty:
            raise ValueError(f"empty expansion for {empty[:5]}")

    def get(self, url: str) -> str | None:
        return self.expanded.get(url)

    def put(self, url: str, target: str | None) -> None:
        if target:
            self.expanded[url] = target
            self.unresolved.discard(url)
        else:
            self.unresolved.add(url)

    def resolve(self, url: str) -> str:
        """Expanded form if known, else the URL as shared."""
        return self.expanded.get(url, url)

    @classmethod
    def load(cls, path: str | Path | None) -> UrlResolutionCache:
        cache = cls()
        if path is None:
            return cache
        try:
            fh = open(path, encoding="utf-8")
        except OSError as e:
            raise InputError(f"cannot read URL cache {path}: {e}") from e
        with fh:
            for line in fh:
                parts = line.rstrip("\n").split("\t")
                if not parts[0]:
                    continue
                cache.put(parts[0], parts[1].strip() if len(parts) > 1 else None)
        return cache

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for k in sorted(self.expanded):
                fh.write(f"{k}\t{self.expanded[k]}\n")
            for k in sorted(self.unresolved):
                fh.write(f"{k}\t\n")


class Resolver(Protocol):
    def __call__(self, url: str) -> str | None: ...


def http_resolver(timeout: float = 5.0) -> Resolver:
    """Live expansion by following redirects with HEAD requests. Not used by default."""

    def resolve(url: str) -> str | None:
        req = urllib.request.Request(url, method="HEAD", headers={"User-Agent": "partisan-graph"})
        try:
            with urllib.request.urlopen(req, timeout=timeout) as resp:
                return resp.geturl()
        except Exception as e:  # noqa: BLE001 - any network failure leaves the URL unresolved
            log.debug("could not resolve %s: %s", url, e)
            return None

    return resolve


def expand_urls(urls: Iterable[str], cache: UrlResolutionCache, resolver: Resolver | None = None) -> int:
    """Fill ``cache`` for ``urls`` not yet seen, using ``resolver``. Returns the number of lookups made."""
    if resolver is None:
        return 0
    lookups = 0
    for url in urls:
        if url in cache.expanded or url in cache.unresolved:
            continue
        cache.put(url, resolver(url))
        lookups += 1
    return lookups


def rank_urls(corpus: Corpus, n: int) -> list[tuple[str, int]]:
    """Most shared URLs, counting each URL once per record; ties in lexicographic order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    counts: Counter[str] = Counter()
    for r in corpus.records:
        if r.urls:
            counts.update(set(r.urls))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:n]


# ---------------------------------------------------------------------------
# seeds


@dataclass(frozen=True)
class SeedLabel:
    leaning: Leaning
    n_liberal: int
    n_conservative: int


SeedLabels = dict[str, SeedLabel]


def seed_label(
    corpus: Corpus,
    url_cache: UrlResolutionCache,
    outlets: MediaOutletLists,
    restrict_to: Iterable[str] | None = None,
) -> SeedLabels:
    """Label accounts by which side's outlets their tweets link to more often.

    A tweet counts once per side however many links it carries; a tweet linking both
    sides counts on both. Ties are dropped, accounts without outlet links are absent.
    If ``restrict_to`` is given only those (shared-form) URLs are considered.
    """
    allowed = set(restrict_to) if restrict_to is not None else None
    domain_side: dict[str, Leaning | None] = {}
    lib: Counter[str] = Counter()
    con: Counter[str] = Counter()
    for r in corpus.records:
        if not r.urls:
            continue
        hit_lib = hit_con = False
        for url in r.urls:
            if allowed is not None and url not in allowed:
                continue
            side = domain_side.get(url, False)
            if side is False:
                side = outlets.side_of(registrable_domain(url_cache.resolve(url)))
                domain_side[url] = side
            if side is Leaning.LIBERAL:
                hit_lib = True
            elif side is Leaning.CONSERVATIVE:
                hit_con = True
        if hit_lib:
            lib[r.author_id] += 1
        if hit_con:
            con[r.author_id] += 1
    seeds: SeedLabels = {}
    for acc in sorted(lib.keys() | con.keys()):
        nl, nc = lib[acc], con[acc]
        if nl == nc:
            continue
        seeds[acc] = SeedLabel(Leaning.LIBERAL if nl > nc else Leaning.CONSERVATIVE, nl, nc)
    return seeds


def write_seeds(seeds: Mapping[str, SeedLabel], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "leaning", "n_liberal", "n_conservative"])
        for acc, s in seeds.items():
            w.writerow([acc, s.leaning.value, s.n_liberal, s.n_conservative])


def read_seeds(path: str | Path) -> SeedLabels:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return {
                row["account_id"]: SeedLabel(Leaning(row["leaning"]), int(row["n_liberal"]), int(row["n_conservative"]))
                for row in csv.DictReader(fh)
            }
    except (OSError, KeyError, ValueError) as e:
        raise InputError(f"cannot read seeds file {path}: {e}") from e


# ---------------------------------------------------------------------------
# propagation

_CODE = {Leaning.UNLABELED: 0, Leaning.LIBERAL: 1, Leaning.CONSERVATIVE: 2}
_LEANING = {v: k for k, v in _CODE.items()}


@dataclass
class LeaningMap:
    leanings: dict[str, Leaning]
    provenance: dict[str, Provenance]
    iterations: int = 0
    converged: bool = True

    def __getitem__(self, acc: str) -> Leaning:
        return self.leanings.get(acc, Leaning.UNLABELED)

    def counts(self) -> dict[Leaning, int]:
        return dict(Counter(self.leanings.values()))


def propagate(
    graph: RetweetGraph,
    seeds: Mapping[str, SeedLabel | Leaning],
    max_iters: int = 100,
    rng_seed: int = 42,
) -> LeaningMap:
    """Clamped asynchronous label propagation.

    Each pass visits unseeded nodes in a freshly shuffled order; a node takes the
    leaning with the larger summed edge weight among its labelled neighbours. On a
    tie the node keeps its current leaning if it has one, otherwise it copies a
    labelled neighbour picked at random. Stops after a pass with no change.
    """
    if not seeds:
        raise ValueError("propagation needs at least one seed")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    seed_lean = {a: (s.leaning if isinstance(s, SeedLabel) else Leaning(s)) for a, s in seeds.items()}
    bad = [a for a, lean in seed_lean.items() if lean is Leaning.UNLABELED]
    if bad:
        raise ValueError(f"seed accounts without a leaning: {bad[:5]}")

    indptr, indices, weights = graph.undirected_csr()
    n = graph.n
    ptr = indptr.tolist()
    adj = indices.tolist()
    wts = weights.tolist()
    label = [0] * n
    clamped = [False] * n
    index = graph.index
    for acc, lean in seed_lean.items():
        i = index.get(acc)
        if i is not None:
            label[i] = _CODE[lean]
            clamped[i] = True
    order = [v for v in range(n) if not clamped[v] and ptr[v + 1] > ptr[v]]
    rng = random.Random(rng_seed)
    iterations = 0
    converged = False
    while iterations < max_iters:
        iterations += 1
        rng.shuffle(order)
        changed = 0
        for v in order:
            lib = con = 0
            lo, hi = ptr[v], ptr[v + 1]
            for j in range(lo, hi):
                c = label[adj[j]]
                if c == 1:
                    lib += wts[j]
                elif c == 2:
                    con += wts[j]
            if lib > con:
                new = 1
            elif con > lib:
                new = 2
            elif lib == 0:
                continue
            elif label[v]:
                continue
            else:
                new = label[adj[rng.choice([j for j in range(lo, hi) if label[adj[j]]])]]
            if new != label[v]:
                label[v] = new
                changed += 1
        if not changed:
            converged = True
            break

    leanings: dict[str, Leaning] = {}
    provenance: dict[str, Provenance] = {}
    for i, acc in enumerate(graph.nodes):
        leanings[acc] = _LEANING[label[i]]
        if clamped[i]:
            provenance[acc] = Provenance.SEED
        elif label[i]:
            provenance[acc] = Provenance.PROPAGATED
        else:
            provenance[acc] = Provenance.UNLABELED
    for acc, lean in seed_lean.items():
        if acc not in index:
            leanings[acc] = lean
            provenance[acc] = Provenance.SEED
    if not converged:
        log.info("label propagation stopped at max_iters=%d before converging", max_iters)
    return LeaningMap(leanings, provenance, iterations, converged)


def write_leanings(lmap: LeaningMap, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "leaning", "provenance"])
        for acc, lean in lmap.leanings.items():
            w.writerow([acc, lean.value, lmap.provenance[acc].value])


def read_leanings(path: str | Path) -> dict[str, Leaning]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return {row["account_id"]: Leaning(row["leaning"]) for row in csv.DictReader(fh)}
    except (OSError, KeyError, ValueError) as e:
        raise InputError(f"cannot read leanings file {path}: {e}") from e


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class FoldScore:
    precision: float  # macro over the two leanings
    recall: float
    micro_precision: float
    micro_recall: float
    n_test: int
    n_unlabeled: int  # held-out seeds propagation could not reach


@dataclass(frozen=True)
class PRReport:
    folds: tuple[FoldScore, ...]

    @property
    def n_folds(self) -> int:
        return len(self.folds)

    def _mean(self, attr: str) -> float:
        return sum(getattr(f, attr) for f in self.folds) / len(self.folds)

    @property
    def precision(self) -> float:
        return self._mean("precision")

    @property
    def recall(self) -> float:
        return self._mean("recall")

    @property
    def micro_precision(self) -> float:
        return self._mean("micro_precision")

    @property
    def micro_recall(self) -> float:
        return self._mean("micro_recall")


def crossvalidate(
    graph: RetweetGraph,
    seeds: Mapping[str, SeedLabel | Leaning],
    folds: int = 5,
    rng_seed: int = 42,
    max_iters: int = 100,
) -> PRReport:
    """Stratified k-fold check of propagation: clamp the training seeds, score the held-out ones.

    Held-out seeds left Unlabeled count against recall but not precision.
    """
    from sklearn.metrics import precision_recall_fscore_support
    from sklearn.model_selection import StratifiedKFold

    lean = {a: (s.leaning if isinstance(s, SeedLabel) else Leaning(s)) for a, s in seeds.items()}
    accounts = sorted(lean)
    y = [lean[a].value for a in accounts]
    per_class = Counter(y)
    for cls in (Leaning.LIBERAL, Leaning.CONSERVATIVE):
        if per_class.get(cls.value, 0) < folds:
            raise ValueError(
                f"{cls.value} has {per_class.get(cls.value, 0)} seeds, fewer than the {folds} folds requested"
            )
    labels = [Leaning.LIBERAL.value, Leaning.CONSERVATIVE.value]
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=rng_seed)
    scores = []
    for train_idx, test_idx in splitter.split(accounts, y):
        train = {accounts[i]: lean[accounts[i]] for i in train_idx}
        lmap = propagate(graph, train, max_iters=max_iters, rng_seed=rng_seed)
        truth = [y[i] for i in test_idx]
        pred = [lmap[accounts[i]].value for i in test_idx]
        p, r, _, _ = precision_recall_fscore_support(truth, pred, labels=labels, average="macro", zero_division=0)
        mp, mr, _, _ = precision_recall_fscore_support(truth, pred, labels=labels, average="micro", zero_division=0)
        scores.append(
            FoldScore(
                float(p),
                float(r),
                float(mp),
                float(mr),
                len(test_idx),
                sum(1 for x in pred if x == Leaning.UNLABELED.value),
            )
        )
    return PRReport(tuple(scores))
