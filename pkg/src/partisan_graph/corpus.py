"""Tweet corpus ingestion: parsing, filtering, deduplication and indexing.

Input is line-delimited JSON, one tweet per line::

    {"id": "1", "author_id": "u1", "kind": "retweet", "ref_tweet_id": "0",
     "ref_author_id": "u0", "lang": "en", "text": "...", "hashtags": ["MAGA"],
     "urls": ["https://bit.ly/x"], "created_at": "2018-10-06T12:00:00Z"}

Files ending in ``.gz`` are transparently (de)compressed.
"""

from __future__ import annotations

import enum
import gzip
import io
import json
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .errors import InputError

log = logging.getLogger(__name__)


class Kind(str, enum.Enum):
    ORIGINAL = "original"
    RETWEET = "retweet"
    REPLY = "reply"


# quote tweets have no category of their own
_KIND_ALIASES = {
    "original": Kind.ORIGINAL,
    "tweet": Kind.ORIGINAL,
    "quote": Kind.ORIGINAL,
    "retweet": Kind.RETWEET,
    "reply": Kind.REPLY,
}


@dataclass(frozen=True, slots=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    kind: Kind
    referenced_tweet_id: str | None
    referenced_author_id: str | None
    language: str
    text: str
    hashtags: tuple[str, ...]
    urls: tuple[str, ...]
    created_at: datetime

    def to_json(self) -> dict:
        return {
            "id": self.tweet_id,
            "author_id": self.author_id,
            "kind": self.kind.value,
            "ref_tweet_id": self.referenced_tweet_id,
            "ref_author_id": self.referenced_author_id,
            "lang": self.language,
            "text": self.text,
            "hashtags": list(self.hashtags),
            "urls": list(self.urls),
            "created_at": format_timestamp(self.created_at),
        }


@dataclass(frozen=True)
class FilterConfig:
    keep_languages: frozenset[str] = frozenset({"en"})
    exclusion_terms: frozenset[str] = frozenset()
    dedup: bool = True

    def __post_init__(self):
        if not self.keep_languages:
            raise ValueError("keep_languages must not be empty")
        if not isinstance(self.keep_languages, _AnyLanguage):
            object.__setattr__(self, "keep_languages", frozenset(l.lower() for l in self.keep_languages))
        object.__setattr__(
            self, "exclusion_terms", frozenset(t.strip().lower() for t in self.exclusion_terms if t.strip())
        )


@dataclass
class IngestReport:
    read: int = 0
    kept: int = 0
    duplicate: int = 0
    language: int = 0
    excluded: int = 0
    malformed: Counter = field(default_factory=Counter)

    def rows(self) -> list[tuple[str, int]]:
        out = [
            ("read", self.read),
            ("kept", self.kept),
            ("dropped_duplicate", self.duplicate),
            ("dropped_language", self.language),
            ("dropped_exclusion", self.excluded),
            ("dropped_malformed", sum(self.malformed.values())),
        ]
        out += [(f"malformed_{reason}", n) for reason, n in sorted(self.malformed.items())]
        return out

    def to_text(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.rows())


@dataclass(frozen=True)
class CorpusStats:
    n_tweets: int
    n_retweets: int
    n_replies: int
    n_users: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_tweets, self.n_retweets, self.n_replies, self.n_users)


class Corpus:
    """Immutable collection of tweets with author and kind indices."""

    def __init__(self, records: Iterable[TweetRecord]):
        self.records: tuple[TweetRecord, ...] = tuple(records)
        by_author: dict[str, list[str]] = {}
        by_kind: dict[Kind, list[str]] = {k: [] for k in Kind}
        for r in self.records:
            lst = by_author.get(r.author_id)
            if lst is None:
                by_author[r.author_id] = [r.tweet_id]
            else:
                lst.append(r.tweet_id)
            by_kind[r.kind].append(r.tweet_id)
        self.by_author = {a: tuple(ids) for a, ids in by_author.items()}
        self.by_kind = {k: tuple(ids) for k, ids in by_kind.items()}

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.records)

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self.records == other.records

    __hash__ = None

    def users(self) -> list[str]:
        """All accounts, authors first in order of appearance, then target-only accounts."""
        seen = dict.fromkeys(r.author_id for r in self.records)
        for r in self.records:
            if r.referenced_author_id is not None and r.referenced_author_id not in seen:
                seen[r.referenced_author_id] = None
        return list(seen)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(value: str) -> datetime:
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


class MalformedRecord(ValueError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _opt_id(value, intern: bool = False) -> str | None:
    if value is None or value == "":
        return None
    return sys.intern(str(value)) if intern else str(value)


def parse_record(obj: dict) -> TweetRecord:
    """Validate one decoded JSON object and build a :class:`TweetRecord`."""
    if not isinstance(obj, dict):
        raise MalformedRecord("not_an_object")
    try:
        tweet_id = obj["id"]
        author_id = obj["author_id"]
        kind_raw = obj["kind"]
        lang = obj["lang"]
        created = obj["created_at"]
    except KeyError as e:
        raise MalformedRecord(f"missing_{e.args[0]}") from None
    if tweet_id in (None, "") or author_id in (None, ""):
        raise MalformedRecord("empty_id")
    kind = _KIND_ALIASES.get(str(kind_raw).lower())
    if kind is None:
        raise MalformedRecord("bad_kind")
    ref_tweet = _opt_id(obj.get("ref_tweet_id"))
    ref_author = _opt_id(obj.get("ref_author_id"), intern=True)
    if kind is Kind.RETWEET and (ref_tweet is None or ref_author is None):
        raise MalformedRecord("retweet_without_reference")
    if kind is Kind.REPLY and ref_author is None:
        raise MalformedRecord("reply_without_reference")
    if kind is Kind.ORIGINAL:
        ref_tweet = ref_author = None
    try:
        ts = parse_timestamp(str(created))
    except ValueError:
        raise MalformedRecord("bad_timestamp") from None
    tags = obj.get("hashtags") or ()
    urls = obj.get("urls") or ()
    if not isinstance(tags, list | tuple) or not isinstance(urls, list | tuple):
        raise MalformedRecord("bad_list_field")
    text = obj.get("text") or ""
    return TweetRecord(
        tweet_id=str(tweet_id),
        author_id=sys.intern(str(author_id)),
        kind=kind,
        referenced_tweet_id=ref_tweet,
        referenced_author_id=ref_author,
        language=sys.intern(str(lang).lower()),
        text=str(text),
        hashtags=tuple(sys.intern(str(h).lstrip("#").lower()) for h in tags),
        urls=tuple(str(u) for u in urls),
        created_at=ts,
    )


def _open_text(path: Path, mode: str = "rt") -> TextIO:
    if path.suffix == ".gz":
        return gzip.open(path, mode, encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def iter_lines(paths: Iterable[str | Path]) -> Iterator[str]:
    """Yield raw lines from each file in order. Unreadable files raise InputError."""
    for p in paths:
        p = Path(p)
        try:
            fh = _open_text(p)
        except OSError as e:
            raise InputError(f"cannot read corpus file {p}: {e}") from e
        with fh:
            try:
                yield from fh
            except (OSError, UnicodeDecodeError, EOFError) as e:
                raise InputError(f"cannot read corpus file {p}: {e}") from e


def _is_excluded(rec: TweetRecord, terms: frozenset[str], tag_terms: frozenset[str]) -> bool:
    if not terms:
        return False
    for tag in rec.hashtags:
        if tag in tag_terms:
            return True
    text = rec.text.lower()
    return any(t in text for t in terms)


def ingest(lines: Iterable[str | dict], config: FilterConfig | None = None) -> tuple[Corpus, IngestReport]:
    """Parse, dedup (first occurrence wins), language-filter and exclusion-filter a record stream.

    ``lines`` may hold raw JSON strings or already-decoded dicts. Blank lines are skipped silently.
    """
    config = config or FilterConfig()
    report = IngestReport()
    seen: set[str] = set()
    kept: list[TweetRecord] = []
    langs = config.keep_languages
    terms = config.exclusion_terms
    tag_terms = frozenset(t.lstrip("#") for t in terms)
    loads = json.loads
    for line in lines:
        if isinstance(line, str):
            if not line.strip():
                continue
            report.read += 1
            try:
                obj = loads(line)
            except ValueError:
                report.malformed["bad_json"] += 1
                continue
        else:
            report.read += 1
            obj = line
        try:
            rec = parse_record(obj)
        except MalformedRecord as e:
            report.malformed[e.reason] += 1
            continue
        if config.dedup:
            if rec.tweet_id in seen:
                report.duplicate += 1
                continue
            seen.add(rec.tweet_id)
        if rec.language not in langs:
            report.language += 1
            continue
        if _is_excluded(rec, terms, tag_terms):
            report.excluded += 1
            continue
        kept.append(rec)
    report.kept = len(kept)
    if report.malformed:
        log.warning("skipped %d malformed records", sum(report.malformed.values()))
    return Corpus(kept), report


def ingest_files(paths: Iterable[str | Path], config: FilterConfig | None = None) -> tuple[Corpus, IngestReport]:
    return ingest(iter_lines(paths), config)


def stats(corpus: Corpus) -> CorpusStats:
    return CorpusStats(
        n_tweets=len(corpus.by_kind[Kind.ORIGINAL]),
        n_retweets=len(corpus.by_kind[Kind.RETWEET]),
        n_replies=len(corpus.by_kind[Kind.REPLY]),
        n_users=len(corpus.users()),
    )


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _open_text(path, "wt") as fh:
        write_records(corpus.records, fh)


def write_records(records: Iterable[TweetRecord], fh: io.TextIOBase) -> None:
    dumps = json.dumps
    for r in records:
        fh.write(dumps(r.to_json(), ensure_ascii=False, separators=(",", ":")))
        fh.write("\n")


def load_corpus(path: str | Path) -> Corpus:
    """Read a corpus written by :func:`write_corpus` (no filtering besides validation)."""
    corpus, _ = ingest(iter_lines([path]), FilterConfig(keep_languages=_AnyLanguage(), dedup=True))
    return corpus


def read_terms(path: str | Path | None) -> frozenset[str]:
    """One term per line; blank lines and ``#``-prefixed comment lines with a space are ignored."""
    if path is None:
        return frozenset()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read term file {path}: {e}") from e
    terms = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if not line or line.startswith("# "):
            continue
        terms.add(line)
    return frozenset(terms)


class _AnyLanguage(frozenset):
    """Language set that accepts every tag; used when re-reading an already-filtered corpus."""

    def __new__(cls):
        return super().__new__(cls, {"*"})

    def __contains__(self, item) -> bool:
        return True
