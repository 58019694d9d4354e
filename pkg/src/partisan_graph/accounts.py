"""Bot-score tables and the threshold rule separating bots from humans."""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InputError

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.3


class AccountClass(str, enum.Enum):
    HUMAN = "human"
    BOT = "bot"
    UNKNOWN = "unknown"


class MissingReason(str, enum.Enum):
    SUSPENDED = "Suspended"
    PROTECTED = "Protected"
    NOT_QUERIED = "NotQueried"


@dataclass
class BotScoreTable:
    scores: dict[str, float] = field(default_factory=dict)
    missing: dict[str, MissingReason] = field(default_factory=dict)

    def __post_init__(self):
        overlap = self.scores.keys() & self.missing.keys()
        if overlap:
            raise ValueError(f"accounts both scored and missing: {sorted(overlap)[:5]}")
        for acc, s in self.scores.items():
            if not 0.0 <= s <= 1.0:
                raise ValueError(f"score for {acc} outside [0,1]: {s}")

    def __len__(self) -> int:
        return len(self.scores) + len(self.missing)


def _parse_reason(raw: str) -> MissingReason:
    key = raw.strip().replace("_", "").replace(" ", "").lower()
    for r in MissingReason:
        if r.value.lower() == key:
            return r
    raise ValueError(f"unknown missing reason {raw!r}")


def parse_scores(rows: Iterable[list[str]]) -> BotScoreTable:
    """Build a table from CSV rows ``account_id,score[,missing_reason]``.

    A score cell of ``MISSING`` (or empty) marks the account as unscored. Out-of-range
    scores and unparseable rows are dropped with a warning; later rows win over earlier ones.
    """
    scores: dict[str, float] = {}
    missing: dict[str, MissingReason] = {}
    for lineno, row in enumerate(rows, 1):
        if not row or not "".join(row).strip():
            continue
        acc = row[0].strip()
        if lineno == 1 and acc.lower() == "account_id":
            continue
        raw = row[1].strip() if len(row) > 1 else ""
        if acc in scores or acc in missing:
            log.warning("duplicate account %s on line %d; keeping the last row", acc, lineno)
            scores.pop(acc, None)
            missing.pop(acc, None)
        if raw == "" or raw.upper() == "MISSING":
            reason_raw = row[2] if len(row) > 2 and row[2].strip() else "NotQueried"
            try:
                missing[acc] = _parse_reason(reason_raw)
            except ValueError as e:
                log.warning("line %d rejected: %s", lineno, e)
            continue
        try:
            score = float(raw)
        except ValueError:
            log.warning("line %d rejected: score %r is not a number", lineno, raw)
            continue
        if not (0.0 <= score <= 1.0) or math.isnan(score):
            log.warning("line %d rejected: score %s outside [0,1]", lineno, raw)
            continue
        scores[acc] = score
    return BotScoreTable(scores, missing)


def load_scores(path: str | Path) -> BotScoreTable:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return parse_scores(csv.reader(fh))
    except OSError as e:
        raise InputError(f"cannot read score file {path}: {e}") from e


def write_scores(table: BotScoreTable, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "score", "missing_reason"])
        for acc, s in table.scores.items():
            w.writerow([acc, repr(s), ""])
        for acc, r in table.missing.items():
            w.writerow([acc, "MISSING", r.value])


def classify(
    table: BotScoreTable, threshold: float = DEFAULT_THRESHOLD, account_ids: Iterable[str] | None = None
) -> dict[str, AccountClass]:
    """Bot if score is strictly above ``threshold``, Human otherwise, Unknown without a score."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0,1], got {threshold}")
    if account_ids is None:
        account_ids = list(table.scores) + list(table.missing)
    out = {}
    scores = table.scores
    for acc in account_ids:
        s = scores.get(acc)
        if s is None:
            out[acc] = AccountClass.UNKNOWN
        else:
            out[acc] = AccountClass.BOT if s > threshold else AccountClass.HUMAN
    return out


def class_counts(classes: Mapping[str, AccountClass]) -> dict[AccountClass, int]:
    counts = {c: 0 for c in AccountClass}
    for c in classes.values():
        counts[c] += 1
    return counts


def score_histogram(table: BotScoreTable, width: float = 0.05) -> list[tuple[float, float, int]]:
    """Counts of scores per bin ``[lo, hi)``; the last bin is closed at 1."""
    n_bins = round(1.0 / width)
    counts = [0] * n_bins
    for s in table.scores.values():
        # small epsilon keeps values sitting on an edge (0.15, 0.3, ...) in the upper bin
        i = min(int(math.floor(s * n_bins + 1e-9)), n_bins - 1)
        counts[i] += 1
    return [(round(i * width, 10), round((i + 1) * width, 10), counts[i]) for i in range(n_bins)]


def write_classes(classes: Mapping[str, AccountClass], table: BotScoreTable, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "score", "class", "missing_reason"])
        for acc, c in classes.items():
            s = table.scores.get(acc)
            reason = table.missing.get(acc)
            w.writerow([acc, "" if s is None else repr(s), c.value, "" if reason is None else reason.value])


def read_classes(path: str | Path) -> dict[str, AccountClass]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return {row["account_id"]: AccountClass(row["class"]) for row in csv.DictReader(fh)}
    except (OSError, KeyError, ValueError) as e:
        raise InputError(f"cannot read classes file {path}: {e}") from e
