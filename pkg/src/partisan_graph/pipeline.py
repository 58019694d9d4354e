"""End-to-end run: every report table written to one directory plus a hashed manifest."""

from __future__ import annotations

import contextlib
import csv
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator

from . import accounts, corpus, graph, hashtags, ideology, metrics
from .errors import InputError, StageError
from .graph import GROUPS, Group
from .ideology import Leaning

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    corpus: list[str]
    scores: str
    liberal_outlets: str
    conservative_outlets: str
    url_cache: str | None = None
    exclude_file: str | None = None
    hashtag_exclude_file: str | None = None
    languages: list[str] = field(default_factory=lambda: ["en"])
    threshold: float = accounts.DEFAULT_THRESHOLD
    max_iters: int = 100
    k_max: int = 30
    top_urls: int | None = 5000
    folds: int = 5
    hashtag_k: int = 20
    human_k: int = 50
    min_export_weight: int = 1
    rng_seed: int = 42

    def __post_init__(self):
        if isinstance(self.corpus, str):
            self.corpus = [self.corpus]
        if not 0.0 <= self.threshold <= 1.0:
            raise InputError(f"threshold must lie in [0,1], got {self.threshold}")
        if self.max_iters < 1 or self.k_max < 0 or self.folds < 2:
            raise InputError("max_iters >= 1, k_max >= 0 and folds >= 2 are required")
        if self.top_urls is not None and self.top_urls < 0:
            raise InputError("top_urls must be >= 0")
        if not self.languages:
            raise InputError("languages must not be empty")

    @classmethod
    def load(cls, path: str | Path) -> PipelineConfig:
        """Read a JSON config; relative paths are taken relative to the config file."""
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise InputError(f"cannot read config {path}: {e}") from e
        base = path.parent
        for key in ("scores", "liberal_outlets", "conservative_outlets", "url_cache", "exclude_file",
                    "hashtag_exclude_file"):
            if raw.get(key):
                raw[key] = str(base / raw[key])
        if "corpus" in raw:
            items = raw["corpus"] if isinstance(raw["corpus"], list) else [raw["corpus"]]
            raw["corpus"] = [str(base / p) for p in items]
        try:
            return cls(**raw)
        except TypeError as e:
            raise InputError(f"bad config {path}: {e}") from e

    def check_files(self) -> None:
        paths = [*self.corpus, self.scores, self.liberal_outlets, self.conservative_outlets,
                 self.url_cache, self.exclude_file, self.hashtag_exclude_file]
        missing = [p for p in paths if p is not None and not Path(p).is_file()]
        if missing:
            raise InputError(f"missing input files: {missing}")


def stage_seed(root: int, stage: str) -> int:
    """Per-stage seed: first 4 bytes of sha256("<root>:<stage>") as a big-endian integer."""
    return int.from_bytes(hashlib.sha256(f"{root}:{stage}".encode()).digest()[:4], "big")


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "undefined"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


@dataclass
class RunResult:
    out_dir: Path
    files: list[Path]
    manifest: dict
    data: dict = field(default_factory=dict)


class _Run:
    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.files: list[Path] = []
        self.stages: list[str] = []

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.files.append(p)
        return p

    def table(self, name: str, header: list[str], rows) -> Path:
        p = self.path(name)
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
        return p

    @contextlib.contextmanager
    def stage(self, name: str) -> Iterator[None]:
        log.info("stage %s", name)
        try:
            yield
        except (StageError, InputError):
            raise
        except Exception as e:
            self.write_manifest(failed=name)
            raise StageError(name, e) from e
        self.stages.append(name)

    def write_manifest(self, config: PipelineConfig | None = None, failed: str | None = None) -> dict:
        entries = []
        for p in self.files:
            if p.exists():
                data = p.read_bytes()
                entries.append({"path": p.name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
        manifest = {"stages": self.stages, "files": entries}
        if failed:
            manifest["failed_stage"] = failed
        if config is not None:
            manifest["parameters"] = {
                k: v for k, v in asdict(config).items()
                if k not in ("corpus", "scores", "liberal_outlets", "conservative_outlets", "url_cache",
                             "exclude_file", "hashtag_exclude_file")
            }
        (self.out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return manifest


def run_all(config: PipelineConfig, out_dir: str | Path) -> RunResult:
    config.check_files()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run = _Run(out_dir)
    data: dict = {}

    with run.stage("ingest"):
        fconf = corpus.FilterConfig(
            keep_languages=frozenset(config.languages), exclusion_terms=corpus.read_terms(config.exclude_file)
        )
        corp, report = corpus.ingest_files(config.corpus, fconf)
        run.table("01_ingest_report.csv", ["item", "count"], report.rows())
        st = corpus.stats(corp)
        run.table(
            "02_dataset_stats.csv",
            ["statistic", "count"],
            [("tweets", st.n_tweets), ("retweets", st.n_retweets), ("replies", st.n_replies), ("users", st.n_users)],
        )
        users = corp.users()
        data.update(corpus=corp, ingest_report=report, stats=st)

    with run.stage("classify"):
        table = accounts.load_scores(config.scores)
        classes = accounts.classify(table, config.threshold, users)
        accounts.write_classes(classes, table, run.path("03_classes.csv"))
        run.table("04_score_histogram.csv", ["bin_low", "bin_high", "count"], accounts.score_histogram(table))
        data.update(scores=table, classes=classes)

    with run.stage("graph"):
        g = graph.build(corp)
        data["graph"] = g

    with run.stage("ideology"):
        outlets = ideology.MediaOutletLists.load(config.liberal_outlets, config.conservative_outlets)
        cache = ideology.UrlResolutionCache.load(config.url_cache)
        top = None
        if config.top_urls is not None:
            top = [u for u, _ in ideology.rank_urls(corp, config.top_urls)]
        seeds = ideology.seed_label(corp, cache, outlets, restrict_to=top)
        ideology.write_seeds(seeds, run.path("05_seeds.csv"))
        if seeds:
            lmap = ideology.propagate(g, seeds, config.max_iters, stage_seed(config.rng_seed, "propagate"))
        else:
            log.warning("no seed accounts; every account stays Unlabeled")
            lmap = ideology.LeaningMap(
                {a: Leaning.UNLABELED for a in users}, {a: ideology.Provenance.UNLABELED for a in users}, 0, True
            )
        ideology.write_leanings(lmap, run.path("06_leanings.csv"))
        cv_rows = []
        try:
            cv = ideology.crossvalidate(
                g, seeds, config.folds, stage_seed(config.rng_seed, "crossvalidate"), config.max_iters
            )
        except ValueError as e:
            log.warning("cross-validation skipped: %s", e)
            cv = None
            cv_rows.append(("skipped", None, None, None, None, None, None))
        else:
            for i, f in enumerate(cv.folds, 1):
                cv_rows.append((i, f.precision, f.recall, f.micro_precision, f.micro_recall, f.n_test, f.n_unlabeled))
            cv_rows.append(("mean", cv.precision, cv.recall, cv.micro_precision, cv.micro_recall,
                            sum(f.n_test for f in cv.folds), sum(f.n_unlabeled for f in cv.folds)))
        run.table(
            "07_crossvalidation.csv",
            ["fold", "precision_macro", "recall_macro", "precision_micro", "recall_micro", "n_test", "n_unlabeled"],
            cv_rows,
        )
        data.update(seeds=seeds, leanings=lmap, cv=cv)

    with run.stage("groups"):
        groups = graph.assign_groups(classes, lmap.leanings, users)
        graph.write_groups(groups, run.path("08_groups.csv"))
        sizes = graph.group_sizes(groups)
        n_users = len(users)
        pct = (lambda x: x / n_users) if n_users else (lambda x: None)
        run.table(
            "09_users_per_group.csv",
            ["group", "users", "fraction_of_users"],
            [(grp.value, sizes[grp], pct(sizes[grp])) for grp in (*GROUPS, Group.RESIDUAL)],
        )
        rec = graph.records_per_group(corp, groups)
        tpu = graph.tweets_per_user(corp, groups)
        n_rec = len(corp)
        run.table(
            "10_tweets_per_group.csv",
            ["group", "records", "fraction_of_records", "tweets_per_user"],
            [
                (grp.value, rec[grp], rec[grp] / n_rec if n_rec else None, tpu.get(grp))
                for grp in (*GROUPS, Group.RESIDUAL)
            ],
        )
        data.update(groups=groups)

    with run.stage("centrality"):
        if g.n >= 2:
            cent = graph.degree_centrality(g, groups)
            rows = [(grp.value, *cent.group_means[grp]) for grp in (*GROUPS, Group.RESIDUAL)]
        else:
            cent = None
            rows = [(grp.value, None, None, 0) for grp in (*GROUPS, Group.RESIDUAL)]
        run.table("11_centrality.csv", ["group", "out_centrality", "in_centrality", "members"], rows)
        data["centrality"] = cent

    with run.stage("kcore"):
        cores = graph.core_numbers(g)
        series = graph.core_series(cores, groups, config.k_max)
        run.table(
            "12_core_series.csv",
            ["k", "members", *(grp.value for grp in GROUPS), "Residual"],
            [(r.k, r.members, *(r.fractions[grp] for grp in GROUPS), r.residual_fraction) for r in series],
        )
        data.update(cores=cores, core_series=series)

    with run.stage("interactions"):
        im = graph.interaction_matrix(g, groups)
        names = [grp.value for grp in GROUPS]
        for fname, mat in (("13_interactions_counts.csv", im.counts), ("14_interactions_overall.csv", im.overall),
                           ("15_interactions_row.csv", im.row)):
            run.table(fname, ["source", *names], [(names[i], *mat[i].tolist()) for i in range(len(names))])
        data["interactions"] = im

    with run.stage("hashtags"):
        excl = (
            corpus.read_terms(config.hashtag_exclude_file)
            if config.hashtag_exclude_file
            else hashtags.DEFAULT_EXCLUSIONS
        )
        reps = {}
        for grp in GROUPS:
            rep = hashtags.hashtag_report(corp, groups, grp, config.hashtag_k, config.human_k, excl)
            hashtags.write_report(rep, run.path(f"16_hashtags_{grp.value}.csv"))
            reps[grp] = rep
        data["hashtags"] = reps

    with run.stage("effectiveness"):
        effs = [metrics.effectiveness(corp, groups, side) for side in (Leaning.LIBERAL, Leaning.CONSERVATIVE)]
        metrics.write_reports(effs, run.path("17_effectiveness.csv"))
        data["effectiveness"] = effs

    with run.stage("export"):
        graph.write_edge_list(g, run.path("18_retweet_graph.tsv"), config.min_export_weight)
        graph.write_gexf(g, run.path("19_retweet_graph.gexf"), groups, cores, cent, config.min_export_weight)

    manifest = run.write_manifest(config)
    return RunResult(out_dir, run.files, manifest, data)
