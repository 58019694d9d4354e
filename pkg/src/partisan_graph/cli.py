"""``partisan-graph`` command line.

Exit codes: 0 success, 1 input error, 2 stage failure. Set ``PARTISAN_GRAPH_LOG``
(e.g. ``DEBUG``) to change log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import accounts, corpus, graph, hashtags, ideology, metrics, pipeline, scenario
from .errors import InputError, StageError
from .graph import GROUPS, Group
from .ideology import Leaning

log = logging.getLogger("partisan_graph")

_GROUP_ALIASES = {
    "liberal-humans": Group.LIBERAL_HUMAN,
    "conservative-humans": Group.CONSERVATIVE_HUMAN,
    "liberal-bots": Group.LIBERAL_BOT,
    "conservative-bots": Group.CONSERVATIVE_BOT,
    **{g.value.lower(): g for g in GROUPS},
}


def _group(value: str) -> Group:
    try:
        return _GROUP_ALIASES[value.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown group {value!r}; choose from {sorted(_GROUP_ALIASES)}") from None


def _side(value: str) -> Leaning:
    v = value.lower()
    if v == "liberal":
        return Leaning.LIBERAL
    if v == "conservative":
        return Leaning.CONSERVATIVE
    raise argparse.ArgumentTypeError("side must be liberal or conservative")


def _load_corpus(path: str) -> corpus.Corpus:
    if not Path(path).is_file():
        raise InputError(f"corpus file not found: {path}")
    return corpus.load_corpus(path)


def _write_rows(path: str | None, header: list[str], rows) -> None:
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([pipeline.fmt(v) for v in row])
    finally:
        if path:
            fh.close()


# ---------------------------------------------------------------------------
# handlers


def cmd_ingest(args) -> None:
    conf = corpus.FilterConfig(
        keep_languages=frozenset(args.langs), exclusion_terms=corpus.read_terms(args.exclude_file)
    )
    corp, report = corpus.ingest_files(args.inputs, conf)
    corpus.write_corpus(corp, args.out)
    text = report.to_text()
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_stats(args) -> None:
    st = corpus.stats(_load_corpus(args.corpus))
    _write_rows(args.out, ["statistic", "count"], zip(("tweets", "retweets", "replies", "users"), st.as_tuple()))


def cmd_classify(args) -> None:
    table = accounts.load_scores(args.scores)
    ids = _load_corpus(args.corpus).users() if args.corpus else None
    classes = accounts.classify(table, args.threshold, ids)
    accounts.write_classes(classes, table, args.out)
    if args.histogram:
        _write_rows(args.histogram, ["bin_low", "bin_high", "count"], accounts.score_histogram(table))
    counts = accounts.class_counts(classes)
    for c, n in counts.items():
        print(f"{c.value}: {n}")


def cmd_rank_urls(args) -> None:
    _write_rows(args.out, ["url", "count"], ideology.rank_urls(_load_corpus(args.corpus), args.top))


def cmd_resolve(args) -> None:
    corp = _load_corpus(args.corpus)
    cache = ideology.UrlResolutionCache.load(args.cache if Path(args.cache).exists() else None)
    resolver = ideology.http_resolver() if args.live else None
    n = ideology.expand_urls((u for u, _ in ideology.rank_urls(corp, args.top)), cache, resolver)
    cache.save(args.cache)
    print(f"lookups: {n}, cached: {len(cache.expanded)}, unresolved: {len(cache.unresolved)}")


def cmd_seed(args) -> None:
    corp = _load_corpus(args.corpus)
    outlets = ideology.MediaOutletLists.load(args.liberal, args.conservative)
    cache = ideology.UrlResolutionCache.load(args.url_cache)
    top = [u for u, _ in ideology.rank_urls(corp, args.top)] if args.top is not None else None
    seeds = ideology.seed_label(corp, cache, outlets, restrict_to=top)
    ideology.write_seeds(seeds, args.out)
    lib = sum(1 for s in seeds.values() if s.leaning is Leaning.LIBERAL)
    print(f"seeds: {len(seeds)} (liberal {lib}, conservative {len(seeds) - lib})")


def cmd_propagate(args) -> None:
    g = graph.build(_load_corpus(args.corpus))
    lmap = ideology.propagate(g, ideology.read_seeds(args.seeds), args.max_iters, args.rng_seed)
    ideology.write_leanings(lmap, args.out)
    for lean, n in sorted(lmap.counts().items()):
        print(f"{lean.value}: {n}")
    print(f"iterations: {lmap.iterations} converged: {lmap.converged}")


def cmd_crossvalidate(args) -> None:
    g = graph.build(_load_corpus(args.corpus))
    rep = ideology.crossvalidate(g, ideology.read_seeds(args.seeds), args.folds, args.rng_seed, args.max_iters)
    rows = [
        (i, f.precision, f.recall, f.micro_precision, f.micro_recall, f.n_test, f.n_unlabeled)
        for i, f in enumerate(rep.folds, 1)
    ]
    rows.append(("mean", rep.precision, rep.recall, rep.micro_precision, rep.micro_recall, None, None))
    _write_rows(
        args.out,
        ["fold", "precision_macro", "recall_macro", "precision_micro", "recall_micro", "n_test", "n_unlabeled"],
        rows,
    )


def cmd_groups(args) -> None:
    classes = accounts.read_classes(args.classes)
    leanings = ideology.read_leanings(args.leanings)
    groups = graph.assign_groups(classes, leanings)
    graph.write_groups(groups, args.out)
    for g, n in graph.group_sizes(groups).items():
        print(f"{g.value}: {n}")


def _graph_and_groups(args):
    g = graph.build(_load_corpus(args.corpus))
    groups = graph.read_groups(args.groups) if getattr(args, "groups", None) else {}
    return g, groups


def cmd_graph_build(args) -> None:
    g = graph.build(_load_corpus(args.corpus))
    graph.write_edge_list(g, args.out, args.min_weight)
    print(f"nodes: {g.n} edges: {g.m} weight: {g.total_weight()}")


def cmd_graph_kcore(args) -> None:
    g, groups = _graph_and_groups(args)
    cores = graph.core_numbers(g)
    if args.series:
        series = graph.core_series(cores, groups, args.k_max)
        _write_rows(
            args.series,
            ["k", "members", *(grp.value for grp in GROUPS), "Residual"],
            [(r.k, r.members, *(r.fractions[grp] for grp in GROUPS), r.residual_fraction) for r in series],
        )
    _write_rows(args.out, ["account_id", "core_number"], zip(g.nodes, cores.numbers.tolist()))


def cmd_graph_centrality(args) -> None:
    g, groups = _graph_and_groups(args)
    cent = graph.degree_centrality(g, groups)
    if args.per_node:
        _write_rows(
            args.per_node,
            ["account_id", "in_centrality", "out_centrality"],
            zip(g.nodes, cent.in_centrality.tolist(), cent.out_centrality.tolist()),
        )
    _write_rows(
        args.out,
        ["group", "out_centrality", "in_centrality", "members"],
        [(grp.value, *cent.group_means[grp]) for grp in (*GROUPS, Group.RESIDUAL)],
    )


def cmd_graph_interactions(args) -> None:
    g, groups = _graph_and_groups(args)
    im = graph.interaction_matrix(g, groups)
    mat = {"counts": im.counts, "overall": im.overall, "row": im.row}[args.norm]
    names = [grp.value for grp in GROUPS]
    _write_rows(args.out, ["source", *names], [(names[i], *mat[i].tolist()) for i in range(len(names))])


def cmd_graph_export(args) -> None:
    g, groups = _graph_and_groups(args)
    if args.format == "tsv":
        graph.write_edge_list(g, args.out, args.min_weight)
    else:
        cores = graph.core_numbers(g)
        cent = graph.degree_centrality(g, groups) if g.n >= 2 else None
        graph.write_gexf(g, args.out, groups or None, cores, cent, args.min_weight)


def cmd_metrics(args) -> None:
    corp = _load_corpus(args.corpus)
    groups = graph.read_groups(args.groups)
    rep = metrics.effectiveness(corp, groups, args.side, both_sides=args.both_sides)
    metrics.write_reports([rep], args.out)
    for m in metrics.METRICS:
        r = getattr(rep, m)
        print(f"{m.upper()}: {r} ({r.numerator}/{r.denominator})")


def cmd_hashtags(args) -> None:
    corp = _load_corpus(args.corpus)
    groups = graph.read_groups(args.groups)
    excl = corpus.read_terms(args.exclude_file) if args.exclude_file else hashtags.DEFAULT_EXCLUSIONS
    rep = hashtags.hashtag_report(corp, groups, args.group, args.k, args.human_top, excl)
    if args.out:
        hashtags.write_report(rep, args.out)
    else:
        _write_rows(None, ["rank", "hashtag", "count", "flagged"],
                    [(i, t, c, int(t in rep.flags)) for i, (t, c) in enumerate(rep.ranked, 1)])


def cmd_run(args) -> None:
    conf = pipeline.PipelineConfig.load(args.config)
    res = pipeline.run_all(conf, args.out)
    print(f"wrote {len(res.files)} files and manifest.json to {res.out_dir}")


def cmd_generate(args) -> None:
    try:
        spec = scenario.ScenarioSpec.load(args.spec)
    except (OSError, ValueError, TypeError) as e:
        raise InputError(f"bad scenario spec {args.spec}: {e}") from e
    paths = scenario.generate_scenario(spec, args.out)
    for name, p in paths.items():
        print(f"{name}: {p}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="partisan-graph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="parse, filter and dedup a tweet corpus")
    s.add_argument("--in", dest="inputs", nargs="+", required=True)
    s.add_argument("--langs", nargs="+", default=["en"])
    s.add_argument("--exclude-file")
    s.add_argument("--out", required=True, help="cleaned corpus (JSONL, .gz for compressed)")
    s.add_argument("--report", help="also write the ingest report here")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("stats", help="dataset statistics")
    s.add_argument("--corpus", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("classify", help="threshold bot scores into bot/human/unknown")
    s.add_argument("--scores", required=True)
    s.add_argument("--threshold", type=float, default=accounts.DEFAULT_THRESHOLD)
    s.add_argument("--corpus", help="classify every account of this corpus (default: accounts in the score file)")
    s.add_argument("--out", required=True)
    s.add_argument("--histogram", help="write score histogram (0.05 bins) here")
    s.set_defaults(func=cmd_classify)

    ideo = sub.add_parser("ideology", help="political leaning inference").add_subparsers(dest="action", required=True)
    s = ideo.add_parser("rank-urls")
    s.add_argument("--corpus", required=True)
    s.add_argument("--top", type=int, default=5000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_rank_urls)
    s = ideo.add_parser("resolve", help="fill the URL cache for the top URLs")
    s.add_argument("--corpus", required=True)
    s.add_argument("--top", type=int, default=5000)
    s.add_argument("--cache", required=True)
    s.add_argument("--live", action="store_true", help="expand missing URLs over the network")
    s.set_defaults(func=cmd_resolve)
    s = ideo.add_parser("seed", help="polarity-rule seed labels")
    s.add_argument("--corpus", required=True)
    s.add_argument("--liberal", required=True)
    s.add_argument("--conservative", required=True)
    s.add_argument("--url-cache")
    s.add_argument("--top", type=int, default=5000, help="only the N most shared URLs count")
    s.add_argument("--all-urls", dest="top", action="store_const", const=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_seed)
    for name, func in (("propagate", cmd_propagate), ("crossvalidate", cmd_crossvalidate)):
        s = ideo.add_parser(name)
        s.add_argument("--corpus", required=True)
        s.add_argument("--seeds", required=True)
        s.add_argument("--max-iters", type=int, default=100)
        s.add_argument("--rng-seed", type=int, default=42)
        if name == "crossvalidate":
            s.add_argument("--folds", type=int, default=5)
            s.add_argument("--out")
        else:
            s.add_argument("--out", required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("groups", help="combine classes and leanings into groups")
    s.add_argument("--classes", required=True)
    s.add_argument("--leanings", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_groups)

    gr = sub.add_parser("graph", help="retweet network analytics").add_subparsers(dest="action", required=True)
    s = gr.add_parser("build")
    s.add_argument("--corpus", required=True)
    s.add_argument("--min-weight", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_graph_build)
    s = gr.add_parser("kcore")
    s.add_argument("--corpus", required=True)
    s.add_argument("--groups")
    s.add_argument("--k-max", type=int, default=30)
    s.add_argument("--series", help="write per-k group fractions here")
    s.add_argument("--out")
    s.set_defaults(func=cmd_graph_kcore)
    s = gr.add_parser("centrality")
    s.add_argument("--corpus", required=True)
    s.add_argument("--groups")
    s.add_argument("--per-node")
    s.add_argument("--out")
    s.set_defaults(func=cmd_graph_centrality)
    s = gr.add_parser("interactions")
    s.add_argument("--corpus", required=True)
    s.add_argument("--groups", required=True)
    s.add_argument("--norm", choices=("counts", "overall", "row"), default="row")
    s.add_argument("--out")
    s.set_defaults(func=cmd_graph_interactions)
    s = gr.add_parser("export")
    s.add_argument("--corpus", required=True)
    s.add_argument("--groups")
    s.add_argument("--format", choices=("tsv", "gexf"), default="tsv")
    s.add_argument("--min-weight", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_graph_export)

    s = sub.add_parser("metrics", help="bot effectiveness metrics for one side")
    s.add_argument("--side", type=_side, required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--groups", required=True)
    s.add_argument("--both-sides", action="store_true", help="pool humans and bots of both sides")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("hashtags", help="top hashtags of a group with divergence flags")
    s.add_argument("--corpus", required=True)
    s.add_argument("--groups", required=True)
    s.add_argument("--group", type=_group, required=True)
    s.add_argument("--k", type=int, default=20)
    s.add_argument("--exclude-file")
    s.add_argument("--human-top", type=int, default=50)
    s.add_argument("--out")
    s.set_defaults(func=cmd_hashtags)

    s = sub.add_parser("run", help="full pipeline from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("generate", help="write a synthetic scenario")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("PARTISAN_GRAPH_LOG", "WARNING").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InputError as e:
        log.error("%s", e)
        return 1
    except StageError as e:
        log.error("%s", e)
        return 2
    except (ValueError, KeyError) as e:
        log.error("%s failed: %s", args.command, e)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
