"""Retweet network construction and structural analytics.

Accounts are mapped to dense integer ids so the million-node graphs of a full
election corpus fit comfortably in memory; edges live in parallel numpy arrays
sorted by (source, target).
"""

from __future__ import annotations

import csv
from array import array
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping
from xml.etree import ElementTree as ET

import numpy as np

from .accounts import AccountClass
from .corpus import Corpus, Kind
from .ideology import Leaning


class Group(str, enum.Enum):
    LIBERAL_HUMAN = "LiberalHuman"
    CONSERVATIVE_HUMAN = "ConservativeHuman"
    LIBERAL_BOT = "LiberalBot"
    CONSERVATIVE_BOT = "ConservativeBot"
    RESIDUAL = "Residual"

    @property
    def side(self) -> Leaning | None:
        if self in (Group.LIBERAL_HUMAN, Group.LIBERAL_BOT):
            return Leaning.LIBERAL
        if self in (Group.CONSERVATIVE_HUMAN, Group.CONSERVATIVE_BOT):
            return Leaning.CONSERVATIVE
        return None

    @property
    def is_bot(self) -> bool:
        return self in (Group.LIBERAL_BOT, Group.CONSERVATIVE_BOT)

    @property
    def is_human(self) -> bool:
        return self in (Group.LIBERAL_HUMAN, Group.CONSERVATIVE_HUMAN)

    @classmethod
    def of(cls, side: Leaning, bot: bool) -> Group:
        if side is Leaning.LIBERAL:
            return cls.LIBERAL_BOT if bot else cls.LIBERAL_HUMAN
        if side is Leaning.CONSERVATIVE:
            return cls.CONSERVATIVE_BOT if bot else cls.CONSERVATIVE_HUMAN
        raise ValueError(f"no group for leaning {side}")


# row/column order of every per-group table
GROUPS = (Group.LIBERAL_HUMAN, Group.CONSERVATIVE_HUMAN, Group.LIBERAL_BOT, Group.CONSERVATIVE_BOT)
_GROUP_INDEX = {g: i for i, g in enumerate(GROUPS)}
_RESIDUAL_INDEX = len(GROUPS)


def assign_groups(
    classes: Mapping[str, AccountClass], leanings: Mapping[str, Leaning], accounts: Iterable[str] | None = None
) -> dict[str, Group]:
    """Cross bot class with leaning; anything Unknown or Unlabeled is Residual."""
    if accounts is None:
        accounts = dict.fromkeys([*classes, *leanings])
    out = {}
    for acc in accounts:
        c = classes.get(acc, AccountClass.UNKNOWN)
        lean = leanings.get(acc, Leaning.UNLABELED)
        if c is AccountClass.UNKNOWN or lean is Leaning.UNLABELED:
            out[acc] = Group.RESIDUAL
        else:
            out[acc] = Group.of(lean, c is AccountClass.BOT)
    return out


def write_groups(groups: Mapping[str, Group], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "group"])
        for acc, g in groups.items():
            w.writerow([acc, g.value])


def read_groups(path: str | Path) -> dict[str, Group]:
    from .errors import InputError

    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return {row["account_id"]: Group(row["group"]) for row in csv.DictReader(fh)}
    except (OSError, KeyError, ValueError) as e:
        raise InputError(f"cannot read groups file {path}: {e}") from e


class RetweetGraph:
    """Directed retweet graph; an edge runs from the retweeter to the retweeted author."""

    def __init__(
        self,
        nodes: list[str],
        src: np.ndarray,
        dst: np.ndarray,
        weight: np.ndarray,
        index: dict[str, int] | None = None,
    ):
        self.nodes = nodes
        self.index = index if index is not None else {v: i for i, v in enumerate(nodes)}
        if len(self.index) != len(nodes):
            raise ValueError("duplicate node ids")
        order = np.lexsort((dst, src))
        self.src = np.ascontiguousarray(src[order], dtype=np.int64)
        self.dst = np.ascontiguousarray(dst[order], dtype=np.int64)
        self.weight = np.ascontiguousarray(weight[order], dtype=np.int64)
        if len(self.src):
            if np.any(self.src == self.dst):
                raise ValueError("self-loops are not allowed")
            if np.any(self.weight < 1):
                raise ValueError("edge weights must be >= 1")
            key = self.src * len(nodes) + self.dst
            if np.any(key[1:] == key[:-1]):
                raise ValueError("duplicate edges")
        self._undirected = None

    @classmethod
    def from_edges(cls, edges: Mapping[tuple[str, str], int], nodes: Iterable[str] = ()) -> RetweetGraph:
        names = dict.fromkeys(nodes)
        for s, t in edges:
            names.setdefault(s)
            names.setdefault(t)
        node_list = list(names)
        index = {v: i for i, v in enumerate(node_list)}
        items = [(index[s], index[t], w) for (s, t), w in edges.items()]
        arr = np.array(items, dtype=np.int64).reshape(-1, 3)
        return cls(node_list, arr[:, 0], arr[:, 1], arr[:, 2])

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.src)

    @property
    def edges(self) -> dict[tuple[str, str], int]:
        nodes = self.nodes
        return {
            (nodes[s], nodes[t]): w for s, t, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist())
        }

    def total_weight(self) -> int:
        return int(self.weight.sum())

    def undirected_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Symmetric CSR ``(indptr, indices, weights)`` with weights of both directions summed."""
        if self._undirected is None:
            n = self.n
            lo = np.minimum(self.src, self.dst)
            hi = np.maximum(self.src, self.dst)
            key = lo * n + hi
            ukey, inv = np.unique(key, return_inverse=True)
            w = np.bincount(inv, weights=self.weight, minlength=len(ukey)).astype(np.int64)
            ulo, uhi = np.divmod(ukey, max(n, 1))
            rows = np.concatenate([ulo, uhi])
            cols = np.concatenate([uhi, ulo])
            ws = np.concatenate([w, w])
            order = np.lexsort((cols, rows))
            rows, cols, ws = rows[order], cols[order], ws[order]
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
            self._undirected = (indptr, cols, ws)
        return self._undirected


def build(corpus: Corpus) -> RetweetGraph:
    """One edge per (retweeter, original author) pair weighted by retweet count.

    Every account in the corpus becomes a node, including ones that never retweet or get retweeted.
    """
    nodes = corpus.users()
    index = {v: i for i, v in enumerate(nodes)}
    src, dst = array("q"), array("q")
    retweet = Kind.RETWEET
    for r in corpus.records:
        if r.kind is retweet and r.author_id != r.referenced_author_id:
            src.append(index[r.author_id])
            dst.append(index[r.referenced_author_id])
    n = len(nodes)
    key = np.frombuffer(src, dtype=np.int64) * n + np.frombuffer(dst, dtype=np.int64)
    del src, dst
    ukey, counts = np.unique(key, return_counts=True)
    s, t = np.divmod(ukey, max(n, 1))
    return RetweetGraph(nodes, s, t, counts, index=index)


class CoreAssignment(Mapping[str, int]):
    """Core number per node, backed by an array aligned with ``graph.nodes``."""

    def __init__(self, nodes: list[str], numbers: np.ndarray):
        self.nodes = nodes
        self.numbers = numbers
        self._index = None

    def __getitem__(self, node: str) -> int:
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.nodes)}
        return int(self.numbers[self._index[node]])

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def members(self, k: int) -> set[str]:
        return {self.nodes[i] for i in np.flatnonzero(self.numbers >= k).tolist()}


def core_numbers(graph: RetweetGraph) -> CoreAssignment:
    """Bucket-based peeling (Batagelj-Zaversnik) on the undirected, unweighted view."""
    indptr, indices, _ = graph.undirected_csr()
    n = graph.n
    deg = np.diff(indptr).tolist()
    if n == 0:
        return CoreAssignment(graph.nodes, np.zeros(0, dtype=np.int64))
    md = max(deg)
    bin_start = [0] * (md + 1)
    for d in deg:
        bin_start[d] += 1
    start = 0
    for d in range(md + 1):
        num = bin_start[d]
        bin_start[d] = start
        start += num
    pos = [0] * n
    vert = [0] * n
    for v in range(n):
        d = deg[v]
        pos[v] = bin_start[d]
        vert[pos[v]] = v
        bin_start[d] += 1
    for d in range(md, 0, -1):
        bin_start[d] = bin_start[d - 1]
    bin_start[0] = 0
    ptr = indptr.tolist()
    adj = indices.tolist()
    for i in range(n):
        v = vert[i]
        dv = deg[v]
        for u in adj[ptr[v] : ptr[v + 1]]:
            du = deg[u]
            if du > dv:
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_start[du] += 1
                deg[u] = du - 1
    return CoreAssignment(graph.nodes, np.array(deg, dtype=np.int64))


def _group_codes(nodes: list[str], groups: Mapping[str, Group]) -> np.ndarray:
    return np.array(
        [_GROUP_INDEX.get(groups.get(v, Group.RESIDUAL), _RESIDUAL_INDEX) for v in nodes], dtype=np.int64
    )


@dataclass(frozen=True)
class CoreSeriesRow:
    k: int
    members: int
    fractions: dict[Group, float]  # four partisan groups; NaN when the k-core is empty
    residual_fraction: float


def core_series(assign: CoreAssignment, groups: Mapping[str, Group], k_max: int = 30) -> list[CoreSeriesRow]:
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    codes = _group_codes(assign.nodes, groups)
    rows = []
    for k in range(k_max + 1):
        mask = assign.numbers >= k
        total = int(mask.sum())
        tally = np.bincount(codes[mask], minlength=_RESIDUAL_INDEX + 1)
        if total:
            fr = {g: tally[i] / total for i, g in enumerate(GROUPS)}
            res = tally[_RESIDUAL_INDEX] / total
        else:
            fr = {g: math.nan for g in GROUPS}
            res = math.nan
        rows.append(CoreSeriesRow(k, total, {g: float(v) for g, v in fr.items()}, float(res)))
    return rows


@dataclass(frozen=True)
class Centrality:
    nodes: list[str]
    in_centrality: np.ndarray
    out_centrality: np.ndarray
    group_means: dict[Group, tuple[float, float, int]]  # (out, in, members); NaN when no members

    def of(self, node: str) -> tuple[float, float]:
        i = self.nodes.index(node)
        return float(self.in_centrality[i]), float(self.out_centrality[i])


def degree_centrality(graph: RetweetGraph, groups: Mapping[str, Group] | None = None) -> Centrality:
    """Distinct in/out neighbours over ``n - 1``; group means cover members present in the graph."""
    n = graph.n
    if n < 2:
        raise ValueError("degree centrality needs at least 2 nodes")
    in_c = np.bincount(graph.dst, minlength=n) / (n - 1)
    out_c = np.bincount(graph.src, minlength=n) / (n - 1)
    means: dict[Group, tuple[float, float, int]] = {}
    if groups is not None:
        codes = _group_codes(graph.nodes, groups)
        for i, g in enumerate((*GROUPS, Group.RESIDUAL)):
            mask = codes == i
            cnt = int(mask.sum())
            if cnt:
                means[g] = (float(out_c[mask].mean()), float(in_c[mask].mean()), cnt)
            else:
                means[g] = (math.nan, math.nan, 0)
    return Centrality(graph.nodes, in_c, out_c, means)


@dataclass(frozen=True)
class InteractionMatrix:
    counts: np.ndarray  # [source group][target group], rows/cols in GROUPS order
    residual_weight: int  # weight of edges with a Residual endpoint

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def overall(self) -> np.ndarray:
        t = self.counts.sum()
        return self.counts / t if t else np.zeros_like(self.counts, dtype=float)

    @property
    def row(self) -> np.ndarray:
        sums = self.counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(sums > 0, self.counts / np.where(sums > 0, sums, 1), 0.0)
        return out

    def cell(self, source: Group, target: Group, norm: str = "row") -> float:
        m = {"row": self.row, "overall": self.overall, "counts": self.counts}[norm]
        return float(m[_GROUP_INDEX[source], _GROUP_INDEX[target]])


def interaction_matrix(graph: RetweetGraph, groups: Mapping[str, Group]) -> InteractionMatrix:
    codes = _group_codes(graph.nodes, groups)
    gs, gt = codes[graph.src], codes[graph.dst]
    ok = (gs < _RESIDUAL_INDEX) & (gt < _RESIDUAL_INDEX)
    counts = np.zeros((len(GROUPS), len(GROUPS)), dtype=np.int64)
    np.add.at(counts, (gs[ok], gt[ok]), graph.weight[ok])
    return InteractionMatrix(counts, int(graph.weight[~ok].sum()))


def group_sizes(groups: Mapping[str, Group]) -> dict[Group, int]:
    sizes = {g: 0 for g in Group}
    for g in groups.values():
        sizes[g] += 1
    return sizes


def records_per_group(corpus: Corpus, groups: Mapping[str, Group]) -> dict[Group, int]:
    counts = {g: 0 for g in Group}
    for author, ids in corpus.by_author.items():
        counts[groups.get(author, Group.RESIDUAL)] += len(ids)
    return counts


def tweets_per_user(corpus: Corpus, groups: Mapping[str, Group]) -> dict[Group, float | None]:
    """Records authored per account for each group; None for an empty group."""
    sizes = group_sizes(groups)
    counts = records_per_group(corpus, groups)
    return {g: (counts[g] / sizes[g] if sizes[g] else None) for g in GROUPS}


def write_edge_list(graph: RetweetGraph, path: str | Path, min_weight: int = 1) -> None:
    nodes = graph.nodes
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("source\ttarget\tweight\n")
        for s, t, w in zip(graph.src.tolist(), graph.dst.tolist(), graph.weight.tolist()):
            if w >= min_weight:
                fh.write(f"{nodes[s]}\t{nodes[t]}\t{w}\n")


def read_edge_list(path: str | Path) -> RetweetGraph:
    edges: dict[tuple[str, str], int] = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            parts = line.rstrip("\n").split("\t")
            if i == 0 and parts[:2] == ["source", "target"]:
                continue
            if len(parts) != 3:
                continue
            edges[(parts[0], parts[1])] = edges.get((parts[0], parts[1]), 0) + int(parts[2])
    return RetweetGraph.from_edges(edges)


def write_gexf(
    graph: RetweetGraph,
    path: str | Path,
    groups: Mapping[str, Group] | None = None,
    cores: CoreAssignment | None = None,
    centrality: Centrality | None = None,
    min_weight: int = 1,
) -> None:
    """GEXF 1.2 export with group, core number and degree centralities as node attributes.

    Written by hand rather than through networkx so the file carries no timestamp and
    reruns are byte-identical.
    """
    root = ET.Element("gexf", {"xmlns": "http://www.gexf.net/1.2draft", "version": "1.2"})
    g = ET.SubElement(root, "graph", {"defaultedgetype": "directed", "mode": "static"})
    attrs = ET.SubElement(g, "attributes", {"class": "node", "mode": "static"})
    for aid, (title, typ) in enumerate(
        [("group", "string"), ("core_number", "integer"), ("in_centrality", "double"), ("out_centrality", "double")]
    ):
        ET.SubElement(attrs, "attribute", {"id": str(aid), "title": title, "type": typ})
    nodes_el = ET.SubElement(g, "nodes")
    for i, v in enumerate(graph.nodes):
        nel = ET.SubElement(nodes_el, "node", {"id": v, "label": v})
        vals = ET.SubElement(nel, "attvalues")
        if groups is not None:
            ET.SubElement(vals, "attvalue", {"for": "0", "value": groups.get(v, Group.RESIDUAL).value})
        if cores is not None:
            ET.SubElement(vals, "attvalue", {"for": "1", "value": str(int(cores.numbers[i]))})
        if centrality is not None:
            ET.SubElement(vals, "attvalue", {"for": "2", "value": repr(float(centrality.in_centrality[i]))})
            ET.SubElement(vals, "attvalue", {"for": "3", "value": repr(float(centrality.out_centrality[i]))})
    edges_el = ET.SubElement(g, "edges")
    eid = 0
    for s, t, w in zip(graph.src.tolist(), graph.dst.tolist(), graph.weight.tolist()):
        if w < min_weight:
            continue
        ET.SubElement(
            edges_el,
            "edge",
            {"id": str(eid), "source": graph.nodes[s], "target": graph.nodes[t], "weight": str(w)},
        )
        eid += 1
    ET.indent(root)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
