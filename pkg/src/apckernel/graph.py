"""Vertex-labelled simple graphs, label alphabets and TU Dortmund dataset I/O."""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class TUFormatError(ValueError):
    """Malformed TU Dortmund dataset files."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph with one integer label per vertex.

    Edges are stored as sorted pairs ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: frozenset
    labels: tuple

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"negative vertex count {self.n}")
        if len(self.labels) != self.n:
            raise GraphError(f"{len(self.labels)} labels for {self.n} vertices")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u >= v:
                raise GraphError(f"edge ({u}, {v}) is a self-loop or not normalised")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[int] | None = None) -> "Graph":
        """Build a graph from any iterable of vertex pairs.

        Orientation is ignored and duplicates are merged; self-loops raise
        :class:`GraphError`.
        """
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            norm.add((u, v) if u < v else (v, u))
        if labels is None:
            labels = (0,) * n
        return cls(n, frozenset(norm), tuple(int(x) for x in labels))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.edges, self.labels) == (other.n, other.edges, other.labels)

    def __hash__(self):
        return hash((self.n, self.edges, self.labels))

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)})"

    @cached_property
    def adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Adjacency of each vertex as a Python int bitmask."""
        masks = []
        for nb in self.adjacency_lists:
            m = 0
            for w in nb:
                m |= 1 << w
            masks.append(m)
        return tuple(masks)

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        a.setflags(write=False)
        return a

    def degree(self, v: int) -> int:
        return len(self.adjacency_lists[v])

    def relabel_vertices(self, perm: Sequence[int]) -> "Graph":
        """Return the isomorphic graph in which vertex ``v`` becomes ``perm[v]``."""
        labels = [0] * self.n
        for v, p in enumerate(perm):
            labels[p] = self.labels[v]
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges), labels)

    def with_labels(self, labels: Sequence[int]) -> "Graph":
        return Graph(self.n, self.edges, tuple(int(x) for x in labels))

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": sorted(list(e) for e in self.edges), "labels": list(self.labels)}

    @classmethod
    def from_dict(cls, d: dict) -> "Graph":
        return cls.from_edges(d["n"], [tuple(e) for e in d["edges"]], d["labels"])


def neighbors(graph: Graph, v: int) -> tuple[int, ...]:
    """Sorted neighbours of ``v``."""
    if not 0 <= v < graph.n:
        raise GraphError(f"vertex {v} out of range for n={graph.n}")
    return graph.adjacency_lists[v]


def disjoint_union(g: Graph, h: Graph) -> Graph:
    off = g.n
    edges = list(g.edges) + [(u + off, v + off) for u, v in h.edges]
    return Graph.from_edges(g.n + h.n, edges, g.labels + h.labels)


@dataclass(frozen=True)
class LabelAlphabet:
    """Mapping from original label ids onto compact ids ``0..k-1``."""

    k: int
    forward_map: dict = field(hash=False)
    code_names: tuple = ()

    def __post_init__(self):
        if set(self.forward_map.values()) - set(range(self.k)):
            raise ValueError("compact ids must lie in [0, k)")
        if not self.code_names:
            object.__setattr__(self, "code_names", tuple(str(i) for i in range(self.k)))

    def compact(self, label: int) -> int:
        return self.forward_map[label]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "forward_map": {str(a): b for a, b in sorted(self.forward_map.items())},
            "code_names": list(self.code_names),
        }


@dataclass(frozen=True)
class Dataset:
    graphs: tuple
    class_labels: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        object.__setattr__(self, "class_labels", tuple(int(c) for c in self.class_labels))
        if len(self.graphs) != len(self.class_labels):
            raise ValueError(
                f"{len(self.class_labels)} class labels for {len(self.graphs)} graphs"
            )

    def __len__(self):
        return len(self.graphs)

    def label_frequencies(self) -> Counter:
        freq: Counter = Counter()
        for g in self.graphs:
            freq.update(g.labels)
        return freq

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(
            [self.graphs[i] for i in indices], [self.class_labels[i] for i in indices], self.name
        )

    def _map_labels(self, mapping: dict) -> "Dataset":
        graphs = [g.with_labels([mapping[x] for x in g.labels]) for g in self.graphs]
        return Dataset(graphs, self.class_labels, self.name)


def remap_labels_topk(dataset: Dataset, k: int) -> tuple[Dataset, LabelAlphabet]:
    """Keep the ``k - 1`` most frequent labels and fold the rest into one bucket.

    Frequent labels get compact ids ``0..k-2`` by descending frequency (ties go
    to the smaller original id); everything else maps to ``k - 1``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    freq = dataset.label_frequencies()
    if not freq:
        raise ValueError("dataset has no vertex labels")
    ranked = sorted(freq, key=lambda lab: (-freq[lab], lab))
    mapping = {lab: (i if i < k - 1 else k - 1) for i, lab in enumerate(ranked)}
    names = [str(lab) for lab in ranked[: k - 1]]
    names += ["other"] * (k - len(names))
    alphabet = LabelAlphabet(k, mapping, tuple(names[:k]))
    return dataset._map_labels(mapping), alphabet


def compact_labels(dataset: Dataset) -> tuple[Dataset, LabelAlphabet]:
    """Map every observed label onto ``0..k-1`` in increasing order of original id."""
    observed = sorted(dataset.label_frequencies())
    if not observed:
        return dataset, LabelAlphabet(1, {}, ("0",))
    mapping = {lab: i for i, lab in enumerate(observed)}
    alphabet = LabelAlphabet(len(observed), mapping, tuple(str(x) for x in observed))
    return dataset._map_labels(mapping), alphabet


# -- TU Dortmund text format -------------------------------------------------


def _read_int_lines(path: Path) -> list[int]:
    out = []
    with open(path, newline=None) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise TUFormatError(f"{path.name}:{lineno}: expected an integer, got {line!r}") from None
    return out


def parse_tu_dataset(directory: str | os.PathLike, name: str) -> Dataset:
    """Read ``<name>_A.txt``, ``_graph_indicator.txt``, ``_node_labels.txt`` and
    the optional ``_graph_labels.txt`` from ``directory``.

    Vertex ids in the files are 1-based; the returned graphs are 0-based and
    keep the raw label ids. Without a graph-label file every class label is 0.
    """
    d = Path(directory)
    files = {key: d / f"{name}_{key}.txt" for key in ("A", "graph_indicator", "node_labels", "graph_labels")}
    for key in ("A", "graph_indicator", "node_labels"):
        if not files[key].is_file():
            raise FileNotFoundError(f"missing {files[key]}")

    indicator = _read_int_lines(files["graph_indicator"])
    node_labels = _read_int_lines(files["node_labels"])
    if len(node_labels) != len(indicator):
        raise TUFormatError(
            f"{len(node_labels)} node labels but {len(indicator)} graph-indicator lines"
        )
    graph_ids = sorted(set(indicator))
    gid_index = {gid: i for i, gid in enumerate(graph_ids)}

    # global vertex -> (graph index, local id)
    local = []
    sizes = [0] * len(graph_ids)
    for gid in indicator:
        gi = gid_index[gid]
        local.append((gi, sizes[gi]))
        sizes[gi] += 1

    n_total = len(indicator)
    edge_sets: list[set] = [set() for _ in graph_ids]
    with open(files["A"], newline=None) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise TUFormatError(f"{files['A'].name}:{lineno}: expected 'row, col', got {line!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise TUFormatError(f"{files['A'].name}:{lineno}: non-integer entry in {line!r}") from None
            for x in (a, b):
                if not 1 <= x <= n_total:
                    raise TUFormatError(
                        f"{files['A'].name}:{lineno}: vertex {x} out of range 1..{n_total}"
                    )
            if a == b:
                raise TUFormatError(f"{files['A'].name}:{lineno}: self-loop at vertex {a}")
            (ga, la), (gb, lb) = local[a - 1], local[b - 1]
            if ga != gb:
                raise TUFormatError(
                    f"{files['A'].name}:{lineno}: edge ({a}, {b}) joins graphs "
                    f"{graph_ids[ga]} and {graph_ids[gb]}"
                )
            edge_sets[ga].add((la, lb) if la < lb else (lb, la))

    labels: list[list[int]] = [[] for _ in graph_ids]
    for (gi, _), lab in zip(local, node_labels):
        labels[gi].append(lab)

    graphs = [Graph(sizes[i], frozenset(edge_sets[i]), tuple(labels[i])) for i in range(len(graph_ids))]
    if files["graph_labels"].is_file():
        class_labels = _read_int_lines(files["graph_labels"])
        if len(class_labels) != len(graphs):
            raise TUFormatError(f"{len(class_labels)} graph labels for {len(graphs)} graphs")
    else:
        class_labels = [0] * len(graphs)
    return Dataset(graphs, class_labels, name)


def write_tu_dataset(dataset: Dataset, directory: str | os.PathLike, name: str | None = None) -> None:
    """Write ``dataset`` in TU text format; both edge orientations are listed."""
    name = name or dataset.name
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    a_lines, ind_lines, lab_lines = [], [], []
    offset = 0
    for gi, g in enumerate(dataset.graphs, 1):
        for u, v in sorted(g.edges):
            a_lines.append(f"{u + offset + 1}, {v + offset + 1}")
            a_lines.append(f"{v + offset + 1}, {u + offset + 1}")
        ind_lines.extend([str(gi)] * g.n)
        lab_lines.extend(str(x) for x in g.labels)
        offset += g.n
    for suffix, lines in (
        ("A", a_lines),
        ("graph_indicator", ind_lines),
        ("node_labels", lab_lines),
        ("graph_labels", [str(c) for c in dataset.class_labels]),
    ):
        (d / f"{name}_{suffix}.txt").write_text("".join(x + "\n" for x in lines))


def dump_json(dataset: Dataset) -> str:
    return json.dumps(
        {
            "name": dataset.name,
            "class_labels": list(dataset.class_labels),
            "graphs": [g.to_dict() for g in dataset.graphs],
        },
        sort_keys=True,
    )


def load_json(text: str) -> Dataset:
    d = json.loads(text)
    return Dataset([Graph.from_dict(g) for g in d["graphs"]], d["class_labels"], d.get("name", ""))
