"""All-paths-and-cycles feature vectors, Gram matrices and a 1-NN baseline.

A graph's embedding counts its simple paths by ``(length, start label, class,
end label)`` and its rooted directed simple cycles by ``(length, root label,
class)``. With the delta base kernel the APC kernel is the dot product of these
vectors.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .coding import (
    CodeScheme,
    DecodeError,
    decode_exact,
    decode_power,
    default_power_base,
    make_weight_assignment,
    strip_start_code,
)
from .counting import CountTable, Domain, collect_subgraphs, count_all
from .graph import Dataset, Graph

log = logging.getLogger(__name__)


class FeatureKey(NamedTuple):
    kind: str  # "path" or "cycle"
    length: int
    start_label: int
    cls: object  # None, class value (int) or labelling (tuple)
    end_label: int | None = None

    def serialize(self) -> str:
        if self.cls is None:
            c = ""
        elif isinstance(self.cls, tuple):
            c = "-".join(map(str, self.cls))
        else:
            c = str(self.cls)
        end = "" if self.end_label is None else str(self.end_label)
        return f"{self.kind}:{self.length}:{self.start_label}:{c}:{end}"

    @classmethod
    def parse(cls, text: str) -> "FeatureKey":
        kind, length, start, c, end = text.split(":")
        if c == "":
            cv = None
        elif "-" in c:
            cv = tuple(int(x) for x in c.split("-"))
        else:
            cv = int(c)
        return cls(kind, int(length), int(start), cv, int(end) if end else None)

    def sort_key(self):
        c = self.cls
        ck = () if c is None else (c if isinstance(c, tuple) else (c,))
        return (self.kind != "path", self.length, self.start_label, ck, -1 if self.end_label is None else self.end_label)


@dataclass
class Embedding:
    counts: dict
    graph_id: object = 0
    skipped: list = field(default_factory=list)

    def __getitem__(self, key: FeatureKey) -> int:
        return self.counts.get(key, 0)

    def __add__(self, other: "Embedding") -> "Embedding":
        out = Counter(self.counts)
        out.update(other.counts)
        return Embedding(dict(out), self.graph_id, self.skipped + other.skipped)

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return {k: v for k, v in self.counts.items() if v} == {k: v for k, v in other.counts.items() if v}

    def dot(self, other: "Embedding") -> int:
        small, big = sorted((self.counts, other.counts), key=len)
        return sum(v * big.get(k, 0) for k, v in small.items())


def _power_scheme_for(graph: Graph, scheme: CodeScheme, domain: Domain, plain: CountTable) -> CodeScheme:
    if domain is Domain.FLOAT64:
        return scheme
    biggest = int(plain.data.max()) if plain.data.size else 0
    base = max(scheme.base, default_power_base(scheme.k, 0, domain, biggest))
    return scheme if base == scheme.base else CodeScheme.power(scheme.k, base)


def embed_graph(
    graph: Graph,
    max_length: int,
    scheme: CodeScheme | None = None,
    *,
    include_l2_cycles: bool = False,
    domain: Domain | None = None,
    tolerance: float = 1e-6,
    graph_id=0,
    backend: str = "auto",
) -> Embedding:
    """Feature counts of one graph.

    ``scheme=None`` counts plain paths keyed only by endpoint labels. A power
    scheme defaults to the bigint domain, where the base is raised per graph if
    a class could otherwise carry; the exact scheme always runs in float64.
    Entries that cannot be decoded are left out and listed in ``skipped``.
    """
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    subs = collect_subgraphs(graph, max_length + 1, backend=backend)
    plain = count_all(graph, None, max_length, subgraphs=subs, backend=backend)
    coded = None
    if scheme is not None:
        if domain is None:
            domain = Domain.FLOAT64 if scheme.kind == "exact" else Domain.BIGINT
        if scheme.kind == "power":
            scheme = _power_scheme_for(graph, scheme, domain, plain)
        weights = make_weight_assignment(graph, scheme, domain)
        coded = count_all(graph, weights, max_length, subgraphs=subs, backend=backend)

    counts: Counter = Counter()
    skipped = []
    labels = graph.labels
    min_cycle = 2 if include_l2_cycles else 3
    for l in range(1, max_length + 1):
        us, vs = np.nonzero(plain.data[l])
        for u, v in zip(us.tolist(), vs.tolist()):
            if u == v and l < min_cycle:
                continue
            total = int(plain.data[l, u, v])
            if u == v:
                base_key = ("cycle", l, labels[u])
            else:
                base_key = ("path", l, labels[u])
            end = None if u == v else labels[v]
            if coded is None:
                counts[FeatureKey(*base_key, None, end)] += total
                continue
            raw = coded[u, v, l]
            try:
                value = strip_start_code(raw, labels[u], scheme)
                if scheme.kind == "power":
                    dec = decode_power(value, scheme.base, scheme.max_class(l - 1), total=total)
                else:
                    dec = decode_exact(value, scheme, l - 1, tolerance, total=total)
            except DecodeError as exc:
                skipped.append((u, v, l, type(exc).__name__))
                continue
            for c, m in dec.counts.items():
                counts[FeatureKey(*base_key, c, end)] += m
    if skipped:
        log.warning("graph %s: %d entries could not be decoded", graph_id, len(skipped))
    return Embedding(dict(counts), graph_id, skipped)


def _embed_job(args):
    graph, gid, kwargs = args
    return embed_graph(graph, graph_id=gid, **kwargs)


def embed_dataset(dataset: Dataset, max_length: int, scheme: CodeScheme | None = None, workers: int = 1, **kwargs) -> list[Embedding]:
    kwargs = dict(kwargs, max_length=max_length, scheme=scheme)
    jobs = [(g, i, kwargs) for i, g in enumerate(dataset.graphs)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_embed_job, jobs, chunksize=8))
    return [_embed_job(j) for j in jobs]


# -- dataset-level feature processing -----------------------------------------


def feature_index(embeddings: Sequence[Embedding]) -> list[FeatureKey]:
    keys = set()
    for e in embeddings:
        keys.update(k for k, v in e.counts.items() if v)
    return sorted(keys, key=FeatureKey.sort_key)


def to_matrix(embeddings: Sequence[Embedding], index: Sequence[FeatureKey]) -> np.ndarray:
    col = {k: j for j, k in enumerate(index)}
    x = np.zeros((len(embeddings), len(index)), dtype=np.float64)
    for i, e in enumerate(embeddings):
        for k, v in e.counts.items():
            j = col.get(k)
            if j is not None:
                x[i, j] = v
    return x


def feature_cut(embeddings: Sequence[Embedding], cut: float) -> list[FeatureKey]:
    """Keep features whose variance across graphs is at least ``cut`` times the total."""
    if not 0 <= cut < 1:
        raise ValueError("cut must lie in [0, 1)")
    index = feature_index(embeddings)
    x = to_matrix(embeddings, index)
    var = x.var(axis=0) if len(index) else np.zeros(0)
    total = var.sum()
    keep = (var > 0) & (var >= cut * total)
    if not keep.any():
        raise ValueError("every feature was removed by the variance cut")
    return [k for k, kept in zip(index, keep) if kept]


@dataclass
class GramMatrix:
    values: np.ndarray
    kernel: str
    gamma: float | None
    standardize: bool
    n_features: int
    graph_ids: list = field(default_factory=list)

    def metadata(self) -> dict:
        return {
            "kernel": self.kernel,
            "gamma": self.gamma,
            "standardize": self.standardize,
            "n_features": self.n_features,
        }


def prepare_features(
    embeddings: Sequence[Embedding], index: Sequence[FeatureKey], standardize: bool = False, normalize: bool = False
) -> np.ndarray:
    x = to_matrix(embeddings, index)
    if normalize:
        s = x.sum(axis=1, keepdims=True)
        x = np.divide(x, s, out=np.zeros_like(x), where=s > 0)
    if standardize:
        sd = x.std(axis=0)
        flat = sd == 0
        if flat.any():
            log.warning("standardize: dropping %d zero-variance features", int(flat.sum()))
            x, sd = x[:, ~flat], sd[~flat]
        x = (x - x.mean(axis=0)) / sd
    return x


def gram(
    embeddings: Sequence[Embedding],
    index: Sequence[FeatureKey],
    kernel: str = "linear",
    gamma: float | str = "auto",
    standardize: bool = False,
    normalize: bool = False,
) -> GramMatrix:
    """Linear (``v(G) . v(H)``) or rbf Gram matrix over the retained features.

    ``gamma="auto"`` is one over the number of features used.
    """
    x = prepare_features(embeddings, index, standardize, normalize)
    ids = [e.graph_id for e in embeddings]
    if kernel in ("linear", "none"):
        k = x @ x.T
        return GramMatrix((k + k.T) / 2, "linear", None, standardize, x.shape[1], ids)
    if kernel != "rbf":
        raise ValueError(f"unknown kernel {kernel!r}")
    g = 1.0 / max(x.shape[1], 1) if gamma == "auto" else float(gamma)
    sq = (x * x).sum(axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2 * (x @ x.T), 0.0)
    np.fill_diagonal(d2, 0.0)
    return GramMatrix(np.exp(-g * d2), "rbf", g, standardize, x.shape[1], ids)


def knn_classify(gram: GramMatrix | np.ndarray, class_labels: Sequence[int], folds: int = 10, seed: int = 0) -> float:
    """Cross-validated 1-nearest-neighbour accuracy (%) under the kernel distance."""
    k = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=float)
    y = np.asarray(class_labels)
    n = len(y)
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if n < folds:
        raise ValueError(f"{n} graphs is fewer than {folds} folds")
    diag = np.diag(k)
    d2 = diag[:, None] + diag[None, :] - 2 * k
    perm = np.random.default_rng(seed).permutation(n)
    correct = 0
    for test in np.array_split(perm, folds):
        train = np.setdiff1d(perm, test)
        train.sort()
        nearest = train[np.argmin(d2[np.ix_(test, train)], axis=1)]
        correct += int((y[nearest] == y[test]).sum())
    return 100.0 * correct / n


def majority_rate(class_labels: Sequence[int]) -> float:
    c = Counter(class_labels)
    return 100.0 * max(c.values()) / len(class_labels) if c else math.nan
