"""Simple path and simple cycle counts from connected induced subgraphs.

For ``u != v`` the number (or coded weight) of simple paths of length ``l`` is

    P_uv(l) = (-1)^(l+1) * sum_H C(|N(H)|, l+1-|H|) (-1)^|H| (A_H^l)_uv

over connected induced subgraphs ``H`` containing ``u`` and ``v`` with
``|H| <= l+1``, and the rooted directed simple cycles through ``u`` are

    P_uu(l) = (-1)^l * sum_H C(|N(H)|, l-|H|) (-1)^|H| (A_H^l)_uu

over ``H`` containing ``u`` with ``|H| <= l``. ``N(H)`` is the set of outside
neighbours of ``H``. One enumeration up to ``L + 1`` vertices yields every
length ``l <= L`` at once.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .graph import Graph
from .subgraphs import InducedSubgraph, iter_connected_sets

try:
    from . import _kernels
except ImportError:  # pragma: no cover - numba missing
    _kernels = None

INT64_SAFE = 2**62
ROOT_BLOCK = 32


class Domain(str, Enum):
    EXACT_INT = "exactint"
    FLOAT64 = "float"
    BIGINT = "bigint"

    @property
    def exact(self) -> bool:
        return self is not Domain.FLOAT64


def binomial(n: int, r: int) -> int:
    if r < 0 or n < 0 or r > n:
        return 0
    return math.comb(n, r)


@dataclass(frozen=True)
class WeightAssignment:
    """Per-vertex forward-encoding weights; every out-edge of ``v`` carries ``weights[v]``."""

    weights: tuple
    domain: Domain = Domain.EXACT_INT

    @classmethod
    def unit(cls, graph: Graph, domain: Domain = Domain.EXACT_INT) -> "WeightAssignment":
        one = 1.0 if domain is Domain.FLOAT64 else 1
        return cls((one,) * graph.n, domain)

    @classmethod
    def from_codes(cls, graph: Graph, codes: Sequence, domain: Domain) -> "WeightAssignment":
        return cls(tuple(codes[lab] for lab in graph.labels), domain)

    @property
    def is_unit(self) -> bool:
        return all(w == 1 for w in self.weights)


class CountTable:
    """Values ``P_uv(l)`` for all ordered pairs and ``1 <= l <= max_length``.

    Diagonal entries hold rooted directed cycle counts. Backed by a dense
    ``(max_length + 1, n, n)`` array whose dtype is int64, float64 or object.
    """

    def __init__(self, data: np.ndarray, max_length: int, domain: Domain, include_cycles: bool = True):
        self.data = data
        self.max_length = max_length
        self.domain = domain
        self.include_cycles = include_cycles

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, key):
        u, v, l = key
        if not 1 <= l <= self.max_length:
            raise KeyError(f"length {l} outside 1..{self.max_length}")
        x = self.data[l, u, v]
        return x.item() if isinstance(x, np.generic) else x

    def paths(self, l: int) -> np.ndarray:
        """Copy of the length-``l`` matrix with the diagonal zeroed."""
        m = self.data[l].copy()
        np.fill_diagonal(m, 0)
        return m

    def cycles(self, l: int) -> np.ndarray:
        return np.diagonal(self.data[l]).copy()

    def items(self) -> Iterator[tuple[tuple[int, int, int], object]]:
        """Nonzero entries as ``((u, v, l), value)`` in lexicographic ``(l, u, v)`` order."""
        for l in range(1, self.max_length + 1):
            layer = self.data[l]
            us, vs = np.nonzero(layer)
            for u, v in zip(us.tolist(), vs.tolist()):
                x = layer[u, v]
                yield (u, v, l), (x.item() if isinstance(x, np.generic) else x)

    def __add__(self, other: "CountTable") -> "CountTable":
        if self.data.shape != other.data.shape:
            raise ValueError("count tables have different shapes")
        a, b = self.data, other.data
        if a.dtype != b.dtype:
            a, b = a.astype(object), b.astype(object)
        return CountTable(a + b, self.max_length, self.domain, self.include_cycles)

    def __eq__(self, other):
        if not isinstance(other, CountTable):
            return NotImplemented
        return self.max_length == other.max_length and bool(np.all(self.data == other.data))

    def totals(self) -> dict:
        """Per-length sums of path entries and of cycle entries."""
        out = {}
        for l in range(1, self.max_length + 1):
            layer = self.data[l]
            diag = sum(np.diagonal(layer).tolist())
            out[l] = {"paths": sum(layer.ravel().tolist()) - diag, "cycles": diag}
        return out

    def to_csv(self, graph_id=0, header: bool = True, source: str | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["graph_id", "u", "v", "length", "value"] + (["source"] if source else []))
        for (u, v, l), x in self.items():
            w.writerow([graph_id, u, v, l, _fmt(x)] + ([source] if source else []))
        return buf.getvalue()

    def to_json(self, graph_id=0) -> dict:
        return {
            "graph_id": graph_id,
            "max_length": self.max_length,
            "domain": self.domain.value,
            "entries": [[u, v, l, _fmt(x)] for (u, v, l), x in self.items()],
        }


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(int(x))


def local_matrix_powers(
    graph: Graph, subgraph: InducedSubgraph, weights: WeightAssignment | None, max_power: int
) -> list[np.ndarray]:
    """``[A_H, A_H^2, ..., A_H^max_power]`` in the local vertex order of ``subgraph``.

    Row ``i`` of ``A_H`` carries the weight of ``subgraph.vertices[i]`` on each
    edge leaving it. Exact domains use Python integers (object arrays).
    """
    if max_power < 1:
        raise ValueError("max_power must be >= 1")
    if weights is None:
        weights = WeightAssignment.unit(graph)
    vs = list(subgraph.vertices)
    dtype = np.float64 if weights.domain is Domain.FLOAT64 else object
    a = np.zeros((len(vs), len(vs)), dtype=dtype)
    if dtype is object:
        a[:] = 0
    adj = graph.adjacency_matrix
    for i, u in enumerate(vs):
        for j, v in enumerate(vs):
            if adj[u, v]:
                a[i, j] = weights.weights[u]
    out = [a]
    for _ in range(max_power - 1):
        out.append(out[-1] @ a)
    return out


# -- enumeration into arrays -------------------------------------------------


def _csr(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    lists = graph.adjacency_lists
    indptr = np.zeros(graph.n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in lists])
    indices = np.fromiter((w for x in lists for w in x), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


@dataclass
class SubgraphArrays:
    """All connected induced subgraphs up to ``max_size`` as padded arrays."""

    verts: np.ndarray  # (m, max_size) int32, padded with -1
    sizes: np.ndarray
    boundary: np.ndarray
    max_size: int

    def __len__(self):
        return len(self.sizes)


def collect_subgraphs(
    graph: Graph, max_size: int, roots: Sequence[int] | None = None, backend: str = "auto"
) -> SubgraphArrays:
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    roots_arr = np.arange(graph.n, dtype=np.int64) if roots is None else np.asarray(roots, dtype=np.int64)
    if _use_numba(backend) and graph.n > 0:
        indptr, indices = _csr(graph)
        v, s, b = _kernels.enumerate_sets(indptr, indices, graph.n, roots_arr, max_size)
        return SubgraphArrays(v, s, b, max_size)
    rows, sizes, bnds = [], [], []
    for verts, nb in iter_connected_sets(graph, max_size, roots_arr.tolist()):
        rows.append(verts + (-1,) * (max_size - len(verts)))
        sizes.append(len(verts))
        bnds.append(nb)
    return SubgraphArrays(
        np.array(rows, dtype=np.int32).reshape(len(rows), max_size),
        np.array(sizes, dtype=np.int32),
        np.array(bnds, dtype=np.int32),
        max_size,
    )


def _use_numba(backend: str) -> bool:
    if backend == "numba":
        if _kernels is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return True
    if backend == "numpy":
        return False
    return _kernels is not None


# -- accumulation ------------------------------------------------------------


def _magnitude_bound(subs: SubgraphArrays, wmax: int, max_length: int) -> int:
    """Upper bound on any partial sum of the accumulation (in integer units)."""
    total = 0
    for s in range(2, subs.max_size + 1):
        mask = subs.sizes == s
        m = int(mask.sum())
        if not m:
            continue
        nmax = int(subs.boundary[mask].max())
        worst = 0
        for l in range(max(1, s - 1), max_length + 1):
            c = max(binomial(nmax, r) for r in range(0, l + 2 - s)) if nmax else 1
            worst = max(worst, c * ((s - 1) * wmax) ** l)
        total += m * (worst + 1)
    return total


def _accumulate_numpy(
    graph: Graph,
    subs: SubgraphArrays,
    weights: np.ndarray,
    max_length: int,
    include_cycles: bool,
    fault: int,
    acc: np.ndarray,
) -> None:
    """Batched accumulation per subgraph size; works for any dtype including object."""
    adj = graph.adjacency_matrix
    for s in range(2, subs.max_size + 1):
        mask = subs.sizes == s
        if not mask.any():
            continue
        idx = subs.verts[mask, :s].astype(np.int64)
        nb = subs.boundary[mask].astype(np.int64)
        a = adj[idx[:, :, None], idx[:, None, :]].astype(acc.dtype)
        a = a * weights[idx][:, :, None]
        rows = np.broadcast_to(idx[:, :, None], a.shape)
        cols = np.broadcast_to(idx[:, None, :], a.shape)
        off = ~np.eye(s, dtype=bool)[None].repeat(len(idx), axis=0)
        p = a
        for l in range(1, max_length + 1):
            if l > 1:
                p = np.matmul(p, a)
            if l + 1 < s:
                continue
            sign = -1 if (l + 1 + s) % 2 else 1
            cp = np.array([sign * binomial(int(x), l + 1 - s) for x in nb], dtype=acc.dtype)
            if s == 2 and fault:
                cp = cp + fault
            contrib = p * cp[:, None, None]
            np.add.at(acc[l], (rows[off], cols[off]), contrib[off])
            if include_cycles and l >= s:
                csign = -1 if (l + s) % 2 else 1
                cc = np.array([csign * binomial(int(x), l - s) for x in nb], dtype=acc.dtype)
                diag = np.diagonal(p, axis1=1, axis2=2) * cc[:, None]
                np.add.at(acc[l], (idx, idx), diag)


def _promote(acc: np.ndarray) -> np.ndarray:
    out = np.empty(acc.shape, dtype=object)
    out[...] = acc.astype(object)
    return out


def _accumulate(graph, subs, w, max_length, include_cycles, fault, acc, backend, comp=None) -> None:
    if len(subs) == 0:
        return
    if acc.dtype == object or not _use_numba(backend):
        _accumulate_numpy(graph, subs, w, max_length, include_cycles, fault, acc)
        return
    indptr, indices = _csr(graph)
    nmax = int(subs.boundary.max())
    comb = np.array(
        [[binomial(a, r) for r in range(max_length + 2)] for a in range(nmax + 1)], dtype=acc.dtype
    )
    if comp is not None:
        _kernels.accumulate_float(
            subs.verts, subs.sizes, subs.boundary, indptr, indices, w,
            max_length, comb, include_cycles, float(fault), acc, comp,
        )
        return
    _kernels.accumulate(
        subs.verts, subs.sizes, subs.boundary, indptr, indices, w,
        max_length, comb, include_cycles, acc.dtype.type(fault), acc,
    )


def _count_subtree(args):
    graph, weights, max_length, include_cycles, roots, backend, fault = args
    return count_all(
        graph, weights, max_length, include_cycles, roots=roots, backend=backend, _fault=fault
    ).data


def count_all(
    graph: Graph,
    weights: WeightAssignment | None = None,
    max_length: int = 6,
    include_cycles: bool = True,
    *,
    workers: int = 1,
    roots: Sequence[int] | None = None,
    backend: str = "auto",
    subgraphs: SubgraphArrays | None = None,
    _fault: int = 0,
) -> CountTable:
    """Count (or weigh) all simple paths and rooted directed simple cycles up to ``max_length``.

    ``workers > 1`` splits the enumeration forest by root across processes and
    sums the partial tables. ``subgraphs`` lets callers reuse one enumeration
    (it must have been collected with ``max_size >= max_length + 1``).
    ``_fault`` perturbs a coefficient and exists only for validation tests.
    """
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    if weights is None:
        weights = WeightAssignment.unit(graph)
    if len(weights.weights) != graph.n:
        raise ValueError(f"{len(weights.weights)} weights for {graph.n} vertices")
    domain = weights.domain
    n = graph.n

    if workers > 1 and subgraphs is None and roots is None and n > 1:
        chunks = [list(range(i, n, workers)) for i in range(min(workers, n))]
        jobs = [(graph, weights, max_length, include_cycles, c, backend, _fault) for c in chunks]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_count_subtree, jobs))
        total = CountTable(parts[0], max_length, domain, include_cycles)
        for p in parts[1:]:
            total = total + CountTable(p, max_length, domain, include_cycles)
        return total

    if subgraphs is not None and subgraphs.max_size < min(max_length + 1, n):
        raise ValueError("subgraph enumeration is too shallow for max_length")

    if domain is Domain.FLOAT64:
        w = np.array([float(x) for x in weights.weights], dtype=np.float64)
        acc = np.zeros((max_length + 1, n, n), dtype=np.float64)
        wmax = None
    else:
        if any(int(x) != x for x in weights.weights):
            raise TypeError("exact domains need integer weights")
        w_int = [int(x) for x in weights.weights]
        wmax = max((abs(x) for x in w_int), default=1)
        acc = np.zeros((max_length + 1, n, n), dtype=np.int64)
        w = np.array(w_int, dtype=np.int64) if wmax < INT64_SAFE else np.array(w_int, dtype=object)
    if w.dtype == object:
        acc = _promote(acc)

    if subgraphs is not None:
        blocks = [subgraphs]
    else:
        all_roots = list(range(n)) if roots is None else list(roots)
        blocks = (
            collect_subgraphs(graph, max_length + 1, all_roots[i : i + ROOT_BLOCK], backend)
            for i in range(0, len(all_roots), ROOT_BLOCK)
        )
    # rounding errors of the float accumulation, folded in at the end
    comp = np.zeros_like(acc) if acc.dtype == np.float64 else None
    bound = 0
    for subs in blocks:
        if acc.dtype == np.int64:
            bound += _magnitude_bound(subs, wmax, max_length) + abs(_fault) * len(subs)
            if bound >= INT64_SAFE:
                acc = _promote(acc)
        _accumulate(graph, subs, w if acc.dtype != object else w.astype(object), max_length,
                    include_cycles, _fault, acc, backend, comp)
    if comp is not None:
        acc += comp
    return CountTable(acc, max_length, domain, include_cycles)


def write_counts_csv(tables: Sequence[tuple[object, CountTable]], fh, source: str | None = None) -> None:
    fh.write("graph_id,u,v,length,value" + (",source" if source else "") + "\n")
    for gid, t in tables:
        fh.write(t.to_csv(gid, header=False, source=source))


def write_counts_json(tables: Sequence[tuple[object, CountTable]], fh) -> None:
    json.dump([t.to_json(gid) for gid, t in tables], fh, sort_keys=True)
