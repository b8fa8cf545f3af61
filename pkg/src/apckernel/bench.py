"""Runtime scaling measurements: graph size, path length, exact decoding."""

from __future__ import annotations

import math
import random
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .coding import CodeScheme, DecodeError, decode_exact, make_weight_assignment, strip_start_code
from .counting import Domain, collect_subgraphs, count_all
from .graph import Graph


def erdos_renyi(n: int, p: float, seed: int, k: int = 1) -> Graph:
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    labels = [rng.randrange(k) for _ in range(n)] if k > 1 else None
    return Graph.from_edges(n, edges, labels)


def molecule_like(n: int, seed: int, rings: int = 3, k: int = 3) -> Graph:
    """Random tree with degree <= 3 plus a few 5- or 6-rings; labels skewed to 0."""
    rng = random.Random(seed)
    deg = [0] * n
    edges = set()
    for v in range(1, n):
        u = rng.choice([x for x in range(v) if deg[x] < 3])
        edges.add((u, v))
        deg[u] += 1
        deg[v] += 1
    g = Graph.from_edges(n, edges)
    added = 0
    for _ in range(1000):
        if added == rings:
            break
        u, v = rng.sample(range(n), 2)
        if deg[u] >= 4 or deg[v] >= 4 or (min(u, v), max(u, v)) in edges:
            continue
        if _distance(g, u, v) in (4, 5):
            edges.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
            g = Graph.from_edges(n, edges)
            added += 1
    weights = [0.7, 0.2, 0.1][:k]
    labels = rng.choices(range(k), weights=weights, k=n)
    return Graph.from_edges(n, edges, labels)


def _distance(g: Graph, s: int, t: int) -> int:
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt = []
        for v in frontier:
            for w in g.adjacency_lists[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist.get(t, -1)


def _time_count(g: Graph, max_length: int, repeats: int) -> tuple[float, int]:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        count_all(g, None, max_length)
        best = min(best, time.perf_counter() - t0)
    return best, len(collect_subgraphs(g, max_length + 1)) if g.n <= 60 else -1


def _warm_up() -> None:
    count_all(erdos_renyi(8, 0.5, 0), None, 3)


@dataclass
class SizeScaling:
    rows: list  # (n, graphs, mean_seconds, mean_subgraphs)
    slope: float
    per_subgraph_slope: float  # log-log slope of seconds per connected subgraph


def runtime_vs_size(
    sizes=(50, 100, 200, 400), max_length: int = 6, mean_degree: float = 4.0,
    vertices_per_size: int = 800, seed: int = 0,
) -> SizeScaling:
    """Mean ``count_all`` time per ER graph at fixed mean degree, and the log-log slope.

    Each size is averaged over ``max(2, vertices_per_size // n)`` seeded graphs
    since subgraph counts vary a lot between ER samples. The number of
    connected subgraphs is recorded too (enumerated outside the timed call).
    """
    _warm_up()
    rows = []
    for n in sizes:
        reps = max(2, vertices_per_size // n)
        times = []
        subs = []
        for i in range(reps):
            g = erdos_renyi(n, mean_degree / (n - 1), seed * 100003 + n * 1009 + i)
            t0 = time.perf_counter()
            count_all(g, None, max_length)
            times.append(time.perf_counter() - t0)
            subs.append(len(collect_subgraphs(g, max_length + 1)))
        rows.append((n, reps, statistics.fmean(times), statistics.fmean(subs)))
    x = np.log([r[0] for r in rows])
    y = np.log([r[2] for r in rows])
    per = np.log([r[2] / r[3] for r in rows])
    return SizeScaling(rows, float(np.polyfit(x, y, 1)[0]), float(np.polyfit(x, per, 1)[0]))


@dataclass
class LengthScaling:
    rows: list  # (L, seconds, subgraphs)
    ratios: list
    median_ratio: float


def runtime_vs_length(lengths=range(3, 8), n: int = 30, seed: int = 0, repeats: int = 3) -> LengthScaling:
    _warm_up()
    g = molecule_like(n, seed)
    rows = []
    for L in lengths:
        t, m = _time_count(g, L, repeats)
        rows.append((L, t, m))
    ratios = [b[1] / a[1] for a, b in zip(rows, rows[1:])]
    return LengthScaling(rows, ratios, float(statistics.median(ratios)))


@dataclass
class DecodeTiming:
    rows: list  # (coded_length, entries, seconds, per_entry, failures)


def exact_decode_time(coded_lengths=range(1, 6), n: int = 30, seed: int = 0, node_budget: int = 200_000) -> DecodeTiming:
    """Time ``decode_exact`` over every path entry of each coded length on one labelled graph."""
    g = molecule_like(n, seed)
    scheme = CodeScheme.exact(3)
    L = max(coded_lengths) + 1
    subs = collect_subgraphs(g, L + 1)
    plain = count_all(g, None, L, subgraphs=subs)
    coded = count_all(g, make_weight_assignment(g, scheme, Domain.FLOAT64), L, subgraphs=subs)
    rows = []
    for cl in coded_lengths:
        l = cl + 1
        us, vs = np.nonzero(plain.data[l])
        entries = 0
        failures = 0
        t0 = time.perf_counter()
        for u, v in zip(us.tolist(), vs.tolist()):
            if u == v:
                continue
            entries += 1
            try:
                decode_exact(
                    strip_start_code(coded[u, v, l], g.labels[u], scheme), scheme, cl,
                    total=int(plain.data[l, u, v]), node_budget=node_budget,
                )
            except DecodeError:
                failures += 1
        dt = time.perf_counter() - t0
        rows.append((cl, entries, dt, dt / max(entries, 1), failures))
    return DecodeTiming(rows)


def plot(path, xs, ys, xlabel: str, ylabel: str, title: str, loglog: bool = False) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(xs, ys, "o-")
    if loglog:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
