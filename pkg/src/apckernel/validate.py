"""Engine-versus-oracle comparison used by ``apc validate`` and the test suite."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .coding import (
    AmbiguousDecode,
    CodeScheme,
    DecodeBudgetExceeded,
    DecodeError,
    class_value,
    decode_exact,
    decode_power,
    default_power_base,
    make_weight_assignment,
    strip_start_code,
)
from .counting import Domain, collect_subgraphs, count_all
from .graph import Graph
from .oracle import dfs_enumerate


@dataclass
class ValidationResult:
    graphs: int = 0
    entries: int = 0
    mismatches: list = field(default_factory=list)
    skipped: Counter = field(default_factory=Counter)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def merge(self, other: "ValidationResult") -> None:
        self.graphs += other.graphs
        self.entries += other.entries
        self.mismatches.extend(other.mismatches)
        self.skipped.update(other.skipped)

    def summary(self) -> dict:
        return {
            "status": "PASS" if self.ok else "FAIL",
            "graphs": self.graphs,
            "entries_checked": self.entries,
            "mismatches": len(self.mismatches),
            "first_mismatch": self.mismatches[0] if self.mismatches else None,
            "skipped": dict(sorted(self.skipped.items())),
        }


def validate_graph(
    graph: Graph,
    max_length: int,
    k: int | None = None,
    *,
    exact_max_length: int = 5,
    tolerance: float = 1e-6,
    node_budget: int = 2_000_000,
    graph_id=0,
    _fault: int = 0,
) -> ValidationResult:
    """Compare plain counts, and for ``k >= 2`` power classes and exact labellings, against the oracle."""
    res = ValidationResult(graphs=1)
    oracle = dfs_enumerate(graph, max_length, k=k)
    subs = collect_subgraphs(graph, max_length + 1)
    plain = count_all(graph, None, max_length, subgraphs=subs, _fault=_fault)

    def miss(what, u, v, l, got, want):
        res.mismatches.append(
            {"graph": graph_id, "check": what, "u": u, "v": v, "length": l, "got": str(got), "expected": str(want)}
        )

    n = graph.n
    for l in range(1, max_length + 1):
        for u in range(n):
            for v in range(n):
                res.entries += 1
                got, want = plain[u, v, l], oracle.count(u, v, l)
                if got != want:
                    miss("count", u, v, l, got, want)
    if not k or k < 2:
        return res

    biggest = int(plain.data.max()) if plain.data.size else 0
    power = CodeScheme.power(k, default_power_base(k, max_length - 1, Domain.BIGINT, biggest))
    coded = count_all(graph, make_weight_assignment(graph, power, Domain.BIGINT), max_length, subgraphs=subs, _fault=_fault)
    exact = CodeScheme.exact(k)
    le = min(max_length, exact_max_length)
    coded_f = count_all(graph, make_weight_assignment(graph, exact, Domain.FLOAT64), max_length, subgraphs=subs, _fault=_fault)

    for l in range(1, max_length + 1):
        for u in range(n):
            for v in range(n):
                total = oracle.count(u, v, l)
                if not total and not plain[u, v, l]:
                    continue
                res.entries += 1
                want_cls = oracle.class_counts(u, v, l)
                try:
                    value = strip_start_code(coded[u, v, l], graph.labels[u], power)
                    got_cls = decode_power(value, power.base, power.max_class(l - 1)).counts
                except DecodeError as exc:
                    got_cls = f"error: {exc}"
                if got_cls != want_cls:
                    miss("power-class", u, v, l, got_cls, want_cls)
                    continue
                if l > le:
                    continue
                try:
                    dec = decode_exact(
                        strip_start_code(coded_f[u, v, l], graph.labels[u], exact), exact, l - 1,
                        tolerance, total=int(plain[u, v, l]), node_budget=node_budget,
                    )
                except AmbiguousDecode:
                    res.skipped["exact-ambiguous"] += 1
                    continue
                except DecodeBudgetExceeded:
                    res.skipped["exact-budget"] += 1
                    continue
                except DecodeError as exc:
                    miss("exact-labelling", u, v, l, f"error: {exc}", oracle.labelling_counts(u, v, l))
                    continue
                if dec.counts != oracle.labelling_counts(u, v, l):
                    miss("exact-labelling", u, v, l, dec.counts, oracle.labelling_counts(u, v, l))
                    continue
                coarse = Counter()
                for lab, m in dec.counts.items():
                    coarse[class_value(lab)] += m
                if dict(coarse) != got_cls:
                    miss("coarsening", u, v, l, dict(coarse), got_cls)
    return res


def random_graphs(count: int, max_n: int, seed: int, k: int | None = None, densities=(0.2, 0.4, 0.6)):
    """Seeded Erdos-Renyi graphs with ``2 <= n <= max_n``, cycling through ``densities``."""
    for i in range(count):
        rng = random.Random(seed * 1_000_003 + i)
        n = rng.randint(2, max_n)
        p = densities[i % len(densities)]
        edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
        labels = [rng.randrange(k) for _ in range(n)] if k and k > 1 else None
        yield Graph.from_edges(n, edges, labels)
