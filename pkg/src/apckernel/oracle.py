"""Brute-force ground truth by depth-first search over simple paths and cycles.

Shares no counting code with :mod:`apckernel.counting`. Exponential; meant for
graphs of a dozen or so vertices.
"""

from __future__ import annotations

import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .graph import Graph


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleTally:
    """Labelling tallies per entry ``(u, v, l)``; ``u == v`` entries are rooted directed cycles.

    A labelling is the tuple of label multiplicities (length ``k``) over the
    internal vertices of a path, or the non-root vertices of a cycle.
    """

    n: int
    max_length: int
    k: int
    labellings: dict = field(default_factory=lambda: defaultdict(Counter))

    def count(self, u: int, v: int, l: int) -> int:
        c = self.labellings.get((u, v, l))
        return sum(c.values()) if c else 0

    def labelling_counts(self, u: int, v: int, l: int) -> dict:
        return dict(self.labellings.get((u, v, l), {}))

    def class_counts(self, u: int, v: int, l: int) -> dict:
        out: Counter = Counter()
        for lab, m in self.labellings.get((u, v, l), {}).items():
            out[sum(i * c for i, c in enumerate(lab))] += m
        return dict(out)

    def entries(self):
        return sorted(k for k, c in self.labellings.items() if sum(c.values()))

    def geometric_cycles(self, l: int) -> int:
        """Undirected, unrooted simple cycles of length ``l >= 3``."""
        if l < 3:
            raise ValueError("geometric cycles need l >= 3")
        total = sum(self.count(u, u, l) for u in range(self.n))
        return total // (2 * l)

    def to_csv(self, graph_id=0, header=True) -> str:
        buf = io.StringIO()
        if header:
            buf.write("graph_id,u,v,length,value,source\n")
        for (u, v, l) in sorted(self.entries(), key=lambda e: (e[2], e[0], e[1])):
            buf.write(f"{graph_id},{u},{v},{l},{self.count(u, v, l)},oracle\n")
        return buf.getvalue()


def dfs_enumerate(graph: Graph, max_length: int, k: int | None = None, node_budget: int | None = None) -> OracleTally:
    """Tally every simple path and rooted directed simple cycle of length ``<= max_length``.

    Labels are taken as compact ids; ``k`` defaults to ``max(labels) + 1``.
    """
    if k is None:
        k = max(graph.labels, default=0) + 1
    tally = OracleTally(graph.n, max_length, k)
    nbrs = graph.adjacency_lists
    labels = graph.labels
    steps = 0

    for root in range(graph.n):
        path = [root]
        on_path = [False] * graph.n
        on_path[root] = True
        lab = [0] * k  # label multiplicities of path[1:]

        def extend(cur: int) -> None:
            nonlocal steps
            length = len(path) - 1
            for y in nbrs[cur]:
                steps += 1
                if node_budget is not None and steps > node_budget:
                    raise BudgetExceeded(f"oracle exceeded {node_budget} steps")
                if y == root:
                    if length >= 1 and length + 1 <= max_length:
                        tally.labellings[(root, root, length + 1)][tuple(lab)] += 1
                    continue
                if on_path[y] or length + 1 > max_length:
                    continue
                tally.labellings[(root, y, length + 1)][tuple(lab)] += 1
                path.append(y)
                on_path[y] = True
                lab[labels[y]] += 1
                extend(y)
                lab[labels[y]] -= 1
                on_path[y] = False
                path.pop()

        extend(root)
    return tally
