"""Connected induced subgraph enumeration by reverse search.

Every connected vertex set ``S`` with ``|S| >= 2`` has a unique parent: ``S``
minus its largest vertex whose removal leaves ``S`` connected. The sets then
form a forest rooted at the singletons, which is walked depth-first without a
visited set. A child of ``S`` is ``S + w`` for a boundary vertex ``w`` such that
every vertex of ``S`` larger than ``w`` is a cut vertex of ``S + w``.

Sets are carried as Python int bitmasks; the boundary ``N(S)`` is updated
incrementally along the tree.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .graph import Graph, GraphError


@dataclass(frozen=True)
class InducedSubgraph:
    vertices: tuple
    boundary_size: int

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def local_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}


@dataclass
class EnumerationStats:
    visited: int
    seconds: float
    by_size: dict


def _is_connected(mask: int, nbr: tuple) -> bool:
    seen = frontier = mask & -mask
    while frontier:
        grow = 0
        while frontier:
            low = frontier & -frontier
            grow |= nbr[low.bit_length() - 1]
            frontier ^= low
        frontier = grow & mask & ~seen
        seen |= frontier
    return seen == mask


def boundary_size(graph: Graph, vertices: Iterable[int]) -> int:
    """Number of vertices outside ``vertices`` adjacent to at least one of them."""
    nbr = graph.neighbor_masks
    inside = 0
    for v in vertices:
        if not 0 <= v < graph.n:
            raise GraphError(f"vertex {v} out of range for n={graph.n}")
        inside |= 1 << v
    if not inside:
        raise ValueError("vertex set must be nonempty")
    border = 0
    m = inside
    while m:
        low = m & -m
        border |= nbr[low.bit_length() - 1]
        m ^= low
    return (border & ~inside).bit_count()


def iter_connected_sets(
    graph: Graph, max_size: int, roots: Iterable[int] | None = None
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(vertices, boundary_size)`` for each connected induced subgraph.

    ``vertices`` is in discovery order (root first), not sorted. With ``roots``
    only the reverse-search subtrees under those singletons are walked; the
    subtrees of distinct roots are disjoint and together cover everything.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    nbr = graph.neighbor_masks
    if roots is None:
        roots = range(graph.n)
    connected = _is_connected
    for r in roots:
        rmask = 1 << r
        stack = [((r,), rmask, nbr[r])]
        while stack:
            verts, mask, border = stack.pop()
            yield verts, border.bit_count()
            if len(verts) == max_size:
                continue
            cand = border
            while cand:
                low = cand & -cand
                cand ^= low
                w = low.bit_length() - 1
                grown = mask | low
                # every vertex of S above w must be a cut vertex of S + w
                above = mask >> (w + 1)
                ok = True
                while above:
                    top = above.bit_length() - 1
                    x = top + w + 1
                    if connected(grown & ~(1 << x), nbr):
                        ok = False
                        break
                    above ^= 1 << top
                if ok:
                    stack.append((verts + (w,), grown, (border | nbr[w]) & ~grown))


def enumerate_connected_induced_subgraphs(
    graph: Graph, max_size: int, visit: Callable[[InducedSubgraph], object]
) -> EnumerationStats:
    """Call ``visit`` once per connected induced subgraph with at most ``max_size`` vertices."""
    t0 = time.perf_counter()
    count = 0
    by_size: dict = {}
    for verts, nb in iter_connected_sets(graph, max_size):
        visit(InducedSubgraph(tuple(sorted(verts)), nb))
        count += 1
        by_size[len(verts)] = by_size.get(len(verts), 0) + 1
    return EnumerationStats(count, time.perf_counter() - t0, dict(sorted(by_size.items())))
