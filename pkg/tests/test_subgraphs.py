import itertools
import random

import pytest

from apckernel.counting import collect_subgraphs
from apckernel.graph import Graph
from apckernel.subgraphs import boundary_size, enumerate_connected_induced_subgraphs, iter_connected_sets

from conftest import complete, cycle, path


def brute_force(graph, max_size):
    nbr = graph.neighbor_masks
    out = set()
    for r in range(1, max_size + 1):
        for combo in itertools.combinations(range(graph.n), r):
            mask = sum(1 << v for v in combo)
            seen = 1 << combo[0]
            frontier = seen
            while frontier:
                low = frontier & -frontier
                frontier ^= low
                new = nbr[low.bit_length() - 1] & mask & ~seen
                seen |= new
                frontier |= new
            if seen == mask:
                out.add(combo)
    return out


def enumerate_sets(graph, max_size):
    found = []
    enumerate_connected_induced_subgraphs(graph, max_size, lambda h: found.append(h))
    return found


def test_triangle():
    found = enumerate_sets(cycle(3), 3)
    assert sorted(len(h.vertices) for h in found) == [1, 1, 1, 2, 2, 2, 3]


def test_path_excludes_disconnected():
    found = {h.vertices for h in enumerate_sets(path(3), 3)}
    assert found == {(0,), (1,), (2,), (0, 1), (1, 2), (0, 1, 2)}


def test_k4_boundaries():
    found = enumerate_sets(complete(4), 2)
    assert len(found) == 10
    for h in found:
        assert h.boundary_size == (3 if h.size == 1 else 2)


@pytest.mark.parametrize(
    "graph, verts, expected",
    [
        (cycle(3), [0], 2),
        (cycle(3), [0, 1, 2], 0),
        (Graph.from_edges(5, [(0, i) for i in range(1, 5)]), [1], 1),
    ],
)
def test_boundary_size(graph, verts, expected):
    assert boundary_size(graph, verts) == expected


def random_graph(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 9)
    p = rng.choice([0.2, 0.4, 0.7])
    return Graph.from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p])


@pytest.mark.parametrize("seed", range(20))
def test_against_brute_force(seed):
    g = random_graph(seed)
    for max_size in (1, 3, 6):
        found = enumerate_sets(g, max_size)
        keys = [h.vertices for h in found]
        assert len(keys) == len(set(keys)), "duplicate subgraph"
        assert set(keys) == brute_force(g, max_size)
        for h in found:
            assert h.boundary_size == boundary_size(g, h.vertices)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("backend", ["numba", "numpy"])
def test_array_backends_match(seed, backend):
    g = random_graph(seed)
    subs = collect_subgraphs(g, 5, backend=backend)
    got = set()
    for row, s, nb in zip(subs.verts, subs.sizes, subs.boundary):
        vs = tuple(sorted(int(x) for x in row[:s]))
        got.add(vs)
        assert nb == boundary_size(g, vs)
    assert len(got) == len(subs)
    assert got == brute_force(g, 5)


def test_roots_partition():
    g = random_graph(3)
    whole = sorted(tuple(sorted(v)) for v, _ in iter_connected_sets(g, 4))
    parts = []
    for r in range(g.n):
        parts += [tuple(sorted(v)) for v, _ in iter_connected_sets(g, 4, roots=[r])]
    assert sorted(parts) == whole


def test_bad_max_size():
    with pytest.raises(ValueError):
        list(iter_connected_sets(path(2), 0))


def test_linear_growth_bounded_degree():
    # cycles have maximum degree 2: n * max_size connected sets of size <= max_size
    for n in (20, 40, 80):
        assert len(enumerate_sets(cycle(n), 4)) == 4 * n
