import pytest

from apckernel.graph import Graph
from apckernel.oracle import BudgetExceeded, dfs_enumerate
from apckernel.validate import random_graphs, validate_graph

from conftest import complete, cycle


def test_triangle():
    o = dfs_enumerate(cycle(3), 3)
    assert o.count(0, 1, 2) == 1
    assert o.count(0, 0, 3) == 2
    assert o.geometric_cycles(3) == 1


def test_star():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    o = dfs_enumerate(star, 4)
    assert all(o.count(u, u, l) == 0 for u in range(4) for l in (3, 4))
    assert o.count(1, 2, 2) == 1


def test_labellings():
    g = Graph.from_edges(3, [(0, 1), (1, 2)], [0, 2, 1])
    o = dfs_enumerate(g, 2, k=3)
    assert o.labelling_counts(0, 2, 2) == {(0, 0, 1): 1}
    assert o.class_counts(0, 2, 2) == {2: 1}
    assert o.labelling_counts(0, 0, 2) == {(0, 0, 1): 1}


def test_budget():
    with pytest.raises(BudgetExceeded):
        dfs_enumerate(complete(8), 7, node_budget=1000)


def test_csv():
    lines = dfs_enumerate(cycle(3), 1).to_csv().splitlines()
    assert lines[0] == "graph_id,u,v,length,value,source"
    assert lines[1] == "0,0,1,1,1,oracle"


def test_validate_labelled_pass():
    for i, g in enumerate(random_graphs(4, 8, seed=1, k=3)):
        res = validate_graph(g, 5, 3, graph_id=i)
        assert res.ok, res.mismatches[:1]
        assert res.entries > 0


def test_validate_fault_located():
    g = cycle(4)
    res = validate_graph(g, 3, _fault=1)
    assert not res.ok
    m = res.mismatches[0]
    assert m["check"] == "count" and m["length"] == 1
    assert res.summary()["status"] == "FAIL"


def test_two_cycles_equal_degree():
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (3, 4)])
    o = dfs_enumerate(g, 2)
    assert [o.count(u, u, 2) for u in range(5)] == [g.degree(u) for u in range(5)]
