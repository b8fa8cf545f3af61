import pytest

from apckernel.graph import (
    Dataset,
    Graph,
    GraphError,
    TUFormatError,
    compact_labels,
    disjoint_union,
    dump_json,
    load_json,
    neighbors,
    parse_tu_dataset,
    remap_labels_topk,
    write_tu_dataset,
)

from conftest import cycle, path


def write(d, name, **files):
    d.mkdir(parents=True, exist_ok=True)
    for key, text in files.items():
        (d / f"{name}_{key}.txt").write_text(text)


def test_parse_minimal(tmp_path):
    write(tmp_path, "X", A="1, 2\n2, 1", graph_indicator="1\n1", node_labels="0\n1")
    ds = parse_tu_dataset(tmp_path, "X")
    assert len(ds) == 1
    g = ds.graphs[0]
    assert (g.n, g.edges, g.labels) == (2, frozenset({(0, 1)}), (0, 1))
    assert ds.class_labels == (0,)


def test_parse_edgeless(tmp_path):
    write(tmp_path, "X", A="", graph_indicator="1\n1", node_labels="0\n0")
    g = parse_tu_dataset(tmp_path, "X").graphs[0]
    assert g.n == 2 and not g.edges


def test_parse_crlf_and_spaces(tmp_path):
    write(tmp_path, "X", A=" 1 ,2\r\n2, 1\r\n\r\n", graph_indicator="1\r\n1\r\n", node_labels="3\r\n4\r\n",
          graph_labels="-1\r\n")
    ds = parse_tu_dataset(tmp_path, "X")
    assert ds.graphs[0].edges == frozenset({(0, 1)})
    assert ds.class_labels == (-1,)


@pytest.mark.parametrize(
    "A, match",
    [
        ("1, 3\n", "joins graphs"),
        ("1, 9\n", "out of range"),
        ("1, 1\n", "self-loop"),
        ("1; 2\n", "expected"),
        ("a, 2\n", "non-integer"),
    ],
)
def test_parse_errors(tmp_path, A, match):
    write(tmp_path, "X", A=A, graph_indicator="1\n1\n2\n", node_labels="0\n0\n0\n")
    with pytest.raises(TUFormatError, match=match):
        parse_tu_dataset(tmp_path, "X")


def test_parse_missing_file(tmp_path):
    write(tmp_path, "X", A="", graph_indicator="1\n")
    with pytest.raises(FileNotFoundError):
        parse_tu_dataset(tmp_path, "X")


def test_parse_label_count_mismatch(tmp_path):
    write(tmp_path, "X", A="", graph_indicator="1\n1\n", node_labels="0\n")
    with pytest.raises(TUFormatError):
        parse_tu_dataset(tmp_path, "X")


def test_round_trip(tmp_path):
    ds = Dataset([cycle(5, [0, 1, 2, 1, 0]), path(3, [4, 4, 5]), Graph.from_edges(1, [])], [1, 0, 1], "R")
    write_tu_dataset(ds, tmp_path, "R")
    back = parse_tu_dataset(tmp_path, "R")
    assert back.graphs == ds.graphs and back.class_labels == ds.class_labels
    assert load_json(dump_json(ds)).graphs == ds.graphs


def test_mutag_size(mutag_dir):
    ds = parse_tu_dataset(mutag_dir, "MUTAG")
    assert len(ds) == 188
    assert set(ds.class_labels) == {-1, 1}


def test_graph_validation():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 1)], [0])
    g = Graph.from_edges(3, [(1, 0), (0, 1), (2, 1)])
    assert g.edges == frozenset({(0, 1), (1, 2)})


@pytest.mark.parametrize(
    "graph, v, expected",
    [
        (cycle(3), 0, (1, 2)),
        (Graph.from_edges(3, []), 1, ()),
        (path(3), 1, (0, 2)),
    ],
)
def test_neighbors(graph, v, expected):
    assert tuple(sorted(neighbors(graph, v))) == expected


def test_neighbors_out_of_range():
    with pytest.raises(GraphError):
        neighbors(path(3), 3)


def _freq_dataset(freqs):
    labels = [lab for lab, f in freqs.items() for _ in range(f)]
    return Dataset([Graph.from_edges(len(labels), [], labels)], [0])


def test_remap_topk():
    ds, alpha = remap_labels_topk(_freq_dataset({7: 100, 3: 50, 9: 10, 2: 5}), 3)
    assert alpha.forward_map == {7: 0, 3: 1, 9: 2, 2: 2}
    assert alpha.code_names == ("7", "3", "other")
    assert sorted(set(ds.graphs[0].labels)) == [0, 1, 2]


def test_remap_empty_bucket():
    ds, alpha = remap_labels_topk(_freq_dataset({4: 3, 6: 1}), 3)
    assert alpha.k == 3
    assert 2 not in ds.graphs[0].labels


def test_remap_tie_break():
    _, alpha = remap_labels_topk(_freq_dataset({5: 10, 8: 10}), 2)
    assert alpha.forward_map == {5: 0, 8: 1}


def test_compact_labels():
    ds, alpha = compact_labels(Dataset([path(3, [9, 2, 9])], [0]))
    assert ds.graphs[0].labels == (1, 0, 1)
    assert alpha.k == 2


def test_disjoint_union_and_relabel():
    g = disjoint_union(path(2, [0, 1]), cycle(3, [2, 2, 2]))
    assert g.n == 5 and g.labels == (0, 1, 2, 2, 2)
    assert (2, 3) in g.edges and (1, 2) not in g.edges
    h = g.relabel_vertices([4, 3, 2, 1, 0])
    assert h.labels == (2, 2, 2, 1, 0)
    assert (3, 4) in h.edges
