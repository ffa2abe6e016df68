import dataclasses

import numpy as np
import pytest

from voterctl.topology import (
    Graph,
    is_line_chain,
    load_graph,
    make_line,
    make_scale_free,
    save_graph,
)


def test_make_line_small():
    g = make_line(2)
    assert g.node_count == 3
    assert g.in_neighbors[0] == (0,)
    assert g.in_neighbors[1] == (0, 1)
    assert g.in_neighbors[2] == (1, 2)


def test_make_line_single():
    g = make_line(1)
    assert g.in_neighbors[1] == (0, 1)


def test_make_line_50():
    g = make_line(50)
    assert g.node_count == 51
    assert all(g.in_degree(i) == 2 for i in range(1, 51))


def test_make_line_no_self_loop():
    g = make_line(3, self_loop=False)
    assert g.in_neighbors[2] == (1,)
    assert is_line_chain(g)


def test_make_line_invalid_size():
    with pytest.raises(ValueError):
        make_line(0)


def test_line_information_flows_right():
    g = make_line(20)
    for i in range(1, 21):
        assert all(j >= i - 1 for j in g.in_neighbors[i])


def test_is_line_chain_rejects_other_graphs():
    assert not is_line_chain(make_scale_free(10, 1, 0))


def test_scale_free_deterministic():
    a = make_scale_free(40, 1, 123)
    b = make_scale_free(40, 1, 123)
    assert a.in_neighbors == b.in_neighbors
    c = make_scale_free(40, 1, 124)
    assert a.in_neighbors != c.in_neighbors


def test_scale_free_connected():
    for seed in range(5):
        g = make_scale_free(40, 1, seed)
        seen = {0}
        frontier = [0]
        while frontier:
            node = frontier.pop()
            for j in g.in_neighbors[node]:
                if j not in seen:
                    seen.add(j)
                    frontier.append(j)
        assert seen == set(range(40))


def test_scale_free_symmetric():
    g = make_scale_free(60, 2, 3)
    for i, nbrs in enumerate(g.in_neighbors):
        for j in nbrs:
            assert i in g.in_neighbors[j]


def test_scale_free_heavy_tail():
    for seed in (0, 1, 2, 3):
        g = make_scale_free(150, 1, seed)
        deg = g.degrees()
        assert deg.max() >= 5 * np.median(deg)


def test_scale_free_invalid_parameters():
    with pytest.raises(ValueError):
        make_scale_free(5, 5, 0)
    with pytest.raises(ValueError):
        make_scale_free(5, 0, 0)


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(node_count=2, in_neighbors=((0,), ()))
    with pytest.raises(ValueError):
        Graph(node_count=2, in_neighbors=((0,), (5,)))
    with pytest.raises(ValueError):
        Graph(node_count=2, in_neighbors=((0,),))
    with pytest.raises(ValueError):
        Graph(node_count=1, in_neighbors=((0,),), labels=("a", "b"))


def test_graph_immutable():
    g = make_line(3)
    with pytest.raises(dataclasses.FrozenInstanceError):
        g.node_count = 5


def test_duplicate_neighbors_counted_once():
    g = Graph(node_count=2, in_neighbors=((0, 0), (0, 1, 1)))
    assert g.in_neighbors == ((0,), (0, 1))


def test_mean_operator_rows_average():
    g = make_line(4)
    op = g.mean_operator
    row_sums = np.asarray(op.sum(axis=1)).ravel()
    assert np.allclose(row_sums, 1.0)
    state = np.array([1, 0, 1, 0, 1], dtype=float)
    rho = op @ state
    assert rho[0] == 1.0
    assert rho[1] == 0.5
    assert rho[2] == 0.5


def test_serialization_round_trip(tmp_path):
    for g in (make_line(5), make_scale_free(25, 1, 9), make_line(3, self_loop=False)):
        path = tmp_path / "g.txt"
        save_graph(g, path)
        loaded = load_graph(path)
        assert loaded.node_count == g.node_count
        assert loaded.in_neighbors == g.in_neighbors


def test_serialization_labels(tmp_path):
    g = Graph(node_count=2, in_neighbors=((0,), (0, 1)), labels=("hub", "leaf"))
    path = tmp_path / "g.txt"
    save_graph(g, path)
    loaded = load_graph(path)
    assert loaded.labels == ("hub", "leaf")
    assert loaded.in_neighbors == g.in_neighbors


def test_load_graph_requires_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n")
    with pytest.raises(ValueError):
        load_graph(path)
