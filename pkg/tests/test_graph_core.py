import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xxzdrop.graph_core import (
    FieldSpec,
    GraphError,
    build_lattice_window,
    compensating_boundary_field,
    config_measures,
    from_edges,
    graph_to_json,
    load_field,
    pair_distance,
    parse_graph,
    random_connected_graph,
)

from conftest import small_graphs


def test_path_window():
    G = build_lattice_window("path", [4])
    assert G.vertex_count == 4
    assert G.edges == [(0, 1), (1, 2), (2, 3)]
    assert G.max_degree == 2


def test_strip_window_counts():
    G = build_lattice_window("strip", [2, 3])
    assert G.vertex_count == 6
    assert len(G.edges) == 7
    assert G.max_degree == 3
    assert G.labels[G.label_index((1, 2))] == (1, 2)


def test_grid_2x2_is_cycle():
    G = build_lattice_window("grid2d", [2, 2])
    assert G.is_regular and G.max_degree == 2 and len(G.edges) == 4


@pytest.mark.parametrize("family,dims", [("path", [1]), ("path", [3, 3]), ("strip", [1, 4]),
                                         ("grid2d", [2]), ("hex", [3])])
def test_window_rejects_bad_dims(family, dims):
    with pytest.raises(GraphError):
        build_lattice_window(family, dims)


def test_parse_examples():
    G = parse_graph('{"n": 2, "edges": [[0, 1]]}')
    assert G.edges == [(0, 1)]
    T = parse_graph('{"vertex_count": 3, "edges": [[0,1],[1,2],[0,2]]}')
    assert T.is_regular and T.max_degree == 2
    with pytest.raises(GraphError, match="disconnected"):
        parse_graph('{"n": 3, "edges": [[0, 1]]}')


@pytest.mark.parametrize("edges,needle", [
    ([[0, 5]], r"\[0, 5\] has an index outside"),
    ([[1, 1], [0, 1]], r"\[1, 1\] is a self-loop"),
    ([[0, 1], [1, 0]], "duplicated"),
])
def test_parse_names_offending_edge(edges, needle):
    with pytest.raises(GraphError, match=needle):
        parse_graph(json.dumps({"n": 2, "edges": edges}))


def test_json_round_trip():
    G = build_lattice_window("strip", [2, 4])
    H = parse_graph(graph_to_json(G))
    assert H.edges == G.edges
    assert H.labels == G.labels
    assert H.lattice_degree == G.lattice_degree


def test_pair_distance_examples():
    assert pair_distance(build_lattice_window("path", [5]), 0, 4) == 4
    S = build_lattice_window("strip", [2, 3])
    assert pair_distance(S, S.label_index((0, 1)), S.label_index((2, 2))) == 3
    with pytest.raises(GraphError):
        pair_distance(S, 0, 6)


@pytest.mark.parametrize("name,G", sorted(small_graphs().items()))
def test_metric_axioms(name, G):
    D = G.distance_matrix
    n = G.vertex_count
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0) and np.all(D[~np.eye(n, dtype=bool)] > 0)
    assert np.all(D[:, :, None] <= D[:, None, :] + D.T[None, :, :].transpose(0, 2, 1))


def test_config_measure_examples():
    P4 = build_lattice_window("path", [4])
    m = config_measures(P4, {1, 2})
    assert (m.total_degree, m.interaction, m.surface, m.clusters) == (4, 1, 2, 1)
    assert config_measures(build_lattice_window("path", [6]), {0, 1}).surface == 1
    G = build_lattice_window("grid2d", [3, 3])
    for x in range(9):
        m = config_measures(G, {x})
        assert m.surface == G.degrees[x] and m.interaction == 0 and m.clusters == 1
    with pytest.raises(GraphError):
        config_measures(P4, [])


def test_surface_identity_exhaustive():
    import itertools

    for G in small_graphs().values():
        n = G.vertex_count
        for N in range(1, min(4, n) + 1):
            for X in itertools.combinations(range(n), N):
                m = config_measures(G, X)
                assert m.surface == m.total_degree - 2 * m.interaction


def test_surface_identity_random_graphs():
    rng = np.random.default_rng(11)
    for _ in range(100):
        G = random_connected_graph(int(rng.integers(4, 11)), 0.4, rng)
        X = rng.choice(G.vertex_count, size=int(rng.integers(1, G.vertex_count + 1)), replace=False)
        m = config_measures(G, X)
        assert m.surface == m.total_degree - 2 * m.interaction


@given(st.integers(3, 12), st.data())
def test_path_interior_surface_is_twice_clusters(L, data):
    G = build_lattice_window("path", [L])
    X = data.draw(st.sets(st.integers(1, L - 2), min_size=1))
    m = config_measures(G, X)
    assert m.surface == 2 * m.clusters


def test_compensating_field_examples():
    f = compensating_boundary_field(build_lattice_window("path", [4]), 2.0, 2)
    assert np.allclose(f.values, [0.25, 0, 0, 0.25])
    G = build_lattice_window("grid2d", [3, 3])
    v = compensating_boundary_field(G, 2.0, 4).values.reshape(3, 3)
    assert v[0, 0] == 0.5 and v[0, 1] == 0.25 and v[1, 1] == 0.0
    T = from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert not compensating_boundary_field(T, 3.0, 2).values.any()
    with pytest.raises(GraphError):
        compensating_boundary_field(G, 1.0, 4)
    with pytest.raises(GraphError):
        compensating_boundary_field(G, 2.0, 3)


def test_strip_field_uses_lattice_degree():
    G = build_lattice_window("strip", [2, 4])
    v = compensating_boundary_field(G, 3.0).values
    assert np.count_nonzero(v) == 4  # only the two end columns


@settings(max_examples=50)
@given(st.floats(1.0001, 100), st.integers(2, 6))
def test_compensating_field_nonnegative(delta, bulk):
    G = build_lattice_window("path", [6])
    assert np.all(compensating_boundary_field(G, delta, bulk).values >= 0)


def test_field_spec_validation(tmp_path):
    with pytest.raises(GraphError):
        FieldSpec(np.array([0.1, -0.2]))
    p = tmp_path / "f.json"
    p.write_text("[0.5, 0, 1]")
    assert load_field(p, 3).potential([0, 2]) == 1.5
    with pytest.raises(GraphError):
        load_field(p, 4)


def test_graph_is_immutable():
    G = build_lattice_window("path", [3])
    with pytest.raises(Exception):
        G.vertex_count = 5
