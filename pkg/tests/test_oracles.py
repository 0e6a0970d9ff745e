import numpy as np
import pytest

from xxzdrop.graph_core import build_lattice_window, from_edges, random_connected_graph
from xxzdrop.oracles import block_oracle, degree_growth, distance_oracle

from conftest import small_graphs


def test_distance_oracle_path7():
    out = distance_oracle(build_lattice_window("path", [7]), 3)
    assert out["pairs"] == 595 and out["mismatches"] == []


def test_distance_oracle_sampled_is_seeded():
    G = build_lattice_window("grid2d", [3, 3])
    a = distance_oracle(G, 3, sample=50, rng=1)
    b = distance_oracle(G, 3, sample=50, rng=1)
    assert a == b and a["pairs"] == 50 and not a["mismatches"]


@pytest.mark.parametrize("name,G", sorted(small_graphs().items()))
def test_degree_growth(name, G):
    for N in range(1, min(4, G.vertex_count - 1) + 1):
        out = degree_growth(G, N)
        assert out["ok"], out


def test_degree_growth_bound_attained_on_star():
    # moving the hub particle of a star out changes S by 2d-2... or less
    G = from_edges(5, [(0, i) for i in range(1, 5)])
    out = degree_growth(G, 1)
    assert out["max_jump"] == 3 and out["bound"] == 7


def test_regular_bound():
    G = build_lattice_window("grid2d", [2, 2])
    assert degree_growth(G, 2)["bound"] == 2


def test_block_oracle_random():
    rng = np.random.default_rng(0)
    G = random_connected_graph(6, 0.5, rng)
    out = block_oracle(G, 2.0)
    assert out["leakage"] == 0 and out["max_deviation"] < 1e-12 and len(out["deviations"]) == 7
