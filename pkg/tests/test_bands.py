import numpy as np
import pytest

from xxzdrop.bands import boundary_region, droplet_band, eigenpairs_below
from xxzdrop.graph_core import build_lattice_window, compensating_boundary_field
from xxzdrop.isoperimetry import chain_band
from xxzdrop.xxz_operator import HamiltonianSpec, build_hamiltonian


def test_boundary_region():
    G = build_lattice_window("path", [6])
    assert boundary_region(G).tolist() == [True, True, False, False, True, True]
    assert boundary_region(G, 0).sum() == 2
    T = build_lattice_window("grid2d", [2, 2])
    assert boundary_region(T).all()


def test_eigenpairs_below_dense_vs_krylov():
    G = build_lattice_window("path", [14])
    op = build_hamiltonian(HamiltonianSpec(G, 3, 3.0))
    a = eigenpairs_below(op, 1.2)
    b = eigenpairs_below(op, 1.2, count_hint=2, dense_cap=10)
    assert a.method == "dense" and b.method == "krylov"
    assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-9)


def test_single_particle_band_fills_formula():
    G = build_lattice_window("path", [30])
    rep = droplet_band(G, 1, 3.0, compensating_boundary_field(G, 3.0))
    lo, hi = chain_band(3.0, 1)
    assert not (~rep.bulk).any()
    assert rep.edge_errors() == pytest.approx((0, 0), abs=0.02)
    assert rep.edges_bulk[0] >= lo - 1e-12 and rep.edges_bulk[1] <= hi + 1e-12


def test_two_particle_band_and_boundary_states():
    G = build_lattice_window("path", [24])
    rep = droplet_band(G, 2, 3.0, compensating_boundary_field(G, 3.0))
    lo, hi = chain_band(3.0, 2)
    assert abs(rep.edges_bulk[0] - lo) < 0.02 and abs(rep.edges_bulk[1] - hi) < 0.02
    # bound states sit below the band and live near the ends
    bound = rep.eigenvalues[~rep.bulk]
    assert len(bound) == 2 and (bound < lo - 0.05).all()
    assert rep.boundary_weight[~rep.bulk].min() > 0.9
    js = rep.to_json()
    assert js["n_states"] == len(rep.eigenvalues) and len(js["boundary_states"]) == 2
