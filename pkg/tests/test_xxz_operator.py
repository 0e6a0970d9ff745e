import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from xxzdrop.graph_core import FieldSpec, build_lattice_window, from_edges, random_connected_graph
from xxzdrop.oracles import block_oracle
from xxzdrop.sym_product import DimensionError, SymSpace
from xxzdrop.xxz_operator import (
    HamiltonianSpec,
    LinearMap,
    Regularization,
    SpecError,
    StructuralError,
    build_hamiltonian,
    full_spin_hamiltonian,
    ising_gap,
    number_operator,
    potential_diagonal,
    sector_blocks,
    twosite_number_form,
    twosite_spin_form,
)


@pytest.mark.parametrize("delta", [1.5, 2.0, 5.0, 37.0])
def test_twosite_forms_agree(delta):
    assert np.allclose(twosite_number_form(delta), twosite_spin_form(delta), atol=1e-15)


def test_twosite_spectrum():
    # one up-up, one down-down at 0; the one-particle pair at 1/2 -+ 1/(2 delta)
    w = np.linalg.eigvalsh(twosite_number_form(2.0))
    assert np.allclose(w, [0, 0, 0.25, 0.75])


def test_spec_validation():
    P = build_lattice_window("path", [4])
    with pytest.raises(SpecError):
        HamiltonianSpec(P, 2, 1.0)
    with pytest.raises(SpecError):
        HamiltonianSpec(P, 5, 2.0)
    with pytest.raises(SpecError):
        HamiltonianSpec(P, 2, 2.0, FieldSpec(np.zeros(3)))
    with pytest.raises(SpecError):
        HamiltonianSpec(P, 2, 2.0, regularization=Regularization(1, 0.1, 2))
    with pytest.raises(SpecError):
        HamiltonianSpec(P, 2, 2.0, regularization=Regularization(-1, 0.0, 2))
    ok = HamiltonianSpec(P, 2, 2.0, regularization=Regularization.minimal(1, 2.0, 2))
    assert ok.regularization.lam == ising_gap(2.0)


def test_path4_two_particle_example():
    P = build_lattice_window("path", [4])
    spec = HamiltonianSpec(P, 2, 2.0)
    space = SymSpace(P, 2)
    H = build_hamiltonian(spec, space).to_dense()
    r = space.index((1, 2))
    assert H[r, r] == 1.0  # S = 2
    assert H[r, space.index((0, 2))] == -0.25
    assert H[space.index((0, 1)), space.index((0, 1))] == 0.5


def test_one_particle_is_graph_laplacian():
    G = build_lattice_window("grid2d", [3, 3])
    delta = 3.0
    H = build_hamiltonian(HamiltonianSpec(G, 1, delta)).to_dense()
    A = np.zeros((9, 9))
    for x, y in G.edges:
        A[x, y] = A[y, x] = 1
    ref = -A / (2 * delta) + np.diag(G.degrees) / 2
    assert np.allclose(H, ref, atol=0)


def test_regularization_shift():
    P = build_lattice_window("path", [6])
    reg = Regularization.minimal(1, 3.0, d_min=1)
    spec = HamiltonianSpec(P, 2, 3.0, regularization=reg)
    space = SymSpace(P, 2)
    diff = potential_diagonal(spec, space) - potential_diagonal(spec.with_regularization(None), space)
    assert np.allclose(diff, reg.lam * (space.surfaces < 2))


def test_matrix_free_equals_explicit():
    G = build_lattice_window("strip", [2, 5])
    f = FieldSpec(np.linspace(0, 1, 10))
    spec = HamiltonianSpec(G, 3, 2.5, f)
    space = SymSpace(G, 3)
    Hx = build_hamiltonian(spec, space, explicit=True)
    Hf = build_hamiltonian(spec, SymSpace(G, 3), explicit=False)
    v = np.random.default_rng(1).standard_normal(space.dimension)
    assert np.allclose(Hx.apply(v), Hf.apply(v), atol=1e-13)
    assert np.allclose(Hx.to_dense(), Hf.to_dense(), atol=1e-13)


def test_space_mismatch():
    P = build_lattice_window("path", [4])
    with pytest.raises(SpecError):
        build_hamiltonian(HamiltonianSpec(P, 2, 2.0), SymSpace(P, 1))


def test_linear_map_shape_check():
    op = LinearMap.from_matrix(np.eye(3))
    with pytest.raises(ValueError):
        op.apply(np.ones(4))


def test_number_operator_and_conservation():
    G = build_lattice_window("path", [5])
    H = full_spin_hamiltonian(G, 2.0)
    Nop = number_operator(5)
    assert abs(H @ Nop - Nop @ H).max() < 1e-14
    assert abs(H - H.T).max() == 0


def test_tensor_cap():
    with pytest.raises(DimensionError):
        full_spin_hamiltonian(build_lattice_window("path", [15]), 2.0)


def test_leakage_detected():
    G = build_lattice_window("path", [3])
    H = full_spin_hamiltonian(G, 2.0).tolil()
    H[0, 1] = H[1, 0] = 1e-3
    with pytest.raises(StructuralError):
        sector_blocks(sp.csr_matrix(H), G, 2.0)


@pytest.mark.parametrize("delta", [1.5, 2.0, 5.0])
def test_tensor_blocks_match(delta):
    for G in (build_lattice_window("path", [6]), build_lattice_window("strip", [2, 3]),
              from_edges(3, [(0, 1), (1, 2), (0, 2)])):
        for field in (None, FieldSpec(np.arange(G.vertex_count) * 0.3)):
            rep = block_oracle(G, delta, field)
            assert rep["leakage"] == 0.0
            assert rep["max_deviation"] <= 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1.01, 20))
def test_tensor_blocks_random(seed, delta):
    rng = np.random.default_rng(seed)
    G = random_connected_graph(int(rng.integers(2, 8)), 0.5, rng)
    field = FieldSpec(rng.uniform(0, 1, G.vertex_count))
    assert block_oracle(G, delta, field)["max_deviation"] <= 1e-12


def test_hamiltonian_nonnegative():
    G = build_lattice_window("grid2d", [3, 3])
    for N in range(10):
        w = np.linalg.eigvalsh(build_hamiltonian(HamiltonianSpec(G, N, 1.2)).to_dense())
        assert w[0] >= -1e-12
