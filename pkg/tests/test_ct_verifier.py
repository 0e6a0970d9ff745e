import math

import numpy as np
import pytest

from xxzdrop.bands import eigenpairs_below
from xxzdrop.ct_verifier import (
    CTParams,
    ct_constant,
    ct_rate,
    ct_rhs,
    default_energies,
    eigenstate_decay_check,
    fit_decay_rate,
    projector_decay_check,
    verify_ct_grid,
)
from xxzdrop.graph_core import FieldSpec, build_lattice_window, compensating_boundary_field
from xxzdrop.isoperimetry import brute_force_surface_levels
from xxzdrop.sym_product import SymSpace
from xxzdrop.xxz_operator import HamiltonianSpec, SpecError, build_hamiltonian


def test_params_validation():
    base = dict(anisotropy=4.0, N=2, k=1, offset=0.5, E=0.0, d=2, D_min=2, lam=0.375)
    CTParams(**base)
    for key, bad in [("anisotropy", 1.0), ("k", -1), ("offset", 0.0), ("offset", 1.6),
                     ("E", 10.0), ("lam", 0.1), ("d", 0)]:
        with pytest.raises(SpecError):
            CTParams(**{**base, key: bad})


def test_rate_and_constant_formula():
    p = CTParams(4.0, 2, 1, 1.0, -1.0, 2, 2, 0.375)
    assert ct_rate(p) == pytest.approx(math.log(1 + 1.0 * 3 * 2 / (9 * math.sqrt(2))))
    assert ct_constant(p) == pytest.approx(4 * 2 / (1.0 * 0.75))
    pc = CTParams(4.0, 2, 1, 1.0, complex(-1.0, 0.5), 2, 2, 0.375)
    assert ct_constant(pc) == 2 * ct_constant(p)
    assert ct_rhs(p, 0) == ct_constant(p)
    with pytest.raises(ValueError):
        ct_rhs(p, [-1])


def test_fit_decay_rate_recovers_slope():
    r = np.arange(8.0)
    rate, icpt, used = fit_decay_rate(r, 3.0 * np.exp(-0.7 * r))
    assert rate == pytest.approx(0.7) and icpt == pytest.approx(math.log(3)) and used == 8
    vals = np.exp(-0.7 * r)
    vals[5:] = 0.0
    assert fit_decay_rate(r, vals)[2] == 5
    assert math.isnan(fit_decay_rate([0.0], [1.0])[0])


def test_default_energies():
    E = default_energies(1.0)
    assert len(E) == 5 and E[-1] == 1.0 and E[0] == -1.0


def _path(L=8, N=2, delta=4.0, field=True):
    G = build_lattice_window("path", [L])
    f = compensating_boundary_field(G, delta) if field else None
    cat = brute_force_surface_levels(G, N, measure="lattice")
    return HamiltonianSpec(G, N, delta, f), cat


def test_grid_small_no_violations():
    spec, cat = _path()
    rep = verify_ct_grid(spec, cat, 1, [0.5, 1.5])
    assert rep.rows == 2 * 5 * 28**2
    assert rep.violations == 0 and rep.max_ratio < 1
    csv = rep.to_csv()
    assert csv.splitlines()[0].startswith("delta,E_re,E_im,A,B")
    assert len(csv.splitlines()) == rep.rows + 1
    assert rep.summary()["rows"] == rep.rows


def test_grid_complex_and_set_pairs():
    spec, cat = _path()
    rep = verify_ct_grid(spec, cat, 1, [1.0], imag_shift=0.5, pair_family="set_to_droplets")
    assert rep.violations == 0 and rep.meta["pair_family"] == "set_to_droplets"
    with pytest.raises(ValueError):
        verify_ct_grid(spec, cat, 1, [1.0], pair_family="all")
    with pytest.raises(SpecError):
        verify_ct_grid(spec, cat, 0, [1.0], pair_family="set_to_droplets")


def test_grid_rejects_foreign_catalog():
    spec, _ = _path()
    other = brute_force_surface_levels(build_lattice_window("path", [8]), 3)
    with pytest.raises(SpecError):
        verify_ct_grid(spec, other, 1, [1.0])


def test_grid_deterministic():
    spec, cat = _path(L=6)
    a = verify_ct_grid(spec, cat, 1, [1.0]).to_csv()
    assert a == verify_ct_grid(spec, cat, 1, [1.0]).to_csv()


def test_eigenstate_check_small():
    spec, cat = _path(L=12, N=2)
    space = SymSpace(spec.base, 2)
    e_k = 0.375 * 3
    res = eigenpairs_below(build_hamiltonian(spec, space), e_k)
    for E, psi in zip(res.eigenvalues[:3], res.eigenvectors.T[:3]):
        out = eigenstate_decay_check(spec, cat, 1, E, psi, space)
        assert out["pass"]
    with pytest.raises(SpecError):
        eigenstate_decay_check(spec, cat, 1, 2.0, res.eigenvectors[:, 0], space)
    with pytest.raises(SpecError):
        eigenstate_decay_check(spec, cat, 1, res.eigenvalues[1], res.eigenvectors[:, 0], space)
    with pytest.raises(SpecError):
        eigenstate_decay_check(spec, cat, 0, res.eigenvalues[0], res.eigenvectors[:, 0], space)


def test_projector_check_small():
    spec, cat = _path(L=12, N=3, delta=12.0)
    out = projector_decay_check(spec, cat, 1)
    assert out["rank_Q"] > 0 and out["fit_points"] >= 4
    assert 0 < out["offset"] <= 2.0
    with pytest.raises(SpecError):
        projector_decay_check(spec, cat, 1, offset=5.0)


def test_field_does_not_break_bound():
    spec, cat = _path(L=7)
    rng = np.random.default_rng(4)
    spec = spec.with_field(spec.field + FieldSpec(rng.uniform(0, 1, 7)))
    assert verify_ct_grid(spec, cat, 1, [1.0]).violations == 0
