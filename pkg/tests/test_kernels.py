import numpy as np
import pytest

from xxzdrop import kernels
from xxzdrop.graph_core import build_lattice_window
from xxzdrop.sym_product import SymSpace

pytestmark = pytest.mark.skipif(
    "cython" not in kernels.available_backends(), reason="compiled extension not built"
)


def test_chunks_cover_range():
    for total in (0, 1, 7, 100):
        for w in (1, 3, 8):
            parts = kernels.chunks(total, w)
            covered = [i for a, b in parts for i in range(a, b)]
            assert covered == list(range(total))


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.parametrize("family,dims,N", [("path", [12], 5), ("strip", [2, 6], 4),
                                          ("grid2d", [4, 4], 3)])
def test_backend_parity(family, dims, N):
    G = build_lattice_window(family, dims)
    spaces = {b: SymSpace(G, N, backend=b) for b in ("cython", "python")}
    c, p = spaces["cython"], spaces["python"]
    assert np.array_equal(c.configs, p.configs)
    assert np.array_equal(c.surfaces, p.surfaces)
    for a, b in zip(c.neighbor_csr, p.neighbor_csr):
        assert np.array_equal(a, b)
    src = [0, c.dimension // 2]
    assert np.array_equal(c.bfs_from(src), p.bfs_from(src))


@pytest.mark.parametrize("workers", [1, 2, 4])
def test_matvec_bitwise_across_backends_and_workers(workers):
    G = build_lattice_window("grid2d", [4, 4])
    v = np.random.default_rng(9).standard_normal(SymSpace(G, 4).dimension)
    ref = SymSpace(G, 4, backend="python", workers=1).apply_adjacency(v)
    for b in ("cython", "python"):
        out = SymSpace(G, 4, backend=b, workers=workers).apply_adjacency(v)
        assert out.tobytes() == ref.tobytes()
        s = SymSpace(G, 4, backend=b, workers=workers)
        s.neighbor_csr
        assert s.apply_adjacency(v).tobytes() == ref.tobytes()
