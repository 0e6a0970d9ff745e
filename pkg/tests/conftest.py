import numpy as np
import pytest

from xxzdrop import kernels
from xxzdrop.graph_core import build_lattice_window, from_edges, random_connected_graph

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    return request.param


def small_graphs():
    """Named graphs with at most 10 vertices used across modules."""
    rng = np.random.default_rng(7)
    out = {
        "path4": build_lattice_window("path", [4]),
        "path6": build_lattice_window("path", [6]),
        "strip2x3": build_lattice_window("strip", [2, 3]),
        "grid3x3": build_lattice_window("grid2d", [3, 3]),
        "triangle": from_edges(3, [(0, 1), (1, 2), (0, 2)]),
        "star5": from_edges(5, [(0, i) for i in range(1, 5)]),
    }
    for i in range(3):
        out[f"er{i}"] = random_connected_graph(int(rng.integers(5, 9)), 0.45, rng)
    return out


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
