import json
import math

import numpy as np
import scipy.sparse as sp
from hypothesis import given, strategies as st

from xxzdrop.artifacts import dumps, fmt, spectrum_csv, triplets, write_json


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips(x):
    assert float(fmt(x)) == x


def test_fmt_specials():
    assert fmt(math.inf) == "Infinity" and fmt(-math.inf) == "-Infinity" and fmt(math.nan) == "NaN"


def test_dumps_sorted_and_parseable():
    obj = {"b": [1, 2.5, np.float64(0.1)], "a": {"z": None, "y": True}, "c": np.arange(3)}
    text = dumps(obj)
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    back = json.loads(text)
    assert back["b"][2] == 0.1 and back["c"] == [0, 1, 2] and back["a"]["y"] is True
    assert dumps({"x": math.inf}).strip().endswith("Infinity\n}".strip())


def test_dumps_rejects_objects():
    import pytest

    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_spectrum_csv():
    text = spectrum_csv([0.1, 1 / 3])
    assert text.splitlines() == ["index,eigenvalue", "0,0.10000000000000001", "1,0.33333333333333331"]


def test_triplets_row_major():
    M = sp.csr_matrix(np.array([[0, 2.0], [0.5, 0]]))
    assert triplets(M) == "0 1 2\n1 0 0.5\n"


def test_write_json(tmp_path):
    p = write_json(tmp_path / "a" / "b.json", {"v": 1})
    assert json.loads(p.read_text()) == {"v": 1}
