import numpy as np
import pytest

from dsmkit import gen_pencil
from dsmkit.errors import IoFormatError
from dsmkit.io import (
    format_imaginary,
    matrix_from_doc,
    matrix_to_doc,
    parse_imaginary,
    pencil_from_doc,
    pencil_to_doc,
    sweep_rows_to_csv,
    vector_from_doc,
    vector_to_doc,
)
from helpers import crandn


def test_matrix_round_trip():
    rng = np.random.default_rng(0)
    a = crandn(rng, 3, 4)
    doc = matrix_to_doc(a)
    back = matrix_from_doc(doc)
    assert np.array_equal(a, back)  # value-identical, not just close


def test_vector_round_trip_and_shape_check():
    rng = np.random.default_rng(1)
    v = crandn(rng, 5)
    assert np.array_equal(vector_from_doc(vector_to_doc(v)), v)
    with pytest.raises(IoFormatError):
        vector_from_doc(matrix_to_doc(crandn(rng, 2, 2)))


def test_matrix_doc_errors_name_the_field():
    with pytest.raises(IoFormatError) as err:
        matrix_from_doc({"rows": 2, "cols": 2, "re": [[1, 0], [0, 1]]}, "x")
    assert "im" in err.value.field
    with pytest.raises(IoFormatError) as err:
        matrix_from_doc({"rows": 2, "cols": 2, "re": [[1, 0]], "im": [[0, 0]]}, "x")
    assert err.value.field.startswith("x")
    with pytest.raises(IoFormatError):
        matrix_from_doc(
            {"rows": 1, "cols": 1, "re": [[float("nan")]], "im": [[0.0]]}, "x"
        )


def test_pencil_round_trip():
    p = gen_pencil(3, 2, seed=6)
    doc = pencil_to_doc(p)
    back = pencil_from_doc(doc)
    for blk in ("J", "R", "E", "B", "S"):
        assert np.array_equal(getattr(p, blk), getattr(back, blk))
    doc["n"] = 5
    with pytest.raises(IoFormatError):
        pencil_from_doc(doc)


def test_parse_imaginary():
    assert parse_imaginary("0.5i") == 0.5j
    assert parse_imaginary("-2i") == -2j
    assert parse_imaginary("1.25e-3i") == 1.25e-3j
    for bad in ("0.5", "i", "1+2i", "abc"):
        with pytest.raises(IoFormatError):
            parse_imaginary(bad)


def test_imaginary_round_trip():
    lam = 0.1 + 0.0j
    lam = 1j * 0.30000000000000004
    assert parse_imaginary(format_imaginary(lam)) == lam


def test_csv_round_trip_binary_equal():
    rows = [
        {"lam": 0.5j, "eta_lower": 1.2345678901234567, "eta_upper": 2.000000000000001,
         "finite": True, "conditions": "u3_zero=True"},
        {"lam": 1.5j, "eta_lower": float("inf"), "eta_upper": float("inf"),
         "finite": False, "conditions": "", "error": "lambda rejected, details"},
    ]
    text = sweep_rows_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "lambda,eta_lower,eta_upper,finite,conditions"
    cells = lines[1].split(",")
    assert parse_imaginary(cells[0]) == 0.5j
    assert float(cells[1]) == rows[0]["eta_lower"]  # binary-equal reparse
    assert float(cells[2]) == rows[0]["eta_upper"]
    assert cells[3] == "true"
    cells2 = lines[2].split(",")
    assert float(cells2[1]) == float("inf")
    assert ";" in cells2[4] and len(cells2) == 5  # commas sanitized away
