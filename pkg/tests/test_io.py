import json
import struct

import numpy as np
import pytest

from elastocald.closed_ops import assemble_S
from elastocald.geometry import circle
from elastocald.io import FORMAT, read_matrix, write_matrix
from elastocald.material import Material


def test_round_trip_and_layout(tmp_path, rng):
    a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    meta = write_matrix(tmp_path / "a", a, header={"note": "x"}, with_csv=True)
    assert meta["format"] == FORMAT and meta["rows"] == 3 and meta["note"] == "x"
    head, back = read_matrix(tmp_path / "a")
    np.testing.assert_array_equal(back, a)
    raw = (tmp_path / "a.bin").read_bytes()
    assert struct.unpack("<dd", raw[16:32]) == (a[0, 1].real, a[0, 1].imag)
    assert len((tmp_path / "a.csv").read_text().splitlines()) == 13


def test_operator_header(tmp_path):
    op = assemble_S(Material(2.0, 1.0, 1.0, 1.0, 2.0), circle(), 8)
    write_matrix(tmp_path / "s", op)
    head = json.loads((tmp_path / "s.json").read_text())
    assert head["kind"] == "S" and head["n"] == 8 and head["material"]["mu_tilde"] == 1.0
    np.testing.assert_array_equal(read_matrix(tmp_path / "s")[1], op.entries)


def test_corrupt_files_rejected(tmp_path):
    write_matrix(tmp_path / "a", np.eye(2))
    (tmp_path / "a.bin").write_bytes(b"\0" * 8)
    with pytest.raises(ValueError, match="expected"):
        read_matrix(tmp_path / "a")
    meta = json.loads((tmp_path / "a.json").read_text())
    meta["format"] = "other"
    (tmp_path / "a.json").write_text(json.dumps(meta))
    with pytest.raises(ValueError, match="unsupported"):
        read_matrix(tmp_path / "a")
