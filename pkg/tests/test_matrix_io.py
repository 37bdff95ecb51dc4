import struct

import numpy as np
import pytest

from vistok.errors import IoError, MatrixFormatError
from vistok.matrix_io import decode_matrix, encode_matrix, read_matrix, write_matrix


def test_binary_layout():
    m = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.5]])
    buf = encode_matrix(m)
    assert buf[:4] == b"VTKM"
    assert struct.unpack("<III", buf[4:16]) == (1, 2, 3)
    assert struct.unpack("<6f", buf[16:]) == (1.0, 2.0, 3.0, 4.0, 5.0, 6.5)
    assert np.array_equal(decode_matrix(buf), m)


def test_file_round_trips(tmp_path):
    m = np.random.default_rng(0).standard_normal((7, 3))
    write_matrix(tmp_path / "m.mat", m)
    assert np.allclose(read_matrix(tmp_path / "m.mat"), m, atol=1e-6)
    write_matrix(tmp_path / "m.csv", m)
    assert np.array_equal(read_matrix(tmp_path / "m.csv"), m)


def test_errors(tmp_path):
    with pytest.raises(MatrixFormatError):
        encode_matrix(np.zeros(3))
    with pytest.raises(MatrixFormatError):
        encode_matrix(np.array([[np.inf]]))
    with pytest.raises(MatrixFormatError):
        decode_matrix(b"NOPE" + bytes(12))
    with pytest.raises(MatrixFormatError):
        decode_matrix(encode_matrix(np.zeros((2, 2)))[:-1])
    with pytest.raises(MatrixFormatError):
        decode_matrix(b"VTKM")
    (tmp_path / "bad.csv").write_text("1,2\n3\n")
    with pytest.raises(MatrixFormatError):
        read_matrix(tmp_path / "bad.csv")
    with pytest.raises(IoError):
        read_matrix(tmp_path / "none.mat")
