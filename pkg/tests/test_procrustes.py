import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vistok.analysis import layerwise_procrustes, procrustes, random_orthogonal
from vistok.analysis.procrustes import residual
from vistok.errors import ShapeMismatch


def test_identity():
    X = np.random.default_rng(0).standard_normal((20, 6))
    r = procrustes(X, X)
    assert r.residual_norm <= 1e-8
    assert np.allclose(r.R, np.eye(6), atol=1e-8)


def test_noise_bound():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((40, 3))
    noise = 1e-2 * rng.standard_normal((40, 3))
    assert procrustes(X, X + noise).residual_norm <= np.linalg.norm(noise) + 1e-12


def test_reflection_allowed():
    X = np.random.default_rng(2).standard_normal((10, 2))
    F = np.diag([1.0, -1.0])
    r = procrustes(X, X @ F)
    assert r.residual_norm <= 1e-10 and np.linalg.det(r.R) == pytest.approx(-1.0)


def test_shape_errors():
    with pytest.raises(ShapeMismatch):
        procrustes(np.zeros((3, 2)), np.zeros((3, 3)))
    with pytest.raises(ShapeMismatch):
        procrustes(np.zeros(3), np.zeros(3))
    with pytest.raises(ShapeMismatch):
        procrustes(np.full((2, 2), np.nan), np.zeros((2, 2)))


def test_layerwise_indices():
    rng = np.random.default_rng(3)
    pairs = [(rng.standard_normal((8, 3)), rng.standard_normal((8, 3))) for _ in range(4)]
    out = layerwise_procrustes(pairs)
    assert [r.layer_index for r in out] == [0, 1, 2, 3]
    assert all(r.residual_norm == pytest.approx(residual(x, y, r.R)) for r, (x, y) in zip(out, pairs))


def test_random_orthogonal():
    Q = random_orthogonal(3, 50, seed=4)
    assert Q.shape == (50, 3, 3)
    assert np.allclose(np.einsum("nij,nik->njk", Q, Q), np.eye(3), atol=1e-12)
    assert np.array_equal(Q, random_orthogonal(3, 50, seed=4))
    assert set(np.unique(random_orthogonal(1, 20, seed=0))) <= {-1.0, 1.0}


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31), rows=st.integers(1, 12), cols=st.integers(1, 5))
def test_orthogonality_and_optimality(seed, rows, cols):
    rng = np.random.default_rng(seed)
    X, Y = rng.standard_normal((rows, cols)), rng.standard_normal((rows, cols))
    r = procrustes(X, Y)
    assert r.orthogonality_error <= 1e-6
    for Q in random_orthogonal(cols, 50, seed=seed):
        assert r.residual_norm <= residual(X, Y, Q) + 1e-9
