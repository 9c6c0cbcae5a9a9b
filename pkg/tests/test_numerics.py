import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipnn_opt.exceptions import InvalidInputError
from ipnn_opt.mesh import decompose_clements, mzi_matrix, reconstruct
from ipnn_opt.numerics import fidelity, haar_unitary, is_unitary, random_complex, svd


def test_svd_identity():
    t = svd(np.eye(4))
    np.testing.assert_allclose(t.u, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(t.v, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(t.sigma, [1, 1, 1, 1])


def test_svd_diagonal():
    np.testing.assert_allclose(svd(np.diag([3.0, 2.0, 1.0])).sigma, [3, 2, 1])


def test_svd_random_rectangular(rng):
    m = random_complex(10, 16, rng)
    t = svd(m)
    assert t.u.shape == (10, 10) and t.v.shape == (16, 16)
    assert np.linalg.norm(t.u @ t.sigma_rect() @ t.v.conj().T - m) / np.linalg.norm(m) < 1e-10


def test_svd_phase_convention(rng):
    t = svd(random_complex(6, 9, rng))
    for col in t.u.T:
        peak = col[np.argmax(np.abs(col))]
        assert abs(peak.imag) < 1e-14 and peak.real > 0


def test_svd_is_deterministic(rng):
    m = random_complex(7, 5, rng)
    a, b = svd(m), svd(m.copy())
    assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v) and np.array_equal(a.sigma, b.sigma)


@pytest.mark.parametrize("bad", [np.zeros((0, 3)), np.array([[np.nan, 1.0]]), np.ones(3)])
def test_svd_rejects_bad_input(bad):
    with pytest.raises(InvalidInputError):
        svd(bad)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 16), st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_svd_round_trip(rows, cols, seed):
    m = random_complex(rows, cols, np.random.default_rng(seed))
    t = svd(m)
    assert np.linalg.norm(t.reconstruct() - m) / np.linalg.norm(m) < 1e-10
    assert is_unitary(t.u, 1e-10) and is_unitary(t.v, 1e-10)
    assert np.all(np.diff(t.sigma) <= 0) and np.all(t.sigma >= 0)


def test_is_unitary_cases(rng):
    assert is_unitary(np.eye(4), 1e-12)
    assert not is_unitary(2 * np.eye(4), 1e-12)
    u = reconstruct(decompose_clements(haar_unitary(16, rng)))
    assert is_unitary(u, 1e-10)
    with pytest.raises(InvalidInputError):
        is_unitary(np.ones((2, 3)))


def test_fidelity_examples(rng):
    u = haar_unitary(5, rng)
    assert fidelity(u, u) == pytest.approx(1.0, abs=1e-14)
    assert fidelity(np.eye(2), np.diag([1, -1])) == 0.0
    with pytest.raises(InvalidInputError):
        fidelity(np.eye(2), np.eye(3))


def test_fidelity_mzi_deviation():
    # frozen from a 40-digit mpmath evaluation of the trace formula
    t = mzi_matrix(np.pi / 2, np.pi / 2)
    t_dev = mzi_matrix(np.pi / 2 * 1.1, np.pi / 2 * 1.1)
    assert fidelity(t, t_dev) == pytest.approx(0.98772623483446303792, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_fidelity_bounds_and_invariance(n, seed):
    rng = np.random.default_rng(seed)
    t, t_dev, q = (haar_unitary(n, rng) for _ in range(3))
    f = fidelity(t, t_dev)
    assert -1e-12 <= f <= 1 + 1e-12
    assert fidelity(q @ t, q @ t_dev) == pytest.approx(f, abs=1e-10)
