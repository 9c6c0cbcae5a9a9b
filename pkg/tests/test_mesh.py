import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipnn_opt.exceptions import InvalidInputError
from ipnn_opt.mesh import (MeshDecomposition, MziPhase, PhaseDeviation, canonical_phase,
                           decompose_clements, deviate, deviate_mesh, fidelity_surface,
                           mesh_slots, mzi_transfer, reconstruct)
from ipnn_opt.numerics import fidelity, haar_unitary, is_unitary


def _formula(theta, phi):
    # written out with cos/sin so it does not share code with mzi_matrix
    et = complex(math.cos(theta), math.sin(theta))
    ep = cmath.rect(1.0, phi)
    return np.array([[ep * (et - 1) / 2, 1j * (et + 1) / 2],
                     [1j * ep * (et + 1) / 2, -(et - 1) / 2]])


def test_mzi_transfer_fixed_points():
    np.testing.assert_allclose(mzi_transfer(MziPhase(0, 0, 0, 0)), [[0, 1j], [1j, 0]], atol=1e-16)
    np.testing.assert_allclose(mzi_transfer(MziPhase(np.pi, 0, 0, 0)), [[-1, 0], [0, 1]], atol=1e-15)


def test_mzi_transfer_matches_formula():
    t = mzi_transfer(MziPhase(np.pi / 2, np.pi / 3, 0, 0))
    np.testing.assert_allclose(t, _formula(np.pi / 2, np.pi / 3), atol=1e-15)
    assert is_unitary(t, 1e-12)


def test_mzi_transfer_unitary_everywhere():
    rng = np.random.default_rng(7)
    for theta, phi in rng.uniform(0, 2 * np.pi, size=(1000, 2)):
        assert is_unitary(mzi_transfer(MziPhase(theta, phi, 0, 0)), 1e-12)


@pytest.mark.parametrize("theta,phi,d,expected", [
    (0.0, 0.0, 0.1, (0.0, 0.0)),
    (1.0, 2.0, 0.05, (1.05, 2.10)),
    (np.pi, 1.5 * np.pi, -0.01, (0.99 * np.pi, 1.485 * np.pi)),
])
def test_deviate(theta, phi, d, expected):
    p = deviate(MziPhase(theta, phi, 3, 2), PhaseDeviation(d))
    assert (p.theta, p.phi) == pytest.approx(expected, abs=1e-14)
    assert (p.row, p.column) == (3, 2)


@given(st.floats(0, 2 * np.pi, exclude_max=True), st.floats(0, 2 * np.pi, exclude_max=True))
def test_deviate_zero_is_identity(theta, phi):
    p = MziPhase(theta, phi, 0, 0)
    assert deviate(p, PhaseDeviation(0.0)) == p


def test_canonical_phase_snaps_full_turn():
    assert canonical_phase(-1e-17) == 0.0
    assert canonical_phase(2 * np.pi) == 0.0
    assert canonical_phase(-np.pi / 2) == pytest.approx(1.5 * np.pi)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_mesh_layout(n):
    slots = mesh_slots(n)
    assert len(slots) == n * (n - 1) // 2
    assert all(r % 2 == c % 2 and 0 <= r <= n - 2 and 0 <= c < n for c, r in slots)


def test_decompose_identity():
    m = decompose_clements(np.eye(4))
    assert len(m.mzis) == 6
    for z in m.mzis:
        t = mzi_transfer(z)
        assert abs(t[0, 1]) < 1e-15 and abs(t[1, 0]) < 1e-15  # bar state
    assert np.linalg.norm(reconstruct(m) - np.eye(4)) < 1e-12


def test_decompose_cross_state():
    m = decompose_clements(np.array([[0, 1j], [1j, 0]]))
    assert len(m.mzis) == 1
    assert (m.mzis[0].theta, m.mzis[0].phi) == (0.0, 0.0)
    np.testing.assert_array_equal(m.output_phases, [0.0, 0.0])


def test_reconstruct_single_mzi():
    m = MeshDecomposition(2, (MziPhase(np.pi, 0, 0, 0),), np.zeros(2))
    np.testing.assert_allclose(reconstruct(m), [[-1, 0], [0, 1]], atol=1e-15)


@pytest.mark.parametrize("n", [10, 16])
def test_decompose_random(n, rng):
    u = haar_unitary(n, rng)
    m = decompose_clements(u)
    assert len(m.mzis) == n * (n - 1) // 2
    assert np.linalg.norm(reconstruct(m) - u) < 1e-10


def test_decompose_rejects_non_unitary():
    with pytest.raises(InvalidInputError, match="defect"):
        decompose_clements(2 * np.eye(3))


def test_mesh_validates_layout():
    with pytest.raises(InvalidInputError):
        MeshDecomposition(3, (MziPhase(0, 0, 0, 0),), np.zeros(3))
    with pytest.raises(InvalidInputError):
        MeshDecomposition(2, (MziPhase(0, 0, 0, 1),), np.zeros(2))


def _phase_gap(a, b):
    return np.max(np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b))))), initial=0.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_round_trips(n, seed):
    rng = np.random.default_rng(seed)
    u = haar_unitary(n, rng)
    m = decompose_clements(u)
    assert np.linalg.norm(reconstruct(m) - u) < 1e-10
    back = decompose_clements(reconstruct(m))
    assert _phase_gap(back.thetas, m.thetas) < 1e-9
    assert _phase_gap(back.phis, m.phis) < 1e-9
    assert _phase_gap(back.output_phases, m.output_phases) < 1e-9


def test_deviate_mesh(rng):
    m = decompose_clements(haar_unitary(8, rng))
    same = deviate_mesh(m, [(z.theta, z.phi) for z in m.mzis])
    assert same == m
    dev = deviate_mesh(m, [(z.theta * 1.1, z.phi * 1.1) for z in m.mzis])
    assert fidelity(reconstruct(m), reconstruct(dev)) < 1
    np.testing.assert_array_equal(dev.output_phases, m.output_phases)
    with pytest.raises(InvalidInputError):
        deviate_mesh(m, [(0.0, 0.0)])


def test_deviation_on_zero_phases_is_harmless():
    m = decompose_clements(np.array([[0, 1j], [1j, 0]]))
    dev = deviate_mesh(m, [(z.theta * 1.1, z.phi * 1.1) for z in m.mzis])
    assert fidelity(reconstruct(m), reconstruct(dev)) == 1.0


def _surface_grid(delta, grid):
    rows = np.array(fidelity_surface(delta, grid))
    return rows[:, 2].reshape(grid, grid)


def test_fidelity_surface_origin_and_shape():
    rows = fidelity_surface(0.1, 8)
    assert len(rows) == 64
    assert rows[0] == (0.0, 0.0, 1.0)
    with pytest.raises(InvalidInputError):
        fidelity_surface(0.1, 1)


def test_fidelity_surface_ordering():
    big, small = _surface_grid(0.1, 32), _surface_grid(0.01, 32)
    assert np.all(small <= big + 1e-12)
    assert np.unravel_index(np.argmax(big), big.shape)[0] >= 16  # peak in the high-theta half
    assert big[16:, 16:].mean() > big[:16, :16].mean()
