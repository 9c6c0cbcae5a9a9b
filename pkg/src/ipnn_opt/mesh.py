"""Clements rectangular MZI meshes.

An MZI acting on waveguides ``(row, row + 1)`` has the transfer matrix

    T(theta, phi) = [[e^{i phi} (e^{i theta} - 1) / 2,   i (e^{i theta} + 1) / 2],
                     [i e^{i phi} (e^{i theta} + 1) / 2, -(e^{i theta} - 1) / 2]]

so ``phi`` sits on the top input arm and ``theta`` on the internal arm.

Mesh layout: column ``c`` holds the MZIs whose top row has the parity of
``c``; an N-mode mesh has N columns and N(N-1)/2 MZIs. MZIs are stored
column-major (ascending column, then ascending row), which is also the
order light traverses them. The reconstructed unitary is

    U = diag(e^{i output_phases}) @ M_{N-1} @ ... @ M_0

with ``M_c`` the product of the embedded MZIs in column ``c``.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InvalidInputError
from .numerics import as_matrix, fidelity, unitarity_defect

TWO_PI = 2.0 * np.pi
# Phases this close below 2*pi are folded onto 0 so rounding noise cannot
# turn a zero phase into a full turn.
WRAP_SNAP = 1e-10
_TINY = 1e-13


def canonical_phase(x):
    """Map phases into [0, 2*pi). Works on scalars and arrays."""
    p = np.mod(x, TWO_PI)
    if np.ndim(p) == 0:
        p = float(p)
        return 0.0 if p >= TWO_PI - WRAP_SNAP else p
    p = np.asarray(p, dtype=np.float64)
    return np.where(p >= TWO_PI - WRAP_SNAP, 0.0, p)


@dataclass(frozen=True)
class MziPhase:
    theta: float
    phi: float
    row: int
    column: int

    def __post_init__(self):
        object.__setattr__(self, "theta", canonical_phase(self.theta))
        object.__setattr__(self, "phi", canonical_phase(self.phi))


@dataclass(frozen=True)
class PhaseDeviation:
    delta_rel: float


def mzi_matrix(theta: float, phi: float) -> np.ndarray:
    et = np.exp(1j * theta)
    ep = np.exp(1j * phi)
    return np.array([
        [ep * (et - 1) / 2, 1j * (et + 1) / 2],
        [1j * ep * (et + 1) / 2, -(et - 1) / 2],
    ])


def mzi_transfer(p: MziPhase) -> np.ndarray:
    return mzi_matrix(p.theta, p.phi)


def deviate(p: MziPhase, d: PhaseDeviation) -> MziPhase:
    scale = 1.0 + d.delta_rel
    return MziPhase(p.theta * scale, p.phi * scale, p.row, p.column)


def mesh_slots(n: int) -> list[tuple[int, int]]:
    """(column, row) positions of a rectangular n-mode mesh, storage order."""
    return [(c, r) for c in range(n) for r in range(c % 2, n - 1, 2)]


@dataclass(frozen=True, eq=False)
class MeshDecomposition:
    dim: int
    mzis: tuple
    output_phases: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mzis", tuple(self.mzis))
        out = canonical_phase(np.asarray(self.output_phases, dtype=np.float64).reshape(-1))
        out.setflags(write=False)
        object.__setattr__(self, "output_phases", out)
        if len(out) != self.dim:
            raise InvalidInputError(f"expected {self.dim} output phases, got {len(out)}")
        if len(self.mzis) != self.dim * (self.dim - 1) // 2:
            raise InvalidInputError(
                f"a {self.dim}-mode mesh needs {self.dim * (self.dim - 1) // 2} MZIs, got {len(self.mzis)}")
        slots = [(m.column, m.row) for m in self.mzis]
        if slots != mesh_slots(self.dim):
            raise InvalidInputError("MZI positions do not follow the rectangular column-major layout")

    def __eq__(self, other):
        if not isinstance(other, MeshDecomposition):
            return NotImplemented
        return (self.dim == other.dim and self.mzis == other.mzis
                and np.array_equal(self.output_phases, other.output_phases))

    __hash__ = None

    @property
    def thetas(self) -> np.ndarray:
        return np.array([m.theta for m in self.mzis], dtype=np.float64)

    @property
    def phis(self) -> np.ndarray:
        return np.array([m.phi for m in self.mzis], dtype=np.float64)

    def with_phases(self, thetas, phis) -> "MeshDecomposition":
        mzis = [MziPhase(t, p, m.row, m.column) for m, t, p in zip(self.mzis, thetas, phis)]
        return replace(self, mzis=tuple(mzis))


def reconstruct(m: MeshDecomposition) -> np.ndarray:
    u = np.eye(m.dim, dtype=np.complex128)
    for z in m.mzis:
        r = z.row
        u[r:r + 2, :] = mzi_matrix(z.theta, z.phi) @ u[r:r + 2, :]
    return np.exp(1j * m.output_phases)[:, None] * u


def _null_from_right(u0, u1):
    """(theta, phi) such that ``[u0, u1] @ T^H`` has a zero first entry."""
    a0, a1 = abs(u0), abs(u1)
    if a0 < _TINY:
        return np.pi, 0.0
    theta = 2.0 * np.arctan2(a1, a0)
    phi = np.angle(-np.conj(u1) * u0) if a1 >= _TINY else 0.0
    return theta, phi


def _null_from_left(u0, u1):
    """(theta, phi) such that ``T @ [u0, u1]^T`` has a zero second entry."""
    a0, a1 = abs(u0), abs(u1)
    if a1 < _TINY:
        return np.pi, 0.0
    theta = 2.0 * np.arctan2(a0, a1)
    phi = np.angle(u1 * np.conj(u0)) if a0 >= _TINY else 0.0
    return theta, phi


def _split_2x2(w):
    """Factor a 2x2 unitary as ``diag(e^{i a}, e^{i b}) @ T(theta, phi)``.

    Returns (theta, phi, a, b) with theta in [0, pi].
    """
    theta = 2.0 * np.arctan2(abs(w[0, 0]), abs(w[0, 1]))
    et = np.exp(1j * theta)
    s = (et - 1) / 2
    c = 1j * (et + 1) / 2
    a = np.angle(w[0, 1] / c) if abs(c) > _TINY else 0.0
    phi = np.angle(w[0, 0] / (np.exp(1j * a) * s)) if abs(s) > _TINY else 0.0
    if abs(s) > _TINY:
        b = np.angle(w[1, 1] / -s)
    else:
        b = np.angle(w[1, 0] / (np.exp(1j * phi) * c))
    return theta, phi, a, b


def _assign_columns(ops, n):
    """Place MZIs given in application order onto the earliest free column
    of matching parity without reordering any two that share a waveguide."""
    front = [-1] * n  # last occupied column per waveguide
    placed = []
    for theta, phi, r in ops:
        col = max(front[r], front[r + 1]) + 1
        if col % 2 != r % 2:
            col += 1
        front[r] = front[r + 1] = col
        placed.append(MziPhase(theta, phi, r, col))
    placed.sort(key=lambda z: (z.column, z.row))
    return placed


def decompose_clements(u, tol: float = 1e-8) -> MeshDecomposition:
    """Clements decomposition of a unitary into a rectangular MZI mesh.

    Off-diagonal entries are nulled along alternating anti-diagonals, by
    column operations ``W @ T^H`` and row operations ``T @ W``. The row
    operations are then pushed through the residual diagonal using
    ``T^H D = D' T'`` so every MZI ends up to the right of one phase screen.
    """
    w = as_matrix(u)
    n = w.shape[0]
    defect = unitarity_defect(w)
    if defect > tol:
        raise InvalidInputError(f"matrix is not unitary (defect {defect:.3e} > {tol:.1e})", )

    right_ops, left_ops = [], []
    for i in range(1, n):
        if i % 2 == 1:
            for j in range(i):
                r, k = n - 1 - j, i - 1 - j
                theta, phi = _null_from_right(w[r, k], w[r, k + 1])
                w[:, k:k + 2] = w[:, k:k + 2] @ mzi_matrix(theta, phi).conj().T
                right_ops.append((theta, phi, k))
        else:
            for j in range(1, i + 1):
                r, c = n - 1 + j - i, j - 1
                theta, phi = _null_from_left(w[r - 1, c], w[r, c])
                w[r - 1:r + 1, :] = mzi_matrix(theta, phi) @ w[r - 1:r + 1, :]
                left_ops.append((theta, phi, r - 1))

    d = np.diag(w).copy()
    moved = []
    for theta, phi, k in reversed(left_ops):
        block = mzi_matrix(theta, phi).conj().T * d[k:k + 2][None, :]
        t2, p2, a, b = _split_2x2(block)
        d[k], d[k + 1] = np.exp(1j * a), np.exp(1j * b)
        moved.append((t2, p2, k))

    mzis = _assign_columns(right_ops + moved, n)
    return MeshDecomposition(dim=n, mzis=tuple(mzis), output_phases=np.angle(d))


def deviate_mesh(m: MeshDecomposition, noise) -> MeshDecomposition:
    """Substitute per-MZI ``(theta, phi)`` pairs; output phases are kept."""
    noise = list(noise)
    if len(noise) != len(m.mzis):
        raise InvalidInputError(f"need {len(m.mzis)} phase pairs, got {len(noise)}")
    thetas = [t for t, _ in noise]
    phis = [p for _, p in noise]
    return m.with_phases(thetas, phis)


def fidelity_surface(delta_rel: float, grid: int = 64):
    """Rows of (theta, phi, 1/F) over a ``grid x grid`` lattice on [0, 2*pi)^2."""
    if grid < 2:
        raise InvalidInputError("grid needs at least 2 points per axis")
    axis = TWO_PI * np.arange(grid) / grid
    scale = 1.0 + delta_rel
    rows = []
    for theta in axis:
        for phi in axis:
            f = fidelity(mzi_matrix(theta, phi), mzi_matrix(theta * scale, phi * scale))
            rows.append((float(theta), float(phi), 1.0 / f))
    return rows
