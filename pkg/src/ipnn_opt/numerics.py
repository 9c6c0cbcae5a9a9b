"""Dense complex matrix helpers: validated construction, SVD with a fixed
phase convention, unitarity checks and the trace fidelity."""
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, NumericalFailureError

DEFAULT_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite 2-D complex128 array (copied)."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {a.shape}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise InvalidInputError("matrix has a zero dimension")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class SvdTriple:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray  # V itself, not V^H

    def sigma_rect(self) -> np.ndarray:
        return rect_diag(self.sigma, self.u.shape[0], self.v.shape[0])

    def reconstruct(self) -> np.ndarray:
        return self.u @ self.sigma_rect() @ self.v.conj().T


def rect_diag(sigma, rows: int, cols: int) -> np.ndarray:
    s = np.zeros((rows, cols), dtype=np.complex128)
    k = min(rows, cols, len(sigma))
    s[np.arange(k), np.arange(k)] = np.asarray(sigma)[:k]
    return s


def _unit_phase_of_peak(col: np.ndarray) -> complex:
    peak = col[np.argmax(np.abs(col))]
    return peak / abs(peak)


def svd(m) -> SvdTriple:
    """Full SVD ``m = u @ diag(sigma) @ v^H`` with square unitary factors.

    Each column of ``u`` is rotated so that its largest-magnitude entry is
    real and positive; the paired column of ``v`` gets the same rotation so
    the product is unchanged. Columns of ``v`` without a partner in ``u``
    are normalized the same way on their own.
    """
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    v = vh.conj().T
    k = len(s)
    for j in range(u.shape[1]):
        ph = _unit_phase_of_peak(u[:, j])
        u[:, j] *= np.conj(ph)
        if j < k:
            v[:, j] *= np.conj(ph)
    for j in range(k, v.shape[1]):
        v[:, j] *= np.conj(_unit_phase_of_peak(v[:, j]))
    return SvdTriple(u=u, sigma=s.astype(np.float64), v=v)


def unitarity_defect(m) -> float:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"unitarity needs a square matrix, got {a.shape}")
    return float(np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0]), "fro"))


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    return unitarity_defect(m) <= tol


def fidelity(t, t_dev) -> float:
    """``|Tr(t_dev^H t) / N|^2``."""
    t = as_matrix(t)
    t_dev = as_matrix(t_dev)
    if t.shape != t_dev.shape or t.shape[0] != t.shape[1]:
        raise InvalidInputError(
            f"fidelity needs equal square matrices, got {t.shape} and {t_dev.shape}")
    n = t.shape[0]
    return float(abs(np.vdot(t_dev, t) / n) ** 2)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_complex(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
