"""Reflector search over the sign freedom of an SVD.

For a diagonal ``R`` with +/-1 entries, ``U R Sigma (V R_sub)^H`` equals
``U Sigma V^H``, so every reflector gives another mesh programming of the
same weight matrix. The search looks for the one with the smallest total
phase.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import BudgetExceededError, InvalidInputError, NumericalFailureError
from .mesh import TWO_PI, MeshDecomposition, canonical_phase, decompose_clements, reconstruct
from .numerics import as_matrix, rect_diag, svd

EXHAUSTIVE_MAX_DIM = 20


@dataclass(frozen=True)
class Reflector:
    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if any(s not in (1, -1) for s in signs):
            raise InvalidInputError("reflector entries must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    def __len__(self):
        return len(self.signs)

    @classmethod
    def identity(cls, n: int) -> "Reflector":
        return cls((1,) * n)

    @classmethod
    def from_bits(cls, bits) -> "Reflector":
        return cls(tuple(-1 if b else 1 for b in bits))

    @classmethod
    def from_code(cls, code: int, n: int) -> "Reflector":
        # entry 0 is the most significant bit so integer order is lexicographic
        return cls.from_bits([(code >> (n - 1 - j)) & 1 for j in range(n)])

    @property
    def bits(self) -> np.ndarray:
        return np.array([s < 0 for s in self.signs], dtype=np.int64)

    @property
    def code(self) -> int:
        n = len(self.signs)
        return sum(int(b) << (n - 1 - j) for j, b in enumerate(self.bits))

    def as_array(self) -> np.ndarray:
        return np.array(self.signs, dtype=np.float64)

    def __mul__(self, other: "Reflector") -> "Reflector":
        return Reflector(tuple(a * b for a, b in zip(self.signs, other.signs)))


@dataclass(frozen=True)
class LayerFactorization:
    weight: np.ndarray = field(repr=False)
    u_mesh: MeshDecomposition = field(repr=False)
    sigma: np.ndarray
    v_mesh: MeshDecomposition = field(repr=False)
    applied_reflector: Reflector

    @property
    def shape(self) -> tuple:
        return self.weight.shape

    @property
    def reflector_length(self) -> int:
        return max(self.weight.shape)

    @cached_property
    def u(self) -> np.ndarray:
        return reconstruct(self.u_mesh)

    @cached_property
    def v(self) -> np.ndarray:
        return reconstruct(self.v_mesh)

    def sigma_rect(self) -> np.ndarray:
        return rect_diag(self.sigma, *self.weight.shape)

    def reconstruct_weight(self) -> np.ndarray:
        return self.u @ self.sigma_rect() @ self.v.conj().T

    def weight_error(self) -> float:
        return float(np.linalg.norm(self.reconstruct_weight() - self.weight, "fro"))


def factorize(weight) -> LayerFactorization:
    """SVD a weight matrix and program both unitaries as Clements meshes."""
    w = as_matrix(weight)
    t = svd(w)
    return LayerFactorization(
        weight=w,
        u_mesh=decompose_clements(t.u),
        sigma=t.sigma,
        v_mesh=decompose_clements(t.v),
        applied_reflector=Reflector.identity(max(w.shape)),
    )


def from_meshes(u_mesh, sigma, v_mesh, applied_reflector=None) -> LayerFactorization:
    """Build a factorization whose weight is whatever the meshes realize."""
    sigma = np.asarray(sigma, dtype=np.float64)
    n, m = u_mesh.dim, v_mesh.dim
    if applied_reflector is None:
        applied_reflector = Reflector.identity(max(n, m))
    w = reconstruct(u_mesh) @ rect_diag(sigma, n, m) @ reconstruct(v_mesh).conj().T
    return LayerFactorization(w, u_mesh, sigma, v_mesh, applied_reflector)


def _check_reflector(f: LayerFactorization, r) -> Reflector:
    if not isinstance(r, Reflector):
        r = Reflector(tuple(r))
    if len(r) != f.reflector_length:
        raise InvalidInputError(
            f"reflector length {len(r)} does not match max{f.weight.shape} = {f.reflector_length}")
    return r


def apply_reflector(f: LayerFactorization, r) -> LayerFactorization:
    """Reflect ``U -> U R[:n]`` and ``V -> V R[:m]`` and re-decompose both meshes."""
    r = _check_reflector(f, r)
    if all(s == 1 for s in r.signs):
        return f
    n, m = f.weight.shape
    signs = r.as_array()
    u_new = f.u * signs[None, :n]
    v_new = f.v * signs[None, :m]
    return LayerFactorization(
        weight=f.weight,
        u_mesh=decompose_clements(u_new),
        sigma=f.sigma,
        v_mesh=decompose_clements(v_new),
        applied_reflector=f.applied_reflector * r,
    )


def mesh_phase_sum(m: MeshDecomposition) -> float:
    return float(np.sum(m.thetas) + np.sum(m.phis))


def phase_objective(f: LayerFactorization) -> float:
    """Total theta + phi over both meshes; output phase screens are excluded."""
    return mesh_phase_sum(f.u_mesh) + mesh_phase_sum(f.v_mesh)


def predicted_flip_sources(m: MeshDecomposition):
    """For each MZI, the two reflector indices whose signs reach its inputs.

    Pushing a diagonal sign screen through an MZI from its input side gives
    ``T(theta, phi) diag(a, b) = b T(theta, phi + pi [a != b])``, so both
    outputs inherit ``b`` and phi flips by pi exactly when ``a != b``. This
    holds for meshes with every theta strictly inside (0, pi).
    """
    label = list(range(m.dim))
    top, bottom = [], []
    for z in m.mzis:
        p, q = label[z.row], label[z.row + 1]
        top.append(p)
        bottom.append(q)
        label[z.row] = label[z.row + 1] = q
    return top, bottom


def _flip_matrix(u: np.ndarray, mesh: MeshDecomposition) -> np.ndarray:
    """0/1 matrix (MZIs x modes): does negating column j of ``u`` flip phi_k?

    Measured by re-decomposing, so degenerate meshes (theta at 0 or pi,
    where the decomposer's phase convention takes over) are covered too.
    """
    n = mesh.dim
    out = np.zeros((len(mesh.mzis), n), dtype=np.int64)
    for j in range(n):
        signs = np.ones(n)
        signs[j] = -1.0
        d = canonical_phase(decompose_clements(u * signs[None, :]).phis - mesh.phis)
        flipped = np.abs(d - np.pi) < 1e-6
        kept = (d < 1e-6) | (d > TWO_PI - 1e-6)
        if not np.all(flipped | kept):
            raise NumericalFailureError("reflection moved a phi by something other than 0 or pi")
        out[:, j] = flipped
    return out


class ReflectionObjective:
    """``phase_objective(apply_reflector(f, r))`` for many ``r`` without
    re-decomposing each time.

    Each phi either keeps its value or moves by pi, and which one is the
    parity of a fixed subset of reflector bits. The subsets are measured
    once per mode and then spot-checked against full re-decomposition on a
    few random reflectors; if a check fails the evaluator falls back to
    re-decomposing on every call.
    """

    def __init__(self, f: LayerFactorization, n_checks: int = 4):
        self.f = f
        self.length = length = f.reflector_length
        flips, phis, thetas = [], [], []
        for mat, mesh in ((f.u, f.u_mesh), (f.v, f.v_mesh)):
            fm = _flip_matrix(mat, mesh)
            flips.append(np.pad(fm, ((0, 0), (0, length - mesh.dim))))
            phis.append(mesh.phis)
            thetas.append(mesh.thetas)
        self.flip = np.concatenate(flips)
        self.phi0 = np.concatenate(phis)
        self.phi1 = canonical_phase(self.phi0 + np.pi)
        self.theta_sum = float(np.sum(np.concatenate(thetas)))
        weights = np.array([1 << (length - 1 - j) for j in range(length)], dtype=np.int64)
        self.masks = self.flip @ weights
        self.exact = False

        rng = np.random.default_rng(0)
        for _ in range(n_checks):
            bits = rng.integers(0, 2, size=length)
            truth = phase_objective(apply_reflector(f, Reflector.from_bits(bits)))
            if abs(self(bits) - truth) > 1e-8:
                self.exact = True
                break

    def __call__(self, bits) -> float:
        bits = np.asarray(bits, dtype=np.int64)
        if self.exact:
            return phase_objective(apply_reflector(self.f, Reflector.from_bits(bits)))
        odd = (self.flip @ bits) % 2 == 1
        return self.theta_sum + float(np.sum(np.where(odd, self.phi1, self.phi0)))

    def batch(self, codes) -> np.ndarray:
        """Objectives for integer reflector codes (entry 0 = most significant bit)."""
        codes = np.asarray(codes, dtype=np.int64)
        if self.exact:
            return np.array([phase_objective(apply_reflector(self.f, Reflector.from_code(int(c), self.length)))
                             for c in codes])
        total = np.full(codes.shape, self.theta_sum)
        for mask, p0, p1 in zip(self.masks, self.phi0, self.phi1):
            odd = (np.bitwise_count(codes & mask) & 1).astype(bool)
            total += np.where(odd, p1, p0)
        return total


@dataclass(frozen=True)
class AnnealingSchedule:
    t_init: float = 10.0
    alpha: float = 0.8
    epoch: int = 2
    k_max: int = 256
    seed: int = 0

    def __post_init__(self):
        if not self.t_init > 0:
            raise InvalidInputError("t_init must be positive")
        if not 0 < self.alpha < 1:
            raise InvalidInputError("alpha must lie in (0, 1)")
        if self.epoch < 1 or self.k_max < 1:
            raise InvalidInputError("epoch and k_max must be >= 1")

    @classmethod
    def for_dim(cls, dim: int, seed: int = 0) -> "AnnealingSchedule":
        """Default budget: 100 trials up to 10 modes, 256 above."""
        return cls(k_max=100 if dim <= 10 else 256, seed=seed)


# Tuned constants for 10x10 layers.
PRESET_10X10 = AnnealingSchedule(t_init=6.5, alpha=0.8, epoch=2, k_max=100)


@dataclass(frozen=True)
class SearchResult:
    best_reflector: Reflector
    initial_objective: float
    best_objective: float
    trials_used: int
    objective_trace: tuple = ()

    @property
    def reduction_percent(self) -> float:
        if self.initial_objective == 0:
            return 0.0
        return 100.0 * (self.initial_objective - self.best_objective) / self.initial_objective


def exhaustive_search(f: LayerFactorization, chunk: int = 1 << 16) -> SearchResult:
    """Evaluate all 2^L reflectors; ties go to the lexicographically smallest
    sign vector with +1 ordered before -1."""
    length = f.reflector_length
    if length > EXHAUSTIVE_MAX_DIM:
        raise BudgetExceededError(
            f"exhaustive search over 2^{length} reflectors exceeds the 2^{EXHAUSTIVE_MAX_DIM} guard")
    objective = ReflectionObjective(f)
    total = 1 << length
    best_code, best_val = 0, np.inf
    initial = None
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        vals = objective.batch(codes)
        if initial is None:
            initial = float(vals[0])
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_code, best_val = int(codes[i]), float(vals[i])
    return SearchResult(
        best_reflector=Reflector.from_code(best_code, length),
        initial_objective=initial,
        best_objective=best_val,
        trials_used=total,
        objective_trace=((0, initial), (total, best_val)),
    )


def sa_search(f: LayerFactorization, sched: AnnealingSchedule = AnnealingSchedule()) -> SearchResult:
    """Simulated annealing over single-sign flips.

    Starts from a random reflector; every trial flips one random entry and
    draws one uniform number. Downhill moves are always taken, uphill moves
    with probability exp(-delta / T). T is multiplied by ``alpha`` after
    every ``epoch`` trials. The identity reflector (the layer as given)
    seeds the best-so-far so the result is never worse than the input.
    """
    rng = np.random.default_rng(sched.seed)
    objective = ReflectionObjective(f)
    length = objective.length

    bits = rng.integers(0, 2, size=length)
    current = objective(bits)
    initial = objective(np.zeros(length, dtype=np.int64))
    best_bits, best = np.zeros(length, dtype=np.int64), initial
    if current < best:
        best_bits, best = bits.copy(), current
    temperature = sched.t_init
    trace = [(0, current)]

    for trial in range(1, sched.k_max + 1):
        idx = rng.integers(length)
        u = rng.random()
        bits[idx] ^= 1
        proposed = objective(bits)
        delta = proposed - current
        if delta <= 0 or u < np.exp(-delta / temperature):
            current = proposed
            if current < best:
                best_bits, best = bits.copy(), current
        else:
            bits[idx] ^= 1
        trace.append((trial, current))
        if trial % sched.epoch == 0:
            temperature *= sched.alpha

    return SearchResult(
        best_reflector=Reflector.from_bits(best_bits),
        initial_objective=initial,
        best_objective=best,
        trials_used=sched.k_max,
        objective_trace=tuple(trace),
    )


def optimize_layer(f: LayerFactorization, sched: AnnealingSchedule = AnnealingSchedule(),
                   mode: str = "sa"):
    if mode == "sa":
        result = sa_search(f, sched)
    elif mode == "exhaustive":
        result = exhaustive_search(f)
    else:
        raise InvalidInputError(f"unknown search mode {mode!r}")
    return apply_reflector(f, result.best_reflector), result


def optimize_network(layers, sched: AnnealingSchedule = AnnealingSchedule(), mode: str = "sa"):
    """Optimize each layer independently; layer ``k`` uses seed ``sched.seed + k``."""
    out = []
    for k, layer in enumerate(layers):
        layer_sched = AnnealingSchedule(sched.t_init, sched.alpha, sched.epoch, sched.k_max,
                                        sched.seed + k)
        out.append(optimize_layer(layer, layer_sched, mode))
    return out
