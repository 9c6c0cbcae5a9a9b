"""Multi-layer coherent network built from factorized layers, phase-noise
injection and accuracy-loss Monte Carlo."""
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError
from .mesh import TWO_PI, reconstruct
from .reflect import LayerFactorization, factorize, from_meshes, phase_objective
from .numerics import rect_diag

ACTIVATIONS = ("none", "modulus-relu", "modulus-squared")


def activate(z: np.ndarray, kind: str, threshold: float = 0.0) -> np.ndarray:
    if kind == "none":
        return z
    mag = np.abs(z)
    if kind == "modulus-relu":
        # shrink |z| by the threshold, keep the phase
        scale = np.divide(np.maximum(mag - threshold, 0.0), mag,
                          out=np.zeros_like(mag), where=mag > 0)
        return z * scale
    if kind == "modulus-squared":
        return (mag ** 2).astype(np.complex128)
    raise InvalidInputError(f"unknown activation {kind!r}")


@dataclass(frozen=True)
class Ipnn:
    layers: tuple
    activation: str = "modulus-relu"
    threshold: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise InvalidInputError("network needs at least one layer")
        if self.activation not in ACTIVATIONS:
            raise InvalidInputError(f"unknown activation {self.activation!r}")
        for k in range(1, len(self.layers)):
            if self.layers[k].shape[1] != self.layers[k - 1].shape[0]:
                raise InvalidInputError(
                    f"layer {k} takes {self.layers[k].shape[1]} inputs but layer {k - 1} "
                    f"emits {self.layers[k - 1].shape[0]}")

    @property
    def input_dim(self) -> int:
        return self.layers[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1].shape[0]

    def with_layers(self, layers) -> "Ipnn":
        return Ipnn(tuple(layers), self.activation, self.threshold)


def layer_matrix(f: LayerFactorization) -> np.ndarray:
    """The matrix the meshes realize (not the stored nominal weight)."""
    return reconstruct(f.u_mesh) @ rect_diag(f.sigma, *f.shape) @ reconstruct(f.v_mesh).conj().T


def from_weights(weights, activation: str = "modulus-relu", threshold: float = 0.1) -> Ipnn:
    return Ipnn(tuple(factorize(w) for w in weights), activation, threshold)


def forward(net: Ipnn, x) -> np.ndarray:
    """Propagate one input vector, or a batch with samples along axis 0."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[-1] != net.input_dim:
        raise InvalidInputError(f"input has length {x.shape[-1]}, network expects {net.input_dim}")
    y = x
    last = len(net.layers) - 1
    for k, layer in enumerate(net.layers):
        y = y @ layer_matrix(layer).T
        if k != last:
            y = activate(y, net.activation, net.threshold)
    return y


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray = field(repr=False)
    labels: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.inputs, dtype=np.complex128))
        y = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(x) != len(y):
            raise InvalidInputError(f"{len(x)} inputs but {len(y)} labels")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "labels", y)

    def __len__(self):
        return len(self.labels)

    @classmethod
    def from_pairs(cls, pairs) -> "Dataset":
        pairs = list(pairs)
        if not pairs:
            raise InvalidInputError("dataset is empty")
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))


def predict(net: Ipnn, inputs) -> np.ndarray:
    return np.argmax(np.abs(forward(net, inputs)) ** 2, axis=-1)


def classify(net: Ipnn, dataset) -> float:
    if not isinstance(dataset, Dataset):
        dataset = Dataset.from_pairs(dataset)
    if len(dataset) == 0:
        raise InvalidInputError("dataset is empty")
    return float(np.mean(predict(net, dataset.inputs) == dataset.labels))


@dataclass(frozen=True)
class GaussianPhaseNoise:
    sigma_rel: float
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.sigma_rel) and self.sigma_rel >= 0):
            raise InvalidInputError("sigma_rel must be finite and >= 0")


@dataclass(frozen=True)
class Ranked:
    """Perturb the top ``f_high`` and bottom ``f_low`` percent of each layer's
    phases (all thetas and phis of both meshes, ranked descending)."""
    f_high: float
    f_low: float

    def __post_init__(self):
        if not (0 <= self.f_high <= 100 and 0 <= self.f_low <= 100):
            raise InvalidInputError("f_high and f_low are percentages in [0, 100]")
        if self.f_high + self.f_low > 100:
            raise InvalidInputError("f_high + f_low must not exceed 100")


@dataclass(frozen=True)
class RankedPerturbationSpec:
    f_high: float
    f_low: float
    noise: GaussianPhaseNoise
    iterations: int = 10

    def __post_init__(self):
        Ranked(self.f_high, self.f_low)
        if self.iterations < 1:
            raise InvalidInputError("iterations must be >= 1")


def layer_phases(f: LayerFactorization) -> np.ndarray:
    """Layer phase pool: U thetas, U phis, V thetas, V phis."""
    return np.concatenate([f.u_mesh.thetas, f.u_mesh.phis, f.v_mesh.thetas, f.v_mesh.phis])


def _with_layer_phases(f: LayerFactorization, pool: np.ndarray) -> LayerFactorization:
    ku, kv = len(f.u_mesh.mzis), len(f.v_mesh.mzis)
    u_t, u_p, v_t, v_p = np.split(pool, [ku, 2 * ku, 2 * ku + kv])
    return from_meshes(f.u_mesh.with_phases(u_t, u_p), f.sigma,
                       f.v_mesh.with_phases(v_t, v_p), f.applied_reflector)


def _selected(pool: np.ndarray, selection) -> np.ndarray:
    mask = np.zeros(len(pool), dtype=bool)
    if selection is None:
        mask[:] = True
        return mask
    order = np.argsort(-pool, kind="stable")
    n_high = int(np.floor(selection.f_high / 100.0 * len(pool)))
    n_low = int(np.floor(selection.f_low / 100.0 * len(pool)))
    mask[order[:n_high]] = True
    if n_low:
        mask[order[len(pool) - n_low:]] = True
    return mask


def perturb_network(net: Ipnn, noise: GaussianPhaseNoise, selection=None, rng=None) -> Ipnn:
    """Replace selected phases ``mu`` by draws from N(mu, (sigma_rel * mu)^2).

    ``selection`` is None (every phase) or a :class:`Ranked`. One standard
    normal is drawn for every phase of every layer whether or not it is
    selected, so two networks of equal shape see paired noise for a seed.
    """
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    layers = []
    for f in net.layers:
        pool = layer_phases(f)
        z = rng.standard_normal(len(pool))
        mask = _selected(pool, selection)
        if noise.sigma_rel == 0 or not mask.any():
            layers.append(f)
            continue
        new = np.where(mask, pool * (1.0 + noise.sigma_rel * z), pool)
        layers.append(_with_layer_phases(f, new))
    return net.with_layers(layers)


def iteration_rng(seed: int, iteration: int) -> np.random.Generator:
    return np.random.default_rng([seed, iteration])


@dataclass(frozen=True)
class AccuracyReport:
    nominal_accuracy: float
    mean_loss: float
    std_loss: float
    per_iteration_losses: tuple

    @classmethod
    def from_losses(cls, nominal, losses) -> "AccuracyReport":
        losses = np.asarray(losses, dtype=np.float64)
        return cls(float(nominal), float(np.mean(losses)), float(np.std(losses)),
                   tuple(float(v) for v in losses))


def accuracy_loss_report(net: Ipnn, dataset: Dataset, noise: GaussianPhaseNoise,
                         selection=None, iterations: int = 10) -> AccuracyReport:
    """Accuracy loss in percentage points over seeded noise scenarios.

    Scenario ``i`` draws from a generator seeded with ``(noise.seed, i)``.
    """
    nominal = classify(net, dataset)
    losses = []
    for i in range(iterations):
        noisy = perturb_network(net, noise, selection, rng=iteration_rng(noise.seed, i))
        losses.append(100.0 * (nominal - classify(noisy, dataset)))
    return AccuracyReport.from_losses(nominal, losses)


def ranked_report(net: Ipnn, dataset: Dataset, spec: RankedPerturbationSpec) -> AccuracyReport:
    return accuracy_loss_report(net, dataset, spec.noise, Ranked(spec.f_high, spec.f_low),
                                spec.iterations)


def max_weight_distance(a: Ipnn, b: Ipnn) -> float:
    if len(a.layers) != len(b.layers):
        return np.inf
    dist = 0.0
    for la, lb in zip(a.layers, b.layers):
        if la.shape != lb.shape:
            return np.inf
        dist = max(dist, float(np.linalg.norm(layer_matrix(la) - layer_matrix(lb), "fro")))
    return dist


@dataclass(frozen=True)
class SweepPoint:
    sigma_rel: float
    conventional: AccuracyReport
    optimized: AccuracyReport

    @property
    def loss_reduction(self) -> float:
        """Drop in mean accuracy loss, percentage points."""
        return self.conventional.mean_loss - self.optimized.mean_loss

    @property
    def loss_reduction_percent(self) -> float:
        """Drop in mean accuracy loss relative to the conventional loss."""
        if self.conventional.mean_loss == 0:
            return 0.0
        return 100.0 * self.loss_reduction / self.conventional.mean_loss


def robustness_sweep(net_conventional: Ipnn, net_optimized: Ipnn, dataset: Dataset,
                     sigma_rels, iterations: int = 10, seed: int = 0, tol: float = 1e-8):
    """Paired sweep: at every sigma both networks see the same seeds."""
    dist = max_weight_distance(net_conventional, net_optimized)
    if not dist < tol:
        raise InvalidInputError(f"networks realize different weights (distance {dist:.3e})")
    out = []
    for sigma in sigma_rels:
        noise = GaussianPhaseNoise(float(sigma), seed)
        out.append(SweepPoint(
            float(sigma),
            accuracy_loss_report(net_conventional, dataset, noise, None, iterations),
            accuracy_loss_report(net_optimized, dataset, noise, None, iterations),
        ))
    return out


@dataclass(frozen=True)
class PhaseHistogram:
    edges: np.ndarray
    counts: np.ndarray
    layer_medians: tuple
    layer_means: tuple
    layer_sums: tuple

    @property
    def total(self) -> float:
        return float(sum(self.layer_sums))

    @property
    def mean(self) -> float:
        n = int(self.counts.sum())
        return self.total / n if n else 0.0


def phase_histogram(net: Ipnn, bins: int = 32) -> PhaseHistogram:
    if bins < 1:
        raise InvalidInputError("bins must be >= 1")
    pools = [layer_phases(f) for f in net.layers]
    everything = np.concatenate(pools)
    counts, edges = np.histogram(everything, bins=bins, range=(0.0, TWO_PI))
    return PhaseHistogram(
        edges=edges,
        counts=counts,
        layer_medians=tuple(float(np.median(p)) if len(p) else 0.0 for p in pools),
        layer_means=tuple(float(np.mean(p)) if len(p) else 0.0 for p in pools),
        layer_sums=tuple(float(phase_objective(f)) for f in net.layers),
    )


def make_teacher(dims, samples: int, margin: float = 0.05, seed: int = 0,
                 classes=None, activation: str = "modulus-relu", threshold: float = 0.1,
                 max_draw_factor: int = 200):
    """Random reference network plus a dataset it labels itself.

    Layer ``k`` maps ``dims[k]`` inputs to ``dims[k+1]`` outputs with complex
    Gaussian weights scaled by ``1/sqrt(dims[k])``. Inputs are complex
    Gaussian; a sample is kept only when the winning output power beats the
    runner-up by at least ``margin`` (relative to the winner), and only while
    its class still has room, so every class gets ``samples // classes``
    (plus one for the first ``samples % classes`` classes).
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2 or min(dims) < 1:
        raise InvalidInputError("dims needs at least two positive entries")
    if classes is None:
        classes = dims[-1]
    if classes != dims[-1]:
        raise InvalidInputError(f"classes ({classes}) must equal the output width ({dims[-1]})")
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    if not 0 <= margin < 1:
        raise InvalidInputError("margin must lie in [0, 1)")

    rng = np.random.default_rng(seed)
    weights = []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        w = (rng.standard_normal((n_out, n_in)) + 1j * rng.standard_normal((n_out, n_in)))
        weights.append(w / np.sqrt(2 * n_in))
    net = from_weights(weights, activation, threshold)

    # equal class counts, so a scrambled network scores chance (1/classes)
    quota = np.full(classes, samples // classes)
    quota[: samples % classes] += 1
    kept_x = [[] for _ in range(classes)]
    filled = np.zeros(classes, dtype=np.int64)
    drawn, cap = 0, max_draw_factor * samples
    batch = max(256, samples)
    while np.any(filled < quota):
        if drawn >= cap:
            raise InvalidInputError(
                f"only {int(filled.sum())} of {samples} balanced samples met margin {margin} "
                f"after {drawn} draws; lower the margin")
        x = (rng.standard_normal((batch, dims[0])) + 1j * rng.standard_normal((batch, dims[0]))) / np.sqrt(2)
        drawn += batch
        power = np.abs(forward(net, x)) ** 2
        ranked = np.sort(power, axis=1)
        top = ranked[:, -1]
        second = ranked[:, -2] if classes > 1 else np.zeros(batch)
        ok = (top > 0) & ((top - second) >= margin * top)
        labels = np.argmax(power, axis=1)
        for i in np.flatnonzero(ok):
            c = labels[i]
            if filled[c] < quota[c]:
                kept_x[c].append(x[i])
                filled[c] += 1
    x = np.array([v for c in range(classes) for v in kept_x[c]])
    y = np.repeat(np.arange(classes), quota)
    order = np.random.default_rng([seed, 1]).permutation(samples)
    x, y = x[order], y[order]
    return net, Dataset(x, y)
