"""Truth distributions, dataset synthesis, and evaluation metrics for the
inference experiments."""

from dataclasses import dataclass, field

import numpy as np

from .gmm import GaussianMixture

__all__ = [
    "Dataset",
    "TruthSpec",
    "Truth",
    "MomentReport",
    "analytic_map",
    "make_truth",
    "spring_inputs",
    "generate_dataset",
    "synthesize_design_fields",
    "generate_design_inputs",
    "normalized_error",
    "moment_errors",
    "mode_fractions",
]

TRUTH_KINDS = ("analytic", "unimodal", "bimodal", "ushape", "bimodal28", "trimodal")

# centers tracing a U, read top-left down, across the bottom, and back up
U_SHAPE_CENTERS = np.array(
    [
        [-2.0, 2.0],
        [-2.0, 0.67],
        [-2.0, -0.67],
        [-2.0, -2.0],
        [0.0, -2.0],
        [2.0, -2.0],
        [2.0, -0.67],
        [2.0, 0.67],
        [2.0, 2.0],
    ]
)


def analytic_map(x):
    """Smooth two-dimensional reference map used to benchmark the kernel
    network: m = [sin(8 x1 + 0.1 x2), x1 - 0.1 x2]."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    m = np.column_stack([np.sin(8.0 * X[:, 0] + 0.1 * X[:, 1]), X[:, 0] - 0.1 * X[:, 1]])
    return m[0] if single else m


def _ramp(start, step, count):
    return start + step * np.arange(count)


@dataclass
class TruthSpec:
    """Named latent-truth family with optional parameter overrides."""

    kind: str
    d: int = None
    weights: np.ndarray = None
    means: np.ndarray = None
    covs: np.ndarray = None

    def __post_init__(self):
        if self.kind not in TRUTH_KINDS:
            raise ValueError(
                f"unknown truth kind {self.kind!r}; expected one of {TRUTH_KINDS}"
            )

    def to_dict(self):
        out = {"kind": self.kind}
        if self.d is not None:
            out["d"] = int(self.d)
        for name in ("weights", "means", "covs"):
            val = getattr(self, name)
            if val is not None:
                out[name] = np.asarray(val).tolist()
        return out


def _builtin_mixture(spec):
    kind, d = spec.kind, spec.d
    if kind == "unimodal":
        return [1.0], [[1.0, 1.0]], [[[1.4, 0.63], [0.63, 0.41]]]
    if kind == "bimodal":
        return (
            [0.5, 0.5],
            [[2.0, 2.0], [-2.0, -2.0]],
            [
                [[0.51, 0.49], [0.49, 0.51]],
                [[0.51, -0.49], [-0.49, 0.51]],
            ],
        )
    if kind == "ushape":
        k = len(U_SHAPE_CENTERS)
        return np.full(k, 1.0 / k), U_SHAPE_CENTERS, [0.05 * np.eye(2)] * k
    if kind == "bimodal28":
        d = 28 if d is None else d
        if not 1 <= d <= 28:
            raise ValueError("bimodal28 supports 1 <= d <= 28")
        ramp = _ramp(0.11, 0.01, 28)[:d]
        return (
            [0.5, 0.5],
            [np.zeros(d), 4.0 * np.ones(d)],
            [np.diag(ramp), np.diag(ramp[::-1])],
        )
    if kind == "trimodal":
        d = 10 if d is None else d
        if d != 10:
            raise ValueError("trimodal is defined in 10 dimensions")
        ramp = _ramp(0.11, 0.01, 10)
        mu3 = np.concatenate([6.0 * np.ones(5), -np.ones(5)])
        return (
            np.full(3, 1.0 / 3.0),
            [np.zeros(10), 4.0 * np.ones(10), mu3],
            [np.diag(ramp), np.diag(ramp[::-1]), 0.1 * np.eye(10)],
        )
    raise ValueError(f"kind {kind!r} has no mixture form")


@dataclass
class Truth:
    """Latent-truth sampler; mixture kinds expose their Gaussian mixture."""

    spec: TruthSpec
    gmm: GaussianMixture = None

    @property
    def is_map(self):
        return self.spec.kind == "analytic"

    @property
    def d(self):
        return 2 if self.is_map else self.gmm.means.shape[1]

    @property
    def modes(self):
        if self.gmm is None:
            raise ValueError("the analytic truth has no mixture modes")
        return self.gmm.means

    def sample(self, n, rng):
        if self.is_map:
            return analytic_map(rng.uniform(0.0, 1.0, (n, 2)))
        return self.gmm.sample(n, rng)

    def latent_from_input(self, X):
        if not self.is_map:
            raise ValueError("only the analytic truth maps inputs to latents")
        return analytic_map(X)


def make_truth(spec):
    if isinstance(spec, str):
        spec = TruthSpec(kind=spec)
    if spec.kind == "analytic":
        if any(v is not None for v in (spec.weights, spec.means, spec.covs)):
            raise ValueError("the analytic truth takes no mixture parameters")
        return Truth(spec=spec)
    overrides = (spec.weights, spec.means, spec.covs)
    if any(v is not None for v in overrides):
        if not all(v is not None for v in overrides):
            raise ValueError("weights, means, and covs must be overridden together")
        weights, means, covs = overrides
    else:
        weights, means, covs = _builtin_mixture(spec)
    return Truth(spec=spec, gmm=GaussianMixture(weights, means, covs))


def spring_inputs(n, rng, center=(0.5, 0.5), delta_x=0.005):
    """Inputs jittered uniformly around a nominal operating point."""
    center = np.asarray(center, dtype=float)
    return center + delta_x * rng.uniform(-1.0, 1.0, (n, center.size))


@dataclass
class Dataset:
    """Inputs, observations, and the latent draws that produced them."""

    X: np.ndarray
    Y: np.ndarray
    M: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.X.shape[0] == self.Y.shape[0] == self.M.shape[0]):
            raise ValueError("inputs, observations, and latents disagree on rows")

    @property
    def n_data(self):
        return self.X.shape[0]


def generate_dataset(model, truth, n_data, delta_x, rng, center=(0.5, 0.5)):
    """Draw inputs, latents, and forward-model observations.

    The analytic truth couples latents to inputs directly and returns the
    latents as the observations; mixture truths draw latents independently
    and push them through the model. Pass an integer rng to record the seed
    in the provenance.
    """
    if n_data < 1:
        raise ValueError("n_data must be at least 1")
    seed = None
    if isinstance(rng, (int, np.integer)):
        seed = int(rng)
        rng = np.random.default_rng(seed)
    if truth.is_map:
        X = rng.uniform(0.0, 1.0, (n_data, 2))
        M = truth.latent_from_input(X)
        Y = M.copy()
    else:
        X = spring_inputs(n_data, rng, center=center, delta_x=delta_x)
        M = truth.sample(n_data, rng)
        if getattr(model, "supports_batch", False):
            Y = model.evaluate_batch(X, M)
        else:
            rows = []
            for i, (x, m) in enumerate(zip(X, M)):
                try:
                    rows.append(model.evaluate(x, m))
                except Exception as exc:
                    raise RuntimeError(f"forward model failed on sample {i}") from exc
            Y = np.array(rows)
    provenance = {"truth": truth.spec.to_dict(), "seed": seed,
                  "n_data": int(n_data), "delta_x": float(delta_x)}
    return Dataset(X=X, Y=Y, M=M, provenance=provenance)


def synthesize_design_fields(points, n_fields, rng, n_bumps=6):
    """Smooth density fields built from radial-bump blends at random centers;
    values stay within the admissible design range [1e-3, 1]."""
    points = np.asarray(points, dtype=float)
    lo, hi = points.min(axis=0), points.max(axis=0)
    fields = np.empty((n_fields, points.shape[0]))
    for k in range(n_fields):
        base = rng.uniform(0.2, 0.5)
        rho = np.full(points.shape[0], base)
        for _ in range(n_bumps):
            centre = rng.uniform(lo, hi)
            width = rng.uniform(0.1, 0.3) * np.linalg.norm(hi - lo)
            amp = rng.uniform(0.3, 0.9)
            r2 = ((points - centre) ** 2).sum(axis=1)
            rho += amp * np.exp(-r2 / (2.0 * width**2))
        fields[k] = np.clip(rho, 1e-3, 1.0)
    return fields


def generate_design_inputs(base_fields, n_keep, n_noise_per, rng, jitter=0.01):
    """Expand design iterates into model inputs: keep the first n_keep fields
    and emit n_noise_per jittered copies of each, clamped to [1e-3, 1]."""
    base_fields = np.atleast_2d(np.asarray(base_fields, dtype=float))
    if base_fields.shape[0] == 0:
        raise ValueError("base_fields is empty")
    if base_fields.shape[0] < n_keep:
        raise ValueError("fewer base fields than n_keep")
    kept = base_fields[:n_keep]
    out = np.empty((n_keep * n_noise_per, base_fields.shape[1]))
    for i, base in enumerate(kept):
        noise = jitter * rng.standard_normal((n_noise_per, base.size))
        out[i * n_noise_per:(i + 1) * n_noise_per] = np.clip(base + noise, 1e-3, 1.0)
    return out


def normalized_error(a, ref):
    """Frobenius-norm relative error ||a - ref|| / ||ref||."""
    a = np.asarray(a, dtype=float)
    ref = np.asarray(ref, dtype=float)
    denom = np.linalg.norm(ref)
    if denom == 0.0:
        raise ValueError("reference has zero norm")
    return float(np.linalg.norm(a - ref) / denom)


@dataclass
class MomentReport:
    """Per-dimension relative moment errors against a reference sample set.

    Entries whose reference moment vanishes hold the absolute error instead
    and are marked in the corresponding flag array.
    """

    e_mu: np.ndarray
    e_sigma: np.ndarray
    mu_zero_reference: np.ndarray
    sigma_zero_reference: np.ndarray
    n_samples: int
    n_reference: int

    def to_dict(self):
        return {
            "e_mu": self.e_mu.tolist(),
            "e_sigma": self.e_sigma.tolist(),
            "mu_zero_reference": self.mu_zero_reference.tolist(),
            "sigma_zero_reference": self.sigma_zero_reference.tolist(),
            "n_samples": self.n_samples,
            "n_reference": self.n_reference,
        }


def _relative_errors(vals, refs):
    zero = refs == 0.0
    err = np.abs(vals - refs)
    err[~zero] /= np.abs(refs[~zero])
    return err, zero


def moment_errors(samples, reference_samples):
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    reference = np.atleast_2d(np.asarray(reference_samples, dtype=float))
    if samples.shape[1] != reference.shape[1]:
        raise ValueError("sample sets disagree on dimension")
    e_mu, mu_zero = _relative_errors(samples.mean(axis=0), reference.mean(axis=0))
    e_sigma, sigma_zero = _relative_errors(samples.std(axis=0), reference.std(axis=0))
    return MomentReport(
        e_mu=e_mu,
        e_sigma=e_sigma,
        mu_zero_reference=mu_zero,
        sigma_zero_reference=sigma_zero,
        n_samples=samples.shape[0],
        n_reference=reference.shape[0],
    )


def mode_fractions(samples, modes, radius):
    """Fraction of samples within the given radius of each mode center."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    modes = np.atleast_2d(np.asarray(modes, dtype=float))
    dists = np.linalg.norm(samples[:, None, :] - modes[None, :, :], axis=2)
    return (dists < radius).mean(axis=0)
