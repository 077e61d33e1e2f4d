"""Per-sample Newton inversion of a forward model.

Each observation y gets its own damped Gauss-Newton iteration on
R(m) = G(x, m) - y with a Tikhonov-regularized step
(J'J + delta I)^{-1} J'R and a residual-norm stopping rule. Samples are
independent; a batched fast path vectorizes the same iteration across
samples when the model supports it.
"""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve


@dataclass(frozen=True)
class TikhonovSchedule:
    """Step regularization keyed to the current residual norm."""

    threshold: float = 0.01
    above: float = 1e-5
    below: float = 1e-6


def tikhonov_for(residual_norm, schedule=None):
    s = schedule or TikhonovSchedule()
    return s.above if residual_norm >= s.threshold else s.below


def newton_step(J, R, delta):
    """Solve (J'J + delta I) step = J'R."""
    A = J.T @ J + delta * np.eye(J.shape[1])
    return cho_solve(cho_factor(A), J.T @ R)


@dataclass(frozen=True)
class InversionOptions:
    beta: float = 0.1
    residual_tol: float = 0.01
    max_iter: int = 500
    tikhonov: TikhonovSchedule = field(default_factory=TikhonovSchedule)
    m_init: object = "zero"  # "zero" or an explicit vector


def _initial_m(opts, d):
    if isinstance(opts.m_init, str):
        if opts.m_init == "zero":
            return np.zeros(d)
        raise ValueError(f"unknown m_init policy {opts.m_init!r}")
    m0 = np.asarray(opts.m_init, dtype=float)
    if m0.shape != (d,):
        raise ValueError("m_init vector has wrong length")
    return m0.copy()


@dataclass
class InversionResult:
    m_opt: np.ndarray
    converged: bool
    iterations: int
    residual_norm: float
    history: list


def invert_sample(model, x, y, opts=None):
    """Damped Gauss-Newton on one (x, y) pair; stops at residual_tol."""
    opts = opts or InversionOptions()
    y = np.asarray(y, dtype=float)
    m = _initial_m(opts, model.latent_dim)
    history = []
    iterations = 0
    converged = False
    while True:
        y_hat, J = model.evaluate_and_jacobian(x, m)
        R = y_hat - y
        norm = float(np.linalg.norm(R))
        history.append(norm)
        if norm <= opts.residual_tol:
            converged = True
            break
        if iterations >= opts.max_iter:
            break
        m = m - opts.beta * newton_step(J, R, tikhonov_for(norm, opts.tikhonov))
        iterations += 1
    return InversionResult(
        m_opt=m,
        converged=converged,
        iterations=iterations,
        residual_norm=norm,
        history=history,
    )


@dataclass
class DatasetInversion:
    """Stacked per-sample inversion output; row order follows the input pairs."""

    samples: np.ndarray        # (n, d) recovered parameters
    converged: np.ndarray      # (n,) bool
    iterations: np.ndarray     # (n,) int
    residual_norms: np.ndarray # (n,)
    source_index: np.ndarray = None  # set by the noisy variant
    notes: list = field(default_factory=list)

    @property
    def n_converged(self):
        return int(self.converged.sum())


def _invert_batched(model, X, Y, opts):
    n = X.shape[0]
    d = model.latent_dim
    M = np.tile(_initial_m(opts, d), (n, 1))
    iterations = np.zeros(n, dtype=np.int64)
    residual_norms = np.full(n, np.inf)
    converged = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    ts = opts.tikhonov
    eye = np.eye(d)
    for step in range(opts.max_iter + 1):
        idx = np.flatnonzero(active)
        R = model.evaluate_batch(X[idx], M[idx]) - Y[idx]
        norms = np.linalg.norm(R, axis=1)
        residual_norms[idx] = norms
        done = norms <= opts.residual_tol
        converged[idx[done]] = True
        active[idx[done]] = False
        still = idx[~done]
        if still.size == 0 or step == opts.max_iter:
            break
        J = model.jacobian_batch(X[still], M[still])
        JT = np.swapaxes(J, -1, -2)
        deltas = np.where(norms[~done] >= ts.threshold, ts.above, ts.below)
        A = JT @ J + deltas[:, None, None] * eye
        rhs = np.einsum("nij,nj->ni", JT, R[~done])
        M[still] -= opts.beta * np.linalg.solve(A, rhs[:, :, None])[:, :, 0]
        iterations[still] += 1
    return DatasetInversion(
        samples=M, converged=converged, iterations=iterations, residual_norms=residual_norms
    )


def _invert_one(args):
    model, x, y, opts = args
    try:
        res = invert_sample(model, x, y, opts)
        return res.m_opt, res.converged, res.iterations, res.residual_norm, None
    except Exception as exc:  # per-sample failures are recorded, not thrown
        return (
            np.zeros(model.latent_dim),
            False,
            0,
            np.inf,
            f"{type(exc).__name__}: {exc}",
        )


def invert_dataset(model, X, Y, opts=None, n_jobs=1):
    """One independent inversion per (x, y) row; failures flagged in place."""
    opts = opts or InversionOptions()
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must pair up row for row")
    if model.supports_batch and isinstance(opts.m_init, str):
        try:
            return _invert_batched(model, X, Y, opts)
        except Exception:
            pass  # fall back to the per-sample loop, which records failures
    tasks = [(model, X[i], Y[i], opts) for i in range(X.shape[0])]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            rows = list(ex.map(_invert_one, tasks, chunksize=8))
    else:
        rows = [_invert_one(t) for t in tasks]
    notes = [f"sample {i}: {r[4]}" for i, r in enumerate(rows) if r[4]]
    return DatasetInversion(
        samples=np.stack([r[0] for r in rows]),
        converged=np.array([r[1] for r in rows]),
        iterations=np.array([r[2] for r in rows]),
        residual_norms=np.array([r[3] for r in rows]),
        notes=notes,
    )


def invert_with_noise(model, X, Y, delta_noise, n_per_sample, rng, opts=None, n_jobs=1):
    """Noise-robustness variant: each pair is re-inverted against y - eta
    for n_per_sample draws eta ~ delta_noise * N(0, I)."""
    opts = opts or InversionOptions()
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n, n_obs = Y.shape
    eta = delta_noise * rng.standard_normal((n, n_per_sample, n_obs))
    Y_rep = (Y[:, None, :] - eta).reshape(n * n_per_sample, n_obs)
    X_rep = np.repeat(X, n_per_sample, axis=0)
    out = invert_dataset(model, X_rep, Y_rep, opts, n_jobs=n_jobs)
    out.source_index = np.repeat(np.arange(n), n_per_sample)
    return out


def save_samples_csv(path, samples):
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    header = ",".join(f"m{i+1}" for i in range(samples.shape[1]))
    np.savetxt(path, samples, delimiter=",", header=header, fmt="%.17g")


def load_samples_csv(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#"))


def write_convergence_report(path, inv, opts=None, extra=None):
    norms = inv.residual_norms[np.isfinite(inv.residual_norms)]
    report = {
        "n_samples": int(inv.samples.shape[0]),
        "n_converged": inv.n_converged,
        "fraction_converged": inv.n_converged / max(1, inv.samples.shape[0]),
        "iterations": {
            "min": int(inv.iterations.min()),
            "median": float(np.median(inv.iterations)),
            "max": int(inv.iterations.max()),
        },
        "residual_norms": {
            "median": float(np.median(norms)) if norms.size else None,
            "p90": float(np.percentile(norms, 90)) if norms.size else None,
            "max": float(norms.max()) if norms.size else None,
        },
        "notes": list(inv.notes),
    }
    if opts is not None:
        report["options"] = {
            "beta": opts.beta,
            "residual_tol": opts.residual_tol,
            "max_iter": opts.max_iter,
        }
    if extra:
        report.update(extra)
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
    return report
