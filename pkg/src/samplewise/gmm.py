"""Gaussian mixture models: density, gradient, and sampling.

Used both for synthetic ground-truth parameter distributions and for the
MAP-based mixture posterior, and as the analytic target handed to the MCMC
samplers.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = ["GaussianMixture", "uniform_box_logpdf"]


@dataclass
class GaussianMixture:
    weights: np.ndarray    # (k,) nonnegative, normalized on construction
    means: np.ndarray      # (k, d)
    covs: np.ndarray       # (k, d, d) SPD

    _chol: list = field(init=False, repr=False)
    _log_norm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.means = np.atleast_2d(np.asarray(self.means, dtype=float))
        self.covs = np.asarray(self.covs, dtype=float)
        if self.covs.ndim == 2:
            self.covs = self.covs[None, :, :]
        k, d = self.means.shape
        if self.weights.shape != (k,) or self.covs.shape != (k, d, d):
            raise ValueError("component count mismatch between weights, means, covs")
        if np.any(self.weights < 0) or self.weights.sum() <= 0:
            raise ValueError("weights must be nonnegative with positive sum")
        self.weights = self.weights / self.weights.sum()
        self._chol = []
        self._log_norm = np.empty(k)
        for i, C in enumerate(self.covs):
            if not np.allclose(C, C.T, atol=1e-12):
                raise ValueError(f"covariance {i} is not symmetric")
            try:
                cf = cho_factor(C, lower=True)
            except np.linalg.LinAlgError:
                raise ValueError(f"covariance {i} is not positive definite") from None
            self._chol.append(cf)
            log_det = 2.0 * np.log(np.diag(cf[0])).sum()
            self._log_norm[i] = -0.5 * (d * np.log(2.0 * np.pi) + log_det)

    @property
    def n_components(self):
        return self.means.shape[0]

    @property
    def d(self):
        return self.means.shape[1]

    def component_logpdfs(self, x):
        """(n, k) matrix of per-component log densities."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty((x.shape[0], self.n_components))
        for i in range(self.n_components):
            diff = x - self.means[i]
            sol = cho_solve(self._chol[i], diff.T).T
            out[:, i] = self._log_norm[i] - 0.5 * np.einsum("nj,nj->n", diff, sol)
        return out

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        comp = self.component_logpdfs(x) + np.log(self.weights)
        peak = comp.max(axis=1)
        out = peak + np.log(np.exp(comp - peak[:, None]).sum(axis=1))
        return float(out[0]) if single else out

    def logpdf_and_grad(self, x):
        """Log density and its gradient at one point."""
        x = np.asarray(x, dtype=float)
        comp = self.component_logpdfs(x[None, :])[0] + np.log(self.weights)
        peak = comp.max()
        resp = np.exp(comp - peak)
        total = resp.sum()
        logpdf = peak + np.log(total)
        resp /= total
        grad = np.zeros_like(x)
        for i in range(self.n_components):
            grad += resp[i] * cho_solve(self._chol[i], self.means[i] - x)
        return float(logpdf), grad

    def grad_logpdf(self, x):
        return self.logpdf_and_grad(x)[1]

    def sample(self, n, rng):
        idx = rng.choice(self.n_components, size=n, p=self.weights)
        z = rng.standard_normal((n, self.d))
        out = np.empty((n, self.d))
        for i in range(self.n_components):
            mask = idx == i
            L = self._chol[i][0]
            out[mask] = self.means[i] + z[mask] @ np.tril(L).T
        return out


def uniform_box_logpdf(lo, hi):
    """Log density of the uniform distribution on an axis-aligned box;
    -inf outside."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    log_vol = np.log(hi - lo).sum()

    def logpdf(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            inside = np.all(x >= lo) and np.all(x <= hi)
            return -log_vol if inside else -np.inf
        inside = np.all((x >= lo) & (x <= hi), axis=1)
        return np.where(inside, -log_vol, -np.inf)

    return logpdf
