"""Comparison methods: MAP estimation with a BFGS-Laplace covariance and a
mixture-of-Laplace posterior, Metropolis-Hastings and Hamiltonian Monte Carlo
samplers, distance-based and standard log likelihoods, and the variational
bandwidth selection for the mixture posterior."""

import json
from dataclasses import dataclass, field

import numpy as np

from .gmm import GaussianMixture

__all__ = [
    "MapResult",
    "ChainState",
    "SigmaResult",
    "bfgs_minimize",
    "map_objective",
    "map_gradient",
    "map_estimate",
    "gaussian_coverage_points",
    "map_posterior_mixture",
    "distance_loglik",
    "standard_loglik",
    "standard_loglik_grad",
    "mh_sample",
    "hmc_sample",
    "optimize_sigma",
    "save_chain_csv",
    "save_chain_metadata",
]


def _weighted_sq(a, A_inv):
    return float(a @ A_inv @ a)


def bfgs_minimize(f, grad, x0, max_iter=200, gtol=1e-8, c1=1e-4, shrink=0.5):
    """Dense BFGS with backtracking Armijo line search.

    Returns (x, H, converged, n_iter) where H is the final inverse-Hessian
    approximation.
    """
    x = np.asarray(x0, dtype=float).copy()
    n = x.size
    H = np.eye(n)
    g = np.asarray(grad(x), dtype=float)
    fx = float(f(x))
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if np.linalg.norm(g) <= gtol:
            converged = True
            it -= 1
            break
        p = -H @ g
        slope = float(g @ p)
        if slope >= 0:
            # reset a corrupted curvature model to steepest descent
            H = np.eye(n)
            p = -g
            slope = float(g @ p)
        step = 1.0
        f_new = None
        for _ in range(60):
            x_new = x + step * p
            f_new = float(f(x_new))
            if np.isfinite(f_new) and f_new <= fx + c1 * step * slope:
                break
            step *= shrink
        else:
            break
        g_new = np.asarray(grad(x_new), dtype=float)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12:
            rho = 1.0 / sy
            I = np.eye(n)
            V = I - rho * np.outer(s, y)
            H = V @ H @ V.T + rho * np.outer(s, s)
        x, g, fx = x_new, g_new, f_new
    else:
        it = max_iter
    if np.linalg.norm(g) <= gtol:
        converged = True
    return x, H, converged, it


def map_objective(model, X, Y, m, gamma_noise, sigma0, m0):
    """Posterior-mode objective: half the noise-weighted misfit summed over
    the dataset plus half the prior-weighted deviation."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    gamma_inv = np.linalg.inv(np.asarray(gamma_noise, dtype=float))
    sigma0_inv = np.linalg.inv(np.asarray(sigma0, dtype=float))
    m = np.asarray(m, dtype=float)
    total = 0.0
    for x, y in zip(X, Y):
        r = y - model.evaluate(x, m)
        total += _weighted_sq(r, gamma_inv)
    total += _weighted_sq(m - np.asarray(m0, dtype=float), sigma0_inv)
    return 0.5 * total


def map_gradient(model, X, Y, m, gamma_noise, sigma0, m0):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    gamma_inv = np.linalg.inv(np.asarray(gamma_noise, dtype=float))
    sigma0_inv = np.linalg.inv(np.asarray(sigma0, dtype=float))
    m = np.asarray(m, dtype=float)
    grad = sigma0_inv @ (m - np.asarray(m0, dtype=float))
    for x, y in zip(X, Y):
        y_hat, J = model.evaluate_and_jacobian(x, m)
        grad -= J.T @ (gamma_inv @ (y - y_hat))
    return grad


@dataclass
class MapResult:
    m_map: np.ndarray
    sigma1: np.ndarray
    converged: bool
    iterations: int
    used_prior_fallback: bool = False


def map_estimate(model, X, Y, m0_start, gamma_noise, sigma0, max_iter=200):
    """BFGS minimization from the prior point m0_start (which also serves as
    the prior mean); the Laplace covariance is the final inverse-Hessian
    approximation, replaced by sigma0 when it is not SPD."""
    m0 = np.asarray(m0_start, dtype=float)

    def f(m):
        return map_objective(model, X, Y, m, gamma_noise, sigma0, m0)

    def g(m):
        return map_gradient(model, X, Y, m, gamma_noise, sigma0, m0)

    m_map, H, converged, iters = bfgs_minimize(f, g, m0, max_iter=max_iter)
    sigma1 = 0.5 * (H + H.T)
    fallback = False
    try:
        eigs = np.linalg.eigvalsh(sigma1)
        if np.any(eigs <= 0) or not np.all(np.isfinite(eigs)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sigma1 = np.asarray(sigma0, dtype=float).copy()
        fallback = True
    return MapResult(m_map, sigma1, converged, iters, fallback)


def gaussian_coverage_points(d, n, scale=1.0):
    """Deterministic prior starts: the origin, then rings at 1*scale,
    2*scale, ... each holding 2d axis points and 2d diagonal points."""
    points = [np.zeros(d)]
    sign_rows = []
    for i in range(d):
        signs = np.ones(d)
        signs[:i] = -1.0
        sign_rows.append(signs)
        sign_rows.append(-signs)
    ring = 0
    while len(points) < n:
        ring += 1
        radius = ring * scale
        for i in range(d):
            e = np.zeros(d)
            e[i] = radius
            points.append(e.copy())
            points.append(-e)
        for signs in sign_rows:
            points.append(radius * signs / np.sqrt(d))
    return np.array(points[:n])


def map_posterior_mixture(model, X, Y, prior_points, gamma_noise, sigma0, max_iter=200):
    """Laplace posterior from each prior start, blended with uniform weights.
    Failed starts are dropped; surviving weights renormalize."""
    prior_points = np.atleast_2d(np.asarray(prior_points, dtype=float))
    means = []
    covs = []
    notes = []
    for i, p in enumerate(prior_points):
        try:
            res = map_estimate(model, X, Y, p, gamma_noise, sigma0, max_iter=max_iter)
        except Exception as exc:
            notes.append(f"start {i} failed: {exc}")
            continue
        if res.used_prior_fallback:
            notes.append(f"start {i} used the prior covariance fallback")
        means.append(res.m_map)
        covs.append(res.sigma1)
    if not means:
        raise ValueError("every MAP start failed")
    k = len(means)
    gmm = GaussianMixture(np.full(k, 1.0 / k), np.array(means), np.array(covs))
    return gmm, notes


def distance_loglik(m_star, samples, n_lkl, gamma_noise=None):
    """Log likelihood from the n_lkl smallest (optionally noise-weighted)
    squared distances between m_star and the reference samples.

    gamma_noise multiplies the squared distances, so a larger matrix gives
    a more peaked likelihood.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if n_lkl > samples.shape[0]:
        raise ValueError("n_lkl exceeds the sample count")
    diff = samples - np.asarray(m_star, dtype=float)
    if gamma_noise is None:
        r = np.einsum("ij,ij->i", diff, diff)
    else:
        gamma = np.asarray(gamma_noise, dtype=float)
        r = np.einsum("ij,jk,ik->i", diff, gamma, diff)
    r.sort()
    return -float(r[:n_lkl].sum())


def standard_loglik(model, m, X, Y, gamma_noise):
    """Log likelihood from the model misfit, summed over all data pairs."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    gamma_inv = np.linalg.inv(np.asarray(gamma_noise, dtype=float))
    m = np.asarray(m, dtype=float)
    if getattr(model, "supports_batch", False):
        M = np.broadcast_to(m, (X.shape[0], m.size))
        R = Y - model.evaluate_batch(X, M)
        return -float(np.einsum("ij,jk,ik->", R, gamma_inv, R))
    total = 0.0
    for x, y in zip(X, Y):
        r = y - model.evaluate(x, m)
        total += _weighted_sq(r, gamma_inv)
    return -total


def standard_loglik_grad(model, m, X, Y, gamma_noise):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    gamma_inv = np.linalg.inv(np.asarray(gamma_noise, dtype=float))
    m = np.asarray(m, dtype=float)
    grad = np.zeros_like(m)
    for x, y in zip(X, Y):
        y_hat, J = model.evaluate_and_jacobian(x, m)
        grad += 2.0 * (J.T @ (gamma_inv @ (y - y_hat)))
    return grad


@dataclass
class ChainState:
    """One MCMC run: every visited state with per-step acceptance flags."""

    states: np.ndarray          # (n_steps, d) state after each proposal
    accepted: np.ndarray        # (n_steps,) bool
    m_init: np.ndarray
    n_divergent: int = 0
    settings: dict = field(default_factory=dict)
    energy_errors: np.ndarray = None   # per-trajectory |dH|, HMC only

    @property
    def accept_count(self):
        return int(self.accepted.sum())

    @property
    def n_steps(self):
        return self.states.shape[0]

    def accepted_states(self):
        return self.states[self.accepted]


def mh_sample(log_target, m_init, proposal_cov, n_steps, rng):
    """Random-walk Metropolis-Hastings with a Gaussian proposal."""
    m = np.asarray(m_init, dtype=float).copy()
    d = m.size
    L = np.linalg.cholesky(np.asarray(proposal_cov, dtype=float))
    states = np.empty((n_steps, d))
    accepted = np.zeros(n_steps, dtype=bool)
    lt = float(log_target(m))
    for i in range(n_steps):
        proposal = m + L @ rng.standard_normal(d)
        lt_new = float(log_target(proposal))
        if np.log(rng.random()) < lt_new - lt:
            m, lt = proposal, lt_new
            accepted[i] = True
        states[i] = m
    return ChainState(
        states=states,
        accepted=accepted,
        m_init=np.asarray(m_init, dtype=float),
        settings={"proposal_cov": np.asarray(proposal_cov).tolist(), "n_steps": n_steps},
    )


def hmc_sample(log_target, grad_log_target, m_init, n_steps, rng,
               epsilon=0.05, n_leapfrog=20, divergence_threshold=1000.0):
    """Hamiltonian Monte Carlo with a leapfrog integrator and unit mass."""
    q = np.asarray(m_init, dtype=float).copy()
    d = q.size
    states = np.empty((n_steps, d))
    accepted = np.zeros(n_steps, dtype=bool)
    energy_errors = np.empty(n_steps)
    n_divergent = 0
    lt = float(log_target(q))
    for i in range(n_steps):
        p0 = rng.standard_normal(d)
        q_new = q.copy()
        p = p0.copy()
        p = p + 0.5 * epsilon * np.asarray(grad_log_target(q_new))
        for l in range(n_leapfrog):
            q_new = q_new + epsilon * p
            g = np.asarray(grad_log_target(q_new))
            p = p + (epsilon if l < n_leapfrog - 1 else 0.5 * epsilon) * g
        lt_new = float(log_target(q_new))
        # energy change; -log_target is the potential
        delta_h = (lt - lt_new) + 0.5 * (p @ p - p0 @ p0)
        energy_errors[i] = abs(delta_h) if np.isfinite(delta_h) else np.inf
        if not np.isfinite(delta_h) or delta_h > divergence_threshold:
            n_divergent += 1
        elif np.log(rng.random()) < -delta_h:
            q, lt = q_new, lt_new
            accepted[i] = True
        states[i] = q
    return ChainState(
        states=states,
        accepted=accepted,
        m_init=np.asarray(m_init, dtype=float),
        n_divergent=n_divergent,
        settings={"epsilon": epsilon, "n_leapfrog": n_leapfrog, "n_steps": n_steps},
        energy_errors=energy_errors,
    )


@dataclass
class SigmaResult:
    sigma_opt: float
    sigma_grid: np.ndarray
    c1_values: np.ndarray


def optimize_sigma(centers, log_prior, sigma_grid=None, n_mc=5000, rng=None):
    """Grid search for the mixture bandwidth minimizing the Monte-Carlo
    estimate of E_q[log q - log p] with q a uniform-weight Gaussian mixture
    holding one component per center, each with covariance sigma * I.

    Common random numbers across the grid keep the comparison deterministic.
    Priors with bounded support may give infinite estimates for wide
    bandwidths; those grid points lose the argmin but remain reported.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if sigma_grid is None:
        sigma_grid = np.logspace(-3.0, 0.0, 30)
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    rng = rng or np.random.default_rng(0)
    n, d = centers.shape
    idx = rng.integers(0, n, size=n_mc)
    z = rng.standard_normal((n_mc, d))
    if hasattr(log_prior, "logpdf"):
        log_prior = log_prior.logpdf
    c1 = np.empty(sigma_grid.size)
    for k, sigma in enumerate(sigma_grid):
        # sigma scales the covariance directly, so draws scale by sqrt(sigma)
        draws = centers[idx] + np.sqrt(sigma) * z
        q = GaussianMixture(
            np.full(n, 1.0 / n),
            centers,
            np.repeat((sigma * np.eye(d))[None], n, axis=0),
        )
        terms = q.logpdf(draws) - np.asarray(log_prior(draws), dtype=float)
        c1[k] = terms.mean()
    best = int(np.nanargmin(c1))
    return SigmaResult(float(sigma_grid[best]), sigma_grid, c1)


def save_chain_csv(path, chain):
    header = ",".join(f"m{i+1}" for i in range(chain.states.shape[1]))
    np.savetxt(path, chain.accepted_states(), delimiter=",",
               header=header, fmt="%.17g")


def save_chain_metadata(path, chain):
    meta = {
        "n_steps": chain.n_steps,
        "accept_count": chain.accept_count,
        "acceptance_rate": chain.accept_count / max(1, chain.n_steps),
        "n_divergent": chain.n_divergent,
        "m_init": chain.m_init.tolist(),
        "settings": chain.settings,
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2)
    return meta
