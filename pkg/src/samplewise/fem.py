"""Scalar elliptic solver on P1 triangles with a log-random material modulus.

The bilinear form is int E(x, m) grad(u) . grad(v); the modulus E is the
exponential of a truncated KL expansion evaluated at element centroids,
scaled by a per-element design density. Dirichlet nodes are eliminated and
the reduced system is factored once per (design, m) via dense Cholesky,
reused for every Jacobian column.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .forward import ForwardModel
from .klfield import modulus_field


class AssemblyError(ValueError):
    pass


def element_stiffness(mesh):
    """Unit-modulus P1 stiffness blocks, shape (n_elements, 3, 3)."""
    p = mesh.nodes[mesh.elements]  # (e, 3, 2)
    x, y = p[..., 0], p[..., 1]
    # b_i = y_j - y_k, c_i = x_k - x_j, (i, j, k) cyclic
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = mesh.areas()
    if np.any(area <= 0.0):
        bad = int(np.argmin(area))
        raise AssemblyError(f"element {bad} is degenerate (area {area[bad]:.3g})")
    ke = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (
        4.0 * area[:, None, None]
    )
    return ke


@dataclass
class FemProblem:
    """Mesh + boundary data + modulus parameterization for one physical setup."""

    mesh: object
    dirichlet: np.ndarray          # node indices held at zero
    load: np.ndarray               # (n_nodes,) nodal loads
    basis: object = None           # KlBasis at element centroids; None means E = 1
    design: np.ndarray = None      # (n_elements,) densities, defaults to ones
    simp_exponent: float = 1.0
    ke: np.ndarray = field(init=False, repr=False)
    free: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.dirichlet = np.asarray(self.dirichlet, dtype=np.int64)
        self.load = np.asarray(self.load, dtype=float)
        if self.design is None:
            self.design = np.ones(self.mesh.n_elements)
        self.design = np.asarray(self.design, dtype=float)
        if self.design.shape != (self.mesh.n_elements,):
            raise ValueError("design must hold one density per element")
        if self.basis is not None and self.basis.values.shape[0] != self.mesh.n_elements:
            raise ValueError("basis must be evaluated at the element centroids")
        self.ke = element_stiffness(self.mesh)
        self.free = np.setdiff1d(np.arange(self.mesh.n_nodes), self.dirichlet)

    @property
    def latent_dim(self):
        return 0 if self.basis is None else self.basis.d

    def with_design(self, design):
        return replace(self, design=np.asarray(design, dtype=float))


def element_coefficients(problem, m):
    """Per-element factor multiplying the unit stiffness: density^p * E(c_e, m)."""
    coef = problem.design**problem.simp_exponent
    if problem.basis is not None:
        coef = coef * modulus_field(problem.basis, m)
    if not np.all(np.isfinite(coef)) or np.any(coef <= 0.0):
        bad = int(np.flatnonzero(~np.isfinite(coef) | (coef <= 0.0))[0])
        raise AssemblyError(f"element {bad} has invalid stiffness factor {coef[bad]!r}")
    return coef


def _scatter(problem, values):
    """Accumulate (n_elements, 3, ...) element contributions onto nodes."""
    n = problem.mesh.n_nodes
    out = np.zeros((n,) + values.shape[2:])
    np.add.at(out, problem.mesh.elements.ravel(), values.reshape(-1, *values.shape[2:]))
    return out


def fem_assemble(problem, m=None):
    """Dense global stiffness matrix (no boundary conditions applied)."""
    coef = element_coefficients(problem, m)
    n = problem.mesh.n_nodes
    ele = problem.mesh.elements
    rows = np.repeat(ele, 3, axis=1).ravel()
    cols = np.tile(ele, (1, 3)).ravel()
    vals = (problem.ke * coef[:, None, None]).ravel()
    K = np.zeros((n, n))
    np.add.at(K, (rows, cols), vals)
    return K


def _factorize(problem, m):
    K = fem_assemble(problem, m)
    Kff = K[np.ix_(problem.free, problem.free)]
    return cho_factor(Kff)


def fem_solve(problem, m=None):
    """Nodal solution with Dirichlet entries zero."""
    factor = _factorize(problem, m)
    u = np.zeros(problem.mesh.n_nodes)
    u[problem.free] = cho_solve(factor, problem.load[problem.free])
    return u


def _jacobian_from_factor(problem, m, u, factor):
    ele = problem.mesh.elements
    coef = element_coefficients(problem, m)
    # dcoef/dm_j = coef * sqrt(lam_j) * basis_j at each centroid
    dcoef = coef[:, None] * problem.basis.weighted
    ue = u[ele]
    we = np.einsum("eij,ej->ei", problem.ke, ue)  # K_e u_e
    rhs = _scatter(problem, we[:, :, None] * dcoef[:, None, :])
    J = np.zeros((problem.mesh.n_nodes, problem.basis.d))
    J[problem.free] = -cho_solve(factor, rhs[problem.free])
    return J


def fem_jacobian(problem, m):
    """du/dm, shape (n_nodes, d); rows at Dirichlet nodes are zero."""
    if problem.basis is None:
        raise ValueError("jacobian needs a modulus basis")
    factor = _factorize(problem, m)
    u = np.zeros(problem.mesh.n_nodes)
    u[problem.free] = cho_solve(factor, problem.load[problem.free])
    return _jacobian_from_factor(problem, m, u, factor)


def solve_and_jacobian(problem, m):
    """One assembly and factorization shared by the solve and all d columns."""
    factor = _factorize(problem, m)
    u = np.zeros(problem.mesh.n_nodes)
    u[problem.free] = cho_solve(factor, problem.load[problem.free])
    return u, _jacobian_from_factor(problem, m, u, factor)


def misfit_gradient(problem, m, y, gamma_inv=1.0, method="adjoint"):
    """Gradient of 0.5 (y-u)' Gamma^{-1} (y-u) with respect to m.

    The adjoint path solves one extra system instead of d; the direct path
    contracts the full Jacobian and exists to cross-check it.
    """
    factor = _factorize(problem, m)
    u = np.zeros(problem.mesh.n_nodes)
    u[problem.free] = cho_solve(factor, problem.load[problem.free])
    r = np.asarray(y, dtype=float) - u
    fg = gamma_inv @ r if np.ndim(gamma_inv) == 2 else np.asarray(gamma_inv) * r
    if method == "direct":
        J = _jacobian_from_factor(problem, m, u, factor)
        return -J.T @ fg
    if method != "adjoint":
        raise ValueError("method must be 'adjoint' or 'direct'")
    lam = np.zeros(problem.mesh.n_nodes)
    lam[problem.free] = cho_solve(factor, fg[problem.free])
    coef = element_coefficients(problem, m)
    dcoef = coef[:, None] * problem.basis.weighted
    ele = problem.mesh.elements
    s = np.einsum("ei,eij,ej->e", lam[ele], problem.ke, u[ele])
    return dcoef.T @ s


class FemModel(ForwardModel):
    """ForwardModel view: x is the per-element design density field."""

    def __init__(self, problem):
        self.problem = problem
        self.input_dim = problem.mesh.n_elements
        self.latent_dim = problem.latent_dim
        self.output_dim = problem.mesh.n_nodes

    def evaluate(self, x, m):
        return fem_solve(self.problem.with_design(x), m)

    def jacobian(self, x, m):
        return fem_jacobian(self.problem.with_design(x), m)

    def evaluate_and_jacobian(self, x, m):
        return solve_and_jacobian(self.problem.with_design(x), m)

    def misfit_gradient(self, x, m, y, gamma_inv, method="adjoint"):
        return misfit_gradient(self.problem.with_design(x), m, y, gamma_inv, method)
