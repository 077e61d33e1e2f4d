"""Forward models: deterministic simulators y = G(x, m) with parameter Jacobians.

A model maps a design/input vector x and a latent parameter vector m to an
observation vector y. Everything here is pure and deterministic; randomness
lives with the callers.
"""

import numpy as np


class ForwardModel:
    """Contract shared by all simulators.

    Subclasses set input_dim / latent_dim / output_dim and implement
    evaluate() and jacobian(). Batched hooks are optional speed paths and
    must agree with the per-sample methods.
    """

    input_dim = None
    latent_dim = None
    output_dim = None
    supports_batch = False

    def evaluate(self, x, m):
        """Return y = G(x, m) as a 1-D array of length output_dim."""
        raise NotImplementedError

    def jacobian(self, x, m):
        """Return dG/dm at (x, m), shape (output_dim, latent_dim)."""
        raise NotImplementedError

    def evaluate_and_jacobian(self, x, m):
        """Both at once; override when the two share expensive work."""
        return self.evaluate(x, m), self.jacobian(x, m)

    def evaluate_batch(self, X, M):
        return np.stack([self.evaluate(x, m) for x, m in zip(X, M)])

    def jacobian_batch(self, X, M):
        return np.stack([self.jacobian(x, m) for x, m in zip(X, M)])


def _growth(g):
    if g == "exp":
        return np.exp, np.exp
    if g == "square":
        return lambda m: m * m, lambda m: 2.0 * m
    raise ValueError(f"unknown growth law {g!r}; expected 'exp' or 'square'")


def spring_stiffness(x, m, g="exp"):
    """Stiffnesses of the two-spring assembly.

    k1 = x1*g(m1) + 0.1, k2 = x2*g(m2) + 0.5. Offsets keep the springs
    live when the design entries vanish.
    """
    fn, _ = _growth(g)
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    # inf stiffness is a valid limit (zero displacement); silence the overflow
    with np.errstate(over="ignore"):
        k1 = x[..., 0] * fn(m[..., 0]) + 0.1
        k2 = x[..., 1] * fn(m[..., 1]) + 0.5
    return k1, k2


def spring_stiffness_matrix(k1, k2):
    return np.array([[k1, -k1], [-k1, k1 + k2]], dtype=float)


def spring_solve(k1, k2, f1=1.0, f2=1.0):
    """Displacements of the two-mass chain under loads (f1, f2).

    Closed form of the 2x2 system: u2 = (f1+f2)/k2, u1 = u2 + f1/k1.
    """
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    if np.any(k1 <= 0.0) or np.any(k2 <= 0.0):
        raise ValueError("non-positive stiffness; system is not solvable")
    u2 = (f1 + f2) / k2
    u1 = u2 + f1 / k1
    return np.stack([u1, u2], axis=-1)


def spring_jacobian(x, m, g="exp", f1=1.0, f2=1.0):
    """du/dm for the two-spring assembly, shape (..., 2, 2).

    Uses du/dm_i = -K^{-1} (dK/dm_i) u collapsed to closed form:
    only k1 depends on m1 and only k2 on m2.
    """
    _, dfn = _growth(g)
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    k1, k2 = spring_stiffness(x, m, g)
    if np.any(k1 <= 0.0) or np.any(k2 <= 0.0):
        raise ValueError("non-positive stiffness; system is not solvable")
    dk1 = x[..., 0] * dfn(m[..., 0])
    dk2 = x[..., 1] * dfn(m[..., 1])
    du1_dm1 = -f1 / k1**2 * dk1
    du2_dm2 = -(f1 + f2) / k2**2 * dk2
    zeros = np.zeros_like(du1_dm1)
    J = np.stack(
        [
            np.stack([du1_dm1, du2_dm2], axis=-1),
            np.stack([zeros, du2_dm2], axis=-1),
        ],
        axis=-2,
    )
    return J


class SpringModel(ForwardModel):
    """Two-degree-of-freedom spring chain with design-scaled stiffness."""

    input_dim = 2
    latent_dim = 2
    output_dim = 2
    supports_batch = True

    def __init__(self, g="exp", f1=1.0, f2=1.0):
        _growth(g)  # validate early
        self.g = g
        self.f1 = float(f1)
        self.f2 = float(f2)

    def evaluate(self, x, m):
        k1, k2 = spring_stiffness(x, m, self.g)
        return spring_solve(k1, k2, self.f1, self.f2)

    def jacobian(self, x, m):
        return spring_jacobian(x, m, self.g, self.f1, self.f2)

    def evaluate_batch(self, X, M):
        k1, k2 = spring_stiffness(X, M, self.g)
        return spring_solve(k1, k2, self.f1, self.f2)

    def jacobian_batch(self, X, M):
        return spring_jacobian(X, M, self.g, self.f1, self.f2)

    def stiffness_matrix(self, x, m):
        k1, k2 = spring_stiffness(x, m, self.g)
        return spring_stiffness_matrix(k1, k2)

    def misfit_gradient(self, x, m, y, gamma_inv):
        """Gradient of 0.5*(y-G)' Gamma^{-1} (y-G) with respect to m."""
        r = y - self.evaluate(x, m)
        J = self.jacobian(x, m)
        return -J.T @ (gamma_inv @ r)
