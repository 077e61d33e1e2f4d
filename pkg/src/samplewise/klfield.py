"""Karhunen-Loeve basis for the exponential kernel exp(-||x-x'||_1 / ell) on [0,1]^2.

The separable kernel factors into two 1-D exponential kernels, whose
eigenpairs on an interval are known in closed form up to a transcendental
root. 2-D modes are tensor products sorted by descending eigenvalue.
"""

from dataclasses import dataclass, field

import numpy as np


class FieldOverflowError(ValueError):
    pass


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    if flo == 0.0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if (f(mid) > 0.0) == (flo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Eigenpairs1D:
    """1-D eigenpairs of exp(-|x-x'|/ell) on [0,1], descending eigenvalue."""

    lam: np.ndarray
    omega: np.ndarray
    parity: np.ndarray  # 0: cos family, 1: sin family
    ell: float

    def evaluate(self, i, x):
        """Eigenfunction i at points x (L2[0,1]-orthonormal)."""
        x = np.asarray(x, dtype=float)
        a = 0.5
        w = self.omega[i]
        xc = x - 0.5  # kernel is translation invariant; modes live on [-1/2, 1/2]
        s = np.sin(2.0 * w * a) / (2.0 * w)
        if self.parity[i] == 0:
            return np.cos(w * xc) / np.sqrt(a + s)
        return np.sin(w * xc) / np.sqrt(a - s)


def exp_kernel_eigenpairs_1d(q, ell=1.0):
    """First q eigenpairs, solving the transcendental root pair by bisection.

    cos family: c = w tan(w a); sin family: w = -c tan(w a), with a = 1/2,
    c = 1/ell. One root per half-period; families interleave in w.
    """
    if q < 1:
        raise ValueError("need at least one mode")
    if ell <= 0.0:
        raise ValueError("correlation length must be positive")
    a = 0.5
    c = 1.0 / ell
    eps = 1e-12
    omegas, parities = [], []
    k = 0
    while len(omegas) < q:
        if k == 0:
            # first cos root sits in (0, pi/2a)
            w = _bisect(lambda w: c - w * np.tan(w * a), eps, (0.5 * np.pi - eps) / a)
            omegas.append(w)
            parities.append(0)
        else:
            base = k * np.pi / a
            w_sin = _bisect(
                lambda w: w + c * np.tan(w * a), base - (0.5 * np.pi - eps) / a, base
            )
            omegas.append(w_sin)
            parities.append(1)
            if len(omegas) < q:
                w_cos = _bisect(
                    lambda w: c - w * np.tan(w * a), base, base + (0.5 * np.pi - eps) / a
                )
                omegas.append(w_cos)
                parities.append(0)
        k += 1
    omega = np.array(omegas[:q])
    lam = 2.0 * c / (omega**2 + c**2)
    return Eigenpairs1D(lam=lam, omega=omega, parity=np.array(parities[:q]), ell=ell)


@dataclass
class KlBasis:
    """Truncated 2-D basis evaluated at a fixed point set (element centroids)."""

    lam: np.ndarray         # (d,) tensor-product eigenvalues, descending
    values: np.ndarray      # (n_points, d) basis values, transformed if flagged
    points: np.ndarray      # (n_points, 2)
    transformed: bool
    ell: float = 1.0
    weighted: np.ndarray = field(init=False)  # values scaled by sqrt(lam)

    def __post_init__(self):
        self.weighted = self.values * np.sqrt(self.lam)

    @property
    def d(self):
        return self.lam.shape[0]


def transform_basis(values):
    """Componentwise reshaping that makes the modulus map one-to-one.

    First, third, ... columns (1-based odd) map through sin; the even ones
    through cos. Output entries are bounded by 1 in magnitude.
    """
    out = np.empty_like(values)
    out[:, 0::2] = np.sin(values[:, 0::2])
    out[:, 1::2] = np.cos(values[:, 1::2])
    return out


def kl_basis_2d(points, d, ell=1.0, transformed=False):
    """Top-d tensor-product modes at the given points.

    Products are sorted by descending eigenvalue; exact ties resolve by
    lexicographic (i, j) order of the 1-D indices.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError("points must be (n, 2)")
    pairs_1d = exp_kernel_eigenpairs_1d(d, ell)
    # top-d products only ever involve 1-D indices below d
    prods = [
        (pairs_1d.lam[i] * pairs_1d.lam[j], i, j) for i in range(d) for j in range(d)
    ]
    prods.sort(key=lambda t: (-t[0], t[1], t[2]))
    prods = prods[:d]
    lam = np.array([p[0] for p in prods])
    fx = {i: pairs_1d.evaluate(i, points[:, 0]) for i in range(d)}
    fy = {j: pairs_1d.evaluate(j, points[:, 1]) for j in range(d)}
    values = np.column_stack([fx[i] * fy[j] for _, i, j in prods])
    if not np.all(np.isfinite(values)):
        raise ValueError("basis evaluation produced non-finite entries")
    if transformed:
        values = transform_basis(values)
    return KlBasis(lam=lam, values=values, points=points, transformed=transformed, ell=ell)


def modulus_field(basis, m):
    """Material modulus E = exp(sum_i sqrt(lam_i) basis_i m_i) at every point."""
    m = np.asarray(m, dtype=float)
    expo = basis.weighted @ m
    if np.any(expo > 700.0):
        bad = int(np.argmax(expo))
        raise FieldOverflowError(
            f"modulus exponent {expo[bad]:.3g} at element {bad} exceeds 700"
        )
    return np.exp(expo)


def modulus_gradient(basis, m):
    """dE/dm at every point, shape (n_points, d)."""
    return basis.weighted * modulus_field(basis, m)[:, None]


def save_basis_csv(basis, path):
    header = "x,y," + ",".join(f"e{i+1}" for i in range(basis.d))
    data = np.column_stack([basis.points, basis.values])
    np.savetxt(path, data, delimiter=",", header=header, fmt="%.17g")


def load_basis_csv(path):
    data = np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#"))
    return data[:, :2], data[:, 2:]
