"""Greedy pairing of scaled uniform prior samples with optimized samples.

Prior samples drawn from U[0,1]^d are first rescaled to the axis-aligned
bounding box of the optimized samples, then reordered so that row i of the
output is the nearest unused scaled prior to optimized row i.  The reordered
priors serve as regression inputs for the transport-map training step.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PermutationOutput",
    "scale_prior",
    "permute",
    "save_pairing_csv",
    "load_pairing_csv",
]


@dataclass
class PermutationOutput:
    m_tilde: np.ndarray   # (n, d) permuted scaled priors, row i pairs m_opt row i
    pairing: np.ndarray   # (n,) prior row index chosen for each optimized row


def scale_prior(m0, m_opt):
    """Affine map of unit-box samples onto the optimized-sample bounding box."""
    m0 = np.atleast_2d(np.asarray(m0, dtype=float))
    m_opt = np.atleast_2d(np.asarray(m_opt, dtype=float))
    lo = m_opt.min(axis=0)
    hi = m_opt.max(axis=0)
    return lo + (hi - lo) * m0


def permute(m0, m_opt):
    m0 = np.atleast_2d(np.asarray(m0, dtype=float))
    m_opt = np.atleast_2d(np.asarray(m_opt, dtype=float))
    if m0.shape[0] != m_opt.shape[0]:
        raise ValueError(
            f"prior and optimized sample counts differ: {m0.shape[0]} vs {m_opt.shape[0]}"
        )
    m_hat = scale_prior(m0, m_opt)
    n = m_opt.shape[0]
    remaining = np.arange(n)
    pairing = np.empty(n, dtype=int)
    m_tilde = np.empty_like(m_opt)
    for i in range(n):
        diff = m_hat[remaining] - m_opt[i]
        # argmin returns the first minimum, i.e. the lowest remaining index
        pick = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
        pairing[i] = remaining[pick]
        m_tilde[i] = m_hat[remaining[pick]]
        remaining = np.delete(remaining, pick)
    return PermutationOutput(m_tilde=m_tilde, pairing=pairing)


def save_pairing_csv(path, pairing):
    pairing = np.asarray(pairing, dtype=int)
    rows = np.column_stack([np.arange(pairing.size), pairing])
    np.savetxt(path, rows, delimiter=",", header="opt_index,prior_index", fmt="%d")


def load_pairing_csv(path):
    rows = np.atleast_2d(np.loadtxt(path, delimiter=",", comments="#", dtype=int))
    return rows[:, 1].copy()
