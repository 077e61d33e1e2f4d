"""Bandwidth selection for the mixture representation of a sample cloud.

Given posterior samples (here: optimized samples from the single-mode
spring problem), a uniform-weight Gaussian mixture with one component per
sample needs a bandwidth. Too small and the mixture is spiky; too large
and it leaks past the prior support, which shows up as a growing
(eventually infinite) complexity cost against a bounded prior. The cost
curve below has its minimum in between.
"""

import numpy as np

from samplewise import (
    GaussianMixture,
    InversionOptions,
    SpringModel,
    TruthSpec,
    generate_dataset,
    invert_dataset,
    make_truth,
    optimize_sigma,
)


def main():
    rng = np.random.default_rng(23)
    model = SpringModel(g="exp")
    truth = make_truth(TruthSpec(kind="unimodal"))
    data = generate_dataset(model, truth, 100, 0.005, rng)
    inv = invert_dataset(model, data.X, data.Y,
                         InversionOptions(residual_tol=1e-3))

    # smooth reference density over the latent region
    prior = GaussianMixture(np.array([1.0]),
                            np.array([[1.0, 1.0]]),
                            np.array([4.0 * np.eye(2)]))
    res = optimize_sigma(inv.samples, prior,
                         sigma_grid=np.logspace(-3, 0.5, 12),
                         rng=np.random.default_rng(1))

    print(f"{'sigma':>10}{'cost':>12}")
    for s, c in zip(res.sigma_grid, res.c1_values):
        marker = "  <- chosen" if s == res.sigma_opt else ""
        print(f"{s:>10.4f}{c:>12.4f}{marker}")


if __name__ == "__main__":
    main()
