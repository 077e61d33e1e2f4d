"""Chain samplers against a two-mode target, side by side.

Random-walk Metropolis with the summed-misfit likelihood and Hamiltonian
Monte Carlo on the analytic mixture density both concentrate on a single
basin, whichever one the chain reaches first. The transport map covers
both (see bimodal_transport.py). This script runs the chains and tabulates
how much of each chain lands within radius 1 of each true mode.
"""

import numpy as np

from samplewise import (
    SpringModel,
    TruthSpec,
    generate_dataset,
    hmc_sample,
    make_truth,
    mh_sample,
    mode_fractions,
    standard_loglik,
)


def main():
    rng = np.random.default_rng(5)
    model = SpringModel(g="exp")
    truth = make_truth(TruthSpec(kind="bimodal"))
    data = generate_dataset(model, truth, 200, 0.005, rng)
    modes = truth.modes

    # misfit posterior over all 200 pairs; small steps keep acceptance alive
    gamma = 0.01 * np.eye(2)
    chain = mh_sample(lambda m: standard_loglik(model, m, data.X, data.Y, gamma),
                      np.zeros(2), 1e-4 * np.eye(2), 2000,
                      np.random.default_rng(1))
    frac = mode_fractions(chain.states, modes, radius=1.0)
    rate = chain.accept_count / 2000
    print(f"MH (misfit likelihood)  accept {rate:.2f}  "
          f"mode fractions {np.round(frac, 3)}")

    gmm = truth.gmm
    for start in ([3.0, 3.0], [-3.0, -3.0]):
        chain = hmc_sample(gmm.logpdf, gmm.grad_logpdf, np.array(start),
                           500, np.random.default_rng(2))
        frac = mode_fractions(chain.states, modes, radius=1.0)
        print(f"HMC from {start}        accept "
              f"{chain.accept_count / 500:.2f}  mode fractions {np.round(frac, 3)}")

    print("\nEach chain covers at most one of the two modes.")


if __name__ == "__main__":
    main()
