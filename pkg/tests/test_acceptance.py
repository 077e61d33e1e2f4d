"""End-to-end acceptance checks.

Each test exercises one headline behaviour of the inference pipeline at a
fixed tolerance and yields a single verbose pass/fail line. Four pipeline
runs (smooth-map regression, one-mode and two-mode spring studies, and the
six-dimensional field problem) are shared module-wide through fixtures.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

import samplewise
from samplewise.baselines import mh_sample, standard_loglik
from samplewise.config import load_config
from samplewise.experiments import (
    TruthSpec,
    generate_dataset,
    make_truth,
    mode_fractions,
    moment_errors,
)
from samplewise.fem import FemModel, FemProblem, misfit_gradient
from samplewise.forward import SpringModel
from samplewise.gmm import GaussianMixture
from samplewise.inversion import (
    InversionOptions,
    invert_dataset,
    invert_with_noise,
    load_samples_csv,
)
from samplewise.klfield import exp_kernel_eigenpairs_1d, kl_basis_2d
from samplewise.mesh import nearest_node, nodes_where, rect_mesh
from samplewise.nnk import (
    TrainingOptions,
    augment_prior,
    get_params,
    init_network,
    kernel_forward,
    predict,
    residual_and_jacobian,
    set_params,
    train,
)
from samplewise.permutation import permute, scale_prior
from samplewise.pipeline import PipelineRun

CONFIG_DIR = Path(samplewise.__file__).parent / "configs"


def _run_pipeline(config_name, out_dir):
    cfg = load_config(CONFIG_DIR / config_name)
    run = PipelineRun(cfg, out_dir=str(out_dir))
    t0 = time.perf_counter()
    metrics = run.run()
    return run, metrics, time.perf_counter() - t0


@pytest.fixture(scope="module")
def analytic_run(tmp_path_factory):
    return _run_pipeline("analytic.toml", tmp_path_factory.mktemp("analytic"))


@pytest.fixture(scope="module")
def unimodal_run(tmp_path_factory):
    return _run_pipeline("spring_unimodal.toml", tmp_path_factory.mktemp("unimodal"))


@pytest.fixture(scope="module")
def bimodal_run(tmp_path_factory):
    return _run_pipeline("spring_bimodal.toml", tmp_path_factory.mktemp("bimodal"))


@pytest.fixture(scope="module")
def fem_run(tmp_path_factory):
    return _run_pipeline("fem_bimodal_d6.toml", tmp_path_factory.mktemp("fem_d6"))


def _central_diff(f, x, h):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def test_smooth_map_accuracy_and_newton_beats_gradient_descent(analytic_run):
    run, metrics, elapsed = analytic_run
    assert metrics["e_train"] <= 1.5e-2, f"train error {metrics['e_train']:.4g}"
    assert metrics["e_test"] <= 2e-2, f"test error {metrics['e_test']:.4g}"
    assert elapsed < 60.0, f"pipeline took {elapsed:.1f}s"
    summary = json.loads(run.path("nnk", "training.json").read_text())
    A = load_samples_csv(run.path("dataset", "train_X.csv"))
    T = load_samples_csv(run.path("dataset", "train_M.csv"))
    # identical initialization, gradient-descent trainer at its full budget
    net = init_network([2, 7, 4, 1], 20, T.shape[1], run.stage_rng("train"),
                       anchor_box=(A.min(axis=0), A.max(axis=0)))
    gd = train(net, A, T, TrainingOptions(trainer="gradient_descent",
                                          max_iter=10000,
                                          residual_tol=0.01 * np.linalg.norm(T)))
    assert summary["final_residual"] < gd.history[-1], (
        f"Newton {summary['final_residual']:.4g} vs "
        f"gradient descent {gd.history[-1]:.4g}")


def test_prior_permutation_improves_held_out_moments():
    rng = np.random.default_rng([0, 99, 0])
    model = SpringModel(g="exp")
    truth = make_truth(TruthSpec(kind="unimodal"))
    ds = generate_dataset(model, truth, 200, 0.005, rng)
    inv = invert_dataset(model, ds.X, ds.Y, InversionOptions(residual_tol=1e-3))
    m0 = rng.uniform(0.0, 1.0, size=(200, 2))
    scaled = scale_prior(m0, inv.samples)
    permuted = permute(m0, inv.samples).m_tilde
    test_pts = scale_prior(rng.uniform(0.0, 1.0, size=(1000, 2)), inv.samples)
    mu_true = np.array([1.0, 1.0])
    sd_true = np.sqrt(np.array([1.4, 0.41]))
    errs = {}
    for name, prior in (("with", permuted), ("without", scaled)):
        net = init_network([2, 10, 4, 1], 20, 2, np.random.default_rng([0, 7, 1]),
                           anchor_box=(scaled.min(axis=0), scaled.max(axis=0)))
        train(net, prior, inv.samples, TrainingOptions(max_iter=2000))
        pred = predict(net, test_pts)
        errs[name] = np.concatenate([
            np.abs(pred.mean(axis=0) - mu_true) / np.abs(mu_true),
            np.abs(pred.std(axis=0, ddof=1) - sd_true) / sd_true,
        ])
    wins = int((errs["with"] < errs["without"]).sum())
    assert wins >= 3, (
        f"permuted priors win only {wins}/4 held-out moment metrics "
        f"(with {errs['with'].round(4)}, without {errs['without'].round(4)})")


def test_two_mode_output_prediction_accuracy(bimodal_run):
    _, metrics, elapsed = bimodal_run
    out = metrics["output_moments"]
    assert out["eval_input"] == [0.9, 0.8]
    aug = out["augmented"]
    uni = out["uniform"]
    assert aug["e_mu"][0] <= 5e-2, f"augmented mean error {aug['e_mu'][0]:.4g}"
    assert aug["e_sigma"][0] <= 5e-2, f"augmented spread error {aug['e_sigma'][0]:.4g}"
    assert uni["e_mu"][0] <= 1e-1, f"uniform mean error {uni['e_mu'][0]:.4g}"
    assert uni["e_sigma"][0] <= 1e-1, f"uniform spread error {uni['e_sigma'][0]:.4g}"
    assert elapsed < 600.0, f"pipeline took {elapsed:.1f}s"


def test_noise_free_inversion_converges_and_recovers_latents(unimodal_run):
    run, metrics, _ = unimodal_run
    conv = metrics["inversion"]["convergence"]["fraction_converged"]
    assert conv == 1.0, f"converged fraction {conv}"
    m_star = load_samples_csv(run.path("inversion", "m_star.csv"))
    m_true = load_samples_csv(run.path("dataset", "train_M.csv"))
    worst = float(np.linalg.norm(m_star - m_true, axis=1).max())
    assert worst <= 1e-3, f"largest per-sample recovery error {worst:.3e}"


def test_chain_samplers_collapse_while_transport_covers_modes(bimodal_run):
    run, metrics, _ = bimodal_run
    modes = make_truth(TruthSpec(kind="bimodal")).modes
    aug = metrics["mode_fractions"]["augmented"]
    assert min(aug) >= 0.30, f"transport mode fractions {aug}"
    hmc_files = sorted(run.path("baselines").glob("hmc_chain_*.csv"))
    assert hmc_files, "no gradient-chain output found"
    for f in hmc_files:
        fr = mode_fractions(np.atleast_2d(load_samples_csv(f)), modes, 1.0)
        assert fr.min() <= 0.10, f"{f.name} mode fractions {fr}"
    X = load_samples_csv(run.path("dataset", "train_X.csv"))
    Y = load_samples_csv(run.path("dataset", "train_Y.csv"))
    model = SpringModel(g="exp")
    gamma = 0.01 * np.eye(Y.shape[1])
    chain = mh_sample(lambda m: standard_loglik(model, m, X, Y, gamma),
                      np.zeros(2), 1e-4 * np.eye(2), 2000,
                      np.random.default_rng([0, 55, 0]))
    fr = mode_fractions(chain.states, modes, 1.0)
    assert fr.min() <= 0.10, f"misfit-likelihood chain mode fractions {fr}"


def test_map_mixture_spread_error_exceeds_transport(unimodal_run):
    _, metrics, _ = unimodal_run
    out = metrics["output_moments"]
    ratio = out["map"]["e_sigma"][0] / out["uniform"]["e_sigma"][0]
    assert ratio >= 5.0, (
        f"spread-error ratio {ratio:.2f} "
        f"(point-estimate mixture {out['map']['e_sigma'][0]:.3g}, "
        f"transport {out['uniform']['e_sigma'][0]:.3g})")


def test_noisy_inversion_degrades_gracefully(bimodal_run):
    # paired design: identical noise directions, selection, initialization,
    # and test draws at every level, so only the noise scale varies; five
    # training replicates per level average out transport run-to-run scatter
    run, _, _ = bimodal_run
    model = SpringModel(g="exp")
    X = load_samples_csv(run.path("dataset", "train_X.csv"))
    Y = load_samples_csv(run.path("dataset", "train_Y.csv"))
    truth = make_truth(TruthSpec(kind="bimodal"))
    x_star = np.array([0.75, 0.75])
    ref_latents = truth.sample(1000, np.random.default_rng([0, 66, 0]))
    ref_out = np.array([model.evaluate(x_star, m) for m in ref_latents])
    n_rep = 5
    uniform_err = []
    augmented_err = []
    for delta in (1e-3, 1e-2, 1e-1):
        rng = np.random.default_rng([0, 66, 7])
        inv = invert_with_noise(model, X, Y, delta, 100, rng,
                                InversionOptions(residual_tol=0.01, max_iter=500))
        uni = np.zeros((n_rep, 2))
        aug = np.zeros((n_rep, 2))
        for r in range(n_rep):
            sub = np.random.default_rng([0, 66, 8, r])
            keep = sub.choice(inv.samples.shape[0], 200, replace=False)
            m_opt = inv.samples[keep]
            permuted = permute(sub.uniform(0.0, 1.0, (200, 2)), m_opt).m_tilde
            net = init_network([2, 10, 4, 1], 20, 2, sub,
                               anchor_box=(permuted.min(axis=0),
                                           permuted.max(axis=0)))
            train(net, permuted, m_opt, TrainingOptions(max_iter=2000))
            uniform_pts = scale_prior(sub.uniform(0.0, 1.0, (1000, 2)), m_opt)
            augmented_pts = augment_prior(permuted, 5, 0.002, sub)
            for row, pts in ((uni[r], uniform_pts), (aug[r], augmented_pts)):
                pushed = np.array([model.evaluate(x_star, m)
                                   for m in predict(net, pts)])
                rep = moment_errors(pushed, ref_out)
                row[:] = [rep.e_mu[0], rep.e_sigma[0]]
        uniform_err.append(uni.mean(axis=0))
        augmented_err.append(aug.mean(axis=0))
    assert augmented_err[2][1] <= 2e-1, (
        f"augmented-prior spread error at strongest noise {augmented_err[2][1]:.4g}")
    mus = [e[0] for e in uniform_err]
    sds = [e[1] for e in uniform_err]
    assert mus[0] <= mus[1] <= mus[2], (
        f"uniform-prior mean errors not monotone {np.round(mus, 4)}")
    assert sds[0] <= sds[1] <= sds[2], (
        f"uniform-prior spread errors not monotone {np.round(sds, 4)}")


def test_numerical_kernels_and_field_mode_recovery(fem_run):
    rng = np.random.default_rng(123)
    for g in ("exp", "square"):
        model = SpringModel(g=g)
        for _ in range(20):
            x = rng.uniform(0.3, 0.9, 2)
            m = rng.uniform(0.2, 1.2, 2)
            J = model.jacobian(x, m)
            Jfd = _central_diff(lambda mm: model.evaluate(x, mm), m, 1e-6)
            assert np.max(np.abs(J - Jfd)) <= 1e-6 * max(1.0, np.max(np.abs(J)))

    mesh = rect_mesh(5, 5)
    basis = kl_basis_2d(mesh.centroids(), 6, transformed=True)
    load = np.zeros(mesh.n_nodes)
    load[nearest_node(mesh, (1.0, 0.5))] = 1.0
    problem = FemProblem(mesh=mesh,
                         dirichlet=nodes_where(mesh, lambda x, y: np.isclose(x, 0.0)),
                         load=load, basis=basis)
    fem_model = FemModel(problem)
    x_design = rng.uniform(0.3, 1.0, mesh.n_elements)
    for _ in range(3):
        m = rng.uniform(-0.5, 0.5, 6)
        J = fem_model.jacobian(x_design, m)
        Jfd = _central_diff(lambda mm: fem_model.evaluate(x_design, mm), m, 1e-5)
        denom = max(1.0, np.max(np.abs(J)))
        assert np.max(np.abs(J - Jfd)) / denom <= 1e-4

    # adjoint and direct misfit gradients are the same algebra
    m = rng.uniform(-0.5, 0.5, 6)
    y = rng.standard_normal(mesh.n_nodes)
    g_adj = misfit_gradient(problem, m, y, gamma_inv=2.0, method="adjoint")
    g_dir = misfit_gradient(problem, m, y, gamma_inv=2.0, method="direct")
    assert np.max(np.abs(g_adj - g_dir)) <= 1e-10 * max(1.0, np.max(np.abs(g_dir)))

    # network parameter jacobian against central differences
    net = init_network([2, 3, 1], 3, 2, rng)
    A = rng.uniform(-1.0, 1.0, (4, 2))
    T = rng.uniform(-1.0, 1.0, (4, 2))
    R, J = residual_and_jacobian(net, A, T)
    theta0 = get_params(net)

    def residual_of(theta):
        set_params(net, theta)
        r, _ = residual_and_jacobian(net, A, T)
        set_params(net, theta0)
        return r

    Jfd = _central_diff(residual_of, theta0, 1e-6)
    assert np.max(np.abs(J - Jfd)) / max(1.0, np.max(np.abs(J))) <= 1e-5

    # mixture density gradient against central differences
    mix = GaussianMixture(weights=[0.4, 0.6],
                          means=[[0.0, 0.0], [2.0, 1.0]],
                          covs=[np.eye(2), [[0.5, 0.2], [0.2, 0.8]]])
    for _ in range(5):
        p = rng.standard_normal(2)
        g_an = mix.grad_logpdf(p)
        g_fd = _central_diff(lambda q: mix.logpdf(q), p, 1e-6)
        assert np.max(np.abs(g_an - g_fd)) <= 1e-5 * max(1.0, np.max(np.abs(g_an)))

    # field eigenvalues against a dense quadrature of the covariance operator
    n_quad = 2000
    xq = (np.arange(n_quad) + 0.5) / n_quad
    Kq = np.exp(-np.abs(xq[:, None] - xq[None, :])) / n_quad
    lam_ref = np.linalg.eigvalsh(Kq)[::-1][:6]
    lam = exp_kernel_eigenpairs_1d(6).lam
    assert np.max(np.abs(lam - lam_ref) / lam_ref) <= 5e-3

    # kernel matrix invariants on random inputs
    B = rng.uniform(-2.0, 2.0, (7, 2))
    C = rng.uniform(-2.0, 2.0, (5, 2))
    K1 = kernel_forward(net, B, C)
    K2 = kernel_forward(net, C, B)
    assert np.allclose(K1, K2.T, atol=1e-12)
    assert np.all(K1 > 0.0) and np.all(K1 < 1.0)

    run, metrics, elapsed = fem_run
    assert run.fem_problem().mesh.n_nodes <= 600
    assert elapsed < 1800.0, f"field pipeline took {elapsed:.0f}s"
    fractions = metrics["mode_fractions"]["augmented"]
    assert min(fractions) >= 0.30, f"field-problem mode fractions {fractions}"
