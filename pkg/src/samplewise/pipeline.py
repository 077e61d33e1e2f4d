"""Stage orchestration: chains dataset generation, inversion, prior
permutation, transport-map training, prediction, comparison baselines,
bandwidth selection, and metric reporting, writing artifacts under a run
directory with a seed-and-hash manifest."""

import datetime
import json
from pathlib import Path

import numpy as np

from .baselines import (
    distance_loglik,
    gaussian_coverage_points,
    hmc_sample,
    map_posterior_mixture,
    mh_sample,
    optimize_sigma,
    save_chain_csv,
    save_chain_metadata,
    standard_loglik,
    standard_loglik_grad,
)
from .config import config_hash, load_config, validate_config
from .experiments import (
    TruthSpec,
    generate_dataset,
    generate_design_inputs,
    make_truth,
    mode_fractions,
    moment_errors,
    normalized_error,
    synthesize_design_fields,
)
from .fem import FemModel, FemProblem
from .forward import SpringModel
from .gmm import uniform_box_logpdf
from .inversion import (
    InversionOptions,
    TikhonovSchedule,
    invert_dataset,
    invert_with_noise,
    load_samples_csv,
    save_samples_csv,
    write_convergence_report,
)
from .klfield import kl_basis_2d
from .mesh import nearest_node, nodes_where, rect_mesh
from .nnk import (
    TrainingOptions,
    augment_prior,
    init_network,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from .permutation import permute, save_pairing_csv, scale_prior

__all__ = ["PipelineRun", "StageError", "STAGES", "run_experiment"]

STAGES = (
    "generate",
    "invert",
    "permute",
    "train",
    "predict",
    "baseline_map",
    "baseline_mh",
    "baseline_hmc",
    "sigma",
    "report",
)


class StageError(RuntimeError):
    """A pipeline stage failed; partial artifacts are kept on disk."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage


def _default_layers(kind, d):
    if kind == "analytic":
        return [2, 7, 4, 1]
    if d == 2:
        return [2, 20, 7, 4, 1] if kind == "ushape" else [2, 10, 4, 1]
    return [d, 12, 7, 4, 1]


def _default_anchors(kind, d):
    if d == 2:
        return 40 if kind == "ushape" else 20
    return 25


class PipelineRun:
    """One configured experiment bound to an output directory.

    Stage methods read their inputs from the directory and write their
    outputs back, so they compose across processes; ``run`` chains them.
    """

    def __init__(self, cfg, out_dir=None, seed=None, threads=None):
        self.cfg = validate_config(cfg) if not _is_validated(cfg) else cfg
        exp = self.cfg["experiment"]
        if seed is not None:
            exp["seed"] = int(seed)
        if threads is not None:
            exp["threads"] = int(threads)
        if out_dir is not None:
            exp["out_dir"] = str(out_dir)
        self.out = Path(exp["out_dir"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.master_seed = exp["seed"]
        self._model = None
        self._fem_problem = None

    # ------------------------------------------------------------ plumbing

    def stage_seed(self, stage, substream=0):
        return [self.master_seed, STAGES.index(stage), substream]

    def stage_rng(self, stage, substream=0):
        return np.random.default_rng(self.stage_seed(stage, substream))

    def path(self, *parts):
        p = self.out.joinpath(*parts)
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def _manifest_path(self):
        return self.out / "manifest.json"

    def _load_manifest(self):
        p = self._manifest_path()
        if p.exists():
            return json.loads(p.read_text())
        return {
            "experiment": self.cfg["experiment"]["name"],
            "config": self.cfg,
            "config_sha256": config_hash(self.cfg),
            "master_seed": self.master_seed,
            "stages": {},
            "notes": [],
        }

    def _record_stage(self, stage, artifacts, info=None):
        manifest = self._load_manifest()
        manifest["stages"][stage] = {
            "seed": self.stage_seed(stage),
            "completed_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "artifacts": [str(Path(a).relative_to(self.out)) for a in artifacts],
            "info": info or {},
        }
        self._manifest_path().write_text(json.dumps(manifest, indent=2))

    def note(self, text):
        manifest = self._load_manifest()
        if text not in manifest["notes"]:
            manifest["notes"].append(text)
        self._manifest_path().write_text(json.dumps(manifest, indent=2))

    # ------------------------------------------------------------- helpers

    @property
    def kind(self):
        return self.cfg["truth"]["kind"]

    @property
    def is_analytic(self):
        return self.cfg["experiment"]["model"] == "analytic"

    @property
    def is_fem(self):
        return self.cfg["experiment"]["model"] == "fem"

    def truth(self):
        t = self.cfg["truth"]
        return make_truth(
            TruthSpec(kind=t["kind"], d=t["d"], weights=t["weights"],
                      means=t["means"], covs=t["covs"])
        )

    def fem_problem(self):
        if self._fem_problem is None:
            f = self.cfg["fem"]
            mesh = rect_mesh(f["nx"], f["ny"])
            basis = kl_basis_2d(mesh.centroids(), f["d"], ell=f["ell"],
                                transformed=f["transformed"])
            dirichlet = nodes_where(mesh, lambda x, y: np.isclose(x, 0.0))
            load = np.zeros(mesh.n_nodes)
            load[nearest_node(mesh, (1.0, 0.5))] = 1.0
            self._fem_problem = FemProblem(
                mesh=mesh, dirichlet=dirichlet, load=load, basis=basis,
                simp_exponent=f["simp_exponent"],
            )
        return self._fem_problem

    def model(self):
        if self._model is None:
            name = self.cfg["experiment"]["model"]
            if name == "spring":
                self._model = SpringModel(g="exp")
            elif name == "spring_square":
                self._model = SpringModel(g="square")
            elif name == "fem":
                self._model = FemModel(self.fem_problem())
            else:
                self._model = None  # analytic: latents observed directly
        return self._model

    def _load(self, *parts):
        return load_samples_csv(self.path(*parts))

    def _wrap(self, stage, fn):
        try:
            return fn()
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, exc) from exc

    # -------------------------------------------------------------- stages

    def generate(self):
        return self._wrap("generate", self._generate)

    def _generate(self):
        cfg = self.cfg
        truth = self.truth()
        model = self.model()
        n_train = cfg["dataset"]["n_train"]
        n_test = cfg["dataset"]["n_test"]
        if self.is_fem:
            train_set = self._generate_fem(truth, n_train, substream=0)
            test_set = self._generate_fem(truth, n_test, substream=1)
        else:
            train_set = generate_dataset(
                model, truth, n_train, cfg["dataset"]["delta_x"],
                self.stage_rng("generate", 0), center=cfg["dataset"]["center"],
            )
            test_set = generate_dataset(
                model, truth, n_test, cfg["dataset"]["delta_x"],
                self.stage_rng("generate", 1), center=cfg["dataset"]["center"],
            )
        artifacts = []
        for tag, ds in (("train", train_set), ("test", test_set)):
            for name, arr in (("X", ds.X), ("Y", ds.Y), ("M", ds.M)):
                p = self.path("dataset", f"{tag}_{name}.csv")
                save_samples_csv(p, arr)
                artifacts.append(p)
        prov = self.path("dataset", "provenance.json")
        prov.write_text(json.dumps(
            {"train": train_set.provenance, "test": test_set.provenance},
            indent=2))
        artifacts.append(prov)
        self._record_stage("generate", artifacts,
                           {"n_train": int(train_set.n_data),
                            "n_test": int(test_set.n_data)})
        return train_set, test_set

    def _generate_fem(self, truth, n_rows, substream):
        fem_cfg = self.cfg["fem"]
        rng = self.stage_rng("generate", substream)
        problem = self.fem_problem()
        centroids = problem.mesh.centroids()
        n_keep = fem_cfg["n_keep"]
        n_noise = fem_cfg["n_noise_per"]
        n_fields = max(n_keep, -(-n_rows // n_noise))
        bases = synthesize_design_fields(centroids, n_fields, rng,
                                         n_bumps=fem_cfg["n_bumps"])
        X = generate_design_inputs(bases, n_fields, n_noise, rng,
                                   jitter=fem_cfg["jitter"])[:n_rows]
        M = truth.sample(n_rows, rng)
        model = self.model()
        Y = np.array([model.evaluate(x, m) for x, m in zip(X, M)])
        from .experiments import Dataset

        return Dataset(X=X, Y=Y, M=M, provenance={
            "truth": truth.spec.to_dict(), "seed": None,
            "n_data": int(n_rows), "design_fields": int(n_fields)})

    def invert(self):
        return self._wrap("invert", self._invert)

    def _invert(self):
        artifacts = []
        if self.is_analytic:
            # latents are observed directly; inversion is the identity
            m_star = self._load("dataset", "train_M.csv")
            p = self.path("inversion", "m_star.csv")
            save_samples_csv(p, m_star)
            artifacts.append(p)
            self._record_stage("invert", artifacts, {"identity": True})
            return m_star
        inv = self.cfg["inversion"]
        opts = InversionOptions(
            beta=inv["beta"], residual_tol=inv["residual_tol"],
            max_iter=inv["max_iter"],
            tikhonov=TikhonovSchedule(threshold=inv["threshold"],
                                      above=inv["loose"], below=inv["tight"]),
        )
        model = self.model()
        X = self._load("dataset", "train_X.csv")
        Y = self._load("dataset", "train_Y.csv")
        threads = self.cfg["experiment"]["threads"]
        result = invert_dataset(model, X, Y, opts, n_jobs=threads)
        p = self.path("inversion", "m_star.csv")
        save_samples_csv(p, result.samples)
        artifacts.append(p)
        rep = self.path("inversion", "convergence.json")
        write_convergence_report(rep, result, opts)
        artifacts.append(rep)
        info = {"n_converged": int(result.n_converged),
                "n_samples": int(result.samples.shape[0])}
        if self.cfg["noise"]["enabled"]:
            noisy = invert_with_noise(
                model, X, Y, self.cfg["noise"]["delta"],
                self.cfg["noise"]["n_per_sample"],
                self.stage_rng("invert", 1), opts, n_jobs=threads,
            )
            pn = self.path("inversion", "m_star_noisy.csv")
            save_samples_csv(pn, noisy.samples)
            artifacts.append(pn)
            rn = self.path("inversion", "convergence_noisy.json")
            write_convergence_report(rn, noisy, opts)
            artifacts.append(rn)
            info["n_noisy"] = int(noisy.samples.shape[0])
        self._record_stage("invert", artifacts, info)
        return result

    def permute(self):
        return self._wrap("permute", self._permute)

    def _permute(self):
        if self.is_analytic:
            self._record_stage("permute", [], {"skipped": "latents are paired with inputs"})
            return None
        m_star = self._load("inversion", "m_star.csv")
        rng = self.stage_rng("permute")
        m0 = rng.uniform(0.0, 1.0, m_star.shape)
        out = permute(m0, m_star)
        p1 = self.path("permutation", "prior_unit.csv")
        save_samples_csv(p1, m0)
        p2 = self.path("permutation", "permuted_prior.csv")
        save_samples_csv(p2, out.m_tilde)
        p3 = self.path("permutation", "pairing.csv")
        save_pairing_csv(p3, out.pairing)
        self._record_stage("permute", [p1, p2, p3], {})
        return out

    def train(self):
        return self._wrap("train", self._train)

    def _train(self):
        if self.is_analytic:
            A = self._load("dataset", "train_X.csv")
            T = self._load("dataset", "train_M.csv")
        else:
            A = self._load("permutation", "permuted_prior.csv")
            T = self._load("inversion", "m_star.csv")
        ncfg = self.cfg["nnk"]
        d = T.shape[1]
        layers = ncfg["layer_sizes"] or _default_layers(self.kind, A.shape[1])
        n_anchor = ncfg["n_anchor"] or _default_anchors(self.kind, A.shape[1])
        anchor_box = (A.min(axis=0), A.max(axis=0))
        net = init_network(layers, n_anchor, d, self.stage_rng("train"),
                           anchor_box=anchor_box)
        opts = TrainingOptions(
            trainer=ncfg["trainer"], beta=ncfg["beta"], max_iter=ncfg["max_iter"],
            residual_tol=ncfg["tol_factor"] * np.linalg.norm(T),
        )
        result = train(net, A, T, opts)
        ckpt = self.path("nnk", "checkpoint.json")
        save_checkpoint(ckpt, result.net, history=result.history)
        summary = self.path("nnk", "training.json")
        summary.write_text(json.dumps({
            "layer_sizes": list(layers), "n_anchor": int(n_anchor),
            "trainer": ncfg["trainer"], "iterations": int(result.iterations),
            "converged": bool(result.converged),
            "final_residual": float(result.history[-1]),
            "residual_tol": float(opts.residual_tol),
        }, indent=2))
        self._record_stage("train", [ckpt, summary],
                           {"iterations": int(result.iterations),
                            "converged": bool(result.converged)})
        return result

    def predict(self):
        return self._wrap("predict", self._predict)

    def _predict(self):
        net, _ = load_checkpoint(self.path("nnk", "checkpoint.json"))
        artifacts = []
        outputs = {}
        if self.is_analytic:
            jobs = [("train", self._load("dataset", "train_X.csv")),
                    ("test", self._load("dataset", "test_X.csv"))]
        else:
            m_star = self._load("inversion", "m_star.csv")
            A_train = self._load("permutation", "permuted_prior.csv")
            rng = self.stage_rng("predict")
            n_test = self.cfg["dataset"]["n_test"]
            uniform = scale_prior(rng.uniform(0.0, 1.0, (n_test, m_star.shape[1])),
                                  m_star)
            pcfg = self.cfg["prior"]
            augmented = augment_prior(A_train, pcfg["n_augment_per"],
                                      pcfg["augment_sigma"], rng)
            jobs = [("train", A_train), ("uniform", uniform),
                    ("augmented", augmented)]
        for tag, inputs in jobs:
            pred = predict(net, inputs)
            pi = self.path("predict", f"{tag}_inputs.csv")
            save_samples_csv(pi, inputs)
            pp = self.path("predict", f"{tag}_pred.csv")
            save_samples_csv(pp, pred)
            artifacts.extend([pi, pp])
            outputs[tag] = pred
        self._record_stage("predict", artifacts,
                           {k: int(v.shape[0]) for k, v in outputs.items()})
        return outputs

    def baseline_map(self):
        return self._wrap("baseline_map", self._baseline_map)

    def _baseline_map(self):
        mcfg = self.cfg["baselines"]["map"]
        if not mcfg["enabled"]:
            self._record_stage("baseline_map", [], {"skipped": "disabled"})
            return None
        model = self.model()
        X = self._load("dataset", "train_X.csv")
        Y = self._load("dataset", "train_Y.csv")
        d = self._load("dataset", "train_M.csv").shape[1]
        n_obs = Y.shape[1]
        starts = gaussian_coverage_points(d, mcfg["n_quadrature"],
                                          scale=mcfg["coverage_scale"])
        gamma = mcfg["gamma_scale"] * np.eye(n_obs)
        sigma0 = mcfg["sigma0_scale"] * np.eye(d)
        mixture, notes = map_posterior_mixture(model, X, Y, starts, gamma,
                                               sigma0, max_iter=mcfg["max_iter"])
        samples = mixture.sample(mcfg["n_samples"], self.stage_rng("baseline_map"))
        ps = self.path("baselines", "map_samples.csv")
        save_samples_csv(ps, samples)
        pj = self.path("baselines", "map.json")
        pj.write_text(json.dumps({
            "n_components": int(mixture.means.shape[0]),
            "means": mixture.means.tolist(),
            "weights": mixture.weights.tolist(),
            "notes": notes,
        }, indent=2))
        self._record_stage("baseline_map", [ps, pj],
                           {"n_components": int(mixture.means.shape[0])})
        return mixture

    def baseline_mh(self):
        return self._wrap("baseline_mh", self._baseline_mh)

    def _mh_target(self):
        mcfg = self.cfg["baselines"]["mh"]
        if mcfg["likelihood"] == "distance":
            m_star = self._load("inversion", "m_star.csv")
            gamma = None
            if mcfg["gamma_scale"] is not None:
                gamma = mcfg["gamma_scale"] * np.eye(m_star.shape[1])
            return lambda m: distance_loglik(m, m_star, mcfg["n_lkl"], gamma)
        if mcfg["likelihood"] == "standard":
            model = self.model()
            X = self._load("dataset", "train_X.csv")
            Y = self._load("dataset", "train_Y.csv")
            scale = mcfg["gamma_scale"] if mcfg["gamma_scale"] is not None else 0.01
            gamma = scale * np.eye(Y.shape[1])
            return lambda m: standard_loglik(model, m, X, Y, gamma)
        raise ValueError(
            f"unknown mh likelihood {mcfg['likelihood']!r}; "
            "expected 'distance' or 'standard'")

    def _baseline_mh(self):
        mcfg = self.cfg["baselines"]["mh"]
        if not mcfg["enabled"]:
            self._record_stage("baseline_mh", [], {"skipped": "disabled"})
            return None
        log_target = self._mh_target()
        artifacts = []
        chains = []
        for i, start in enumerate(mcfg["starts"]):
            start = np.asarray(start, dtype=float)
            proposal = mcfg["proposal_scale"] * np.eye(start.size)
            chain = mh_sample(log_target, start, proposal, mcfg["n_steps"],
                              self.stage_rng("baseline_mh", i))
            pc = self.path("baselines", f"mh_chain_{i}.csv")
            save_chain_csv(pc, chain)
            pm = self.path("baselines", f"mh_chain_{i}.json")
            save_chain_metadata(pm, chain)
            artifacts.extend([pc, pm])
            chains.append(chain)
        self._record_stage("baseline_mh", artifacts,
                           {"accepted": [c.accept_count for c in chains]})
        return chains

    def baseline_hmc(self):
        return self._wrap("baseline_hmc", self._baseline_hmc)

    def _baseline_hmc(self):
        hcfg = self.cfg["baselines"]["hmc"]
        if not hcfg["enabled"]:
            self._record_stage("baseline_hmc", [], {"skipped": "disabled"})
            return None
        if hcfg["target"] == "truth_mixture":
            gmm = self.truth().gmm
            log_target, grad_target = gmm.logpdf, gmm.grad_logpdf
        elif hcfg["target"] == "standard":
            model = self.model()
            X = self._load("dataset", "train_X.csv")
            Y = self._load("dataset", "train_Y.csv")
            gamma = hcfg["gamma_scale"] * np.eye(Y.shape[1])
            log_target = lambda m: standard_loglik(model, m, X, Y, gamma)
            grad_target = lambda m: standard_loglik_grad(model, m, X, Y, gamma)
        else:
            raise ValueError(
                f"unknown hmc target {hcfg['target']!r}; "
                "expected 'truth_mixture' or 'standard'")
        artifacts = []
        chains = []
        for i, start in enumerate(hcfg["starts"]):
            chain = hmc_sample(log_target, grad_target,
                               np.asarray(start, dtype=float), hcfg["n_steps"],
                               self.stage_rng("baseline_hmc", i),
                               epsilon=hcfg["epsilon"],
                               n_leapfrog=hcfg["n_leapfrog"])
            pc = self.path("baselines", f"hmc_chain_{i}.csv")
            save_chain_csv(pc, chain)
            pm = self.path("baselines", f"hmc_chain_{i}.json")
            save_chain_metadata(pm, chain)
            artifacts.extend([pc, pm])
            chains.append(chain)
        self._record_stage("baseline_hmc", artifacts,
                           {"accepted": [c.accept_count for c in chains],
                            "divergent": [c.n_divergent for c in chains]})
        return chains

    def sigma(self):
        return self._wrap("sigma", self._sigma)

    def _sigma(self):
        scfg = self.cfg["sigma"]
        if not scfg["enabled"]:
            self._record_stage("sigma", [], {"skipped": "disabled"})
            return None
        m_star = self._load("inversion", "m_star.csv")
        lo, hi = m_star.min(axis=0), m_star.max(axis=0)
        prior = uniform_box_logpdf(lo, hi)
        res = optimize_sigma(m_star, prior, sigma_grid=scfg["grid"],
                             n_mc=scfg["n_mc"], rng=self.stage_rng("sigma"))
        p = self.path("sigma", "sigma.json")
        p.write_text(json.dumps({
            "sigma_opt": res.sigma_opt,
            "sigma_grid": res.sigma_grid.tolist(),
            "c1_values": [v if np.isfinite(v) else None
                          for v in res.c1_values],
        }, indent=2))
        self._record_stage("sigma", [p], {"sigma_opt": res.sigma_opt})
        return res

    def report(self):
        return self._wrap("report", self._report)

    def _push_outputs(self, model, x_star, latents):
        if getattr(model, "supports_batch", False):
            X = np.broadcast_to(x_star, (latents.shape[0], x_star.size))
            return model.evaluate_batch(X, latents)
        return np.array([model.evaluate(x_star, m) for m in latents])

    def _report(self):
        metrics = {}
        truth = self.truth()
        if self.is_analytic:
            for tag in ("train", "test"):
                pred = self._load("predict", f"{tag}_pred.csv")
                ref = self._load("dataset", f"{tag}_M.csv")
                metrics[f"e_{tag}"] = normalized_error(pred, ref)
        else:
            m_star = self._load("inversion", "m_star.csv")
            M_true = self._load("dataset", "train_M.csv")
            metrics["inversion"] = {
                "e_latent": normalized_error(m_star, M_true),
                "convergence": json.loads(
                    self.path("inversion", "convergence.json").read_text()),
            }
            ref = truth.sample(self.cfg["report"]["n_reference"],
                               self.stage_rng("report", 0))
            radius = self.cfg["report"]["mode_radius"]
            metrics["train_fit"] = {
                "e_train": normalized_error(
                    self._load("predict", "train_pred.csv"), m_star),
            }
            metrics["latent_moments"] = {}
            metrics["mode_fractions"] = {}
            for tag in ("uniform", "augmented"):
                pred = self._load("predict", f"{tag}_pred.csv")
                metrics["latent_moments"][tag] = moment_errors(pred, ref).to_dict()
                metrics["mode_fractions"][tag] = mode_fractions(
                    pred, truth.modes, radius).tolist()
            chain_files = sorted(self.path("baselines").glob("*_chain_*.csv")) \
                if self.path("baselines").exists() else []
            for f in chain_files:
                states = np.atleast_2d(load_samples_csv(f))
                metrics["mode_fractions"][f.stem] = mode_fractions(
                    states, truth.modes, radius).tolist()
            map_file = self.path("baselines", "map_samples.csv")
            if map_file.exists():
                map_samples = load_samples_csv(map_file)
                metrics["latent_moments"]["map"] = moment_errors(
                    map_samples, ref).to_dict()
                metrics["mode_fractions"]["map"] = mode_fractions(
                    map_samples, truth.modes, radius).tolist()
            if not self.is_fem:
                metrics["output_moments"] = self._output_moments(truth)
        p = self.path("report", "metrics.json")
        p.write_text(json.dumps(metrics, indent=2))
        self._record_stage("report", [p], {})
        return metrics

    def _output_moments(self, truth):
        model = self.model()
        x_star = np.asarray(self.cfg["report"]["eval_input"], dtype=float)
        n_mc = self.cfg["report"]["n_mc_truth"]
        ref_latents = truth.sample(n_mc, self.stage_rng("report", 1))
        ref_out = self._push_outputs(model, x_star, ref_latents)
        out = {"eval_input": x_star.tolist()}
        sources = {
            "uniform": self.path("predict", "uniform_pred.csv"),
            "augmented": self.path("predict", "augmented_pred.csv"),
            "map": self.path("baselines", "map_samples.csv"),
        }
        for tag, f in sources.items():
            if not f.exists():
                continue
            latents = load_samples_csv(f)
            pushed = self._push_outputs(model, x_star, latents)
            out[tag] = moment_errors(pushed, ref_out).to_dict()
        return out

    # ----------------------------------------------------------------- run

    def run(self):
        self.generate()
        self.invert()
        self.permute()
        self.train()
        self.predict()
        self.baseline_map()
        if self.is_analytic:
            # no latent posterior to sample against
            self._record_stage("baseline_mh", [], {"skipped": "analytic"})
            self._record_stage("baseline_hmc", [], {"skipped": "analytic"})
            self._record_stage("sigma", [], {"skipped": "analytic"})
        else:
            self.baseline_mh()
            self.baseline_hmc()
            self.sigma()
        return self.report()


def _is_validated(cfg):
    from .config import _SCHEMA

    return isinstance(cfg, dict) and set(cfg) == set(_SCHEMA)


def run_experiment(config_path, out_dir=None, seed=None, threads=None):
    """Load a config file, execute every stage, and return the metrics."""
    cfg = load_config(config_path)
    run = PipelineRun(cfg, out_dir=out_dir, seed=seed, threads=threads)
    run.run()
    return run
