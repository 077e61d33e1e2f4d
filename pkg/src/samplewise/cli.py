"""Command-line interface running pipeline stages from a TOML config.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
"""

import argparse
import sys
import traceback

from .config import ConfigError, load_config
from .pipeline import PipelineRun, StageError

STAGE_COMMANDS = ("generate", "invert", "permute", "train", "predict",
                  "sigma", "report", "run")


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="samplewise",
        description="Sample-wise inversion and transport-map inference pipeline.",
    )
    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, help="TOML experiment config")
    common.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    common.add_argument("--out-dir", default=None,
                        help="override the output directory")
    common.add_argument("--threads", type=int, default=None,
                        help="worker count for per-sample stages")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "generate": "synthesize the training and test datasets",
        "invert": "solve the per-sample inverse problems",
        "permute": "scale and greedily pair the prior samples",
        "train": "fit the kernel-network transport map",
        "predict": "apply the transport map to prior sample sets",
        "sigma": "select the posterior-mixture bandwidth",
        "report": "compute metrics from existing artifacts",
        "run": "execute every stage in order",
    }
    for name in STAGE_COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    baseline = sub.add_parser("baseline", parents=[common],
                              help="run a comparison method")
    baseline.add_argument("which", choices=("map", "mh", "hmc"),
                          help="which baseline to run")
    return parser


def _execute(args):
    cfg = load_config(args.config)
    if args.command == "baseline":
        # explicit invocation overrides a disabled config entry
        cfg["baselines"][args.which]["enabled"] = True
    elif args.command == "sigma":
        cfg["sigma"]["enabled"] = True
    run = PipelineRun(cfg, out_dir=args.out_dir, seed=args.seed,
                      threads=args.threads)
    if args.command == "baseline":
        getattr(run, f"baseline_{args.which}")()
        done = f"baseline_{args.which}"
    elif args.command == "run":
        run.run()
        done = "all stages"
    else:
        getattr(run, args.command)()
        done = args.command
    print(f"samplewise: {done} complete -> {run.out}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _execute(args)
    except ConfigError as exc:
        print(f"samplewise: configuration error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"samplewise: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
