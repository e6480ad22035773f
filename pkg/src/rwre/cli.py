"""``rwre`` command line: one subcommand per canned experiment.

Every subcommand takes the same four flags::

    rwre <experiment> --config cfg.ini [--out DIR] [--threads K] [--seed-offset U]

The config file is line-oriented ``key = value`` text with one section
per experiment (see :mod:`rwre.experiments` for the schema).  On success
the path of the freshly created run directory is printed to stdout and
the exit code is 0; config errors exit 2, runtime errors exit 1, both
with a message on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, RwreError
from .experiments import EXPERIMENT_NAMES, ExperimentConfig, load_config, run

_HELP = {
    "kappa": "regime classification, tail exponent, speed, and zero-velocity rate",
    "bridge-prob": "exact log P(X_{2n} = 0) over a seed/n sweep",
    "confined": "exact log-probability of staying inside a strip",
    "max-disp-exact": "exact conditional quantiles and CDF of the bridge maximum",
    "sample-bridge": "draw exact conditioned bridges and summarize displacements",
    "scaling": "fit decay exponents or (log n)^2/n constants to exact series",
    "srw-smalldev": "simple-random-walk small-deviation constant",
    "mgf-check": "exit-time MGF: closed form vs series, and the 1 + C/ell bound",
    "com-check": "change-of-measure identity and sandwich on enumerable bridges",
    "longest-run": "longest run of fair sites per environment window",
    "conjecture-explore": "P(max >= n/(log n)^beta | bridge) across beta (no gate)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwre",
        description="Exact quenched computations and conditioned-path "
        "sampling for 1-D random walks in random environment.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="experiment")
    for name in EXPERIMENT_NAMES:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        p.add_argument("--config", required=True, metavar="PATH",
                       help="config file with a [%s] section" % name)
        p.add_argument("--out", default="runs", metavar="DIR",
                       help="parent directory for run directories (default: runs)")
        p.add_argument("--threads", type=int, default=1, metavar="K",
                       help="worker threads; never affects outputs (default: 1)")
        p.add_argument("--seed-offset", type=int, default=0, metavar="U",
                       help="added (mod 2^64) to every environment seed (default: 0)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = load_config(args.config, args.experiment)
        config = ExperimentConfig(
            experiment=args.experiment,
            params=params,
            out_root=Path(args.out),
            threads=args.threads,
            seed_offset=args.seed_offset,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        code, run_dir = run(config)
    except RwreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(run_dir)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
