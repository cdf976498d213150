"""Command-line entry point: ``dtckit <verb> [options]``.

Exit codes: 0 success, 1 task failures, 2 configuration or input errors.
"""
from __future__ import annotations

import argparse
import logging
import sys

from dtckit import sweep, verify
from dtckit.config import ConfigError, load_config

log = logging.getLogger("dtckit")

EXIT_OK, EXIT_TASKS, EXIT_CONFIG = 0, 1, 2


def build_parser():
    p = argparse.ArgumentParser(prog="dtckit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="YAML sweep config")
        sp.add_argument("--out", help="output directory (overrides config)")

    sp = sub.add_parser("simulate", help="run the (theta, tau1, seed) sweep")
    common(sp)
    sp.add_argument("--workers", type=int, help="worker processes")
    sp.add_argument("--seed", type=int, help="master seed (overrides config)")

    sp = sub.add_parser("meanfield", help="mean-field phase-boundary scan")
    common(sp)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--seed", type=int)

    sp = sub.add_parser("analyze", help="recompute spectra, fractions and boundaries")
    common(sp, config_required=False)

    sp = sub.add_parser("plotdata", help="emit plot tables for one figure")
    common(sp, config_required=False)
    sp.add_argument("--figure", required=True, choices=sweep.FIGURES)

    sub.add_parser("verify", help="run the invariant suite")
    return p


def _out_dir(args, cfg):
    if args.out:
        return args.out
    if cfg is not None:
        return cfg.output
    raise ConfigError("--out or --config is required")


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.verb == "verify":
            checks = verify.run_all()
            for c in checks:
                print(c.line())
            return EXIT_OK if all(c.passed for c in checks) else EXIT_TASKS

        cfg = load_config(args.config) if args.config else None
        if getattr(args, "workers", None) is not None and args.workers < 1:
            raise ConfigError("--workers must be >= 1")

        if args.verb == "simulate":
            res = sweep.run_sweep(cfg, args.out, args.workers, args.seed)
        elif args.verb == "meanfield":
            res = sweep.run_meanfield(cfg, args.out, args.workers, args.seed)
        elif args.verb == "analyze":
            sweep.analyze(_out_dir(args, cfg), cfg)
            return EXIT_OK
        else:
            out = _out_dir(args, cfg)
            for path in sweep.emit_plotdata(out, args.figure, cfg):
                print(path)
            sweep.update_manifest(out, "plotdata", {"figure": args.figure})
            return EXIT_OK
    except (ConfigError, sweep.MissingInputs) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for i, err in sorted(res.failures.items()):
        print(f"task {i} failed: {err.splitlines()[0]}", file=sys.stderr)
    print(f"{res.n_tasks - len(res.failures)}/{res.n_tasks} tasks ok -> {res.out_dir}")
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
