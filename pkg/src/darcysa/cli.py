"""Command-line entry point.

Subcommands:
    run <config>     full ensemble pipeline -> samples/fits/histograms/manifest
    fields <config>  dump permeability realizations only
    fit <samples>    re-fit an existing samples.csv
    report <manifest> print a manifest summary with predicted cost terms

Exit codes: 0 success, 1 config error, 2 convergence-failure budget
exceeded (> 1% of realizations), 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import runner, stats
from .config import ConfigError, parse_config
from .randfield import CovarianceSpec, exponentiate, plan_embedding, sample_log_field, save_field

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CONVERGENCE = 2
EXIT_IO = 3

FAILURE_BUDGET = 0.01  # fraction of realizations allowed to fail


def _add_common(p):
    p.add_argument("--profile", choices=["desk", "paper"], default="paper")
    p.add_argument("--seed", type=int, help="master seed (overrides run.seed)")
    p.add_argument("--workers", type=int, help="worker processes (overrides run.workers)")
    p.add_argument("--out", help="output directory (overrides run.out)")
    p.add_argument("--solver", choices=["anneal", "fvm", "both"], help="overrides run.solver")


def build_parser():
    ap = argparse.ArgumentParser(prog="darcysa")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full ensemble pipeline")
    p_run.add_argument("config", nargs="?", help="config file; omit for pure profile defaults")
    _add_common(p_run)
    p_run.add_argument("--progress", action="store_true")

    p_fields = sub.add_parser("fields", help="dump permeability realizations")
    p_fields.add_argument("config", nargs="?")
    _add_common(p_fields)

    p_fit = sub.add_parser("fit", help="re-fit an existing samples.csv")
    p_fit.add_argument("samples", help="path to samples.csv")
    p_fit.add_argument("--out", default=".", help="directory for fits.csv / histograms.csv")

    p_rep = sub.add_parser("report", help="summarize a run manifest")
    p_rep.add_argument("manifest", help="path to manifest.txt")
    return ap


def _load_config(args):
    text = ""
    if getattr(args, "config", None):
        with open(args.config) as fh:
            text = fh.read()
    overrides = {}
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    if args.workers is not None:
        overrides["run.workers"] = args.workers
    if args.out is not None:
        overrides["run.out"] = args.out
    if args.solver is not None:
        overrides["run.solver"] = args.solver
    return parse_config(text, profile=args.profile, overrides=overrides)


def cmd_run(args) -> int:
    config = _load_config(args)
    print(runner.flop_report(config))
    manifest = runner.run(config, progress=args.progress)
    print(f"wrote {config.out_dir}/samples.csv ({manifest.n_total - manifest.n_failed} rows, "
          f"{manifest.n_failed} failures)")
    if manifest.n_failed > FAILURE_BUDGET * manifest.n_total:
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_fields(args) -> int:
    config = _load_config(args)
    os.makedirs(config.out_dir, exist_ok=True)
    for si, sigma2 in enumerate(config.sigma2s):
        plan = plan_embedding(CovarianceSpec(sigma2, config.corr_len, config.model), config.grid)
        for r in range(config.n):
            field_seed, _, seed_id = runner.realization_seeds(config.master_seed, si, r)
            K = exponentiate(sample_log_field(plan, field_seed))
            save_field(K, os.path.join(config.out_dir, f"perm_s{si}_r{r}.csv"), seed=seed_id)
    return EXIT_OK


def cmd_fit(args) -> int:
    groups = stats.read_samples_csv(args.samples)
    os.makedirs(args.out, exist_ok=True)
    fit_rows = []
    hist_rows = []
    for sigma2, samples in groups.items():
        table = stats.EnsembleTable(sigma2, (0, 0, 0))
        for s in samples:
            table.add(s)
        if table.n >= 10:
            fit_rows.extend(stats.fit_ensemble(table))
        if table.n >= 2:
            for obs in stats.OBSERVABLES:
                hist_rows.append((sigma2, obs, stats.histogram(table.values(obs))))
    stats.write_fits_csv(fit_rows, os.path.join(args.out, "fits.csv"))
    stats.write_histograms_csv(hist_rows, os.path.join(args.out, "histograms.csv"))
    print(f"wrote {args.out}/fits.csv and {args.out}/histograms.csv")
    return EXIT_OK


def cmd_report(args) -> int:
    entries = runner.RunManifest.read(args.manifest)
    for key in sorted(k for k in entries if k.startswith("config.") or k.startswith("timing.")):
        print(f"{key} = {entries[key]}")
    for key in ("version", "n_total", "n_failed"):
        if key in entries:
            print(f"{key} = {entries[key]}")
    failures = [k for k in entries if k.startswith("failure.")]
    for key in failures[:20]:
        print(f"{key} = {entries[key]}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "run": cmd_run,
        "fields": cmd_fields,
        "fit": cmd_fit,
        "report": cmd_report,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
