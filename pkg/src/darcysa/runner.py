"""Ensemble orchestration: seeds, workers, solver wiring, CSV artifacts, manifest."""

from __future__ import annotations

import math
import multiprocessing
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__, anneal, fvm, stats
from .config import RunConfig, config_items
from .darcy import PressureState
from .randfield import CovarianceSpec, EmbeddingPlan, exponentiate, plan_embedding, sample_log_field


@dataclass
class RunManifest:
    """Flat key-value record of a run: config echo, seeds, timings, failures."""

    entries: list[tuple[str, object]] = field(default_factory=list)
    n_failed: int = 0
    n_total: int = 0

    def add(self, key, value):
        self.entries.append((key, value))

    def write(self, path):
        with open(path, "w") as fh:
            for key, value in self.entries:
                fh.write(f"{key} = {value}\n")

    @staticmethod
    def read(path) -> dict:
        out = {}
        with open(path) as fh:
            for line in fh:
                if "=" in line:
                    key, val = line.split("=", 1)
                    out[key.strip()] = val.strip()
        return out


class RunFailure(RuntimeError):
    pass


def realization_seeds(master_seed: int, sigma_index: int, realization: int):
    """Splittable per-task seeding: order- and worker-independent.

    Returns (field_seed, anneal_seed, seed_id) where seed_id is a 64-bit
    integer recorded in the manifest.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(sigma_index, realization))
    field_seed, anneal_seed = ss.spawn(2)
    words = ss.generate_state(2, np.uint32)
    seed_id = (int(words[0]) << 32) | int(words[1])
    return field_seed, anneal_seed, seed_id


_CTX: dict = {}


def _init_worker(ctx):
    _CTX.update(ctx)


def _run_one(args):
    si, r = args
    cfg: RunConfig = _CTX["config"]
    plan: EmbeddingPlan = _CTX["plan"]
    sigma2: float = _CTX["sigma2"]
    acfg = _CTX["anneal_cfg"]
    field_seed, anneal_seed, seed_id = realization_seeds(cfg.master_seed, si, r)
    t0 = time.perf_counter()
    L = sample_log_field(plan, field_seed)
    K = exponentiate(L)
    t_gen = time.perf_counter() - t0

    p_sa = p_fvm = None
    maxdiff = None
    t0 = time.perf_counter()
    try:
        if cfg.solver in ("fvm", "both"):
            p_fvm = fvm.reference_solution(K, cfg.grid, cfg.bc, rule=acfg.rule)
        if cfg.solver in ("anneal", "both"):
            p_sa, _ = anneal.solve(K, cfg.grid, cfg.bc, acfg, anneal_seed)
    except (anneal.AnnealError, fvm.SolveError) as e:
        return (r, None, None, seed_id, t_gen, time.perf_counter() - t0, str(e))
    t_solve = time.perf_counter() - t0

    if p_sa is not None and p_fvm is not None:
        maxdiff = float(np.max(np.abs(p_sa.values - p_fvm.values)))
    solution: PressureState = p_sa if p_sa is not None else p_fvm
    norm = stats.NormalizationSpec.for_run(sigma2, cfg.grid, cfg.bc)
    sample = stats.extract(solution, K, norm, sigma2, realization_id=r, rule=acfg.rule)
    return (r, sample, maxdiff, seed_id, t_gen, t_solve, None)


def run(config: RunConfig, progress: bool = False) -> RunManifest:
    """Execute the full pipeline and write samples.csv, fits.csv,
    histograms.csv and manifest.txt into config.out_dir."""
    os.makedirs(config.out_dir, exist_ok=True)
    manifest = RunManifest()
    for key, value in config_items(config):
        manifest.add(f"config.{key}", value)
    manifest.add("version", __version__)

    tables = []
    fit_rows = []
    hist_rows = []
    seed_entries = []
    maxdiff_entries = []
    failure_entries = []
    t_start = time.perf_counter()
    total_gen = total_solve = 0.0

    for si, sigma2 in enumerate(config.sigma2s):
        t_sigma = time.perf_counter()
        cov = CovarianceSpec(sigma2, config.corr_len, config.model)
        plan = plan_embedding(cov, config.grid)
        ctx = {
            "config": config,
            "plan": plan,
            "sigma2": sigma2,
            "anneal_cfg": config.anneal_for(sigma2),
        }
        tasks = [(si, r) for r in range(config.n)]
        if config.workers > 1:
            mp = multiprocessing.get_context("fork")
            with mp.Pool(config.workers, initializer=_init_worker, initargs=(ctx,)) as pool:
                results = pool.map(_run_one, tasks, chunksize=max(1, config.n // (4 * config.workers)))
        else:
            _init_worker(ctx)
            results = [_run_one(t) for t in tasks]
        results.sort(key=lambda t: t[0])

        table = stats.EnsembleTable(sigma2, config.grid.shape)
        for r, sample, maxdiff, seed_id, t_gen, t_solve, err in results:
            seed_entries.append((f"seed.{si}.{r}", seed_id))
            total_gen += t_gen
            total_solve += t_solve
            if err is not None:
                failure_entries.append((f"failure.{si}.{r}", err))
                continue
            table.add(sample)
            if maxdiff is not None:
                maxdiff_entries.append((f"maxdiff.{si}.{r}", repr(maxdiff)))
        tables.append(table)
        if table.n >= 10:
            fit_rows.extend(stats.fit_ensemble(table))
        if table.n >= 2:
            for obs in stats.OBSERVABLES:
                hist_rows.append((sigma2, obs, stats.histogram(table.values(obs))))
        manifest.add(f"timing.sigma2.{si}_s", f"{time.perf_counter() - t_sigma:.3f}")
        if progress:
            print(f"sigma2={sigma2}: {table.n}/{config.n} converged")

    stats.write_samples_csv(tables, os.path.join(config.out_dir, "samples.csv"))
    stats.write_fits_csv(fit_rows, os.path.join(config.out_dir, "fits.csv"))
    stats.write_histograms_csv(hist_rows, os.path.join(config.out_dir, "histograms.csv"))

    manifest.n_total = config.n * len(config.sigma2s)
    manifest.n_failed = len(failure_entries)
    manifest.add("n_total", manifest.n_total)
    manifest.add("n_failed", manifest.n_failed)
    for key, value in seed_entries:
        manifest.add(key, value)
    for key, value in maxdiff_entries:
        manifest.add(key, value)
    for key, value in failure_entries:
        manifest.add(key, value)
    manifest.add("timing.generate_s", f"{total_gen:.3f}")
    manifest.add("timing.solve_s", f"{total_solve:.3f}")
    manifest.add("timing.total_s", f"{time.perf_counter() - t_start:.3f}")
    manifest.write(os.path.join(config.out_dir, "manifest.txt"))
    return manifest


def flop_report(config: RunConfig, manifest: RunManifest | None = None) -> str:
    """Predicted asymptotic per-realization cost terms at the configured grid,
    plus measured wall-clock when a manifest is available."""
    n = config.grid.n_cells
    lines = [
        f"cells: {n}",
        f"field generation (FFT): ~{2 * n * math.log(n):.3e} flops",
        f"finite-volume solve:    ~{n * math.log(n):.3e} flops",
        f"annealing:              ~{float(n) ** 2:.3e} flops",
    ]
    if manifest is not None:
        timings = {k: v for k, v in manifest.entries if str(k).startswith("timing.")}
        for key, value in timings.items():
            lines.append(f"measured {key[7:]}: {value} s")
    return "\n".join(lines)
