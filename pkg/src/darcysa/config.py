"""Run configuration: flat dotted-key documents with validated defaults.

Schema (all keys optional; omitted keys take the active profile's default):

    grid.nx / grid.ny / grid.nz        int >= 1
    domain.lx / domain.ly / domain.lz  float > 0  [m]
    bc.inlet / bc.outlet               float      [m]
    cov.sigma2                         list of floats >= 0
    cov.corr_len                       list of 3 floats > 0  [m]
    cov.model                          'exponential' | 'gaussian'
    run.n                              int >= 1   realizations per sigma2
    run.solver                         'anneal' | 'fvm' | 'both'
    run.workers                        int >= 1
    run.seed                           int        master seed
    run.out                            str        output directory
    anneal.m / anneal.n_s / anneal.max_phases / anneal.max_greedy_sweeps  int
    anneal.alpha / anneal.t_i / anneal.eps1 / anneal.eps2 / anneal.or_ratio
    anneal.width / anneal.target_acceptance / anneal.plateau_rtol         float

Lines are `key = value`; '#' starts a comment; lists are JSON arrays.
The 'paper' profile reproduces the published parameter set; 'desk' is a
minutes-scale preset (12x17x12 grid, N = 200, sigma2 in {0.5, 2.5}).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .anneal import AnnealConfig
from .grid import BoundaryConditions, GridError, GridSpec
from .randfield import KERNELS

SOLVERS = ("anneal", "fvm", "both")

TABLE1_SIGMA2 = (0.125, 0.25, 0.5, 1.0, 1.75, 2.5)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    bc: BoundaryConditions
    sigma2s: tuple[float, ...]
    corr_len: tuple[float, float, float]
    model: str
    n: int
    solver: str
    workers: int
    master_seed: int
    out_dir: str
    anneal: AnnealConfig
    n_s_user_set: bool = False

    def anneal_for(self, sigma2: float) -> AnnealConfig:
        """Per-parameter-set schedule: n_s doubles to 6000 for sigma2 > 1
        unless the document set anneal.n_s explicitly."""
        if not self.n_s_user_set and sigma2 > 1.0 and self.anneal.n_s == 3000:
            return replace(self.anneal, n_s=6000)
        return self.anneal


_PAPER_DEFAULTS = {
    "grid.nx": 50, "grid.ny": 70, "grid.nz": 50,
    "domain.lx": 40.0, "domain.ly": 85.0, "domain.lz": 25.0,
    "bc.inlet": 1.0, "bc.outlet": 0.0,
    "cov.sigma2": list(TABLE1_SIGMA2),
    "cov.corr_len": [8.0, 8.0, 5.0],
    "cov.model": "exponential",
    "run.n": 10000, "run.solver": "anneal", "run.workers": 1,
    "run.seed": 0, "run.out": "out",
    "anneal.m": 2000, "anneal.n_s": 3000, "anneal.alpha": 0.9, "anneal.t_i": 0.5,
    "anneal.eps1": 0.1, "anneal.eps2": 1e-2, "anneal.or_ratio": 0.75,
    "anneal.width": None, "anneal.target_acceptance": 0.4,
    "anneal.plateau_rtol": 0.01, "anneal.max_phases": 500,
    "anneal.max_greedy_sweeps": 200_000,
}

_DESK_OVERRIDES = {
    "grid.nx": 12, "grid.ny": 17, "grid.nz": 12,
    "run.n": 200,
    "cov.sigma2": [0.5, 2.5],
    "anneal.m": 100, "anneal.n_s": 60, "anneal.alpha": 0.85,
}

_INT_KEYS = {
    "grid.nx", "grid.ny", "grid.nz", "run.n", "run.workers", "run.seed",
    "anneal.m", "anneal.n_s", "anneal.max_phases", "anneal.max_greedy_sweeps",
}
_FLOAT_KEYS = {
    "domain.lx", "domain.ly", "domain.lz", "bc.inlet", "bc.outlet",
    "anneal.alpha", "anneal.t_i", "anneal.eps1", "anneal.eps2", "anneal.or_ratio",
    "anneal.width", "anneal.target_acceptance", "anneal.plateau_rtol",
}
_STR_KEYS = {"cov.model", "run.solver", "run.out"}
_LIST_KEYS = {"cov.sigma2", "cov.corr_len"}


def _coerce(key, raw, lineno):
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw  # bare strings are allowed for the string keys
    where = f"line {lineno}: {key}"
    if key in _INT_KEYS:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{where} must be an integer, got {raw!r}")
        return value
    if key in _FLOAT_KEYS:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where} must be a number, got {raw!r}")
        return float(value)
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string, got {raw!r}")
        return value
    if key in _LIST_KEYS:
        if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(f"{where} must be a JSON array of numbers, got {raw!r}")
        return [float(v) for v in value]
    raise ConfigError(f"{where}: unknown key")


def parse_config(text: str, profile: str = "paper", overrides: dict | None = None) -> RunConfig:
    """Parse a key-value document into a validated RunConfig.

    `overrides` (dotted key -> value) wins over the document; used for
    CLI flags like --seed and --workers.
    """
    if profile not in ("paper", "desk"):
        raise ConfigError(f"unknown profile {profile!r}")
    values = dict(_PAPER_DEFAULTS)
    if profile == "desk":
        values.update(_DESK_OVERRIDES)
    n_s_user_set = profile == "desk"

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in values:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw, lineno)
        if key == "anneal.n_s":
            n_s_user_set = True

    if overrides:
        for key, val in overrides.items():
            if key not in values:
                raise ConfigError(f"override: unknown key {key!r}")
            values[key] = val
            if key == "anneal.n_s":
                n_s_user_set = True

    return _build(values, n_s_user_set)


def _build(v: dict, n_s_user_set: bool) -> RunConfig:
    try:
        grid = GridSpec(v["grid.nx"], v["grid.ny"], v["grid.nz"],
                        v["domain.lx"], v["domain.ly"], v["domain.lz"])
        bc = BoundaryConditions(v["bc.inlet"], v["bc.outlet"])
    except GridError as e:
        raise ConfigError(str(e)) from e
    sigma2s = tuple(v["cov.sigma2"])
    if any(s < 0 for s in sigma2s) or not sigma2s:
        raise ConfigError("cov.sigma2 must be a non-empty list of values >= 0")
    corr = v["cov.corr_len"]
    if len(corr) != 3 or any(c <= 0 for c in corr):
        raise ConfigError("cov.corr_len must be 3 positive lengths")
    if v["cov.model"] not in KERNELS:
        raise ConfigError(f"cov.model must be one of {KERNELS}")
    if v["run.n"] < 1:
        raise ConfigError("run.n must be >= 1")
    if v["run.solver"] not in SOLVERS:
        raise ConfigError(f"run.solver must be one of {SOLVERS}")
    if v["run.workers"] < 1:
        raise ConfigError("run.workers must be >= 1")
    try:
        anneal = AnnealConfig(
            m=v["anneal.m"], n_s=v["anneal.n_s"], alpha=v["anneal.alpha"],
            t_i=v["anneal.t_i"], eps1=v["anneal.eps1"], eps2=v["anneal.eps2"],
            or_ratio=v["anneal.or_ratio"], proposal_width=v["anneal.width"],
            target_acceptance=v["anneal.target_acceptance"],
            plateau_rtol=v["anneal.plateau_rtol"], max_phases=v["anneal.max_phases"],
            max_greedy_sweeps=v["anneal.max_greedy_sweeps"],
        )
    except ValueError as e:
        raise ConfigError(f"anneal.*: {e}") from e
    return RunConfig(
        grid=grid, bc=bc, sigma2s=sigma2s, corr_len=tuple(corr), model=v["cov.model"],
        n=v["run.n"], solver=v["run.solver"], workers=v["run.workers"],
        master_seed=v["run.seed"], out_dir=v["run.out"], anneal=anneal,
        n_s_user_set=n_s_user_set,
    )


def config_items(cfg: RunConfig) -> list[tuple[str, str]]:
    """Resolved configuration as flat (key, value) pairs for the manifest echo."""
    g, bc, a = cfg.grid, cfg.bc, cfg.anneal
    return [
        ("grid.nx", g.nx), ("grid.ny", g.ny), ("grid.nz", g.nz),
        ("domain.lx", g.lx), ("domain.ly", g.ly), ("domain.lz", g.lz),
        ("bc.inlet", bc.inlet_pressure), ("bc.outlet", bc.outlet_pressure),
        ("cov.sigma2", json.dumps(list(cfg.sigma2s))),
        ("cov.corr_len", json.dumps(list(cfg.corr_len))),
        ("cov.model", cfg.model),
        ("run.n", cfg.n), ("run.solver", cfg.solver), ("run.workers", cfg.workers),
        ("run.seed", cfg.master_seed), ("run.out", cfg.out_dir),
        ("anneal.m", a.m), ("anneal.n_s", a.n_s), ("anneal.alpha", a.alpha),
        ("anneal.t_i", a.t_i), ("anneal.eps1", a.eps1), ("anneal.eps2", a.eps2),
        ("anneal.or_ratio", a.or_ratio), ("anneal.width", a.proposal_width),
        ("anneal.target_acceptance", a.target_acceptance),
        ("anneal.plateau_rtol", a.plateau_rtol), ("anneal.max_phases", a.max_phases),
        ("anneal.max_greedy_sweeps", a.max_greedy_sweeps),
    ]
