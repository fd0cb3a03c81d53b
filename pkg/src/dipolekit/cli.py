"""Command-line front end: JSON scenario in, CSV tables out.

    dipolekit <command> --config run.json [--model M] [--initial S] [--out file.csv]
                        [--seed k] [--jobs n]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .coupling import GaugeProbe, couplings, gauge_deviation, spontaneous_rate
from .dressed import dressed_basis, symmetric_decay_rates
from .errors import ConfigError, DomainError, NumericalError
from .liouvillian import BUILDERS, INITIAL_STATES, initial_state, propagate
from .regression import (shifted_symmetric_frequency, spectrum_new, spectrum_standard,
                         standard_center)
from .units import (C_LIGHT, DEFAULT_OMEGA0, NaturalParams, ScenarioConfig, rydberg_defaults,
                    rydberg_radius, to_natural)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

COMMANDS = ("coeffs", "populations", "sweep", "spectrum", "peaks", "gauge-check")
MODELS = {"standard": "standard", "partial": "partial_secular", "secular": "full_secular"}

_STRICT = ConfigDict(extra="forbid", strict=True, populate_by_name=True)


# --------------------------------------------------------------------------
# configuration


class Grid(BaseModel):
    model_config = _STRICT

    start: float = Field(alias="from")
    to: float
    points: int = Field(ge=2)
    unit: str
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def _increasing(self):
        if not self.to > self.start:
            raise ValueError("grid must be strictly increasing (to > from)")
        if self.spacing == "log" and not self.start > 0:
            raise ValueError("log grid needs from > 0")
        return self

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.to, self.points)
        return np.linspace(self.start, self.to, self.points)


class TimeGrid(Grid):
    unit: Literal["s", "gamma"] = "gamma"


class FrequencyGrid(Grid):
    unit: Literal["fwhm", "detuning", "absolute"] = "fwhm"


class SeparationGrid(Grid):
    unit: Literal["ra", "m"] = "ra"


class Instant(BaseModel):
    model_config = _STRICT

    value: float = Field(ge=0)
    unit: Literal["s", "gamma"] = "gamma"


class Scenario(BaseModel):
    """SI scenario; with ``rydberg_n`` every field except the separation has a default."""

    model_config = _STRICT

    omega0: Optional[float] = None
    dipole: Optional[tuple[float, float, float]] = None
    separation: Optional[tuple[float, float, float]] = None
    separation_ra: Optional[float] = None
    beta: Optional[float] = None
    cutoff: Optional[float] = None
    rydberg_n: Optional[int] = None

    @model_validator(mode="after")
    def _consistent(self):
        if self.separation is not None and self.separation_ra is not None:
            raise ValueError("give either separation or separation_ra, not both")
        if self.rydberg_n is None:
            missing = [k for k in ("omega0", "dipole", "separation", "cutoff")
                       if getattr(self, k) is None]
            if missing:
                raise ValueError(f"without rydberg_n these are required: {', '.join(missing)}")
            if self.separation_ra is not None:
                raise ValueError("separation_ra needs rydberg_n")
        return self

    def to_config(self) -> ScenarioConfig:
        if self.rydberg_n is None:
            return ScenarioConfig(self.omega0, self.dipole, self.separation, self.beta,
                                  self.cutoff, None)
        base = rydberg_defaults(self.rydberg_n, 10.0 if self.separation_ra is None else self.separation_ra,
                                DEFAULT_OMEGA0 if self.omega0 is None else self.omega0)
        return ScenarioConfig(
            base.omega0,
            base.dipole if self.dipole is None else self.dipole,
            base.separation if self.separation is None else self.separation,
            self.beta, self.cutoff, self.rydberg_n)


class RunSettings(BaseModel):
    model_config = _STRICT

    model: Literal["standard", "partial", "secular"] = "partial"
    initial: str = "symmetric"
    seed: int = 0
    time_grid: Optional[TimeGrid] = None
    frequency_grid: Optional[FrequencyGrid] = None
    separation_grid: Optional[SeparationGrid] = None
    at_time: Instant = Instant(value=0.125)
    probes: int = Field(default=100, ge=1)
    mu_det: float = Field(default=1.0, gt=0)

    @field_validator("initial")
    @classmethod
    def _known_state(cls, v):
        if v not in INITIAL_STATES:
            raise ValueError(f"initial must be one of {INITIAL_STATES}")
        return v


class RunConfig(BaseModel):
    model_config = _STRICT

    scenario: Scenario
    run: RunSettings = RunSettings()


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


# --------------------------------------------------------------------------
# tables


class Table:
    """Column-oriented CSV table with ``name [unit]`` headers."""

    def __init__(self, columns: list[tuple[str, str]]):
        self.columns = columns
        self.rows: list[list] = []

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError("row length does not match header")
        self.rows.append(list(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(f"{name} [{unit}]" for name, unit in self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return f"{float(v):.11e}"


# --------------------------------------------------------------------------
# helpers


class Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.scenario = cfg.scenario.to_config()
        self.params = to_natural(self.scenario)
        self.run = cfg.run
        self.gamma = spontaneous_rate(self.params.omega0, self.params.d)

    @property
    def flavor(self) -> str:
        return MODELS[self.run.model]

    def seconds(self, values, unit: str) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return values / self.gamma if unit == "gamma" else values

    def separations(self) -> tuple[np.ndarray, str, np.ndarray]:
        """(grid values, grid unit, separation vectors in natural units)."""
        grid = self.run.separation_grid
        if grid is None:
            raise ConfigError("this command needs run.separation_grid")
        vals = grid.values()
        if grid.unit == "ra":
            if self.scenario.rydberg_n is None:
                raise ConfigError("separation unit 'ra' needs scenario.rydberg_n")
            metres = vals * rydberg_radius(self.scenario.rydberg_n)
        else:
            metres = vals
        scale = metres / (self.params.R * C_LIGHT)
        return vals, ("r_a" if grid.unit == "ra" else "m"), np.outer(scale, self.params.Rvec)


def _populations_row(p: dict, k: int) -> list:
    return [p["p_s"][k], p["p_g"][k], p["p_gg"][k], p["p_eps1"][k], p["p_eps2"][k]]


POP_COLUMNS = [("p_s", "1"), ("p_stationary", "1"), ("p_gg", "1"), ("p_eps1", "1"),
               ("p_eps2", "1"), ("min_eigenvalue", "1")]


def _trajectory(params: NaturalParams, flavor: str, initial: str, times):
    cs = couplings(params)
    L = BUILDERS[flavor](params, cs)
    return propagate(L, initial_state(initial, L), times)


def _sweep_point(args):
    params, flavor, initial, t = args
    traj = _trajectory(params, flavor, initial, np.array([0.0, t]))
    return _populations_row(traj.populations, 1) + [traj.min_eigenvalue[1]]


def _peak_point(params: NaturalParams):
    cs = couplings(params)
    b = dressed_basis(params.omega0, cs.C)
    s, s0 = spectrum_new(params, cs, b), spectrum_standard(params, cs)
    return [cs.C, s.peak_center, s0.peak_center, s.peak_center / s0.peak_center,
            s.peak_height, s0.peak_height, s.peak_height / s0.peak_height,
            s.fwhm, s0.fwhm, s.peak_center - s0.peak_center]


def _coeff_row(params: NaturalParams) -> list:
    cs = couplings(params)
    b = dressed_basis(params.omega0, cs.C)
    gs, gs0 = symmetric_decay_rates(b, cs)
    return [cs.C, cs.gamma0, cs.gamma12_at(params.omega0), cs.delta12, cs.delta12_transverse,
            cs.delta12 - cs.delta12_transverse, cs.delta, b.eta, b.omega1, b.omega2,
            b.a, b.b, b.c, b.d, gs, gs0, gs / gs0,
            standard_center(params, cs), shifted_symmetric_frequency(b, cs)]


COEFF_COLUMNS = [("C", "1/s"), ("gamma", "1/s"), ("gamma12", "1/s"), ("delta12", "1/s"),
                 ("delta12_transverse", "1/s"), ("delta12_minus_transverse", "1/s"),
                 ("delta", "1/s"), ("eta", "1/s"), ("omega1", "1/s"), ("omega2", "1/s"),
                 ("a", "1"), ("b", "1"), ("c", "1"), ("d", "1"), ("gamma_s", "1/s"),
                 ("gamma_s0", "1/s"), ("gamma_s_ratio", "1"),
                 ("standard_peak", "rad/s"), ("dressed_peak", "rad/s")]


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# commands


def cmd_coeffs(ctx: Context, jobs: int = 1) -> Table:
    if ctx.run.separation_grid is None:
        return _single(COEFF_COLUMNS, _coeff_row(ctx.params))
    vals, unit, Rvecs = ctx.separations()
    rows = _map(_coeff_row, [ctx.params.with_separation(R) for R in Rvecs], jobs)
    t = Table([("R", unit)] + COEFF_COLUMNS)
    for v, row in zip(vals, rows):
        t.add(v, *row)
    return t


def _single(columns, row) -> Table:
    t = Table(columns)
    t.add(*row)
    return t


def cmd_populations(ctx: Context, jobs: int = 1) -> Table:
    grid = ctx.run.time_grid
    if grid is None:
        raise ConfigError("populations needs run.time_grid")
    if grid.start < 0:
        raise ConfigError("time grid must be non-negative")
    times = ctx.seconds(grid.values(), grid.unit)
    traj = _trajectory(ctx.params, ctx.flavor, ctx.run.initial, times)
    t = Table([("t", "s"), ("gamma_t", "1")] + POP_COLUMNS)
    for k, tk in enumerate(times):
        t.add(tk, ctx.gamma * tk, *_populations_row(traj.populations, k), traj.min_eigenvalue[k])
    return t


def cmd_sweep(ctx: Context, jobs: int = 1) -> Table:
    vals, unit, Rvecs = ctx.separations()
    at = float(ctx.seconds(ctx.run.at_time.value, ctx.run.at_time.unit))
    items = [(ctx.params.with_separation(R), ctx.flavor, ctx.run.initial, at) for R in Rvecs]
    rows = _map(_sweep_point, items, jobs)
    t = Table([("R", unit), ("t", "s")] + POP_COLUMNS)
    for v, row in zip(vals, rows):
        t.add(v, at, *row)
    return t


def cmd_spectrum(ctx: Context, jobs: int = 1) -> Table:
    grid = ctx.run.frequency_grid
    if grid is None:
        raise ConfigError("spectrum needs run.frequency_grid")
    p = ctx.params
    cs = couplings(p)
    if not cs.N == 0:
        raise ConfigError("spectra are defined for the vacuum field (beta must be null)")
    mu = ctx.run.mu_det
    x = grid.values()
    s_peak, s0_peak = spectrum_new(p, cs, mu_det=mu), spectrum_standard(p, cs, mu_det=mu)
    if grid.unit == "absolute":
        s = spectrum_new(p, cs, detuning=x, mu_det=mu, omega_ref=0.0)
        s0 = spectrum_standard(p, cs, detuning=x, mu_det=mu, omega_ref=0.0)
        t = Table([("omega", "rad/s"), ("s", "arb"), ("s0", "arb")])
        for k in range(x.size):
            t.add(x[k], s.values[k], s0.values[k])
        return t
    ds = x * s_peak.fwhm if grid.unit == "fwhm" else x
    ds0 = x * s0_peak.fwhm if grid.unit == "fwhm" else x
    s = spectrum_new(p, cs, detuning=ds, mu_det=mu)
    s0 = spectrum_standard(p, cs, detuning=ds0, mu_det=mu)
    t = Table([("x", "fwhm" if grid.unit == "fwhm" else "rad/s"),
               ("omega", "rad/s"), ("s", "arb"), ("omega0_axis", "rad/s"), ("s0", "arb"),
               ("s_normalized", "1"), ("s0_normalized", "1")])
    sn, s0n = s.normalized(), s0.normalized()
    for k in range(x.size):
        t.add(x[k], s.omega_grid[k], s.values[k], s0.omega_grid[k], s0.values[k], sn[k], s0n[k])
    return t


def cmd_peaks(ctx: Context, jobs: int = 1) -> Table:
    if not ctx.params.vacuum:
        raise ConfigError("spectra are defined for the vacuum field (beta must be null)")
    vals, unit, Rvecs = ctx.separations()
    rows = _map(_peak_point, [ctx.params.with_separation(R) for R in Rvecs], jobs)
    t = Table([("R", unit), ("C", "1/s"), ("center_s", "rad/s"), ("center_s0", "rad/s"),
               ("center_ratio", "1"), ("height_s", "arb"), ("height_s0", "arb"),
               ("height_ratio", "1"), ("fwhm_s", "1/s"), ("fwhm_s0", "1/s"),
               ("center_difference", "rad/s")])
    for v, row in zip(vals, rows):
        t.add(v, *row)
    return t


GAUGE_ALPHA = 0.37


def cmd_gauge_check(ctx: Context, jobs: int = 1) -> Table:
    w0 = ctx.params.omega0
    rng = np.random.default_rng(ctx.run.seed)
    n = ctx.run.probes
    wk = w0 * 10 ** rng.uniform(-2, 1, n)
    Nk = rng.exponential(1.0, n)
    probes = [GaugeProbe("coulomb", w0), GaugeProbe("multipolar", w0),
              GaugeProbe("symmetric", w0), GaugeProbe("constant", w0, GAUGE_ALPHA)]
    dev = gauge_deviation(probes, wk, Nk)
    t = Table([("gauge", "-"), ("alpha", "1"), ("probes", "1"), ("seed", "1"),
               ("max_relative_deviation", "1")])
    for probe in probes:
        alpha = {"coulomb": "0", "multipolar": "1", "symmetric": "omega0/(omega0+omega_k)",
                 "constant": f"{GAUGE_ALPHA}"}[probe.choice]
        t.add(probe.choice, alpha, n, ctx.run.seed, dev[probe])
    t.add("all", "-", n, ctx.run.seed, max(dev.values()))
    return t


HANDLERS = {"coeffs": cmd_coeffs, "populations": cmd_populations, "sweep": cmd_sweep,
            "spectrum": cmd_spectrum, "peaks": cmd_peaks, "gauge-check": cmd_gauge_check}


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dipolekit", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON scenario and run settings")
    ap.add_argument("--model", choices=tuple(MODELS), help="override run.model")
    ap.add_argument("--initial", choices=INITIAL_STATES, help="override run.initial")
    ap.add_argument("--seed", type=int, help="override run.seed")
    ap.add_argument("--out", help="CSV output path (default: stdout)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return ap


def run(args: argparse.Namespace) -> tuple[int, str]:
    """Execute parsed arguments; returns (exit code, CSV text or error message)."""
    try:
        cfg = load_config(args.config)
        overrides = {k: getattr(args, k) for k in ("model", "initial", "seed")
                     if getattr(args, k) is not None}
        if overrides:
            cfg = cfg.model_copy(update={"run": cfg.run.model_copy(update=overrides)})
        ctx = Context(cfg)
        table = HANDLERS[args.command](ctx, jobs=max(1, args.jobs))
    except (ConfigError, DomainError) as exc:
        return EXIT_CONFIG, f"configuration error: {exc}"
    except NumericalError as exc:
        return EXIT_NUMERICAL, f"numerical failure: {exc}"
    return EXIT_OK, table.to_csv()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code, text = run(args)
    if code != EXIT_OK:
        print(text, file=sys.stderr)
        return code
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
