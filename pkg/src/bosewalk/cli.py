"""Command-line interface.

Usage::

    bosewalk walk --sites 29 --U 8 --T 4 --initial doublon@14
    bosewalk spectrum --sites 29 --U 8
    bosewalk classical --gamma 0.5 --realizations 10000 --seed 7
    bosewalk compare --U-sweep 0,0.5,1,1.5,2,3,5 --realizations 10000 --seed 7
    bosewalk reference --initial adjacent@14 --T 4
    bosewalk --figure fig2k

Settings can also come from a ``key = value`` file passed with ``--config``;
command-line flags take precedence. Every run writes ``config.json`` (the full
effective configuration) and ``summary.json`` into the output directory.

Exit codes: 0 success, 2 invalid configuration, 3 I/O failure, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .classical import STATISTICS, EnsembleSpec, gaussian_moment_correlation, thermal_ensemble_correlation
from .errors import ConfigurationError, NumericalError, UsageError
from .io import write_csv, write_json, write_pgm
from .lattice import LatticeSpec, build_basis, build_hamiltonian, initial_sites
from .observables import bunching_ratio, default_window
from .pipeline import density_evolution, distance_sweep, run_walk
from .propagation import METHODS
from .reference import boson_correlation_u0, fermion_correlation, hardcore_evolve, propagator
from .spectrum import band_gap, full_spectrum

COMMANDS = ("walk", "spectrum", "classical", "compare", "reference")
FORMATS = ("csv", "json", "pgm")
OUT_ENV = "BOSEWALK_OUT"

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

# Figure-panel presets. U values for the intermediate panels are a chosen
# progression of increasing |U|.
PRESETS = {
    "fig1": dict(command="walk", U=0.0, T=4.0, initial="adjacent@14", time_steps=40),
    "fig2a": dict(command="walk", U=0.0, initial="doublon@14"),
    "fig2b": dict(command="walk", U=1.0, initial="doublon@14"),
    "fig2c": dict(command="walk", U=2.0, initial="doublon@14"),
    "fig2d": dict(command="walk", U=4.0, initial="doublon@14"),
    "fig2e": dict(command="walk", U=8.0, initial="doublon@14"),
    "fig2f": dict(command="walk", U=20.0, initial="doublon@14"),
    "fig2g": dict(command="walk", U=0.0, initial="adjacent@14"),
    "fig2h": dict(command="walk", U=1.0, initial="adjacent@14"),
    "fig2i": dict(command="walk", U=2.0, initial="adjacent@14"),
    "fig2j": dict(command="walk", U=4.0, initial="adjacent@14"),
    "fig2k": dict(command="walk", U=20.0, initial="adjacent@14"),
    "fig2l": dict(command="reference", initial="adjacent@14"),
    "fig3": dict(command="spectrum", U=8.0),
    "fig4": dict(command="classical", gamma=0.0, initial="adjacent@14", realizations=10_000),
    "fig5": dict(command="compare", initial="adjacent@14", U_sweep=(0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0)),
}


@dataclass
class RunConfig:
    """Validated, fully resolved settings of one CLI invocation."""

    command: str = "walk"
    sites: int = 29
    J: float = 1.0
    U: float = 0.0
    T: float = 4.0
    initial: str | None = None
    method: str = "diag"
    tol: float = 1e-10
    time_steps: int = 0
    threshold: float = 0.5
    window: int | None = None
    gamma: float = 0.0
    realizations: int = 10_000
    seed: int = 7
    dt: float = 5e-3
    phase_step: float = 1e-2
    statistics: str = "circular-gaussian"
    power: float = 1.0
    U_sweep: tuple = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0)
    threads: int = 1
    out: str = "bosewalk-out"
    formats: tuple = FORMATS
    figure: str | None = None

    def lattice(self, U=None):
        return LatticeSpec(self.sites, self.J, self.U if U is None else U)

    def initial_or_default(self):
        return self.initial or f"adjacent@{self.sites // 2}"

    def ensemble(self, gamma=None):
        m, n = initial_sites(self.initial_or_default())
        if m == n:
            raise ConfigurationError("classical runs need two distinct input sites", key="initial")
        return EnsembleSpec(
            M=self.sites,
            inputs=(m, n),
            gamma=self.gamma if gamma is None else gamma,
            realizations=self.realizations,
            seed=self.seed,
            statistics=self.statistics,
            T=self.T,
            dt=self.dt,
            phase_step=self.phase_step,
            J=self.J,
            power=self.power,
            threads=self.threads,
        )

    def validate(self):
        def need(cond, key, msg):
            if not cond:
                raise ConfigurationError(f"{key}: {msg}", key=key)

        need(self.command in COMMANDS, "command", f"must be one of {', '.join(COMMANDS)}")
        need(self.sites >= 2, "sites", "must be an integer >= 2")
        need(math.isfinite(self.J) and self.J > 0, "J", "must be finite and > 0")
        need(math.isfinite(self.U), "U", "must be finite")
        need(math.isfinite(self.T) and self.T >= 0, "T", "must be finite and >= 0")
        need(self.method in METHODS, "method", f"must be one of {', '.join(METHODS)}")
        need(self.tol > 0, "tol", "must be > 0")
        need(self.time_steps >= 0, "time-steps", "must be >= 0")
        need(0 < self.threshold < 1, "threshold", "must lie in (0, 1)")
        if self.window is not None:
            need(1 <= self.window < self.sites / 2, "window", "must satisfy 1 <= window < sites/2")
        need(math.isfinite(self.gamma), "gamma", "must be finite")
        need(self.realizations >= 2, "realizations", "must be >= 2")
        need(0 <= self.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
        need(self.dt > 0, "dt", "must be > 0")
        need(self.phase_step > 0, "phase-step", "must be > 0")
        need(self.statistics in STATISTICS, "statistics", f"must be one of {', '.join(STATISTICS)}")
        need(self.power > 0, "power", "must be > 0")
        need(len(self.U_sweep) > 0 and all(map(math.isfinite, self.U_sweep)), "U-sweep", "must be a list of finite numbers")
        need(self.threads >= 1, "threads", "must be >= 1")
        need(len(self.formats) > 0 and set(self.formats) <= set(FORMATS), "formats", f"must be a subset of {', '.join(FORMATS)}")
        # range-checks the sites of the initial state against the lattice
        r1, r2 = initial_sites(self.initial_or_default())
        need(0 <= r1 and r2 < self.sites, "initial", f"sites must lie in [0, {self.sites - 1}]")
        self.lattice()
        return self

    def as_dict(self):
        d = dataclasses.asdict(self)
        d["initial"] = self.initial_or_default()
        d["U_sweep"] = list(self.U_sweep)
        d["formats"] = list(self.formats)
        return d


# ---------------------------------------------------------------------------
# parsing


def _float_list(text):
    try:
        return tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _str_list(text):
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def _optional_int(text):
    return None if str(text).lower() in ("", "none", "auto") else int(text)


def _optional_str(text):
    return None if str(text).lower() in ("", "none") else str(text)


CONVERTERS = {
    "command": str,
    "sites": int,
    "J": float,
    "U": float,
    "T": float,
    "initial": _optional_str,
    "method": str,
    "tol": float,
    "time_steps": int,
    "threshold": float,
    "window": _optional_int,
    "gamma": float,
    "realizations": int,
    "seed": int,
    "dt": float,
    "phase_step": float,
    "statistics": str,
    "power": float,
    "U_sweep": _float_list,
    "threads": int,
    "out": str,
    "formats": _str_list,
    "figure": _optional_str,
}

assert set(CONVERTERS) == {f.name for f in fields(RunConfig)}


def _key_name(attr):
    return attr.replace("_", "-")


_ALIASES = {"u": "U", "j": "J", "t": "T", "u_sweep": "U_sweep", "m": "sites"}


def _attr_name(key):
    name = key.strip().lstrip("-").replace("-", "_")
    if name in CONVERTERS:
        return name
    if name.lower() in _ALIASES:
        return _ALIASES[name.lower()]
    raise ConfigurationError(f"unknown key {key.strip()!r}", key=key.strip())


def _convert(attr, value):
    try:
        return CONVERTERS[attr](value)
    except (TypeError, ValueError):
        raise ConfigurationError(
            f"{_key_name(attr)}: malformed value {value!r}", key=_key_name(attr)
        ) from None


def read_config_file(path):
    """Parse a ``key = value`` file; ``#`` starts a comment.

    A ``.json`` file (such as the ``config.json`` echo of an earlier run) is
    accepted as well.
    """
    settings = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc}", key="config") from exc
    if str(path).endswith(".json"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config: invalid JSON in {path}: {exc}", key="config") from exc
        for key, value in data.items():
            attr = _attr_name(key)
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            settings[attr] = _convert(attr, "none" if value is None else value)
        return settings
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"config line {lineno}: expected 'key = value', got {raw!r}", key="config")
        key, value = (s.strip() for s in line.split("=", 1))
        attr = _attr_name(key)
        settings[attr] = _convert(attr, value)
    return settings


class _Store(argparse.Action):
    """Store a flag value and count repetitions."""

    def __call__(self, parser, namespace, values, option_string=None):
        seen = namespace.__dict__.setdefault("_seen", {})
        seen[self.dest] = seen.get(self.dest, 0) + 1
        setattr(namespace, self.dest, values)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message, key=_offending_key(message))


def _offending_key(message):
    for token in message.replace(",", " ").split():
        if token.startswith("--"):
            return token.lstrip("-").rstrip(":")
    return None


def build_parser():
    p = _ArgumentParser(
        prog="bosewalk",
        description="Quantum walks of two interacting bosons and their classical analogue.",
        argument_default=argparse.SUPPRESS,
        allow_abbrev=False,
    )
    p.add_argument("command", nargs="?", choices=COMMANDS, default=None)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="key = value settings file", action=_Store)
    p.add_argument("--figure", choices=sorted(PRESETS), action=_Store, help="figure-panel preset")
    p.add_argument("--sites", "-M", dest="sites", action=_Store, help="lattice size (default 29)")
    p.add_argument("--J", dest="J", action=_Store, help="hopping amplitude (default 1)")
    p.add_argument("--U", dest="U", action=_Store, help="on-site interaction (default 0)")
    p.add_argument("--T", dest="T", action=_Store, help="evolution time in 1/J (default 4)")
    p.add_argument("--initial", action=_Store, help="doublon@m, adjacent@m or pair@m,n")
    p.add_argument("--method", action=_Store, help="diag (default) or krylov")
    p.add_argument("--tol", action=_Store, help="norm-drift tolerance")
    p.add_argument("--time-steps", dest="time_steps", action=_Store, help="also record density at this many times")
    p.add_argument("--threshold", action=_Store, help="bound-state doublon weight threshold")
    p.add_argument("--window", action=_Store, help="bunching-ratio corner size")
    p.add_argument("--gamma", action=_Store, help="classical nonlinearity")
    p.add_argument("--realizations", action=_Store)
    p.add_argument("--seed", action=_Store)
    p.add_argument("--dt", action=_Store, help="maximum RK4 step")
    p.add_argument("--phase-step", dest="phase_step", action=_Store, help="maximum nonlinear phase per step")
    p.add_argument("--statistics", action=_Store, help="circular-gaussian or random-phase")
    p.add_argument("--power", action=_Store, help="mean power per input site")
    p.add_argument("--U-sweep", dest="U_sweep", action=_Store, help="comma-separated interaction values")
    p.add_argument("--threads", action=_Store)
    p.add_argument("--out", action=_Store, help=f"output directory (env {OUT_ENV})")
    p.add_argument("--formats", action=_Store, help="subset of csv,json,pgm")
    return p


def parse_config(argv=None, environ=None):
    """Resolve defaults, preset, config file and flags into a :class:`RunConfig`.

    Precedence, lowest first: built-in defaults, ``BOSEWALK_OUT``, the
    ``--figure`` preset, the ``--config`` file, explicit flags. A flag given
    more than once keeps its last value and triggers a warning.
    """
    environ = os.environ if environ is None else environ
    ns = build_parser().parse_args(argv)
    given = {k: v for k, v in vars(ns).items() if not k.startswith("_") and v is not None}
    for dest, count in getattr(ns, "_seen", {}).items():
        if count > 1:
            warnings.warn(f"--{_key_name(dest)} given {count} times; using the last value", stacklevel=2)

    settings = {}
    if environ.get(OUT_ENV):
        settings["out"] = environ[OUT_ENV]
    config_path = given.pop("config", None)
    file_settings = read_config_file(config_path) if config_path else {}
    figure = given.get("figure", file_settings.get("figure"))
    if figure is not None:
        if figure not in PRESETS:
            raise ConfigurationError(f"figure: unknown preset {figure!r}", key="figure")
        settings.update(PRESETS[figure])
        settings["figure"] = figure
    settings.update(file_settings)
    for attr, value in given.items():
        settings[attr] = _convert(attr, value)
    return RunConfig(**settings).validate()


# ---------------------------------------------------------------------------
# running


def _emit_matrix(cfg, outdir, name, values, meta):
    if "csv" in cfg.formats:
        write_csv(outdir / f"{name}.csv", values)
    if "pgm" in cfg.formats:
        meta.setdefault("pgm_normalization", {})[name] = write_pgm(outdir / f"{name}.pgm", values)


def _emit_vector(cfg, outdir, name, values):
    if "csv" in cfg.formats:
        write_csv(outdir / f"{name}.csv", values)


def _run_walk(cfg, outdir):
    res = run_walk(cfg.lattice(), cfg.initial_or_default(), cfg.T, cfg.method, cfg.tol)
    meta = res.diagnostics(cfg.window)
    _emit_vector(cfg, outdir, "density", res.density)
    _emit_matrix(cfg, outdir, "correlation", res.correlation.values, meta)
    _emit_matrix(cfg, outdir, "correlation_fluctuation", res.fluctuation.values, meta)
    if cfg.time_steps > 0:
        times = np.linspace(0.0, cfg.T, cfg.time_steps + 1)
        dens = density_evolution(cfg.lattice(), cfg.initial_or_default(), times)
        if "csv" in cfg.formats:
            write_csv(outdir / "density_evolution.csv", np.column_stack([times, dens]), ["t"] + list(range(cfg.sites)))
        if "pgm" in cfg.formats:
            meta.setdefault("pgm_normalization", {})["density_evolution"] = write_pgm(
                outdir / "density_evolution.pgm", dens
            )
    return meta


def _run_spectrum(cfg, outdir):
    spec = cfg.lattice()
    basis = build_basis(spec)
    result = full_spectrum(build_hamiltonian(spec, basis), basis, U=spec.U, threshold=cfg.threshold)
    meta = {
        "dimension": len(result),
        "bound_count": result.bound_count,
        "scattering_count": result.scattering_count,
        "threshold": cfg.threshold,
        "energy_min": float(result.energies[0]),
        "energy_max": float(result.energies[-1]),
    }
    try:
        meta["gap"] = band_gap(result)
    except NumericalError as exc:
        meta["gap"] = None
        meta["gap_error"] = str(exc)
    if "csv" in cfg.formats:
        table = np.column_stack(
            [np.arange(len(result)), result.energies, result.K, result.doublon_weight, result.bound]
        )
        write_csv(outdir / "spectrum.csv", table, ["index", "energy", "K", "doublon_weight", "bound"])
    return meta


def _run_classical(cfg, outdir):
    ens = cfg.ensemble()
    res = thermal_ensemble_correlation(ens)
    meta = {
        "U_map": ens.U_map,
        "realizations": res.realizations,
        "dt_effective": res.dt,
        "convergence_error": res.convergence_error,
        "mean_power": float(res.mean_intensity.sum()),
    }
    w = default_window(cfg.sites) if cfg.window is None else cfg.window
    meta["bunching_ratio"] = bunching_ratio(res.correlation, w)
    meta["window"] = w
    if ens.gamma == 0 and ens.statistics == "circular-gaussian":
        mean, corr = gaussian_moment_correlation(propagator(cfg.lattice(), cfg.T), ens.inputs, ens.power)
        dev = res.correlation.values - corr
        meta["gaussian_moment_check"] = {
            "frobenius_deviation": float(np.linalg.norm(dev)),
            "frobenius_stderr": float(np.linalg.norm(res.correlation_stderr)),
        }
    _emit_vector(cfg, outdir, "mean_intensity", res.mean_intensity)
    _emit_matrix(cfg, outdir, "correlation", res.correlation.values, meta)
    _emit_matrix(cfg, outdir, "correlation_fluctuation", res.fluctuation.values, meta)
    _emit_matrix(cfg, outdir, "correlation_stderr", res.correlation_stderr, meta)
    return meta


def _run_compare(cfg, outdir):
    ens = cfg.ensemble()
    points = distance_sweep(cfg.U_sweep, ens, initial=cfg.initial_or_default(), threads=cfg.threads)
    d = [p.distance for p in points]
    meta = {
        "U": [p.U for p in points],
        "gamma": [p.gamma for p in points],
        "distance": d,
        "monotone_non_decreasing": bool(np.all(np.diff(d) >= 0)),
        "realizations": ens.realizations,
    }
    if "csv" in cfg.formats:
        write_csv(outdir / "distance.csv", np.column_stack([meta["U"], meta["gamma"], d]), ["U", "gamma", "distance"])
    for p in points:
        tag = f"U{p.U:g}"
        _emit_matrix(cfg, outdir, f"quantum_fluctuation_{tag}", p.quantum.fluctuation.values, meta)
        _emit_matrix(cfg, outdir, f"classical_fluctuation_{tag}", p.classical.fluctuation.values, meta)
    return meta


def _run_reference(cfg, outdir):
    spec = cfg.lattice()
    m, n = initial_sites(cfg.initial_or_default())
    G = propagator(spec, cfg.T)
    meta = {}
    boson = boson_correlation_u0(spec, (m, n), cfg.T, G=G)
    _emit_matrix(cfg, outdir, "boson_u0", boson.values, meta)
    meta["boson_sum_residual"] = boson.sum_rule_residual()
    if m != n:
        fermion = fermion_correlation(spec, (m, n), cfg.T, G=G)
        hardcore = hardcore_evolve(spec, (m, n), cfg.T)
        _emit_matrix(cfg, outdir, "fermion", fermion.values, meta)
        _emit_matrix(cfg, outdir, "hardcore", hardcore.values, meta)
        meta["hardcore_fermion_max_deviation"] = float(np.max(np.abs(hardcore.values - fermion.values)))
        meta["fermion_sum_residual"] = fermion.sum_rule_residual()
    return meta


RUNNERS = {
    "walk": _run_walk,
    "spectrum": _run_spectrum,
    "classical": _run_classical,
    "compare": _run_compare,
    "reference": _run_reference,
}


def run(cfg):
    """Execute a validated configuration, writing all artifacts; returns the summary."""
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "config.json", cfg.as_dict())
    t0 = time.perf_counter()
    meta = RUNNERS[cfg.command](cfg, outdir)
    summary = {"command": cfg.command, "config": cfg.as_dict(), "diagnostics": meta}
    summary["elapsed_seconds"] = time.perf_counter() - t0
    if "json" in cfg.formats:
        write_json(outdir / "summary.json", summary)
    return summary


def _fail(code, exc, outdir=None):
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    key = getattr(exc, "key", None)
    if key:
        err["key"] = key
    diagnostics = getattr(exc, "diagnostics", None)
    if diagnostics:
        err["diagnostics"] = diagnostics
    print(json.dumps(err, default=str), file=sys.stderr)
    if outdir is not None:
        try:
            write_json(Path(outdir) / "error.json", err)
        except OSError:
            pass
    return code


def main(argv=None):
    try:
        cfg = parse_config(argv)
    except (ConfigurationError, UsageError) as exc:
        return _fail(EXIT_CONFIG, exc)
    try:
        run(cfg)
    except OSError as exc:
        return _fail(EXIT_IO, exc)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERIC, exc, cfg.out)
    except (ConfigurationError, UsageError) as exc:
        return _fail(EXIT_CONFIG, exc, cfg.out)
    print(f"{cfg.command}: wrote results to {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
