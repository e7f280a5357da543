"""Parameter sweeps, strict JSON configuration and deterministic CSV/JSON output.

Every grid point is an independent task; results are collected in grid
order (lexicographic in the grid indices), so the output does not depend on
the number of workers. No physics lives here beyond composing library calls.

Units follow the library: ``tau_a = 1``. Grid keys:

``pump``            Gamma_p tau_a
``tb_ratio``        tau_b / tau_a
``dephasing``       Gamma_deph tau_a
``gamma_tb``        gamma tau_b (emitter 1, or both when symmetric)
``gamma2_tb``       gamma_2 tau_b (dynamics only; defaults to ``gamma_tb``)
``kappa``           kappa tau_a
``rabi_over_kappa`` Omega / kappa
``gamma_factor``    gamma / gamma_opt (figures 2 and 3)
``deph_tb2``        2 Gamma_deph tau_b (figure 4)
``z``, ``rho``      emitter coordinates (field map)
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import steady as st
from .moments import MomentState, integrate_moments
from .nearfield import NanorodSpec, field_map
from .oracle import PUMP_MODELS, SystemSpec, compare_with_adiabatic
from .params import CouplingSpec, EmitterParams, validate_regime

__all__ = [
    "MODES",
    "HEADERS",
    "ConfigError",
    "SweepConfig",
    "parse_config",
    "load_config",
    "run",
    "emit",
    "format_rows",
    "oracle_summary",
    "default_pump_grid",
]

MODES = ("steady", "dynamics", "oracle-compare", "field-map", "figure2", "figure3", "figure4")

HEADERS = {
    "steady": ["pump", "tb_ratio", "dephasing", "gamma_tb", "kappa", "Delta2", "Delta1", "Sr",
               "R", "norm_plasmons_2", "norm_plasmons_1", "n_per_emitter", "Sigma", "D12",
               "flags"],
    "dynamics": ["pump", "tb_ratio", "dephasing", "gamma_tb", "gamma2_tb", "t", "Sigma", "D12",
                 "D1", "D2", "flags"],
    "oracle-compare": ["pump", "tb_ratio", "dephasing", "gamma_tb", "rabi_over_kappa", "kappa",
                       "pump_model", "D1_oracle", "D1_adiabatic", "D2_oracle", "D2_adiabatic",
                       "Sigma_oracle", "Sigma_adiabatic", "n_oracle", "n_adiabatic",
                       "Im_s12_oracle", "rel_d1", "rel_d2", "rel_sigma", "rel_n",
                       "discrepancy", "variant_gap", "top_fock", "flags", "error"],
    "field-map": ["z", "rho", "E_abs", "theta", "gamma", "rabi", "phase_z", "phase_rho",
                  "flags"],
    "figure2": ["pump", "N", "gamma_tb", "norm_plasmons", "tb_ratio", "dephasing",
                "gamma_factor", "flags"],
    "figure3": ["pump", "gamma_factor", "R", "R_asymptote", "gamma_tb", "tb_ratio",
                "dephasing", "flags"],
    "figure4": ["deph_tb2", "tb_ratio", "R_max", "gamma_opt_tb", "b"],
}

# grid keys in iteration order, with their requirement per mode
_GRID_KEYS = {
    "steady": (["tb_ratio", "dephasing", "gamma_tb", "kappa", "pump"],
               {"pump", "tb_ratio", "gamma_tb"}),
    "dynamics": (["tb_ratio", "dephasing", "gamma_tb", "gamma2_tb", "pump"],
                 {"pump", "tb_ratio", "gamma_tb"}),
    "oracle-compare": (["tb_ratio", "dephasing", "gamma_tb", "pump", "rabi_over_kappa"],
                       {"pump", "tb_ratio", "gamma_tb", "rabi_over_kappa"}),
    "field-map": (["z", "rho"], {"z", "rho"}),
    "figure2": (["tb_ratio", "dephasing", "gamma_factor", "pump"], set()),
    "figure3": (["tb_ratio", "dephasing", "gamma_factor", "pump"], set()),
    "figure4": (["tb_ratio", "deph_tb2"], set()),
}

_OPTION_KEYS = {
    "steady": {},
    "dynamics": {"horizon": True, "n_samples": False, "initial": False},
    "oracle-compare": {"n_max": False, "pump_models": False, "kappa_uncoupled": False},
    "field-map": {"rod": True, "d_e": False},
    "figure2": {},
    "figure3": {},
    "figure4": {},
}

_TOLERANCE_KEYS = {"rtol", "atol", "regime_threshold"}
_TOP_KEYS = {"mode", "grid", "options", "tolerances", "output", "format", "workers"}
_ROD_KEYS = {"z1", "z2", "omega", "splitting", "d", "n_ref", "kappa"}

_FIGURE_DEFAULTS = {
    "tb_ratio": [0.1],
    "dephasing": [0.0, 10.0],
    "gamma_factor": [0.5, 1.0, 1.5],
}


def default_pump_grid() -> list[float]:
    """60 log-spaced pump values from 1e-2 to 1e4."""
    return [float(v) for v in np.logspace(-2.0, 4.0, 60)]


def default_deph_grid() -> list[float]:
    return [0.05 * i for i in range(81)]


_DEFAULT_GRIDS = {
    "figure2": dict(_FIGURE_DEFAULTS, pump=None),
    "figure3": dict(_FIGURE_DEFAULTS, pump=None),
    "figure4": {"tb_ratio": [0.05, 0.5, 1.0], "deph_tb2": None},
    "steady": {"dephasing": [0.0]},
    "dynamics": {"dephasing": [0.0]},
    "oracle-compare": {"dephasing": [0.0]},
    "field-map": {},
}


class ConfigError(ValueError):
    """Configuration problems; ``errors`` lists one message per field."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    grid: dict
    options: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output: Optional[str] = None
    format: str = "csv"
    workers: int = 1

    def points(self) -> list[dict]:
        """Grid points in deterministic lexicographic order."""
        keys = [k for k in _GRID_KEYS[self.mode][0] if k in self.grid]
        return [dict(zip(keys, vals))
                for vals in itertools.product(*(self.grid[k] for k in keys))]


def _expand_grid(name: str, spec: Any, errors: list[str]) -> Optional[list[float]]:
    where = f"grid.{name}"
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        spec = [spec]
    if isinstance(spec, list):
        if not spec:
            errors.append(f"{where}: must not be empty")
            return None
        out = []
        for i, v in enumerate(spec):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                errors.append(f"{where}[{i}]: expected a finite number, got {v!r}")
                return None
            out.append(float(v))
        return out
    if isinstance(spec, dict):
        allowed = {"start", "stop", "num", "step", "spacing"}
        unknown = sorted(set(spec) - allowed)
        if unknown:
            errors.append(f"{where}: unknown key(s) {unknown}")
            return None
        for k in ("start", "stop"):
            if not isinstance(spec.get(k), (int, float)) or isinstance(spec.get(k), bool):
                errors.append(f"{where}.{k}: required number")
                return None
        start, stop = float(spec["start"]), float(spec["stop"])
        if "step" in spec and "num" in spec:
            errors.append(f"{where}: give either 'step' or 'num', not both")
            return None
        spacing = spec.get("spacing", "linear")
        if spacing not in ("linear", "log"):
            errors.append(f"{where}.spacing: must be 'linear' or 'log'")
            return None
        if "step" in spec:
            step = spec["step"]
            if spacing != "linear":
                errors.append(f"{where}: 'step' requires linear spacing")
                return None
            if not isinstance(step, (int, float)) or isinstance(step, bool) or not step > 0:
                errors.append(f"{where}.step: must be a positive number")
                return None
            if stop < start:
                errors.append(f"{where}: stop must not be below start")
                return None
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(n)]
        num = spec.get("num")
        if not isinstance(num, int) or isinstance(num, bool) or num < 1:
            errors.append(f"{where}.num: must be a positive integer")
            return None
        if spacing == "log":
            if start <= 0 or stop <= 0:
                errors.append(f"{where}: log spacing needs positive start and stop")
                return None
            return [float(v) for v in np.logspace(math.log10(start), math.log10(stop), num)]
        return [float(v) for v in np.linspace(start, stop, num)]
    errors.append(f"{where}: expected a number, a list or a range object")
    return None


def _check_ranges(mode: str, grid: dict, errors: list[str]) -> None:
    nonneg = {"pump", "dephasing", "gamma_tb", "gamma2_tb", "rabi_over_kappa",
              "gamma_factor", "deph_tb2"}
    positive = {"tb_ratio", "kappa"}
    for k, vals in grid.items():
        if k in nonneg and any(v < 0 for v in vals):
            errors.append(f"grid.{k}: values must be non-negative")
        if k in positive and any(v <= 0 for v in vals):
            errors.append(f"grid.{k}: values must be positive")
        if k == "rho" and any(v < 0 for v in vals):
            errors.append("grid.rho: values must be non-negative")


def parse_config(data: Any, mode: Optional[str] = None) -> SweepConfig:
    """Validate a decoded JSON document. ``mode`` (from the CLI) must agree
    with the document's ``mode`` key when both are present."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["config: top level must be a JSON object"])
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        errors.append(f"config: unknown key(s) {unknown}")
    doc_mode = data.get("mode")
    if doc_mode is not None and mode is not None and doc_mode != mode:
        errors.append(f"mode: config says {doc_mode!r} but command requests {mode!r}")
    mode = mode or doc_mode
    if mode is None:
        raise ConfigError(errors + ["mode: required"])
    if mode not in MODES:
        raise ConfigError(errors + [f"mode: must be one of {list(MODES)}, got {mode!r}"])

    raw_grid = data.get("grid", {})
    if not isinstance(raw_grid, dict):
        errors.append("grid: must be an object")
        raw_grid = {}
    keys, required = _GRID_KEYS[mode]
    for k in sorted(set(raw_grid) - set(keys)):
        errors.append(f"grid.{k}: unknown for mode {mode!r}")
    grid: dict[str, list[float]] = {}
    for k in keys:
        if k in raw_grid:
            vals = _expand_grid(k, raw_grid[k], errors)
            if vals is not None:
                grid[k] = vals
        elif k in _DEFAULT_GRIDS[mode]:
            default = _DEFAULT_GRIDS[mode][k]
            if default is None:
                default = default_pump_grid() if k == "pump" else default_deph_grid()
            grid[k] = list(default)
        elif k in required:
            errors.append(f"grid.{k}: required for mode {mode!r}")
    _check_ranges(mode, grid, errors)

    options = data.get("options", {})
    if not isinstance(options, dict):
        errors.append("options: must be an object")
        options = {}
    spec = _OPTION_KEYS[mode]
    for k in sorted(set(options) - set(spec)):
        errors.append(f"options.{k}: unknown for mode {mode!r}")
    for k, req in spec.items():
        if req and k not in options:
            errors.append(f"options.{k}: required for mode {mode!r}")
    _check_options(mode, options, errors)

    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        errors.append("tolerances: must be an object")
        tol = {}
    for k in sorted(set(tol) - _TOLERANCE_KEYS):
        errors.append(f"tolerances.{k}: unknown key")
    for k in _TOLERANCE_KEYS & set(tol):
        v = tol[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
            errors.append(f"tolerances.{k}: must be a positive number")

    fmt = data.get("format", "csv")
    if fmt not in ("csv", "json"):
        errors.append("format: must be 'csv' or 'json'")
    workers = data.get("workers", 1)
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        errors.append("workers: must be a positive integer")
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        errors.append("output: must be a string path")

    if errors:
        raise ConfigError(errors)
    return SweepConfig(mode=mode, grid=grid, options=dict(options), tolerances=dict(tol),
                       output=output, format=fmt, workers=workers)


def _check_options(mode: str, options: dict, errors: list[str]) -> None:
    def number(key, positive=True):
        v = options.get(key)
        if v is None:
            return
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) \
                or (positive and not v > 0):
            errors.append(f"options.{key}: must be a {'positive ' if positive else ''}number")

    if mode == "dynamics":
        number("horizon")
        n = options.get("n_samples")
        if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n < 2):
            errors.append("options.n_samples: must be an integer >= 2")
        init = options.get("initial")
        if init is not None and (not isinstance(init, list) or len(init) != 4
                                 or not all(isinstance(v, (int, float)) for v in init)):
            errors.append("options.initial: must be a list of four numbers "
                          "[Sigma, D12, D1, D2]")
    elif mode == "oracle-compare":
        n = options.get("n_max")
        if n is not None and (isinstance(n, bool) or not isinstance(n, int) or n < 1):
            errors.append("options.n_max: must be an integer >= 1")
        pm = options.get("pump_models")
        if pm is not None and (not isinstance(pm, list) or not pm
                               or any(m not in PUMP_MODELS for m in pm)):
            errors.append(f"options.pump_models: must be a non-empty subset of {list(PUMP_MODELS)}")
        number("kappa_uncoupled")
    elif mode == "field-map":
        rod = options.get("rod")
        if rod is not None:
            if not isinstance(rod, dict):
                errors.append("options.rod: must be an object")
            else:
                for k in sorted(set(rod) - _ROD_KEYS):
                    errors.append(f"options.rod.{k}: unknown key")
                for k in ("z1", "z2", "omega", "splitting"):
                    if k not in rod:
                        errors.append(f"options.rod.{k}: required")
                if not errors:
                    try:
                        NanorodSpec(**rod)
                    except (TypeError, ValueError) as exc:
                        errors.append(f"options.rod: {exc}")
        number("d_e", positive=False)


def load_config(path, mode: Optional[str] = None) -> SweepConfig:
    """Read and validate a JSON config file; JSON syntax errors carry line
    and column."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError([f"config: cannot read {path}: {exc}"]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config: JSON syntax error at line {exc.lineno}, "
                           f"column {exc.colno}: {exc.msg}"]) from exc
    return parse_config(data, mode)


# ---------------------------------------------------------------- evaluation

def _flags(codes) -> str:
    return ";".join(dict.fromkeys(codes))


def _emitter(pt: dict) -> EmitterParams:
    return EmitterParams.dimensionless(pt["pump"], pt["tb_ratio"], pt.get("dephasing", 0.0))


def _eval_steady(pt: dict, cfg: SweepConfig) -> list[dict]:
    p = _emitter(pt)
    gamma = pt["gamma_tb"] / p.tau_b
    kappa = pt.get("kappa")
    thr = cfg.tolerances.get("regime_threshold", 10.0)
    rep = st.steady_report(p, gamma, kappa)
    codes = [d.code for d in validate_regime(p, CouplingSpec.symmetric(gamma), kappa, thr)]
    if math.isnan(rep.R):
        codes.append("uncoupled" if gamma == 0 else "no_emission")
    return [dict(pt, kappa=kappa, Delta2=rep.Delta2, Delta1=rep.Delta1, Sr=rep.Sr, R=rep.R,
                 norm_plasmons_2=rep.norm_plasmons_2, norm_plasmons_1=rep.norm_plasmons_1,
                 n_per_emitter=rep.n_per_emitter, Sigma=rep.Sigma, D12=rep.D12,
                 flags=_flags(codes))]


def _eval_dynamics(pt: dict, cfg: SweepConfig) -> list[dict]:
    p = _emitter(pt)
    g1 = pt["gamma_tb"] / p.tau_b
    g2_tb = pt.get("gamma2_tb", pt["gamma_tb"])
    g2 = g2_tb / p.tau_b
    opts = cfg.options
    s0 = MomentState(*opts["initial"]) if "initial" in opts else None
    traj = integrate_moments(s0, p, g1, g2, float(opts["horizon"]),
                             rtol=cfg.tolerances.get("rtol", 1e-9),
                             atol=cfg.tolerances.get("atol", 1e-12),
                             n_samples=int(opts.get("n_samples", 101)))
    thr = cfg.tolerances.get("regime_threshold", 10.0)
    base = [d.code for d in validate_regime(p, CouplingSpec(g1, g2), None, thr)]
    rows = []
    for i, t in enumerate(traj.t):
        s = traj.state(i)
        rows.append(dict(pt, gamma2_tb=g2_tb, t=float(t), Sigma=s.sigma, D12=s.d12, D1=s.d1,
                         D2=s.d2, flags=_flags(base + s.physical_flags())))
    return rows


def _oracle_key(c) -> tuple:
    return (c.oracle.d1, c.oracle.sigma, c.oracle.n)


def _eval_oracle(pt: dict, cfg: SweepConfig) -> list[dict]:
    opts = cfg.options
    p = _emitter(pt)
    gamma = pt["gamma_tb"] / p.tau_b
    ratio = pt["rabi_over_kappa"]
    n_max = int(opts.get("n_max", 4))
    models = opts.get("pump_models", list(PUMP_MODELS))
    thr = cfg.tolerances.get("regime_threshold", 10.0)
    results = {}
    errors = {}
    for m in models:
        try:
            if gamma == 0 or ratio == 0:
                kappa = float(opts.get("kappa_uncoupled", 100.0))
                spec = SystemSpec((p, p), (0.0, 0.0), kappa, n_max=n_max, pump_model=m)
            else:
                spec = SystemSpec.from_ratio(p, gamma, ratio, n_max=n_max, pump_model=m)
            results[m] = compare_with_adiabatic(spec, thr)
        except Exception as exc:  # noqa: BLE001 - per-row failure is data
            errors[m] = f"{type(exc).__name__}: {exc}"
    gap = float("nan")
    if len(results) == 2:
        a, b = (results[m] for m in PUMP_MODELS)
        gap = max(abs(x - y) / max(abs(y), 1e-12) for x, y in zip(_oracle_key(a), _oracle_key(b)))
    rows = []
    nan = float("nan")
    for m in models:
        if m in results:
            c = results[m]
            rows.append(dict(pt, kappa=c.spec.kappa, pump_model=m,
                             D1_oracle=c.oracle.d1, D1_adiabatic=c.adiabatic.d1,
                             D2_oracle=c.oracle.d2, D2_adiabatic=c.adiabatic.d2,
                             Sigma_oracle=c.oracle.sigma, Sigma_adiabatic=c.adiabatic.sigma,
                             n_oracle=c.oracle.n, n_adiabatic=c.adiabatic_n,
                             Im_s12_oracle=c.oracle.s12.imag,
                             rel_d1=c.relative["d1"], rel_d2=c.relative["d2"],
                             rel_sigma=c.relative["sigma"], rel_n=c.relative["n"],
                             discrepancy=c.discrepancy, variant_gap=gap,
                             top_fock=c.top_fock_population,
                             flags=_flags(d.code for d in c.diagnostics), error=""))
        else:
            row = {k: nan for k in HEADERS["oracle-compare"]}
            row.update(pt, pump_model=m, flags="error", error=errors[m])
            rows.append(row)
    return rows


def _eval_field(pt: dict, cfg: SweepConfig) -> list[dict]:
    rod = NanorodSpec(**cfg.options["rod"])
    rows = field_map(rod, [pt["z"]], [pt["rho"]], float(cfg.options.get("d_e", 1.0)))
    out = []
    for r in rows:
        flags = ["singular"] if r.pop("singular") else []
        out.append(dict(r, flags=_flags(flags + (["mode_overlap"] if rod.warnings() else []))))
    return out


def _gamma_opt_tb(p: EmitterParams) -> float:
    return st.gamma_opt(p) * p.tau_b


def _eval_figure2(pt: dict, cfg: SweepConfig) -> list[dict]:
    p = _emitter(pt)
    gamma_tb = pt["gamma_factor"] * _gamma_opt_tb(p)
    gamma = gamma_tb / p.tau_b
    codes = [d.code for d in validate_regime(p, CouplingSpec.symmetric(gamma))]
    d2, _ = st.stationary_two_emitters(p, gamma)
    d1 = st.stationary_single_emitter(p, gamma)
    rows = []
    for n_em, d in ((1, d1), (2, d2)):
        rows.append(dict(pump=pt["pump"], N=n_em, gamma_tb=gamma_tb,
                         norm_plasmons=st.normalized_plasmon_number(p, d),
                         tb_ratio=pt["tb_ratio"], dephasing=pt["dephasing"],
                         gamma_factor=pt["gamma_factor"], flags=_flags(codes)))
    return rows


def _eval_figure3(pt: dict, cfg: SweepConfig) -> list[dict]:
    p = _emitter(pt)
    gamma_tb = pt["gamma_factor"] * _gamma_opt_tb(p)
    gamma = gamma_tb / p.tau_b
    codes = [d.code for d in validate_regime(p, CouplingSpec.symmetric(gamma))]
    try:
        r = st.rqe(p, gamma)
    except (ValueError, ZeroDivisionError):
        r = float("nan")
        codes.append("uncoupled" if gamma == 0 else "no_emission")
    b = 1.0 + 2.0 * p.dephasing * p.tau_b + p.tau_b
    return [dict(pump=pt["pump"], gamma_factor=pt["gamma_factor"], R=r,
                 R_asymptote=st.rqe_high_pump(2.0 * gamma_tb, b), gamma_tb=gamma_tb,
                 tb_ratio=pt["tb_ratio"], dephasing=pt["dephasing"], flags=_flags(codes))]


def _eval_figure4(pt: dict, cfg: SweepConfig) -> list[dict]:
    b = 1.0 + pt["deph_tb2"] + pt["tb_ratio"]
    x = st.optimal_coupling(b)
    return [dict(deph_tb2=pt["deph_tb2"], tb_ratio=pt["tb_ratio"], R_max=st.rqe_high_pump(x, b),
                 gamma_opt_tb=0.5 * x, b=b)]


_EVALUATORS = {
    "steady": _eval_steady,
    "dynamics": _eval_dynamics,
    "oracle-compare": _eval_oracle,
    "field-map": _eval_field,
    "figure2": _eval_figure2,
    "figure3": _eval_figure3,
    "figure4": _eval_figure4,
}


def _evaluate(args) -> list[dict]:
    pt, cfg = args
    return _EVALUATORS[cfg.mode](pt, cfg)


def run(cfg: SweepConfig, workers: Optional[int] = None) -> list[dict]:
    """Evaluate every grid point; rows come back in grid order."""
    workers = cfg.workers if workers is None else workers
    tasks = [(pt, cfg) for pt in cfg.points()]
    if workers <= 1 or len(tasks) <= 1:
        chunks = [_evaluate(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [row for chunk in chunks for row in chunk]


def oracle_summary(rows: list[dict]) -> dict:
    """Monotone-convergence verdict for an oracle-compare run.

    Rows are grouped by everything except ``rabi_over_kappa``; within a
    group the discrepancy must shrink strictly as ``Omega/kappa`` decreases
    (uncoupled rows with ratio 0 are excluded).
    """
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        if r["rabi_over_kappa"] == 0 or r.get("error"):
            continue
        key = (r["pump"], r["tb_ratio"], r["dephasing"], r["gamma_tb"], r["pump_model"])
        groups.setdefault(key, []).append(r)
    series = []
    for key, rs in groups.items():
        rs = sorted(rs, key=lambda r: -r["rabi_over_kappa"])
        disc = [r["discrepancy"] for r in rs]
        monotone = all(b < a for a, b in zip(disc, disc[1:]))
        series.append({"pump": key[0], "tb_ratio": key[1], "dephasing": key[2],
                       "gamma_tb": key[3], "pump_model": key[4],
                       "rabi_over_kappa": [r["rabi_over_kappa"] for r in rs],
                       "discrepancy": disc, "monotone": monotone})
    n_err = sum(1 for r in rows if r.get("error"))
    return {"series": series, "errors": n_err,
            "verdict": "pass" if series and all(s["monotone"] for s in series) and not n_err
            else "fail"}


# ------------------------------------------------------------------ output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def format_rows(rows: list[dict], mode: str, fmt: str = "csv") -> str:
    header = HEADERS[mode]
    if fmt == "json":
        payload = [{k: _json_value(r.get(k)) for k in header} for r in rows]
        return json.dumps({"mode": mode, "columns": header, "rows": payload},
                          indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(r.get(k)) for k in header])
    return buf.getvalue()


def emit(rows: list[dict], path, mode: str, fmt: str = "csv") -> None:
    """Write rows with the fixed header for ``mode``; ``path=None`` or ``"-"``
    means stdout."""
    text = format_rows(rows, mode, fmt)
    if path is None or str(path) == "-":
        import sys
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
