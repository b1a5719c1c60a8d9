"""Monte-Carlo sweeps over RIS size, phase scheme and objective, written as CSV.

A run is a grid of ``(scheme, N, trial)`` tasks. Each task draws its own
channel from ``(seed, trial)`` only, so every row can be recomputed in
isolation and the output does not depend on how tasks are scheduled.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .channel import Scenario, draw_channels
from .ee_opt import evaluate_ee, solve_ee
from .exceptions import InfeasibleError, OverheadExceedsSlotError
from .overhead import (
    PilotProtocol,
    ResourceAllocation,
    SystemParams,
    dbm_to_watt,
    feedback_rate,
    summarize,
)
from .pareto import pareto_frontier
from .phase_opt import Scheme, solve_scheme
from .rate_opt import solve_rate

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "PRESETS",
    "CSV_HEADER",
    "PARETO_EXTRA",
    "parse_config_text",
    "load_config",
    "format_config",
    "run_experiment",
    "summarize_rows",
    "emit_csv",
    "read_csv",
    "worker_count",
    "summary_path",
    "SUMMARY_HEADER",
]

CSV_HEADER = [
    "scheme", "protocol", "N", "n_t", "n_r", "t0_s", "p0_w", "trial", "objective",
    "value", "se_bits_s_hz", "ee_bits_joule", "p", "p_f", "b", "b_f", "status",
]
PARETO_EXTRA = ["alpha", "t"]
SUMMARY_HEADER = [
    "scheme", "protocol", "N", "objective", "alpha", "trials", "n_ok",
    "mean_value", "mean_se_bits_s_hz", "stderr_se", "mean_ee_bits_joule", "stderr_ee",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that defines a sweep. All quantities are SI."""

    objective: str = "rate"
    schemes: tuple = ("a", "b", "c", "d")
    protocol: str = "a"
    n_list: tuple = tuple(range(20, 201, 20))
    n_t: int = 1
    n_r: int = 1
    trials: int = 100
    seed: int = 0
    alpha_grid: tuple = tuple(round(0.1 * k, 10) for k in range(1, 10))
    m_points: int = 200
    output_path: str = "results.csv"
    pathloss_db: float = 110.0
    slot_t: float = 10e-3
    t0: float = 0.8e-6
    p0: float = 2.5e-3
    p_max: float = dbm_to_watt(45.0)
    b_max: float = 100e6
    n0: float = dbm_to_watt(-174.0)
    mu: float = 1.0
    mu_f: float = 1.0
    b_f: float = 16.0
    p_c0: float = dbm_to_watt(45.0)
    p_cn: float = dbm_to_watt(10.0)

    def __post_init__(self):
        if self.objective not in ("rate", "ee", "pareto"):
            raise ConfigError(f"objective must be rate, ee or pareto, got {self.objective!r}")
        if not self.schemes:
            raise ConfigError("schemes must be nonempty")
        for s in self.schemes:
            try:
                Scheme.from_label(s)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        try:
            PilotProtocol.from_label(self.protocol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.n_list or min(self.n_list) < 1:
            raise ConfigError("n_list must be a nonempty list of positive integers")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n_t < 1 or self.n_r < 1:
            raise ConfigError("n_t and n_r must be >= 1")
        if self.m_points < 2:
            raise ConfigError("m_points must be >= 2")
        if self.objective == "pareto" and (not self.alpha_grid or not all(0 < a < 1 for a in self.alpha_grid)):
            raise ConfigError("alpha_grid entries must lie strictly between 0 and 1")
        try:
            self.system_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def system_params(self) -> SystemParams:
        return SystemParams(
            p_max=self.p_max, b_max=self.b_max, n0=self.n0, mu=self.mu, mu_f=self.mu_f,
            b_f=self.b_f, t_slot=self.slot_t, t0=self.t0, p0=self.p0,
            p_c0=self.p_c0, p_cn=self.p_cn,
        )

    @property
    def pilot_protocol(self) -> PilotProtocol:
        return PilotProtocol.from_label(self.protocol)


# key -> (field, converter to SI)
def _ints(v: str) -> tuple:
    out = []
    for part in v.replace(" ", "").split(","):
        if not part:
            continue
        if ":" in part:
            bits = [int(x) for x in part.split(":")]
            if len(bits) not in (2, 3):
                raise ValueError(f"bad range {part!r}")
            lo, hi = bits[0], bits[1]
            step = bits[2] if len(bits) == 3 else 1
            out.extend(range(lo, hi + 1, step))
        else:
            out.append(int(part))
    return tuple(out)


def _floats(v: str) -> tuple:
    return tuple(float(x) for x in v.replace(" ", "").split(",") if x)


def _labels(v: str) -> tuple:
    return tuple(x for x in v.replace(" ", "").split(",") if x)


_KEYS = {
    "objective": ("objective", str),
    "schemes": ("schemes", _labels),
    "protocol": ("protocol", str),
    "n_list": ("n_list", _ints),
    "n_t": ("n_t", int),
    "n_r": ("n_r", int),
    "trials": ("trials", int),
    "seed": ("seed", int),
    "alpha_grid": ("alpha_grid", _floats),
    "m_points": ("m_points", int),
    "out": ("output_path", str),
    "output_path": ("output_path", str),
    "pathloss_db": ("pathloss_db", float),
    "slot_t": ("slot_t", float),
    "slot_ms": ("slot_t", lambda v: float(v) * 1e-3),
    "t0": ("t0", float),
    "t0_us": ("t0", lambda v: float(v) * 1e-6),
    "p0": ("p0", float),
    "p0_mw": ("p0", lambda v: float(v) * 1e-3),
    "p_max": ("p_max", float),
    "p_max_dbm": ("p_max", lambda v: dbm_to_watt(float(v))),
    "b_max": ("b_max", float),
    "b_max_mhz": ("b_max", lambda v: float(v) * 1e6),
    "n0": ("n0", float),
    "n0_dbm_hz": ("n0", lambda v: dbm_to_watt(float(v))),
    "mu": ("mu", float),
    "mu_f": ("mu_f", float),
    "b_f": ("b_f", float),
    "p_c0": ("p_c0", float),
    "p_c0_dbm": ("p_c0", lambda v: dbm_to_watt(float(v))),
    "p_cn": ("p_cn", float),
    "p_cn_dbm": ("p_cn", lambda v: dbm_to_watt(float(v))),
}


def _apply(updates: dict, key: str, value: str) -> None:
    key = key.strip().replace("-", "_")
    if key not in _KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    name, conv = _KEYS[key]
    try:
        updates[name] = conv(value.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None


def parse_config_text(text: str, base: ExperimentConfig | None = None,
                      overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from ``key = value`` lines; ``#`` starts a comment.

    ``overrides`` maps keys to raw string values and wins over the text.
    """
    updates: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        k, v = line.split("=", 1)
        _apply(updates, k, v)
    for k, v in (overrides or {}).items():
        _apply(updates, k, str(v))
    return replace(base or ExperimentConfig(), **updates)


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None,
                preset: str | None = None) -> ExperimentConfig:
    base = ExperimentConfig()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        base = parse_config_text(PRESETS[preset])
    text = Path(path).read_text(encoding="utf-8") if path is not None else ""
    return parse_config_text(text, base=base, overrides=overrides)


def format_config(cfg: ExperimentConfig) -> str:
    """Round-trippable ``key = value`` text in SI units."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


PRESETS = {
    "fig2a": "objective = rate\nn_t = 1\nn_r = 1\nt0_us = 0.8\nprotocol = a\nn_list = 20:200:20\n",
    "fig2b": "objective = rate\nn_t = 1\nn_r = 1\nt0_us = 0.15\nprotocol = a\nn_list = 20:200:20\n",
    "fig3a": "objective = ee\nn_t = 1\nn_r = 1\nt0_us = 0.8\nprotocol = a\nn_list = 20:200:20\n",
    "fig4a": "objective = rate\nn_t = 8\nn_r = 8\nt0_us = 0.8\nprotocol = a\nn_list = 20:200:20\n",
    "fig4b": "objective = rate\nn_t = 8\nn_r = 8\nt0_us = 0.15\nprotocol = a\nn_list = 20:200:20\n",
    "fig4c": "objective = rate\nn_t = 8\nn_r = 8\nt0_us = 0.8\nprotocol = b\nn_list = 20:200:20\n",
    "fig5a": "objective = ee\nn_t = 8\nn_r = 8\nt0_us = 0.8\nprotocol = b\nn_list = 20:200:20\n",
    "pareto": "objective = pareto\nn_t = 1\nn_r = 1\nt0_us = 0.8\nprotocol = a\nn_list = 100\ntrials = 2\n",
}


# --------------------------------------------------------------------------
# running


def _row(cfg: ExperimentConfig, scheme: str, n: int, trial: int, **kw) -> dict:
    row = {
        "scheme": scheme, "protocol": cfg.protocol, "N": n, "n_t": cfg.n_t, "n_r": cfg.n_r,
        "t0_s": cfg.t0, "p0_w": cfg.p0, "trial": trial, "objective": cfg.objective,
        "value": 0.0, "se_bits_s_hz": 0.0, "ee_bits_joule": 0.0,
        "p": math.nan, "p_f": math.nan, "b": math.nan, "b_f": math.nan, "status": "ok",
    }
    if cfg.objective == "pareto":
        row["alpha"] = math.nan
        row["t"] = math.nan
    row.update(kw)
    return row


def _alloc_cols(a: ResourceAllocation) -> dict:
    return {"p": a.p, "p_f": a.p_f, "b": a.b, "b_f": a.b_f}


def _run_task(task) -> list[dict]:
    cfg, scheme, n, trial = task
    sch = Scheme.from_label(scheme)
    params = cfg.system_params()
    s = Scenario(n_t=cfg.n_t, n_r=cfg.n_r, n_ris=n, pathloss_db=cfg.pathloss_db, seed=cfg.seed)
    ch = draw_channels(s, trial)
    sol = solve_scheme(ch, sch)
    feedback = sch is not Scheme.IDENTITY
    n_rows = len(cfg.alpha_grid) if cfg.objective == "pareto" else 1
    try:
        sm = summarize(cfg.pilot_protocol, s, params, ch, sol.objective, feedback)
        if cfg.objective == "rate":
            res = solve_rate(sm)
            a = res.alloc
            y = feedback_rate(sm.a, a.p_f, a.b_f) if feedback else 0.0
            ee = evaluate_ee(sm, replace(a, y=y))
            return [_row(cfg, scheme, n, trial, value=res.rate, se_bits_s_hz=res.spectral_efficiency,
                         ee_bits_joule=ee, **_alloc_cols(a))]
        if cfg.objective == "ee":
            res = solve_ee(sm, cfg.m_points)
            return [_row(cfg, scheme, n, trial, value=res.ee, se_bits_s_hz=res.rate / params.b_max,
                         ee_bits_joule=res.ee, **_alloc_cols(res.alloc))]
        pts = pareto_frontier(sm, cfg.alpha_grid, cfg.m_points)
        pts.sort(key=lambda q: q.alpha)
        return [_row(cfg, scheme, n, trial, value=q.t, se_bits_s_hz=q.rate / params.b_max,
                     ee_bits_joule=q.ee, alpha=q.alpha, t=q.t, **_alloc_cols(q.alloc)) for q in pts]
    except OverheadExceedsSlotError:
        status = "overhead_exceeds_slot"
    except InfeasibleError:
        status = "infeasible"
    extra = [{"alpha": a} for a in cfg.alpha_grid] if cfg.objective == "pareto" else [{}]
    return [_row(cfg, scheme, n, trial, status=status, **e) for e in extra[:n_rows]]


def worker_count(requested: int | None = None) -> int:
    """Worker processes: ``requested`` or the CPU count, capped by ``RIS_ALLOC_THREADS``."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("RIS_ALLOC_THREADS")
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ConfigError(f"RIS_ALLOC_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[dict]:
    """All rows of the sweep, ordered by ``(scheme, N, trial)``."""
    tasks = [(cfg, s, n, t) for s in cfg.schemes for n in cfg.n_list for t in range(cfg.trials)]
    n_workers = min(worker_count(workers), len(tasks))
    if n_workers <= 1:
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * n_workers))))
    # pool.map preserves order, but sort anyway so the contract does not rest on it
    order = {s: i for i, s in enumerate(cfg.schemes)}
    rows = [r for c in chunks for r in c]
    rows.sort(key=lambda r: (order[r["scheme"]], r["N"], r["trial"],
                             r.get("alpha", 0.0) if cfg.objective == "pareto" else 0.0))
    return rows


def summarize_rows(rows: list[dict]) -> list[dict]:
    """Per-(scheme, N[, alpha]) means; failed trials count as zero SE and EE."""
    groups: dict = {}
    for r in rows:
        key = (r["scheme"], r["protocol"], r["N"], r["objective"], r.get("alpha", ""))
        groups.setdefault(key, []).append(r)
    out = []
    for (scheme, proto, n, obj, alpha), rs in groups.items():
        se = np.array([r["se_bits_s_hz"] for r in rs], dtype=float)
        ee = np.array([r["ee_bits_joule"] for r in rs], dtype=float)
        val = np.array([r["value"] for r in rs], dtype=float)
        k = len(rs)
        sd = (lambda x: float(np.std(x, ddof=1) / math.sqrt(k)) if k > 1 else math.nan)
        out.append({
            "scheme": scheme, "protocol": proto, "N": n, "objective": obj, "alpha": alpha,
            "trials": k, "n_ok": sum(r["status"] == "ok" for r in rs),
            "mean_value": float(np.mean(val)),
            "mean_se_bits_s_hz": float(np.mean(se)), "stderr_se": sd(se),
            "mean_ee_bits_joule": float(np.mean(ee)), "stderr_ee": sd(ee),
        })
    return out


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def emit_csv(rows: list[dict], path, header: list[str] | None = None) -> None:
    """Write rows as UTF-8 CSV; floats use the shortest round-trip form."""
    if header is None:
        header = list(CSV_HEADER)
        if rows and "alpha" in rows[0] and rows[0].get("objective") == "pareto":
            header += PARETO_EXTRA
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[h]) for h in header])


_INT_COLS = {"N", "n_t", "n_r", "trial", "trials", "n_ok"}
_STR_COLS = {"scheme", "protocol", "objective", "status"}


def read_csv(path) -> list[dict]:
    """Inverse of :func:`emit_csv` for the known columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = []
        for r in csv.DictReader(fh):
            out = {}
            for k, v in r.items():
                if k in _STR_COLS:
                    out[k] = v
                elif k in _INT_COLS:
                    out[k] = int(v)
                else:
                    out[k] = float(v) if v != "" else v
            rows.append(out)
    return rows


def summary_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + "_summary" + (p.suffix or ".csv"))
