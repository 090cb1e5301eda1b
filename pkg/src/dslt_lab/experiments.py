from __future__ import annotations

import enum
import logging
import math
import time
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import BaseModel, ConfigDict, Field

from .chaos import chaos_summary
from .errors import DslError, NumericalError
from .estimators import (
    EstimatorConfig,
    dslt_functional,
    expected_alpha_prime,
    mc_summary,
    tanaka_residual_bm,
    tanaka_residual_smoothed,
)
from .mollifier import mean_alpha_eps
from .pathgen import Method, TimeGrid, path_stream
from .quadrature import (
    CRITICAL_HURST,
    BoundCheck,
    case_bound_chain_check,
    falsify_bound_ii,
    lnd_constant_scan,
    scan_bound_ratio,
    second_moment,
)
from .render import Artifact, render_artifact, write_artifact

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


class Command(str, enum.Enum):
    SIMULATE = "simulate"
    DSLT = "dslt"
    TANAKA = "tanaka"
    MOMENT2 = "moment2"
    CHAOS = "chaos"
    BOUNDS = "bounds"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    command: Command
    params: dict[str, Any] = Field(default_factory=dict)
    output: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV

    def record(self) -> dict:
        """JSON-ready form written into every artifact header."""
        return {
            "command": self.command.value,
            "params": resolved_params(self),
            "output": self.output,
            "format": self.format.value,
        }


# Defaults per command; "hurst" is always required.
DEFAULTS: dict[Command, dict[str, Any]] = {
    Command.SIMULATE: {"t": 1.0, "steps": 1024, "seed": 0, "method": "circulant", "paths": 1},
    Command.DSLT: {"t": 1.0, "eps": 0.01, "bandwidth": 0.01, "y": 0.0, "steps": 1024, "paths": 100, "seed": 0, "method": "circulant"},
    Command.TANAKA: {"t": 1.0, "eps": 0.01, "bandwidth": 0.01, "y": 0.0, "steps": 4096, "paths": 100, "seed": 0, "method": "circulant", "smoothed": False},
    Command.MOMENT2: {"t": 1.0, "eps": 0.05, "y": 0.0, "steps": 1024, "paths": 1000, "seed": 0, "method": "circulant", "tol": 1e-3},
    Command.CHAOS: {"t": 1.0, "mmax": 30, "tol": 1e-3},
    Command.BOUNDS: {"case": "i", "b": 1.0, "deltas": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6], "samples": 1_000_000, "seed": 0, "max_j": 8},
}


def resolved_params(spec: ExperimentSpec) -> dict[str, Any]:
    out = dict(DEFAULTS[spec.command])
    out.update({k: v for k, v in spec.params.items() if v is not None})
    # the smoothed residual reuses eps as its bandwidth
    if spec.command is Command.TANAKA and out["smoothed"] is True and spec.params.get("bandwidth") is None:
        out["bandwidth"] = out["eps"]
    return out


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate(spec: ExperimentSpec) -> list[str]:
    """Named violations; empty iff :func:`run` may execute ``spec``."""
    p = resolved_params(spec)
    cmd = spec.command
    errs: list[str] = []
    allowed = set(DEFAULTS[cmd]) | {"hurst"}
    for k in sorted(set(p) - allowed):
        errs.append(f"unknown parameter '{k}' for {cmd.value}")

    h = p.get("hurst")
    if h is None:
        errs.append("missing required parameter 'hurst'")
    elif not _is_number(h) or not 0 < h < 1:
        errs.append("hurst must lie strictly in (0,1)")
    if "t" in p and (not _is_number(p["t"]) or not p["t"] > 0):
        errs.append("t must be positive")
    if "smoothed" in p and not isinstance(p["smoothed"], bool):
        errs.append("smoothed must be true or false")
    if "seed" in p and (not _is_int(p["seed"]) or not 0 <= p["seed"] < 2**64):
        errs.append("seed must be a 64-bit unsigned integer")
    if "method" in p and p["method"] not in {m.value for m in Method}:
        errs.append("method must be one of cholesky, circulant")
    if "steps" in p and (not _is_int(p["steps"]) or p["steps"] < 2):
        errs.append("steps must be at least 2")
    if "eps" in p and (not _is_number(p["eps"]) or not p["eps"] > 0):
        errs.append("mollifier scale must be positive")
    if "bandwidth" in p and (not _is_number(p["bandwidth"]) or not p["bandwidth"] > 0):
        errs.append("bandwidth must be positive")
    if "y" in p and not _is_number(p["y"]):
        errs.append("y must be a finite number")
    if "tol" in p and (not _is_number(p["tol"]) or not p["tol"] > 0):
        errs.append("tol must be positive")
    if "paths" in p:
        least = 1 if cmd is Command.SIMULATE else 2
        if not _is_int(p["paths"]) or p["paths"] < least:
            errs.append(f"paths must be at least {least}")

    if cmd is Command.TANAKA and _is_number(h) and h != 0.5:
        errs.append("tanaka requires hurst = 0.5")
    if cmd is Command.TANAKA and p["smoothed"] is True and p["bandwidth"] != p["eps"]:
        errs.append("smoothed residual needs bandwidth = eps")
    if cmd is Command.CHAOS:
        if _is_number(h) and 0 < h < 1 and h >= CRITICAL_HURST:
            errs.append("chaos requires hurst < 2/3")
        if not _is_int(p["mmax"]) or p["mmax"] < 1:
            errs.append("mmax must be at least 1")
    if cmd is Command.BOUNDS:
        errs.extend(_validate_bounds(p))
    return errs


def _validate_bounds(p: dict[str, Any]) -> list[str]:
    errs: list[str] = []
    try:
        check = BoundCheck(p["case"])
    except ValueError:
        return ["case must be one of " + ", ".join(c.value for c in BoundCheck)]
    if check is BoundCheck.COUNTEREXAMPLE:
        if not _is_number(p["b"]) or not p["b"] > 0:
            errs.append("b must be positive")
        d = p["deltas"]
        if (
            not isinstance(d, (list, tuple))
            or not d
            or not all(_is_number(x) and x > 0 for x in d)
            or any(x <= y for x, y in zip(d, d[1:]))
        ):
            errs.append("deltas must be positive and strictly decreasing")
    elif not _is_int(p["samples"]) or p["samples"] < 1:
        errs.append("samples must be at least 1")
    if check is BoundCheck.LND and (not _is_int(p["max_j"]) or p["max_j"] < 1):
        errs.append("max_j must be at least 1")
    if check.value.startswith("chain") and _is_number(p.get("hurst")) and p["hurst"] >= CRITICAL_HURST:
        errs.append("chain checks require hurst < 2/3")
    return errs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _config(p: dict[str, Any]) -> EstimatorConfig:
    return EstimatorConfig(
        eps=p["eps"],
        bandwidth=p.get("bandwidth", p["eps"]),
        y=p.get("y", 0.0),
        t=p["t"],
        n=p["steps"],
        reps=p["paths"],
        seed=p["seed"],
    )


def _simulate(p: dict[str, Any]) -> Artifact:
    grid = TimeGrid(p["t"], p["steps"])
    stream = path_stream(p["hurst"], grid, p["seed"], p["paths"], p["method"])
    times = grid.points
    rows = []
    for k, path in enumerate(stream):
        rows.extend({"path": k, "t": float(s), "value": float(v)} for s, v in zip(times, path.values))
    return Artifact(columns=["path", "t", "value"], rows=rows, title=f"fBm H={p['hurst']} ({p['method']})")


def _mc_row(p: dict[str, Any], cfg: EstimatorConfig, s) -> dict[str, Any]:
    return {
        "H": float(p["hurst"]),
        "t": cfg.t,
        "eps": cfg.eps,
        "h": cfg.bandwidth,
        "y": cfg.y,
        "n": cfg.n,
        "reps": s.reps,
        "seed": cfg.seed,
        "mean": s.mean,
        "variance": s.variance,
        "std_error": s.std_error,
    }


MC_COLUMNS = ["H", "t", "eps", "h", "y", "n", "reps", "seed", "mean", "variance", "std_error"]


def _dslt(p: dict[str, Any]) -> Artifact:
    cfg = _config(p)
    s = mc_summary(p["hurst"], cfg, dslt_functional(cfg), p["method"])
    exact = mean_alpha_eps(p["hurst"], cfg.t, cfg.eps, cfg.y)
    grid_mean = expected_alpha_prime(p["hurst"], cfg.grid, cfg.eps, cfg.y)
    notes = [
        f"exact mean   {exact:.6g}",
        f"grid mean    {grid_mean:.6g}",
        f"MC z-score   {(s.mean - grid_mean) / s.std_error if s.std_error > 0 else 0.0:+.2f}",
    ]
    return Artifact(columns=MC_COLUMNS, rows=[_mc_row(p, cfg, s)], title="DSLT estimator", notes=notes)


def _tanaka(p: dict[str, Any]) -> Artifact:
    cfg = _config(p)
    residual = tanaka_residual_smoothed if p["smoothed"] else tanaka_residual_bm
    s = mc_summary(p["hurst"], cfg, lambda path: residual(path, cfg), p["method"])
    row = _mc_row(p, cfg, s)
    row["rms"] = math.sqrt(s.mean**2 + s.variance * (s.reps - 1) / s.reps)
    return Artifact(columns=MC_COLUMNS + ["rms"], rows=[row], title="Tanaka residual")


def _moment2(p: dict[str, Any]) -> Artifact:
    cfg = _config(p)
    s = mc_summary(p["hurst"], cfg, dslt_functional(cfg, power=2), p["method"])
    q = second_moment(p["hurst"], cfg.t, cfg.eps, p["tol"], y=cfg.y)
    row = {
        "H": float(p["hurst"]),
        "t": cfg.t,
        "eps": cfg.eps,
        "y": cfg.y,
        "n": cfg.n,
        "reps": s.reps,
        "seed": cfg.seed,
        "mc_mean": s.mean,
        "mc_std_error": s.std_error,
        "quad_value": q.value,
        "quad_abs_err": q.abs_err,
        "quad_converged": q.converged,
    }
    cols = list(row)
    return Artifact(columns=cols, rows=[row], title="Second moment: Monte Carlo vs quadrature")


def _chaos(p: dict[str, Any]) -> Artifact:
    cs = chaos_summary(p["hurst"], p["t"], p["mmax"], p["tol"])
    h, t = float(p["hurst"]), float(p["t"])
    rows = [{"H": h, "t": t, "m": term.m, "norm_sq": term.norm_sq, "abs_err": term.abs_err} for term in cs.terms]
    rows.append({"H": h, "t": t, "m": "total", "norm_sq": cs.partial_sum, "abs_err": float(sum(x.abs_err for x in cs.terms))})
    rows.append({"H": h, "t": t, "m": "tail", "norm_sq": cs.tail.value, "abs_err": cs.tail.abs_err})
    rows.append({"H": h, "t": t, "m": "reference", "norm_sq": cs.reference.value, "abs_err": cs.reference.abs_err})
    notes = [f"partial + tail - reference = {cs.closure_gap:.3e}"]
    return Artifact(columns=["H", "t", "m", "norm_sq", "abs_err"], rows=rows, title="Chaos norms", notes=notes)


def _bounds(p: dict[str, Any]) -> Artifact:
    check = BoundCheck(p["case"])
    h = float(p["hurst"])
    if check is BoundCheck.COUNTEREXAMPLE:
        rep = falsify_bound_ii(h, p["b"], p["deltas"])
        rows = [{"H": h, "b": rep.b, "delta": d, "ratio": r, "slope": rep.slope} for d, r in zip(rep.deltas, rep.ratios)]
        return Artifact(columns=["H", "b", "delta", "ratio", "slope"], rows=rows, title="Uncorrected nested bound")
    if check is BoundCheck.LND:
        k = lnd_constant_scan(h, p["samples"], p["max_j"], p["seed"])
        row = {"H": h, "samples": p["samples"], "max_j": p["max_j"], "seed": p["seed"], "min_ratio": k}
        return Artifact(columns=list(row), rows=[row], title="Local nondeterminism")
    if check.value.startswith("chain"):
        rep = case_bound_chain_check(h, check.case, p["samples"], p["seed"])
        row = {
            "case": rep.case.value,
            "H": rep.H,
            "samples": rep.samples,
            "identity_max_err": rep.identity_max_err,
            "mu_constant": rep.mu_constant,
            "majorant_constant": rep.majorant_constant,
            "young_alpha": rep.young_alpha,
        }
        return Artifact(columns=list(row), rows=[row], title="Integrability chain")
    rep = scan_bound_ratio(h, check.case, p["samples"], p["seed"])
    row = {
        "case": rep.case.value,
        "H": rep.H,
        "samples": rep.samples,
        "min_ratio": rep.min_ratio,
        "argmin_a": rep.argmin_a,
        "argmin_b": rep.argmin_b,
        "argmin_c": rep.argmin_c,
    }
    return Artifact(columns=list(row), rows=[row], title="Variance bound scan")


RUNNERS: dict[Command, Callable[[dict[str, Any]], Artifact]] = {
    Command.SIMULATE: _simulate,
    Command.DSLT: _dslt,
    Command.TANAKA: _tanaka,
    Command.MOMENT2: _moment2,
    Command.CHAOS: _chaos,
    Command.BOUNDS: _bounds,
}


def execute(spec: ExperimentSpec) -> Artifact:
    """Run a validated spec and return its table; raises library errors."""
    return RUNNERS[spec.command](resolved_params(spec))


def run(spec: ExperimentSpec, show: bool = True) -> int:
    """Validate, execute and write ``spec``; returns the process exit code."""
    violations = validate(spec)
    if violations:
        for v in violations:
            log.error("%s: %s", spec.command.value, v)
        return EXIT_USAGE
    started = time.perf_counter()
    try:
        art = execute(spec)
    except NumericalError as e:
        log.error("%s failed: %s", spec.command.value, e)
        return EXIT_NUMERICAL
    except DslError as e:
        log.error("%s: %s", spec.command.value, e)
        return EXIT_USAGE
    if spec.output:
        path = write_artifact(Path(spec.output), spec.record(), art, spec.format.value)
        log.info("wrote %s (%d rows, %.1fs)", path, len(art.rows), time.perf_counter() - started)
    elif show:
        render_artifact(art)
    return EXIT_OK
