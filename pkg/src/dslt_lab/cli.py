from __future__ import annotations
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import typer
from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from .experiments import EXIT_OK, EXIT_USAGE, Command, ExperimentSpec, OutputFormat, run, validate
from .utils import parse_float_list, worker_count


app = typer.Typer(help="dslt-lab: numerical experiments on the derivative of self-intersection local time of fBm.")
err_console = Console(stderr=True)
log = logging.getLogger("dslt_lab")


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False, show_time=False)],
        force=True,
    )


@app.callback()
def main_callback(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")):
    load_dotenv()
    _setup_logging(verbose)


def _execute(command: Command, params: dict[str, Any], out: Optional[Path], fmt: OutputFormat) -> None:
    spec = ExperimentSpec(
        command=command,
        params={k: v for k, v in params.items() if v is not None},
        output=str(out) if out else None,
        format=fmt,
    )
    violations = validate(spec)
    if violations:
        for v in violations:
            err_console.print(f"[red]{command.value}:[/red] {v}")
        raise typer.Exit(code=EXIT_USAGE)
    code = run(spec)
    if code != EXIT_OK:
        raise typer.Exit(code=code)


def _deltas(raw: Optional[str]) -> Optional[list[float]]:
    if raw is None:
        return None
    try:
        return parse_float_list(raw)
    except ValueError as e:
        err_console.print(f"[red]--deltas:[/red] {e}")
        raise typer.Exit(code=EXIT_USAGE)


HURST = typer.Option(None, "--hurst", help="Hurst parameter in (0,1)")
T = typer.Option(None, "--t", help="Time horizon")
SEED = typer.Option(None, "--seed", help="Base seed (64-bit unsigned)")
OUT = typer.Option(None, "--out", help="Write the artifact here instead of printing a table")
FORMAT = typer.Option(OutputFormat.CSV, "--format", help="csv|json", case_sensitive=False)
STEPS = typer.Option(None, "--steps", help="Grid steps n")
PATHS = typer.Option(None, "--paths", help="Number of Monte Carlo paths")
METHOD = typer.Option(None, "--method", help="cholesky|circulant")
EPS = typer.Option(None, "--eps", help="Mollifier scale (variance)")


@app.command("simulate")
def cmd_simulate(
    hurst: Optional[float] = HURST,
    t: Optional[float] = T,
    steps: Optional[int] = STEPS,
    paths: Optional[int] = PATHS,
    seed: Optional[int] = SEED,
    method: Optional[str] = METHOD,
    out: Optional[Path] = OUT,
    format_: OutputFormat = FORMAT,
):
    """Sample fBm paths on a uniform grid."""
    _execute(Command.SIMULATE, dict(hurst=hurst, t=t, steps=steps, paths=paths, seed=seed, method=method), out, format_)


@app.command("dslt")
def cmd_dslt(
    hurst: Optional[float] = HURST,
    t: Optional[float] = T,
    eps: Optional[float] = EPS,
    bandwidth: Optional[float] = typer.Option(None, "--bandwidth", help="Local-time kernel bandwidth"),
    y: Optional[float] = typer.Option(None, "--y", help="Spatial level"),
    steps: Optional[int] = STEPS,
    paths: Optional[int] = PATHS,
    seed: Optional[int] = SEED,
    method: Optional[str] = METHOD,
    out: Optional[Path] = OUT,
    format_: OutputFormat = FORMAT,
):
    """Monte Carlo mean and variance of the mollified DSLT."""
    params = dict(hurst=hurst, t=t, eps=eps, bandwidth=bandwidth, y=y, steps=steps, paths=paths, seed=seed, method=method)
    _execute(Command.DSLT, params, out, format_)


@app.command("tanaka")
def cmd_tanaka(
    hurst: Optional[float] = HURST,
    t: Optional[float] = T,
    eps: Optional[float] = EPS,
    bandwidth: Optional[float] = typer.Option(None, "--bandwidth", help="Local-time kernel bandwidth"),
    y: Optional[float] = typer.Option(None, "--y", help="Spatial level"),
    steps: Optional[int] = STEPS,
    paths: Optional[int] = PATHS,
    seed: Optional[int] = SEED,
    method: Optional[str] = METHOD,
    smoothed: bool = typer.Option(False, "--smoothed", help="Use the smoothed Ito identity instead of the Tanaka formula"),
    out: Optional[Path] = OUT,
    format_: OutputFormat = FORMAT,
):
    """Residual of the Tanaka formula for the DSLT of Brownian motion (H = 0.5)."""
    params = dict(
        hurst=hurst, t=t, eps=eps, bandwidth=bandwidth, y=y, steps=steps, paths=paths, seed=seed, method=method, smoothed=smoothed
    )
    _execute(Command.TANAKA, params, out, format_)


@app.command("moment2")
def cmd_moment2(
    hurst: Optional[float] = HURST,
    t: Optional[float] = T,
    eps: Optional[float] = EPS,
    y: Optional[float] = typer.Option(None, "--y", help="Spatial level"),
    steps: Optional[int] = STEPS,
    paths: Optional[int] = PATHS,
    seed: Optional[int] = SEED,
    method: Optional[str] = METHOD,
    tol: Optional[float] = typer.Option(None, "--tol", help="Quadrature tolerance"),
    out: Optional[Path] = OUT,
    format_: OutputFormat = FORMAT,
):
    """Second moment: Monte Carlo against quadrature."""
    params = dict(hurst=hurst, t=t, eps=eps, y=y, steps=steps, paths=paths, seed=seed, method=method, tol=tol)
    _execute(Command.MOMENT2, params, out, format_)


@app.command("chaos")
def cmd_chaos(
    hurst: Optional[float] = HURST,
    t: Optional[float] = T,
    mmax: Optional[int] = typer.Option(None, "--mmax", help="Highest chaos index m (order 2m-1)"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Quadrature tolerance"),
    out: Optional[Path] = OUT,
    format_: OutputFormat = FORMAT,
):
    """Chaos norms, their tail and the direct second-moment integral."""
    _execute(Command.CHAOS, dict(hurst=hurst, t=t, mmax=mmax, tol=tol), out, format_)


@app.command("bounds")
def cmd_bounds(
    hurst: Optional[float] = HURST,
    case: Optional[str] = typer.Option(None, "--case", help="i|ii-prime|iii|ii-counterexample|lnd|chain-1|chain-2|chain-3"),
    b: Optional[float] = typer.Option(None, "--b", help="Middle gap for ii-counterexample"),
    deltas: Optional[str] = typer.Option(None, "--deltas", help="Comma-separated decreasing gaps"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Random geometries to scan"),
    max_j: Optional[int] = typer.Option(None, "--max-j", help="Largest partition size for lnd"),
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    format_: OutputFormat = FORMAT,
):
    """Variance lower bounds, the nested-case counterexample and local nondeterminism."""
    params = dict(hurst=hurst, case=case, b=b, deltas=_deltas(deltas), samples=samples, max_j=max_j, seed=seed)
    _execute(Command.BOUNDS, params, out, format_)


def _run_line(lineno: int, line: str) -> int:
    try:
        spec = ExperimentSpec.model_validate_json(line)
    except ValidationError as e:
        log.error("line %d: %s", lineno, e.errors()[0]["msg"])
        return EXIT_USAGE
    if not spec.output:
        log.warning("line %d: %s has no output path; result is discarded", lineno, spec.command.value)
    return run(spec, show=False)


@app.command("batch")
def cmd_batch(file: Path = typer.Argument(..., exists=True, dir_okay=False, help="One JSON spec per line")):
    """Run every spec in FILE; exits with the worst status."""
    lines = [(i, ln) for i, ln in enumerate(file.read_text(encoding="utf-8").splitlines(), 1) if ln.strip() and not ln.lstrip().startswith("#")]
    workers = worker_count()
    log.info("batch: %d spec(s), %d worker(s)", len(lines), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        codes = list(pool.map(lambda item: _run_line(*item), lines))
    worst = max(codes, default=EXIT_OK)
    if worst != EXIT_OK:
        err_console.print(f"[red]{sum(c != EXIT_OK for c in codes)} of {len(codes)} spec(s) failed[/red]")
        raise typer.Exit(code=worst)


def main():
    app()


if __name__ == "__main__":
    main()
