"""
Command-line interface for the Driven Dicke Toolkit.
"""

import json
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from dicke_toolkit import SCHEMA_VERSION, __version__
from dicke_toolkit.core.config import settings
from dicke_toolkit.core.exceptions import ConfigurationError, DickeToolkitException
from dicke_toolkit.core.logging import run_context, setup_logging
from dicke_toolkit.models.run_config import RunConfig, apply_overrides, load_run_config
from dicke_toolkit.presets.builtin_presets import get_preset, list_presets
from dicke_toolkit.services.observables import ground_state_energy_oracle, ground_state_energy_per_atom
from dicke_toolkit.services.runner import simulation_runner

app = typer.Typer(help="Driven Dicke Toolkit CLI")
console = Console()
err_console = Console(stderr=True)


def _version_callback(value: bool):
    if value:
        console.print(f"dicke-toolkit {__version__} (config schema {SCHEMA_VERSION})")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        False, "--version", callback=_version_callback, is_eager=True, help="Show version and schema version"
    ),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Override LOG_LEVEL"),
):
    """Mean-field, fluctuation and Floquet simulations of the driven Dicke model."""
    with _diagnostics():
        setup_logging(log_level.upper() if log_level else None)


@contextmanager
def _diagnostics():
    """Turn toolkit exceptions into one diagnostic line and the matching exit code."""
    try:
        yield
    except DickeToolkitException as e:
        err_console.print(f"[red]Error ({e.error_code}): {e.message}[/red]")
        raise typer.Exit(code=e.exit_code)


def _resolve_config(
    config: Optional[Path],
    preset: Optional[str],
    **overrides,
) -> RunConfig:
    if config is not None and preset is not None:
        raise ConfigurationError("Give either --config or --preset, not both")
    if config is not None:
        run_config = load_run_config(config)
    elif preset is not None:
        run_config = get_preset(preset)
    else:
        run_config = RunConfig()
    return apply_overrides(run_config, **overrides)


_CONFIG_OPTION = typer.Option(None, "--config", help="Run configuration JSON file (or a run summary)")
_PRESET_OPTION = typer.Option(None, "--preset", help="Built-in preset name")
_OUT_OPTION = typer.Option(None, "--out", help="Output directory")
_WORKERS_OPTION = typer.Option(None, "--workers", min=1, help="Worker processes for sweeps")
_FIXED_STEP_OPTION = typer.Option(None, "--fixed-step", help="Use fixed-step RK4 with this step")
_TOL_OPTION = typer.Option(None, "--tol", help="Integrator tolerances REL[,ABS]")
_STRIDE_OPTION = typer.Option(None, "--stride", min=1, help="Keep every K-th output sample")
_T_END_OPTION = typer.Option(None, "--t-end", help="Final integration time")


@app.command()
def simulate(
    config: Optional[Path] = _CONFIG_OPTION,
    preset: Optional[str] = _PRESET_OPTION,
    out: Optional[str] = _OUT_OPTION,
    workers: Optional[int] = _WORKERS_OPTION,
    fixed_step: Optional[float] = _FIXED_STEP_OPTION,
    tol: Optional[str] = _TOL_OPTION,
    stride: Optional[int] = _STRIDE_OPTION,
    t_end: Optional[float] = _T_END_OPTION,
):
    """Integrate a trajectory and write trajectory, fluctuation and observables CSVs."""
    with _diagnostics():
        run_config = _resolve_config(
            config, preset, out=out, workers=workers, fixed_step=fixed_step, tol=tol, stride=stride, t_end=t_end
        )
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=err_console,
        ) as progress:
            task = progress.add_task(f"Integrating to t = {run_config.t_end:g}...", total=None)
            with run_context(command="simulate", run=run_config.name):
                run = simulation_runner.run_trajectory(run_config)
            progress.update(task, completed=True)

        summary = run.summary
        table = Table(title=f"Trajectory run: {run_config.name or 'unnamed'}")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="magenta")
        table.add_row("Samples", str(len(run.records)))
        table.add_row("gamma*", f"{summary['gamma_star']:.6g}")
        table.add_row("t_max", f"{summary['t_max']:.6g}")
        table.add_row("Drive regime", str(summary["drive_regime"]))
        table.add_row("Validity", summary["validity"]["status"])
        table.add_row("Max symplectic defect", f"{summary['max_symplectic_defect']:.3e}")
        console.print(table)
        console.print(f"[dim]Outputs: {run.directory}[/dim]")


@app.command()
def stability(
    config: Optional[Path] = _CONFIG_OPTION,
    preset: Optional[str] = _PRESET_OPTION,
    out: Optional[str] = _OUT_OPTION,
    workers: Optional[int] = _WORKERS_OPTION,
    tol: Optional[str] = _TOL_OPTION,
):
    """Sweep the Floquet instability rate over a (eta, g) grid."""
    with _diagnostics():
        run_config = _resolve_config(config, preset, out=out, workers=workers, tol=tol)
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=err_console,
        ) as progress:
            shape = run_config.sweep.to_grid_spec().shape if run_config.sweep else (0, 0)
            task = progress.add_task(f"Sweeping {shape[0]} x {shape[1]} cells...", total=None)
            with run_context(command="stability", run=run_config.name):
                run = simulation_runner.run_stability(run_config)
            progress.update(task, completed=True)

        table = Table(title="Stability sweep")
        table.add_column("Status", style="cyan")
        table.add_column("Cells", style="magenta")
        for status, count in sorted(run.summary["cells"].items()):
            table.add_row(status, str(count))
        console.print(table)
        console.print(f"[dim]Outputs: {run.directory}[/dim]")


@app.command("gs-energy")
def gs_energy(
    omega_a: float = typer.Option(..., "--omega-a", help="Cavity frequency"),
    omega_b: float = typer.Option(..., "--omega-b", help="Atomic splitting"),
    g: float = typer.Option(..., "--g", help="Coupling"),
    check: bool = typer.Option(False, "--check", help="Compare with a numerical minimization"),
):
    """Ground-state energy per atom in the thermodynamic limit."""
    with _diagnostics():
        if omega_a <= 0 or omega_b <= 0 or g < 0:
            raise ConfigurationError("need omega_a > 0, omega_b > 0 and g >= 0")
        result = ground_state_energy_per_atom(omega_a, omega_b, g)
        table = Table(title="Ground-state energy")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="magenta")
        table.add_row("E/N", repr(result.e_per_atom))
        table.add_row("Phase", result.phase.value)
        table.add_row("mu", repr(result.mu))
        if check:
            oracle = ground_state_energy_oracle(omega_a, omega_b, g)
            table.add_row("Numerical minimum", repr(oracle))
            table.add_row("Difference", f"{abs(oracle - result.e_per_atom):.3e}")
        console.print(table)


@app.command("validate-config")
def validate_config(
    config: Optional[Path] = _CONFIG_OPTION,
    preset: Optional[str] = _PRESET_OPTION,
    out: Optional[str] = _OUT_OPTION,
    workers: Optional[int] = _WORKERS_OPTION,
    fixed_step: Optional[float] = _FIXED_STEP_OPTION,
    tol: Optional[str] = _TOL_OPTION,
    stride: Optional[int] = _STRIDE_OPTION,
    t_end: Optional[float] = _T_END_OPTION,
):
    """Check a configuration, including the physical preconditions, and print it resolved."""
    with _diagnostics():
        run_config = _resolve_config(
            config, preset, out=out, workers=workers, fixed_step=fixed_step, tol=tol, stride=stride, t_end=t_end
        )
        simulation_runner.check_preconditions(run_config)
        console.print(Panel(json.dumps(run_config.to_json_dict(), indent=2), title="Resolved configuration"))
        console.print("[bold green]✓ Configuration is valid[/bold green]")


@app.command()
def presets():
    """List built-in presets."""
    table = Table(title="Built-in presets")
    table.add_column("Name", style="cyan")
    table.add_column("Description", style="dim")
    for preset in list_presets():
        table.add_row(preset["name"], preset["description"])
    console.print(table)
    console.print(f"[dim]Default workers: {settings.default_workers()}[/dim]")


if __name__ == "__main__":
    app()
