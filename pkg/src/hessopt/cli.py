"""Command-line entry point.

Subcommands: ``simulate`` runs one split point and writes its totals and
per-step trace; ``sweep`` evaluates the full split grid per chemistry pair;
``density`` emits the energy-vs-power-density diagram data. Exit codes:
0 success, 1 usage or configuration error, 2 infeasible, 3 numeric failure.
Infeasibility details are printed as JSON on stdout so callers can parse
them.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .config import RunConfig, load_config
from .errors import (
    ConfigError,
    CycleParseError,
    HessOptError,
    InfeasibleStepError,
    NoFeasibleDesignError,
    ParameterFileError,
    SocDepletionError,
)
from .pack import build_hess
from .powersplit import InfeasibleDesignError, simulate
from .report import write_density, write_sim_outputs, write_sweep_outputs
from .sizing import lossless_dcdc_experiment, sweep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERIC = 3


def _error_json(kind: str, exc: Exception, **detail) -> None:
    payload = {"error": {"kind": kind, "message": str(exc), **detail}}
    click.echo(json.dumps(payload, sort_keys=True))


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, ParameterFileError, CycleParseError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        except InfeasibleDesignError as exc:
            _error_json("infeasible_design", exc)
            sys.exit(EXIT_INFEASIBLE)
        except InfeasibleStepError as exc:
            _error_json("infeasible_step", exc, step=exc.step)
            sys.exit(EXIT_INFEASIBLE)
        except SocDepletionError as exc:
            _error_json("soc_depleted", exc, step=exc.step)
            sys.exit(EXIT_INFEASIBLE)
        except NoFeasibleDesignError as exc:
            _error_json("no_feasible_design", exc)
            sys.exit(EXIT_INFEASIBLE)
        except (HessOptError, FloatingPointError, ZeroDivisionError) as exc:
            _error_json("numeric_failure", exc)
            sys.exit(EXIT_NUMERIC)

    return wrapper


def _resolve_pair(config: RunConfig, pair: str) -> tuple[str, str]:
    parts = pair.lower().split("-")
    if len(parts) != 2:
        raise ConfigError(f"--pair must look like 'nca-nmc', got {pair!r}")
    he_id, hp_id = parts
    for chem in (he_id, hp_id):
        if chem not in config.cells:
            raise ConfigError(
                f"chemistry '{chem}' is not configured; configured pairs: "
                + ", ".join("-".join(p) for p in config.sweep.pairs)
            )
    return he_id, hp_id


@click.group()
def main():
    """Hybrid battery sizing and power-split optimization."""


@main.command("simulate")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML configuration (defaults apply when omitted).")
@click.option("--pair", required=True, help="Chemistry pair as he-hp, e.g. nca-nmc.")
@click.option("--gamma", required=True, type=float,
              help="Capacity-split fraction assigned to the high-power pack.")
@handles_errors
def cmd_simulate(config_path, pair, gamma):
    """Run a single split point and write sim_*.json plus trace_*.csv."""
    config = load_config(config_path)
    he_id, hp_id = _resolve_pair(config, pair)
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"--gamma must be in [0, 1], got {gamma}")
    design = build_hess(
        gamma, config.hess.e_tot_wh, config.hess.v_design_v,
        config.cell(hp_id), config.cell(he_id), config.hess.eta_dc,
        config.vehicle.p_em_max, t_ref=config.thermal.t_amb,
    )
    cycle = config.run_cycle
    log = simulate(
        design, cycle, config.vehicle, config.objective, config.costates,
        config.init, config.solver, config.thermal,
    )
    json_path, csv_path = write_sim_outputs(
        config.output_dir, log, design, f"{he_id}-{hp_id}", gamma, cycle.speed
    )
    click.echo(f"wrote {json_path} and {csv_path}")


def _run_sweeps(config: RunConfig, lossless_flag: bool):
    threads = config.threads()
    results = []
    lossless = {}
    for he_id, hp_id in config.sweep.pairs:
        he_cell, hp_cell = config.cell(he_id), config.cell(hp_id)
        common = dict(
            gamma_grid=config.sweep.gamma_grid,
            e_tot=config.hess.e_tot_wh,
            v_design=config.hess.v_design_v,
            cycle=config.run_cycle,
            vehicle=config.vehicle,
            objective=config.objective,
            costates=config.costates,
            init=config.init,
            solver=config.solver,
            thermal=config.thermal,
            threads=threads,
        )
        if lossless_flag or config.sweep.lossless_dcdc:
            cmp = lossless_dcdc_experiment(
                he_cell, hp_cell, eta_dc=config.hess.eta_dc, **common
            )
            results.append(cmp.lossy)
            lossless[cmp.lossy.pair_name] = cmp
        else:
            results.append(
                sweep(he_cell, hp_cell, eta_dc=config.hess.eta_dc, **common)
            )
    return results, (lossless or None)


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--lossless-dcdc", is_flag=True, default=False,
              help="Also sweep with an ideal converter and report both optima.")
@handles_errors
def cmd_sweep(config_path, lossless_dcdc):
    """Sweep the split grid for every configured pair; write CSVs + summary."""
    config = load_config(config_path)
    results, lossless = _run_sweeps(config, lossless_dcdc)
    written = write_sweep_outputs(config.output_dir, results, config, lossless)
    for path in written:
        click.echo(f"wrote {path}")


@main.command("density")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--lossless-dcdc", is_flag=True, default=False)
@handles_errors
def cmd_density(config_path, lossless_dcdc):
    """Write density.csv: energy vs power density across all splits."""
    config = load_config(config_path)
    results, lossless = _run_sweeps(config, lossless_dcdc)
    path = write_density(config.output_dir, results, config, lossless)
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
