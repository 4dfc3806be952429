"""Result emission: plot-ready CSV/JSON artifacts.

No plotting here; the files carry exactly the data behind the energy
breakdown, split-sweep and density figures. All writers are deterministic:
identical inputs produce byte-identical files (floats are written with
repr, JSON keys are sorted, no timestamps).
"""

from __future__ import annotations

import json
from pathlib import Path

from .config import RunConfig
from .pack import HessDesign, build_hess
from .powersplit import SimulationLog
from .sizing import STATUS_OK, LosslessComparison, SweepResult


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def gamma_tag(gamma: float) -> str:
    return format(gamma, "g")


def sim_totals_dict(log: SimulationLog, pair: str, gamma: float, design: HessDesign) -> dict:
    return {
        "pair": pair,
        "gamma": gamma,
        "objective": log.objective_kind,
        "j_value": log.j_value,
        "totals": {
            "e_ec_hp_wh": log.e_ec_hp,
            "e_ec_he_wh": log.e_ec_he,
            "e_t_hp_wh": log.e_t_hp,
            "e_t_he_wh": log.e_t_he,
            "e_l_hp_wh": log.e_l_hp,
            "e_l_he_wh": log.e_l_he,
            "e_l_dc_wh": log.e_l_dc,
            "e_s_em_wh": log.e_s_em,
            "e_l_em_wh": log.e_l_em,
            "delta_soc_hp": log.delta_soc_hp,
            "delta_soc_he": log.delta_soc_he,
            "delta_deg_hp": log.delta_deg_hp,
            "delta_deg_he": log.delta_deg_he,
        },
        "design": {
            "e_hp_designed_wh": design.hp.e_designed,
            "e_he_designed_wh": design.he.e_designed,
            "e_actual_wh": design.e_actual,
            "n_s_hp": design.hp.n_s,
            "n_p_hp": design.hp.n_p,
            "n_s_he": design.he.n_s,
            "n_p_he": design.he.n_p,
            "mass_battery_kg": design.mass,
            "energy_density_wh_kg": design.energy_density,
            "power_density_w_kg": design.power_density(),
        },
        "d_c_km": log.d_c_km,
        "mass_total_kg": log.mass_total,
    }


def write_sim_outputs(
    outdir: Path,
    log: SimulationLog,
    design: HessDesign,
    pair: str,
    gamma: float,
    speed,
) -> tuple[Path, Path]:
    """Write sim_<pair>_<gamma>.json and trace_<pair>_<gamma>.csv."""
    outdir.mkdir(parents=True, exist_ok=True)
    tag = f"{pair}_{gamma_tag(gamma)}"
    json_path = outdir / f"sim_{tag}.json"
    csv_path = outdir / f"trace_{tag}.csv"
    _write_json(json_path, sim_totals_dict(log, pair, gamma, design))

    tr = log.trace
    n = tr["u"].shape[0]
    header = [
        "t_s", "v_mps", "p_em_w", "u_w", "v_dc_v", "i_hp_a", "i_he_a",
        "soc_hp", "soc_he", "t_hp_c", "t_he_c",
    ]
    p_em = log.extras.get("p_em")
    rows = []
    for k in range(n):
        rows.append([
            k * log.dt,
            float(speed[k]),
            float(p_em[k]) if p_em is not None else "",
            float(tr["u"][k]),
            float(tr["v_dc"][k]),
            float(tr["i_hp"][k]),
            float(tr["i_he"][k]),
            float(tr["soc_hp"][k]),
            float(tr["soc_he"][k]),
            float(tr["t_hp"][k]),
            float(tr["t_he"][k]),
        ])
    _write_csv(csv_path, header, rows)
    return json_path, csv_path


SWEEP_COLUMNS = [
    "gamma", "feasible", "j_value_wh", "e_s_em_wh", "e_l_hp_wh", "e_l_he_wh",
    "e_l_em_wh", "e_l_dc_wh", "dsoc_hp", "dsoc_he",
    "energy_density_wh_kg", "power_density_w_kg",
]


def sweep_rows(result: SweepResult) -> list[list]:
    # j_value_wh is always the electrochemical energy total, which equals
    # the loss-breakdown sum per row; a TCO objective's currency value is
    # reported in summary.json, not here
    rows = []
    for p in result.points:
        log = p.log
        rows.append([
            p.gamma,
            p.feasible,
            log.j_e if p.completed else None,
            log.e_s_em if log else None,
            log.e_l_hp if log else None,
            log.e_l_he if log else None,
            log.e_l_em if log else None,
            log.e_l_dc if log else None,
            log.delta_soc_hp if log else None,
            log.delta_soc_he if log else None,
            p.design.energy_density,
            p.design.power_density(),
        ])
    return rows


def pair_summary(result: SweepResult) -> dict:
    best = result.best
    log = best.log
    e_hp, e_he = best.design.hp.e_designed, best.design.he.e_designed
    e_em = log.e_s_em + log.e_l_em
    eff = {
        "e_t_hp_over_e_ec_hp": (log.e_t_hp / log.e_ec_hp) if log.e_ec_hp else None,
        "e_t_he_over_e_ec_he": (log.e_t_he / log.e_ec_he) if log.e_ec_he else None,
        "eta_dc": result.eta_dc,
        "e_s_em_over_e_em": (log.e_s_em / e_em) if e_em else None,
    }
    return {
        "optimum": {
            "gamma": best.gamma,
            "j_e_wh": log.j_e,
            "e_hp_wh": e_hp,
            "e_he_wh": e_he,
            "j_value": best.j_value,
        },
        "efficiencies": eff,
        "gamma_min_feasible": result.gamma_min_feasible,
        "failed_points": [
            {"gamma": p.gamma, "reason": p.fail_reason}
            for p in result.points
            if p.feasible and p.status != STATUS_OK
        ],
    }


def write_sweep_outputs(
    outdir: Path,
    results: list[SweepResult],
    config: RunConfig,
    lossless: dict[str, LosslessComparison] | None = None,
) -> list[Path]:
    """Write per-pair sweep_<pair>.csv plus summary.json."""
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    summary = {
        "objective": config.objective.kind,
        "e_tot_wh": config.hess.e_tot_wh,
        "v_design_v": config.hess.v_design_v,
        "eta_dc": config.hess.eta_dc,
        "d_c_km": config.run_cycle.distance_km,
        "pairs": {},
    }
    for res in results:
        path = outdir / f"sweep_{res.pair_name}.csv"
        _write_csv(path, SWEEP_COLUMNS, sweep_rows(res))
        written.append(path)
        summary["pairs"][res.pair_name] = pair_summary(res)
        if lossless and res.pair_name in lossless:
            summary["pairs"][res.pair_name]["lossless_dcdc"] = (
                lossless[res.pair_name].density_points()
            )
    spath = outdir / "summary.json"
    _write_json(spath, summary)
    written.append(spath)
    return written


DENSITY_COLUMNS = [
    "pair", "gamma", "feasible", "energy_density_wh_kg", "power_density_w_kg",
    "is_optimum", "is_lossless_optimum", "is_reference",
]


def write_density(
    outdir: Path,
    results: list[SweepResult],
    config: RunConfig,
    lossless: dict[str, LosslessComparison] | None = None,
) -> Path:
    """Write density.csv: one row per (pair, split) plus single-cell rows."""
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for res in results:
        lossless_gamma = (
            lossless[res.pair_name].lossless.best.gamma
            if lossless and res.pair_name in lossless
            else None
        )
        for p in res.points:
            rows.append([
                res.pair_name,
                p.gamma,
                p.feasible,
                p.design.energy_density,
                p.design.power_density(),
                p.gamma == res.best.gamma,
                lossless_gamma is not None and p.gamma == lossless_gamma,
                False,
            ])
    # reference rows: each chemistry alone holding the full designed energy
    for chem in sorted(config.cells):
        cell = config.cells[chem]
        single = build_hess(
            1.0, config.hess.e_tot_wh, config.hess.v_design_v, cell, cell,
            config.hess.eta_dc, config.vehicle.p_em_max,
        )
        rows.append([
            chem,
            1.0,
            single.feasible,
            single.energy_density,
            single.power_density(),
            False,
            False,
            True,
        ])
    path = outdir / "density.csv"
    _write_csv(path, DENSITY_COLUMNS, rows)
    return path
