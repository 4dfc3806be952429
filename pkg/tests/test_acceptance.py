"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete. Criterion 9 is advisory: it reports deviations from the published
reference magnitudes without failing, because those magnitudes depend on an
unpublished drive cycle and vehicle parameters.
"""

import dataclasses
import hashlib
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from conftest import sawtooth_cycle
from hessopt.aging import DegradationAccumulator, accumulate
from hessopt.cells import internal_resistance, load_chemistry, ocv
from hessopt.cli import main as cli_main
from hessopt.config import load_config
from hessopt.drivetrain import load_cycle, bundled_cycle_path
from hessopt.errors import InfeasibleStepError
from hessopt.pack import build_hess
from hessopt.powersplit import (
    ControlState,
    Costates,
    Objective,
    SimInit,
    SolverConfig,
    TcoParams,
    bus_voltage,
    feasible_domain,
    hamiltonian,
    optimal_u,
    simulate,
)
from hessopt.sizing import LosslessComparison, sweep
from hessopt.thermal import step_temperature

REFERENCE_MIN_JE_WH = 11_620.0   # published minimum-energy reference magnitude
E_TOT = 60_000.0
V_DESIGN = 400.0
ETA_DC = 0.98


def report(criterion: int, name: str, passed: bool, detail: str = ""):
    tag = "PASS" if passed else "FAIL"
    print(f"[{tag}] criterion {criterion}: {name}" + (f" ({detail})" if detail else ""))
    assert passed, f"criterion {criterion}: {name} {detail}"


@pytest.fixture(scope="module")
def cfg():
    return load_config()


@pytest.fixture(scope="module")
def gamma_grid(cfg):
    return cfg.sweep.gamma_grid


@pytest.fixture(scope="module")
def default_sweeps(cfg, gamma_grid):
    """Full default study: three pairs, 51 points, bundled cycle x3."""
    cyc = cfg.run_cycle
    out = {}
    for he_id, hp_id in cfg.sweep.pairs:
        res = sweep(
            cfg.cell(he_id), cfg.cell(hp_id), gamma_grid, E_TOT, V_DESIGN,
            ETA_DC, cyc, cfg.vehicle, threads=2,
        )
        out[res.pair_name] = res
    return out


@pytest.fixture(scope="module")
def lossless_sweeps(cfg, gamma_grid):
    cyc = cfg.run_cycle
    out = {}
    for hp_id in ("nmc", "lfp"):
        out[f"nca-{hp_id}"] = sweep(
            cfg.cell("nca"), cfg.cell(hp_id), gamma_grid, E_TOT, V_DESIGN,
            1.0, cyc, cfg.vehicle, threads=2,
        )
    return out


# -- criterion 1 -----------------------------------------------------------


def test_criterion_1_zero_costate_reduction(cfg):
    """optimal_u with zero co-states vs a 10001-point stage-cost grid."""
    rng = np.random.default_rng(42)
    nca, nmc = cfg.cell("nca"), cfg.cell("nmc")
    start = time.perf_counter()
    checked = 0
    worst_gap = 0.0
    while checked < 100:
        gamma = float(rng.uniform(0.2, 0.9))
        hess = build_hess(gamma, E_TOT, V_DESIGN, nmc, nca, ETA_DC, 235e3)
        state = ControlState(
            soc_he=float(rng.uniform(0.2, 1.0)), soc_hp=float(rng.uniform(0.2, 1.0))
        )
        p_em = float(rng.uniform(-60e3, 90e3))
        t_hp = float(rng.uniform(15.0, 40.0))
        t_he = float(rng.uniform(15.0, 40.0))
        try:
            dom = feasible_domain(hess, state, p_em, t_hp, t_he)
        except InfeasibleStepError:
            continue
        u_star = optimal_u(hess, state, p_em, Objective(), Costates(), SolverConfig(), t_hp, t_he)

        # independent brute force: vectorized electrochemical power over the
        # domain, built from the raw circuit formulas
        voc_hp = hess.hp.n_s * ocv(nmc, state.soc_hp, t_hp)
        r_hp = hess.hp.r_scale * internal_resistance(nmc, state.soc_hp, t_hp)
        voc_he = hess.he.n_s * ocv(nca, state.soc_he, t_he)
        r_he = hess.he.r_scale * internal_resistance(nca, state.soc_he, t_he)
        grid = np.linspace(dom.u_lo, dom.u_hi, 10_001)
        p_eff = dom.p_em_effective
        i_hp = (voc_hp - np.sqrt(np.maximum(voc_hp**2 - 4.0 * (p_eff - grid) * r_hp, 0.0))) / (2 * r_hp)
        p_term = np.where(grid > 0, grid / ETA_DC, grid * ETA_DC)
        i_he = (voc_he - np.sqrt(np.maximum(voc_he**2 - 4.0 * p_term * r_he, 0.0))) / (2 * r_he)
        cost = voc_hp * i_hp + voc_he * i_he
        k = int(np.argmin(cost))
        h_star = hamiltonian(hess, state, Costates(), u_star, p_eff, Objective(), t_hp, t_he)
        gap = (h_star - float(cost[k])) / (1.0 + abs(float(cost[k])))
        worst_gap = max(worst_gap, gap)
        res = (dom.u_hi - dom.u_lo) / 10_000
        assert abs(u_star - float(grid[k])) <= res + SolverConfig().u_tol_w
        checked += 1
    elapsed = time.perf_counter() - start
    report(
        1, "zero-co-state split matches brute force",
        worst_gap <= 1e-6 and elapsed < 10.0,
        f"worst rel gap {worst_gap:.2e}, {elapsed:.2f} s",
    )


# -- criterion 2 -----------------------------------------------------------


def test_criterion_2_energy_conservation(cfg, default_sweeps):
    worst = 0.0
    logs = [res.best.log for res in default_sweeps.values()]
    veh = dataclasses.replace(cfg.vehicle, p_em_max=20e3)
    hess = build_hess(0.5, 5000.0, 350.0, cfg.cell("nmc"), cfg.cell("nca"), ETA_DC, 20e3)
    logs.append(simulate(hess, sawtooth_cycle(400, v_peak=14.0), veh))
    logs.append(
        simulate(
            hess, sawtooth_cycle(400, v_peak=14.0), veh,
            objective=Objective(kind="tco", tco=TcoParams(j_q_per_wh=2.5e-4, d_l_km=2e5)),
        )
    )
    for log in logs:
        lhs = log.e_ec_hp + log.e_ec_he
        rhs = log.e_s_em + log.e_l_em + log.e_l_hp + log.e_l_he + log.e_l_dc
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    report(2, "electrochemical energy balances the loss breakdown",
           worst <= 1e-6, f"worst rel residual {worst:.2e}")


# -- criterion 3 -----------------------------------------------------------


def test_criterion_3_roundtrip_identities(cfg):
    rng = np.random.default_rng(3)
    worst_bus = 0.0
    worst_cur = 0.0
    nmc = cfg.cell("nmc")
    for _ in range(1000):
        v_oc = float(rng.uniform(200.0, 450.0))
        r = float(rng.uniform(0.01, 0.5))
        p_hp = float(rng.uniform(-0.5, 0.99)) * v_oc * v_oc / (4.0 * r)
        v_dc = bus_voltage(v_oc, r, p_hp, 0.0)
        worst_bus = max(worst_bus, abs((v_oc - v_dc) / r * v_dc - p_hp) / max(1.0, abs(p_hp)))

        soc = float(rng.uniform(0.1, 1.0))
        temp = float(rng.uniform(0.0, 45.0))
        voc_c = ocv(nmc, soc, temp)
        r_c = internal_resistance(nmc, soc, temp)
        p = float(rng.uniform(-0.5, 0.99)) * voc_c * voc_c / (4.0 * r_c)
        from hessopt.cells import current_from_power

        i = current_from_power(nmc, soc, p, temp)
        worst_cur = max(worst_cur, abs(voc_c * i - r_c * i * i - p) / max(1.0, abs(p)))
    report(3, "bus-voltage and power-map inversions round-trip",
           worst_bus <= 1e-9 and worst_cur <= 1e-9,
           f"bus {worst_bus:.2e}, current {worst_cur:.2e}")


# -- criterion 4 -----------------------------------------------------------


def _domain_oracle(hess, soc_hp, soc_he, t_hp, t_he, p_em):
    """Independent evaluation of the eight converter-power inequalities.

    Discharge limits beyond the branch apex cannot bind on the physical
    branch and are treated as vacuous, mirroring the printed constraints'
    meaning; the apex (solvability) power caps apply always.
    """
    eta = ETA_DC
    out_lo, out_hi = [], []
    for pack, state, temp, side in (
        (hess.hp, soc_hp, t_hp, "hp"), (hess.he, soc_he, t_he, "he"),
    ):
        if not pack.present:
            continue
        cell = pack.cell
        voc = pack.n_s * ocv(cell, state, temp)
        r = pack.r_scale * internal_resistance(cell, state, temp)
        i_max, i_min = pack.n_p * cell.i_c_max, pack.n_p * cell.i_c_min
        v_max, v_min = pack.n_s * cell.v_c_max, pack.n_s * cell.v_c_min
        lo = [i_min * (voc - r * i_min), (voc - v_max) * v_max / r]
        hi = [voc * voc / (4.0 * r)]
        if i_max < voc / (2.0 * r):
            hi.append(i_max * (voc - r * i_max))
        if v_min >= 0.5 * voc:
            hi.append((voc - v_min) * v_min / r)
        if side == "he":
            lo = [b * eta for b in lo]
            hi = [b / eta for b in hi[1:]] + [eta * hi[0]]
        out_lo.append((side, max(lo)))
        out_hi.append((side, min(hi)))
    return dict(out_lo), dict(out_hi)


def test_criterion_4_selected_control_respects_all_bounds(cfg):
    """Every selected u* satisfies the eight limit inequalities."""
    rng = np.random.default_rng(4)
    cyc1 = load_cycle(bundled_cycle_path())
    runs = [
        ("nmc", 0.2, cyc1), ("nmc", 0.36, cyc1), ("nmc", 0.6, cyc1),
        ("lfp", 0.3, cyc1), ("lto", 0.3, cyc1),
        ("nmc", 0.3, sawtooth_cycle(1500, v_peak=22.0)),
    ]
    total_steps = 0
    worst_slack = 0.0
    for hp_id, gamma, cyc in runs:
        hess = build_hess(gamma, E_TOT, V_DESIGN, cfg.cell(hp_id), cfg.cell("nca"), ETA_DC, 235e3)
        init = SimInit(
            soc0_hp=float(rng.uniform(0.7, 0.95)), soc0_he=float(rng.uniform(0.7, 0.95))
        )
        log = simulate(hess, cyc, cfg.vehicle, init=init)
        u = log.trace["u"]
        soc_hp = np.concatenate([[init.soc0_hp], log.trace["soc_hp"][:-1]])
        soc_he = np.concatenate([[init.soc0_he], log.trace["soc_he"][:-1]])
        p_em = log.extras["p_em"]
        for k in range(u.shape[0]):
            lows, highs = _domain_oracle(
                hess, float(soc_hp[k]), float(soc_he[k]),
                float(log.trace["t_hp"][k]), float(log.trace["t_he"][k]), float(p_em[k]),
            )
            hp_lo = lows.get("hp", 0.0)
            hp_hi = highs.get("hp", 0.0)
            he_lo = lows.get("he", 0.0)
            he_hi = highs.get("he", 0.0)
            p_eff = max(float(p_em[k]), hp_lo + he_lo)
            u_lo = max(he_lo, p_eff - hp_hi)
            u_hi = min(he_hi, p_eff - hp_lo)
            scale = max(1.0, abs(p_eff), abs(u_lo), abs(u_hi))
            slack = max(u_lo - u[k], u[k] - u_hi) / scale
            worst_slack = max(worst_slack, slack)
            total_steps += 1
    report(4, "selected controls satisfy all eight limit inequalities",
           total_steps >= 10_000 and worst_slack <= 1e-9,
           f"{total_steps} states, worst violation {worst_slack:.2e}")


# -- criterion 5 -----------------------------------------------------------


def test_criterion_5_thermal_analytics():
    m_c, c_p, kappa, t_amb = 0.045, 1000.0, 0.15, 25.0
    p_loss = 2.0
    tau = m_c * c_p / kappa
    t = t_amb
    for _ in range(int(10 * tau)):
        t = step_temperature(t, p_loss, 1.0, m_c, c_p, kappa, t_amb)
    t_ss = t_amb + p_loss / kappa
    steady_ok = abs(t - t_ss) / abs(t_ss - t_amb) <= 1e-3

    t = 25.0
    for _ in range(1000):
        t = step_temperature(t, p_loss, 1.0, m_c, c_p, 0.0, t_amb)
    adiabatic_ok = t - 25.0 == pytest.approx(p_loss * 1000.0 / (m_c * c_p), rel=1e-12)
    report(5, "steady state and adiabatic bookkeeping",
           steady_ok and adiabatic_ok,
           f"T_ss error {abs(t_ss - (t_amb + p_loss / kappa)):.1e}")


# -- criterion 6 -----------------------------------------------------------


def test_criterion_6_aging_closed_form_and_calibration():
    segments = [(3.0, 600.0), (-12.0, 300.0), (7.5, 1800.0), (-2.0, 60.0)]
    a_cy, b_cy, soh, q0 = 2e-5, 0.03, 0.8, 3.0
    acc = DegradationAccumulator()
    for i, dt in segments:
        acc = accumulate(acc, i, dt, a_cy, b_cy, soh, q0)
    closed = sum(a_cy * math.exp(abs(i) * b_cy) * abs(i) * dt / 3600.0 for i, dt in segments)
    closed_ok = abs(acc.q_deg - closed) <= 1e-12 * closed

    nca = load_chemistry("nca")
    acc = DegradationAccumulator()
    cycles = 0
    while acc.delta_deg < 1.0 and cycles < 800:
        acc = accumulate(acc, nca.q_nom, 3600.0, nca.a_cy, nca.b_cy, nca.soh_eol, nca.q_nom)
        acc = accumulate(acc, -nca.q_nom, 3600.0, nca.a_cy, nca.b_cy, nca.soh_eol, nca.q_nom)
        cycles += 1
    calib_ok = 360 <= cycles <= 440
    report(6, "aging closed form and rated-cycle-life calibration",
           closed_ok and calib_ok, f"NCA end of life at {cycles} cycles")


# -- criterion 7 -----------------------------------------------------------


def test_criterion_7_hybrid_optimum_and_sweep_runtime(cfg, default_sweeps, gamma_grid):
    res = default_sweeps["nca-nmc"]
    interior = res.gamma_min_feasible < res.best.gamma < 1.0

    cyc1 = load_cycle(bundled_cycle_path())  # single 1800 s pass at 1 Hz
    start = time.perf_counter()
    for he_id, hp_id in cfg.sweep.pairs:
        sweep(
            cfg.cell(he_id), cfg.cell(hp_id), gamma_grid, E_TOT, V_DESIGN,
            ETA_DC, cyc1, cfg.vehicle, threads=2,
        )
    elapsed = time.perf_counter() - start
    report(
        7, "hybrid optimum strictly interior; 3-pair 51-point sweep timing",
        interior and elapsed < 60.0,
        f"argmin {res.best.gamma:.2f} in ({res.gamma_min_feasible:.2f}, 1), "
        f"sweep {elapsed:.1f} s",
    )


# -- criterion 8 -----------------------------------------------------------


def test_criterion_8_lossless_converter_maximizes_energy_density(
    default_sweeps, lossless_sweeps
):
    ok = True
    details = []
    for pair in ("nca-nmc", "nca-lfp"):
        lossy = default_sweeps[pair]
        lossless = lossless_sweeps[pair]
        cmp = LosslessComparison(lossy=lossy, lossless=lossless)
        at_boundary = lossless.best.gamma == lossless.gamma_min_feasible
        strictly_above = lossy.best.gamma > lossy.gamma_min_feasible
        ok = ok and at_boundary and strictly_above
        pts = cmp.density_points()
        details.append(
            f"{pair}: lossless* {lossless.best.gamma:.2f} (min {lossless.gamma_min_feasible:.2f}), "
            f"lossy* {lossy.best.gamma:.2f}, densities "
            f"{pts['lossless']['energy_density_wh_kg']:.0f}/"
            f"{pts['lossy']['energy_density_wh_kg']:.0f} Wh/kg"
        )
    report(8, "ideal converter moves the optimum to the power boundary",
           ok, "; ".join(details))


# -- criterion 9 (advisory) -------------------------------------------------


def test_criterion_9_reference_magnitudes_reported(default_sweeps):
    j_star = {pair: res.best.j_value for pair, res in default_sweeps.items()}
    j_nmc = j_star["nca-nmc"]
    dev = (j_nmc - REFERENCE_MIN_JE_WH) / REFERENCE_MIN_JE_WH
    in_band = abs(dev) <= 0.20
    js = sorted(j_star.values())
    spread = (js[-1] - js[0]) / js[0]
    within_2pct = spread <= 0.02
    ordering = min(j_star, key=j_star.get) == "nca-nmc"
    print(
        f"[REPORT] criterion 9 (advisory): min J_E nca-nmc = {j_nmc / 1e3:.3f} kWh, "
        f"{dev:+.1%} vs reference 11.62 kWh "
        f"({'inside' if in_band else 'OUTSIDE'} +/-20% band); "
        f"optima spread {spread:.1%} ({'<=' if within_2pct else '>'} 2%); "
        f"best pair {'nca-nmc' if ordering else min(j_star, key=j_star.get)}"
    )
    for pair, res in sorted(default_sweeps.items()):
        print(
            f"[REPORT]   {pair}: J* = {res.best.j_value / 1e3:.3f} kWh at split "
            f"{res.best.gamma:.2f} ({res.best.design.hp.e_designed / 1e3:.1f}/"
            f"{res.best.design.he.e_designed / 1e3:.1f} kWh)"
        )
    assert j_nmc > 0  # advisory: deviations are reported, not failed


# -- criterion 10 ------------------------------------------------------------


def test_criterion_10_byte_identical_sweep_outputs(tmp_path, monkeypatch):
    cfg_text = (
        '[paths]\noutput_dir = "{out}"\n'
        "[simulation]\ncycle_repeat = 1\n"
        '[sweep]\ngamma_points = 51\npairs = [["nca", "nmc"], ["nca", "lfp"]]\n'
    )
    hashes = []
    for run, threads in (("a", "1"), ("b", "4"), ("c", "1")):
        out = tmp_path / run
        cfg_file = tmp_path / f"cfg_{run}.toml"
        cfg_file.write_text(cfg_text.format(out=out.as_posix()))
        monkeypatch.setenv("HESS_OPT_THREADS", threads)
        result = CliRunner().invoke(cli_main, ["sweep", "--config", str(cfg_file)])
        assert result.exit_code == 0, result.output
        digest = {
            p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.iterdir())
        }
        hashes.append(digest)
    report(10, "sweep outputs byte-identical across runs and thread counts",
           hashes[0] == hashes[1] == hashes[2],
           f"{len(hashes[0])} files compared")
