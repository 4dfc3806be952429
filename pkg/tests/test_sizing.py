import dataclasses

import numpy as np
import pytest

from conftest import sawtooth_cycle
from hessopt.errors import NoFeasibleDesignError
from hessopt.pack import build_hess
from hessopt.powersplit import Objective, SimulationLog, TcoParams
from hessopt.sizing import (
    enumerate_chemistries,
    evaluate_tco,
    lossless_dcdc_experiment,
    sweep,
)

E_TOT = 5000.0
V_DESIGN = 350.0
P_EM_MAX = 20e3


@pytest.fixture(scope="module")
def small_vehicle(vehicle):
    return dataclasses.replace(vehicle, p_em_max=P_EM_MAX)


@pytest.fixture(scope="module")
def small_cycle():
    return sawtooth_cycle(300, v_peak=14.0)


def run_sweep(he, hp, cycle, veh, grid=None, eta=0.98, **kw):
    grid = grid if grid is not None else [i / 20 for i in range(21)]
    return sweep(he, hp, grid, E_TOT, V_DESIGN, eta, cycle, veh, **kw)


class TestSweep:
    def test_singleton_grid_power_sufficient(self, nca, nmc, small_vehicle, small_cycle):
        res = run_sweep(nca, nmc, small_cycle, small_vehicle, grid=[1.0])
        assert len(res.points) == 1
        assert res.best.gamma == 1.0
        assert res.gamma_min_feasible == 1.0

    def test_best_is_minimum_over_completed(self, nca, nmc, small_vehicle, small_cycle):
        res = run_sweep(nca, nmc, small_cycle, small_vehicle)
        completed = [p for p in res.points if p.completed]
        assert res.best.j_value == min(p.j_value for p in completed)
        assert all(res.best.j_value <= p.j_value for p in completed)

    def test_infeasible_points_flagged_not_dropped(self, nca, nmc, small_vehicle, small_cycle):
        res = run_sweep(nca, nmc, small_cycle, small_vehicle)
        gammas = [p.gamma for p in res.points]
        assert gammas == sorted(gammas)
        below = [p for p in res.points if p.gamma < res.gamma_min_feasible]
        assert all(not p.feasible for p in below)

    def test_no_feasible_design_raises(self, nca, nmc, small_vehicle, small_cycle):
        veh = dataclasses.replace(small_vehicle, p_em_max=1e9)
        with pytest.raises(NoFeasibleDesignError):
            sweep(nca, nmc, [0.0, 0.5, 1.0], E_TOT, V_DESIGN, 0.98, small_cycle, veh)

    def test_thread_count_does_not_change_results(self, nca, nmc, small_vehicle, small_cycle):
        a = run_sweep(nca, nmc, small_cycle, small_vehicle, threads=1)
        b = run_sweep(nca, nmc, small_cycle, small_vehicle, threads=4)
        assert [p.gamma for p in a.points] == [p.gamma for p in b.points]
        assert [p.status for p in a.points] == [p.status for p in b.points]
        for pa, pb in zip(a.points, b.points):
            if pa.completed:
                assert pa.j_value == pb.j_value
                assert np.array_equal(pa.log.trace["u"], pb.log.trace["u"])

    def test_unsorted_grid_rejected(self, nca, nmc, small_vehicle, small_cycle):
        with pytest.raises(ValueError):
            run_sweep(nca, nmc, small_cycle, small_vehicle, grid=[0.5, 0.2])


class TestEvaluateTco:
    @staticmethod
    def _log(delta_deg_hp=0.0, delta_deg_he=0.0, e_ec=0.0, d_c=23.0):
        return SimulationLog(
            dt=1.0, trace={}, e_ec_hp=e_ec, e_ec_he=0.0, e_t_hp=0.0, e_t_he=0.0,
            e_l_hp=0.0, e_l_he=0.0, e_l_dc=0.0, e_s_em=0.0, e_l_em=0.0,
            delta_soc_hp=0.0, delta_soc_he=0.0, delta_deg_hp=delta_deg_hp,
            delta_deg_he=delta_deg_he, it_abs_hp=0.0, it_abs_he=0.0,
            d_c_km=d_c, mass_total=1500.0, j_value=0.0,
        )

    def test_no_usage_is_purchase_only(self, nca, nmc):
        design = build_hess(0.5, E_TOT, V_DESIGN, nmc, nca, 0.98, P_EM_MAX)
        tco = TcoParams(j_q_per_wh=0.0, d_l_km=1e5)
        cost = evaluate_tco(self._log(), tco, design)
        jb = (design.hp.n_cells * nmc.cost_per_cell
              + design.he.n_cells * nca.cost_per_cell)
        assert cost == pytest.approx(jb, rel=1e-12)

    def test_one_cycle_lifetime_prices_energy_only(self, nca, nmc):
        import dataclasses as dc

        free_hp = dc.replace(nmc, cost_per_cell=0.0)
        free_he = dc.replace(nca, cost_per_cell=0.0)
        design = build_hess(0.5, E_TOT, V_DESIGN, free_hp, free_he, 0.98, P_EM_MAX)
        tco = TcoParams(j_q_per_wh=2.5e-4, d_l_km=23.0)
        cost = evaluate_tco(self._log(e_ec=10_000.0, d_c=23.0), tco, design)
        assert cost == pytest.approx(2.5e-4 * 10_000.0, rel=1e-12)

    def test_replacement_term_hand_value(self, nca, nmc):
        # hp term: J_b * (d_l * delta/d_c + 1) = 5000 * (10 + 1)
        import dataclasses as dc

        design = build_hess(0.5, E_TOT, V_DESIGN, nmc, nca, 0.98, P_EM_MAX)
        jb_hp = design.hp.n_cells * nmc.cost_per_cell
        scale = 5000.0 / jb_hp
        priced_hp = dc.replace(nmc, cost_per_cell=nmc.cost_per_cell * scale)
        free_he = dc.replace(nca, cost_per_cell=0.0)
        design = build_hess(0.5, E_TOT, V_DESIGN, priced_hp, free_he, 0.98, P_EM_MAX)
        tco = TcoParams(j_q_per_wh=0.0, d_l_km=230_000.0)
        cost = evaluate_tco(self._log(delta_deg_hp=0.001, d_c=23.0), tco, design)
        assert cost == pytest.approx(5000.0 * 11.0, rel=1e-9)

    def test_sweep_with_tco_objective_runs(self, nca, nmc, small_vehicle, small_cycle):
        obj = Objective(kind="tco", tco=TcoParams(j_q_per_wh=2.5e-4, d_l_km=2e5))
        res = run_sweep(nca, nmc, small_cycle, small_vehicle, grid=[0.4, 0.7, 1.0],
                        objective=obj)
        assert res.best.j_value > 0.0
        assert res.best.log.objective_kind == "tco"


class TestLosslessExperiment:
    def test_lossless_never_worse_pointwise(self, nca, nmc, small_vehicle, small_cycle):
        cmp = lossless_dcdc_experiment(
            nca, nmc, [i / 10 for i in range(11)], E_TOT, V_DESIGN, 0.98,
            small_cycle, small_vehicle,
        )
        lossy = {p.gamma: p for p in cmp.lossy.points if p.completed}
        lossless = {p.gamma: p for p in cmp.lossless.points if p.completed}
        common = set(lossy) & set(lossless)
        assert common
        for g in common:
            assert lossless[g].j_value <= lossy[g].j_value * (1.0 + 1e-9)

    def test_density_points_recorded_for_both_optima(self, nca, nmc, small_vehicle, small_cycle):
        cmp = lossless_dcdc_experiment(
            nca, nmc, [0.4, 0.7, 1.0], E_TOT, V_DESIGN, 0.98,
            small_cycle, small_vehicle,
        )
        pts = cmp.density_points()
        for tag in ("lossy", "lossless"):
            assert set(pts[tag]) == {"gamma", "energy_density_wh_kg", "power_density_w_kg"}
            assert pts[tag]["energy_density_wh_kg"] > 0


class TestEnumerateChemistries:
    def test_single_pair(self, nca, nmc, small_vehicle, small_cycle):
        out = enumerate_chemistries(
            nca, [nmc], [0.4, 0.7, 1.0], E_TOT, V_DESIGN, 0.98,
            small_cycle, small_vehicle,
        )
        assert len(out) == 1
        assert out[0].pair_name == "nca-nmc"

    def test_three_pairs_sorted_by_objective(self, nca, nmc, lfp, lto, small_vehicle, small_cycle):
        out = enumerate_chemistries(
            nca, [nmc, lfp, lto], [0.6, 0.8, 1.0], E_TOT, V_DESIGN, 0.98,
            small_cycle, small_vehicle,
        )
        assert len(out) == 3
        js = [r.best.j_value for r in out]
        assert js == sorted(js)
        assert all(r.gamma_min_feasible is not None for r in out)
