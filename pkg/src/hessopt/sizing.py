"""Outer optimization layers: capacity-split sweep and chemistry enumeration.

The split fraction grid is searched exhaustively: every point is sized,
design-infeasible points are kept (flagged) so the power-constraint
boundary can be drawn, and every design-feasible point is simulated. Runs
that abort (a pack depletes, or a step has no feasible converter power)
stay in the result with their failure reason; the optimum is taken over
completed runs only, with ties broken toward the smaller split fraction.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Sequence

from . import _backend
from .cells import CellParams
from .drivetrain import DriveCycle, VehicleParams
from .errors import HessOptError, NoFeasibleDesignError
from .pack import HessDesign, build_hess
from .powersplit import (
    Costates,
    Objective,
    SimInit,
    SimulationLog,
    SolverConfig,
    TcoParams,
    ThermalSettings,
    simulate,
    tco_objective_value,
)

STATUS_OK = "ok"
STATUS_INFEASIBLE_DESIGN = "infeasible_design"
STATUS_SIM_FAILED = "sim_failed"


@dataclass(frozen=True, eq=False)
class GammaPoint:
    """One evaluated point of the capacity-split grid."""

    gamma: float
    design: HessDesign
    status: str
    fail_reason: str | None
    log: SimulationLog | None
    j_value: float | None

    @property
    def feasible(self) -> bool:
        """Design-level power-constraint feasibility."""
        return self.design.feasible

    @property
    def completed(self) -> bool:
        return self.status == STATUS_OK


@dataclass(frozen=True, eq=False)
class SweepResult:
    """All grid points for one chemistry pair plus the selected optimum."""

    he_id: str
    hp_id: str
    eta_dc: float
    points: tuple
    gamma_min_feasible: float
    best: GammaPoint

    @property
    def pair_name(self) -> str:
        return f"{self.he_id}-{self.hp_id}"

    @property
    def gamma_grid(self) -> list[float]:
        return [p.gamma for p in self.points]


def evaluate_tco(log: SimulationLog, tco: TcoParams, design: HessDesign) -> float:
    """Ownership cost of one simulated cycle extrapolated to vehicle life.

    Pack purchase costs are cost_per_cell times the cell count; replacement
    counts scale the per-cycle normalized degradation by lifetime distance
    over cycle distance.
    """
    jb_hp = design.hp.n_cells * design.hp.cell.cost_per_cell
    jb_he = design.he.n_cells * design.he.cell.cost_per_cell
    return tco_objective_value(
        jb_hp, jb_he, tco.j_q_per_wh, tco.d_l_km, log.d_c_km,
        log.delta_deg_hp, log.delta_deg_he, log.e_ec_hp + log.e_ec_he,
    )


def _evaluate_point(
    gamma: float,
    e_tot: float,
    v_design: float,
    hp_cell: CellParams,
    he_cell: CellParams,
    eta_dc: float,
    cycle: DriveCycle,
    vehicle: VehicleParams,
    objective: Objective,
    costates: Costates,
    init: SimInit,
    solver: SolverConfig,
    thermal: ThermalSettings,
) -> GammaPoint:
    design = build_hess(
        gamma, e_tot, v_design, hp_cell, he_cell, eta_dc, vehicle.p_em_max,
        t_ref=thermal.t_amb,
    )
    if not design.feasible:
        return GammaPoint(gamma, design, STATUS_INFEASIBLE_DESIGN, None, None, None)
    try:
        log = simulate(
            design, cycle, vehicle, objective, costates, init, solver, thermal
        )
    except HessOptError as exc:
        return GammaPoint(
            gamma, design, STATUS_SIM_FAILED, f"{type(exc).__name__}: {exc}", None, None
        )
    return GammaPoint(gamma, design, STATUS_OK, None, log, log.j_value)


def sweep(
    he_cell: CellParams,
    hp_cell: CellParams,
    gamma_grid: Sequence[float],
    e_tot: float,
    v_design: float,
    eta_dc: float,
    cycle: DriveCycle,
    vehicle: VehicleParams,
    objective: Objective = Objective(),
    costates: Costates = Costates(),
    init: SimInit = SimInit(),
    solver: SolverConfig = SolverConfig(),
    thermal: ThermalSettings = ThermalSettings(),
    threads: int = 1,
) -> SweepResult:
    """Exhaustively evaluate one chemistry pair over the split grid.

    Grid points are independent jobs over immutable shared inputs; results
    are assembled in grid order regardless of completion order, so the
    output is identical for any worker count. With the compiled kernel the
    jobs run in threads (the kernel releases the GIL); the pure-Python
    backend gets worker processes instead.
    """
    grid = list(gamma_grid)
    if not grid or sorted(grid) != grid or grid[0] < 0.0 or grid[-1] > 1.0:
        raise ValueError("gamma_grid must be sorted within [0, 1]")

    job = partial(
        _evaluate_point,
        e_tot=e_tot, v_design=v_design, hp_cell=hp_cell, he_cell=he_cell,
        eta_dc=eta_dc, cycle=cycle, vehicle=vehicle, objective=objective,
        costates=costates, init=init, solver=solver, thermal=thermal,
    )
    if threads > 1:
        pool_cls = (
            ThreadPoolExecutor if _backend.backend_name == "compiled"
            else ProcessPoolExecutor
        )
        with pool_cls(max_workers=threads) as pool:
            points = tuple(pool.map(job, grid))
    else:
        points = tuple(job(g) for g in grid)

    feasible = [p for p in points if p.feasible]
    if not feasible:
        raise NoFeasibleDesignError(
            f"{he_cell.chemistry_id}-{hp_cell.chemistry_id}: no split on the grid "
            f"satisfies the {vehicle.p_em_max:.0f} W power constraint"
        )
    completed = [p for p in points if p.completed]
    if not completed:
        raise NoFeasibleDesignError(
            f"{he_cell.chemistry_id}-{hp_cell.chemistry_id}: every feasible design "
            "failed in simulation"
        )
    best = min(completed, key=lambda p: (p.j_value, p.gamma))
    return SweepResult(
        he_id=he_cell.chemistry_id,
        hp_id=hp_cell.chemistry_id,
        eta_dc=eta_dc,
        points=points,
        gamma_min_feasible=feasible[0].gamma,
        best=best,
    )


def enumerate_chemistries(
    he_cell: CellParams,
    hp_cells: Sequence[CellParams],
    gamma_grid: Sequence[float],
    e_tot: float,
    v_design: float,
    eta_dc: float,
    cycle: DriveCycle,
    vehicle: VehicleParams,
    **kwargs,
) -> list[SweepResult]:
    """Sweep every high-power chemistry against one high-energy chemistry.

    Results come back ordered by their optimum objective value.
    """
    results = [
        sweep(
            he_cell, hp_cell, gamma_grid, e_tot, v_design, eta_dc, cycle,
            vehicle, **kwargs,
        )
        for hp_cell in hp_cells
    ]
    results.sort(key=lambda r: r.best.j_value)
    return results


@dataclass(frozen=True, eq=False)
class LosslessComparison:
    """A pair swept with the configured converter efficiency and with 1.0."""

    lossy: SweepResult
    lossless: SweepResult

    def density_points(self) -> dict:
        """(energy density, power density) of both optima, for plotting."""
        out = {}
        for tag, res in (("lossy", self.lossy), ("lossless", self.lossless)):
            d = res.best.design
            out[tag] = {
                "gamma": res.best.gamma,
                "energy_density_wh_kg": d.energy_density,
                "power_density_w_kg": d.power_density(),
            }
        return out


def lossless_dcdc_experiment(
    he_cell: CellParams,
    hp_cell: CellParams,
    gamma_grid: Sequence[float],
    e_tot: float,
    v_design: float,
    eta_dc: float,
    cycle: DriveCycle,
    vehicle: VehicleParams,
    **kwargs,
) -> LosslessComparison:
    """Quantify how converter loss shifts the optimal capacity split."""
    lossy = sweep(
        he_cell, hp_cell, gamma_grid, e_tot, v_design, eta_dc, cycle, vehicle,
        **kwargs,
    )
    lossless = sweep(
        he_cell, hp_cell, gamma_grid, e_tot, v_design, 1.0, cycle, vehicle,
        **kwargs,
    )
    return LosslessComparison(lossy=lossy, lossless=lossless)
