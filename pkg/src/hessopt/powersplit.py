"""Per-step optimal power split and full-cycle simulation.

The control variable u is the DC-DC converter power at the bus: the
high-power pack covers p_em - u directly, the high-energy pack feeds u
through the converter. Each step intersects eight voltage/current bounds
into a feasible interval for u, picks the u minimizing the Hamiltonian
(stage cost plus co-state-weighted state dynamics), then integrates charge,
temperature and aging. With zero co-states, the default, the minimization
reduces to the instantaneous stage cost.

The functions in this module are the readable scalar reference used by the
tests; :func:`simulate` delegates the time loop to the selected backend
kernel (compiled or pure Python) with identical semantics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _backend
from .aging import degradation_rate
from .cells import internal_resistance, ocv, solve_branch_current
from .drivetrain import DriveCycle, VehicleParams, power_trace
from .errors import HessOptError, InfeasibleStepError, SocDepletionError
from ._system import OBJECTIVE_ENERGY, OBJECTIVE_TCO, build_kernel_system
from .pack import HessDesign
from .thermal import check_stability

GOLDEN_RATIO_INV = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_RATIO_INV2 = (3.0 - math.sqrt(5.0)) / 2.0


class InfeasibleDesignError(HessOptError):
    """The sized system cannot cover the maximum motor power."""


@dataclass(frozen=True)
class ControlState:
    """Pack states of charge: soc_he is state 1, soc_hp state 2."""

    soc_he: float
    soc_hp: float


@dataclass(frozen=True)
class Costates:
    lambda1: float = 0.0   # weights the high-energy SoC dynamics
    lambda2: float = 0.0   # weights the high-power SoC dynamics


@dataclass(frozen=True)
class TcoParams:
    j_q_per_wh: float      # currency per electrochemical Wh
    d_l_km: float          # vehicle lifetime distance

    def __post_init__(self):
        if self.j_q_per_wh < 0 or self.d_l_km <= 0:
            raise ValueError("TCO parameters must be positive")


@dataclass(frozen=True)
class Objective:
    kind: str = "energy"          # "energy" or "tco"
    tco: TcoParams | None = None

    def __post_init__(self):
        if self.kind not in ("energy", "tco"):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.kind == "tco" and self.tco is None:
            raise ValueError("tco objective requires TcoParams")


@dataclass(frozen=True)
class SolverConfig:
    u_grid_points: int = 200
    u_tol_w: float = 0.1

    def __post_init__(self):
        if self.u_grid_points < 2:
            raise ValueError("u_grid_points must be >= 2")
        if self.u_tol_w <= 0:
            raise ValueError("u_tol_w must be positive")


@dataclass(frozen=True)
class SimInit:
    soc0_hp: float = 0.9
    soc0_he: float = 0.9
    t0: float | None = None       # defaults to ambient


@dataclass(frozen=True)
class ThermalSettings:
    t_amb: float = 25.0
    freeze_temperature: bool = False
    kappa_override: float | None = None


@dataclass(frozen=True, eq=False)
class SimulationLog:
    """Per-step traces plus cycle totals for one simulation run."""

    dt: float
    trace: dict                   # name -> np.ndarray, one value per step
    e_ec_hp: float                # Wh, all energies below likewise
    e_ec_he: float
    e_t_hp: float
    e_t_he: float
    e_l_hp: float
    e_l_he: float
    e_l_dc: float
    e_s_em: float
    e_l_em: float
    delta_soc_hp: float
    delta_soc_he: float
    delta_deg_hp: float
    delta_deg_he: float
    it_abs_hp: float              # Ah cell-level throughput
    it_abs_he: float
    d_c_km: float
    mass_total: float
    j_value: float
    objective_kind: str = "energy"
    extras: dict = field(default_factory=dict)

    @property
    def j_e(self) -> float:
        """Total electrochemical energy drawn from both chemistries [Wh]."""
        return self.e_ec_hp + self.e_ec_he


@dataclass(frozen=True)
class FeasibleDomain:
    """The converter-power interval and the individual bounds forming it.

    Upper bounds: he discharge current (ub_he_i), he minimum voltage
    (ub_he_v), hp charge current (ub_hp_i), hp maximum voltage (ub_hp_v).
    Lower bounds: he charge current (lb_he_i), he maximum voltage (lb_he_v),
    hp discharge current (lb_hp_i), hp minimum voltage (lb_hp_v). Discharge
    limits beyond the branch apex current V_oc/(2R) can never bind on the
    physical branch and are omitted; the solvability caps (the apex powers)
    bound those cases.

    ``p_em_effective`` is the bus demand after friction braking absorbs
    whatever regeneration exceeds the packs' combined charge acceptance; it
    equals the requested demand whenever that demand is absorbable.
    """

    u_lo: float
    u_hi: float
    p_em_effective: float
    bounds: dict

    def contains(self, u: float, slack: float = 0.0) -> bool:
        return self.u_lo - slack <= u <= self.u_hi + slack


def _pack_electrical_state(hess: HessDesign, state: ControlState, t_hp: float, t_he: float):
    """Pack-level OCV and resistance at the current state (0 when absent)."""
    if hess.hp.present:
        voc_hp = hess.hp.n_s * ocv(hess.hp.cell, state.soc_hp, t_hp)
        r_hp = hess.hp.r_scale * internal_resistance(hess.hp.cell, state.soc_hp, t_hp)
    else:
        voc_hp = r_hp = 0.0
    if hess.he.present:
        voc_he = hess.he.n_s * ocv(hess.he.cell, state.soc_he, t_he)
        r_he = hess.he.r_scale * internal_resistance(hess.he.cell, state.soc_he, t_he)
    else:
        voc_he = r_he = 0.0
    return voc_hp, r_hp, voc_he, r_he


def feasible_domain(
    hess: HessDesign,
    state: ControlState,
    p_em: float,
    t_hp: float = 25.0,
    t_he: float = 25.0,
    step: int = -1,
) -> FeasibleDomain:
    """Intersect the eight pack-limit bounds on the converter power.

    Terminal voltages inside the current-limit bounds are evaluated at the
    limiting current itself, which makes each bound exactly equivalent to
    the corresponding current constraint on the physical branch. Bounds are
    assembled per branch as a power window [lo, hi]; an absent pack has the
    degenerate window [0, 0], so single-pack systems need no special case.

    Braking demand below the combined charge acceptance is clipped upward
    (friction brakes absorb the remainder); traction demand above the
    combined deliverable power raises :class:`InfeasibleStepError`.
    """
    voc_hp, r_hp, voc_he, r_he = _pack_electrical_state(hess, state, t_hp, t_he)
    eta = hess.eta_dc
    bounds: dict = {}

    hp_lo = hp_hi = 0.0
    if hess.hp.present:
        lim = hess.hp
        i_max = lim.n_p * lim.cell.i_c_max
        i_min = lim.n_p * lim.cell.i_c_min
        v_max = lim.n_s * lim.cell.v_c_max
        v_min = lim.n_s * lim.cell.v_c_min
        bounds["hp_charge_i"] = i_min * (voc_hp - r_hp * i_min)
        bounds["hp_charge_v"] = (voc_hp - v_max) * v_max / r_hp
        hp_lo = max(bounds["hp_charge_i"], bounds["hp_charge_v"])
        hp_hi = voc_hp * voc_hp / (4.0 * r_hp)
        bounds["hp_solv"] = hp_hi
        if i_max < voc_hp / (2.0 * r_hp):
            bounds["hp_discharge_i"] = i_max * (voc_hp - r_hp * i_max)
            hp_hi = min(hp_hi, bounds["hp_discharge_i"])
        if v_min >= 0.5 * voc_hp:
            bounds["hp_discharge_v"] = (voc_hp - v_min) * v_min / r_hp
            hp_hi = min(hp_hi, bounds["hp_discharge_v"])

    he_lo = he_hi = 0.0
    if hess.he.present:
        lim = hess.he
        i_max = lim.n_p * lim.cell.i_c_max
        i_min = lim.n_p * lim.cell.i_c_min
        v_max = lim.n_s * lim.cell.v_c_max
        v_min = lim.n_s * lim.cell.v_c_min
        bounds["he_charge_i"] = i_min * (voc_he - r_he * i_min) * eta
        bounds["he_charge_v"] = (voc_he - v_max) * v_max * eta / r_he
        he_lo = max(bounds["he_charge_i"], bounds["he_charge_v"])
        he_hi = eta * voc_he * voc_he / (4.0 * r_he)
        bounds["he_solv"] = he_hi
        if i_max < voc_he / (2.0 * r_he):
            bounds["he_discharge_i"] = i_max * (voc_he - r_he * i_max) / eta
            he_hi = min(he_hi, bounds["he_discharge_i"])
        if v_min >= 0.5 * voc_he:
            bounds["he_discharge_v"] = (voc_he - v_min) * v_min / (r_he * eta)
            he_hi = min(he_hi, bounds["he_discharge_v"])

    p_eff = max(p_em, hp_lo + he_lo)
    u_lo = max(he_lo, p_eff - hp_hi)
    u_hi = min(he_hi, p_eff - hp_lo)
    if u_lo > u_hi:
        raise InfeasibleStepError(step, u_lo, u_hi, p_em)
    return FeasibleDomain(u_lo=u_lo, u_hi=u_hi, p_em_effective=p_eff, bounds=bounds)


def bus_voltage(v_oc_hp: float, r_hp: float, p_em: float, p_dc: float) -> float:
    """DC bus voltage set by the high-power branch at a given split [V]."""
    disc = v_oc_hp * v_oc_hp - 4.0 * (p_em - p_dc) * r_hp
    if disc < 0.0:
        raise InfeasibleStepError(-1, p_dc, p_dc, p_em)
    return 0.5 * (v_oc_hp + math.sqrt(disc))


def branch_currents(
    hess: HessDesign,
    state: ControlState,
    u: float,
    p_em: float,
    t_hp: float = 25.0,
    t_he: float = 25.0,
) -> tuple[float, float]:
    """Pack currents (i_he, i_hp) [A] for a converter power u.

    The high-energy battery terminal power is u/eta while discharging
    (u > 0) and u*eta while charging, so the converter always dissipates.
    """
    voc_hp, r_hp, voc_he, r_he = _pack_electrical_state(hess, state, t_hp, t_he)
    i_hp = 0.0
    i_he = 0.0
    if hess.hp.present:
        i_hp = solve_branch_current(voc_hp, r_hp, p_em - u)
    if hess.he.present:
        p_term = u / hess.eta_dc if u > 0.0 else u * hess.eta_dc
        i_he = solve_branch_current(voc_he, r_he, p_term)
    return i_he, i_hp


def stage_cost(
    hess: HessDesign,
    state: ControlState,
    u: float,
    p_em: float,
    objective: Objective,
    t_hp: float = 25.0,
    t_he: float = 25.0,
) -> float:
    """Instantaneous cost rate at a control candidate.

    Energy objective: the summed electrochemical powers V_oc*I of both
    packs [W]. TCO objective: degradation cost rate plus energy cost rate
    [currency/s].
    """
    voc_hp, r_hp, voc_he, r_he = _pack_electrical_state(hess, state, t_hp, t_he)
    i_he, i_hp = branch_currents(hess, state, u, p_em, t_hp, t_he)
    p_ec = voc_hp * i_hp + voc_he * i_he
    if objective.kind == "energy":
        return p_ec
    cost = objective.tco.j_q_per_wh * p_ec / 3600.0
    if hess.hp.present:
        cell = hess.hp.cell
        cost += (hess.hp.n_cells * cell.cost_per_cell) * degradation_rate(
            cell.a_cy, cell.b_cy, i_hp / hess.hp.n_p, cell.soh_eol, cell.q_nom
        )
    if hess.he.present:
        cell = hess.he.cell
        cost += (hess.he.n_cells * cell.cost_per_cell) * degradation_rate(
            cell.a_cy, cell.b_cy, i_he / hess.he.n_p, cell.soh_eol, cell.q_nom
        )
    return cost


def hamiltonian(
    hess: HessDesign,
    state: ControlState,
    costates: Costates,
    u: float,
    p_em: float,
    objective: Objective,
    t_hp: float = 25.0,
    t_he: float = 25.0,
) -> float:
    """Stage cost plus co-state-weighted SoC dynamics.

    SoC decreases under discharge-positive current, so the dynamics terms
    are -I/(3600*Q_pack) per second. With zero co-states this equals the
    stage cost for every u.
    """
    value = stage_cost(hess, state, u, p_em, objective, t_hp, t_he)
    if costates.lambda1 != 0.0 or costates.lambda2 != 0.0:
        i_he, i_hp = branch_currents(hess, state, u, p_em, t_hp, t_he)
        if hess.he.present:
            value += costates.lambda1 * (-i_he / (3600.0 * hess.he.q_pack))
        if hess.hp.present:
            value += costates.lambda2 * (-i_hp / (3600.0 * hess.hp.q_pack))
    return value


def optimal_u(
    hess: HessDesign,
    state: ControlState,
    p_em: float,
    objective: Objective,
    costates: Costates = Costates(),
    solver: SolverConfig = SolverConfig(),
    t_hp: float = 25.0,
    t_he: float = 25.0,
) -> float:
    """Minimize the Hamiltonian over the feasible domain.

    Coarse uniform grid to bracket the minimum, golden-section refinement
    inside the best bracket; deterministic tie-break to the smallest u.
    """
    dom = feasible_domain(hess, state, p_em, t_hp, t_he)
    u_lo, u_hi = dom.u_lo, dom.u_hi
    p_eff = dom.p_em_effective
    if u_hi - u_lo <= solver.u_tol_w:
        return u_lo

    def h(u: float) -> float:
        return hamiltonian(hess, state, costates, u, p_eff, objective, t_hp, t_he)

    n = solver.u_grid_points
    best_u, best_h = u_lo, h(u_lo)
    for i in range(1, n):
        u = u_lo + (u_hi - u_lo) * i / (n - 1)
        hu = h(u)
        if hu < best_h:
            best_u, best_h = u, hu
    step = (u_hi - u_lo) / (n - 1)
    a = max(u_lo, best_u - step)
    b = min(u_hi, best_u + step)
    span = b - a
    c = a + GOLDEN_RATIO_INV2 * span
    d = a + GOLDEN_RATIO_INV * span
    yc, yd = h(c), h(d)
    while b - a > solver.u_tol_w:
        if yc < yd:
            b, d, yd = d, c, yc
            span = b - a
            c = a + GOLDEN_RATIO_INV2 * span
            yc = h(c)
        else:
            a, c, yc = c, d, yd
            span = b - a
            d = a + GOLDEN_RATIO_INV * span
            yd = h(d)
    cand_u, cand_h = (c, yc) if yc < yd else (d, yd)
    if cand_h < best_h or (cand_h == best_h and cand_u < best_u):
        best_u, best_h = cand_u, cand_h
    # zero transfer is preferred whenever it is feasible and not strictly
    # worse: it avoids phantom micro-flows through the converter
    if u_lo <= 0.0 <= u_hi and h(0.0) <= best_h:
        return 0.0
    return best_u


def tco_objective_value(
    jb_hp: float,
    jb_he: float,
    j_q_per_wh: float,
    d_l_km: float,
    d_c_km: float,
    delta_deg_hp: float,
    delta_deg_he: float,
    e_ec_total_wh: float,
) -> float:
    """Ownership cost: purchases plus replacements plus lifetime energy."""
    return (
        jb_hp * (d_l_km * delta_deg_hp / d_c_km + 1.0)
        + jb_he * (d_l_km * delta_deg_he / d_c_km + 1.0)
        + j_q_per_wh * e_ec_total_wh / d_c_km * d_l_km
    )


def simulate(
    hess: HessDesign,
    cycle: DriveCycle,
    vehicle: VehicleParams,
    objective: Objective = Objective(),
    costates: Costates = Costates(),
    init: SimInit = SimInit(),
    solver: SolverConfig = SolverConfig(),
    thermal: ThermalSettings = ThermalSettings(),
) -> SimulationLog:
    """Simulate one sized system over a drive cycle.

    Recomputes the motor power trace at this design's vehicle mass, then
    runs the backend time loop. No terminal SoC constraint is applied.
    Raises :class:`InfeasibleDesignError`, :class:`InfeasibleStepError` or
    :class:`SocDepletionError` when the run cannot complete.
    """
    if not hess.feasible:
        raise InfeasibleDesignError(
            f"design at split {hess.gamma:.3f} cannot cover "
            f"p_em_max = {hess.p_em_max:.0f} W"
        )
    for pack in (hess.hp, hess.he):
        if pack.present:
            kappa = (
                pack.cell.kappa_tot
                if thermal.kappa_override is None
                else thermal.kappa_override
            )
            check_stability(cycle.dt, pack.cell.m_c, pack.cell.c_p_c, kappa)

    mass_total = vehicle.m_base + hess.mass
    trace = power_trace(cycle, vehicle, mass_total)
    sys = build_kernel_system(
        hess,
        dt=cycle.dt,
        t_amb=thermal.t_amb,
        freeze_temperature=thermal.freeze_temperature,
        kappa_override=thermal.kappa_override,
        n_grid=solver.u_grid_points,
        u_tol=solver.u_tol_w,
        lambda1=costates.lambda1,
        lambda2=costates.lambda2,
        objective=OBJECTIVE_TCO if objective.kind == "tco" else OBJECTIVE_ENERGY,
        j_q=objective.tco.j_q_per_wh if objective.kind == "tco" else 0.0,
        soc0_hp=init.soc0_hp,
        soc0_he=init.soc0_he,
        t0=init.t0,
    )
    res = _backend.simulate_arrays(sys, trace.p_em, trace.p_shaft)
    status = res["status"]
    if status == 1:
        raise InfeasibleStepError(
            res["err_step"], res["err_u_lo"], res["err_u_hi"],
            float(trace.p_em[res["err_step"]]),
        )
    if status == 2:
        raise SocDepletionError(
            res["err_step"], "hp", float(res["trace"]["soc_hp"][res["err_step"]]),
            sys.soc_floor,
        )
    if status == 3:
        raise SocDepletionError(
            res["err_step"], "he", float(res["trace"]["soc_he"][res["err_step"]]),
            sys.soc_floor,
        )

    tot = res["totals"]
    d_c = cycle.distance_km
    if objective.kind == "tco":
        j_value = tco_objective_value(
            sys.jb_hp, sys.jb_he, objective.tco.j_q_per_wh, objective.tco.d_l_km,
            d_c, tot["delta_deg_hp"], tot["delta_deg_he"],
            tot["e_ec_hp"] + tot["e_ec_he"],
        )
    else:
        j_value = tot["e_ec_hp"] + tot["e_ec_he"]

    return SimulationLog(
        dt=cycle.dt,
        trace=res["trace"],
        e_ec_hp=tot["e_ec_hp"],
        e_ec_he=tot["e_ec_he"],
        e_t_hp=tot["e_t_hp"],
        e_t_he=tot["e_t_he"],
        e_l_hp=tot["e_l_hp"],
        e_l_he=tot["e_l_he"],
        e_l_dc=tot["e_l_dc"],
        e_s_em=tot["e_s_em"],
        e_l_em=tot["e_l_em"],
        delta_soc_hp=tot["delta_soc_hp"],
        delta_soc_he=tot["delta_soc_he"],
        delta_deg_hp=tot["delta_deg_hp"],
        delta_deg_he=tot["delta_deg_he"],
        it_abs_hp=tot["it_abs_hp"],
        it_abs_he=tot["it_abs_he"],
        d_c_km=d_c,
        mass_total=mass_total,
        j_value=j_value,
        objective_kind=objective.kind,
        extras={
            "backend": _backend.backend_name,
            "gamma": hess.gamma,
            "p_em": trace.p_em,
            "p_shaft": trace.p_shaft,
        },
    )
