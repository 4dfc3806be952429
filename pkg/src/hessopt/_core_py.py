"""Pure-Python/NumPy simulation backend.

This is the reference implementation of the time loop; the compiled kernel
(_fastcore.pyx) mirrors it operation for operation. Per step it evaluates
both packs at the current state, intersects the converter-power bounds,
minimizes the Hamiltonian over that interval (coarse grid plus
golden-section refinement), then integrates charge, temperature and aging.

Conventions shared with the rest of the package: currents discharge
positive; the converter control u is the DC-DC power at the bus, positive
when the high-energy branch discharges; the high-energy battery terminal
power is u/eta when discharging and u*eta when charging.
"""

from __future__ import annotations

import math

import numpy as np

from ._system import OBJECTIVE_TCO, KernelSystem, PackArrays

BIG = 1e30
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0

STATUS_OK = 0
STATUS_INFEASIBLE = 1
STATUS_DEPLETED_HP = 2
STATUS_DEPLETED_HE = 3

_GOLDEN_MAX_ITER = 200


def _interp1(xbp: np.ndarray, ybp: np.ndarray, x: float) -> float:
    n = xbp.shape[0]
    if n == 1 or x <= xbp[0]:
        return float(ybp[0])
    if x >= xbp[n - 1]:
        return float(ybp[n - 1])
    i = int(np.searchsorted(xbp, x, side="right")) - 1
    t = (x - xbp[i]) / (xbp[i + 1] - xbp[i])
    return float(ybp[i] + t * (ybp[i + 1] - ybp[i]))


def _bilinear(xbp, ybp, z, x: float, y: float) -> float:
    nx = xbp.shape[0]
    ny = ybp.shape[0]
    x = min(max(x, float(xbp[0])), float(xbp[nx - 1]))
    y = min(max(y, float(ybp[0])), float(ybp[ny - 1]))
    if nx == 1:
        i, i1, tx = 0, 0, 0.0
    else:
        i = min(max(int(np.searchsorted(xbp, x, side="right")) - 1, 0), nx - 2)
        i1 = i + 1
        tx = (x - xbp[i]) / (xbp[i1] - xbp[i])
    if ny == 1:
        j, j1, ty = 0, 0, 0.0
    else:
        j = min(max(int(np.searchsorted(ybp, y, side="right")) - 1, 0), ny - 2)
        j1 = j + 1
        ty = (y - ybp[j]) / (ybp[j1] - ybp[j])
    return float(
        z[i, j] * (1.0 - tx) * (1.0 - ty)
        + z[i1, j] * tx * (1.0 - ty)
        + z[i, j1] * (1.0 - tx) * ty
        + z[i1, j1] * tx * ty
    )


def _ocv_cell(p: PackArrays, soc: float, temp: float) -> float:
    q_eff = _interp1(p.t_bp, p.q_eff, temp)
    it = (1.0 - soc) * q_eff
    return (
        _interp1(p.t_bp, p.v0, temp)
        + _interp1(p.t_bp, p.k, temp) * q_eff / (q_eff - it)
        + _interp1(p.t_bp, p.a, temp) * math.exp(-p.b_const * it)
    )


def _branch_current(voc: float, r: float, p_term: float) -> float:
    # physical root of voc*i - r*i^2 = p_term; the feasible-domain bounds
    # guarantee disc >= 0 up to rounding at the solvability boundary
    disc = voc * voc - 4.0 * p_term * r
    if disc < 0.0:
        disc = 0.0
    return (voc - math.sqrt(disc)) / (2.0 * r)


def simulate_arrays(sys: KernelSystem, p_em: np.ndarray, p_shaft: np.ndarray) -> dict:
    """Run the full cycle; returns traces, totals and a status code."""
    hp, he = sys.hp, sys.he
    n = p_em.shape[0]
    dt = sys.dt
    eta = sys.eta_dc
    wh = dt / 3600.0

    out = {
        name: np.zeros(n)
        for name in (
            "u", "v_dc", "i_hp", "i_he", "v_hp", "v_he", "soc_hp", "soc_he",
            "t_hp", "t_he", "p_loss_hp", "p_loss_he", "p_loss_dc",
        )
    }
    tot = dict.fromkeys(
        (
            "e_ec_hp", "e_ec_he", "e_t_hp", "e_t_he", "e_l_hp", "e_l_he",
            "e_l_dc", "e_s_em", "e_l_em", "delta_deg_hp", "delta_deg_he",
            "it_abs_hp", "it_abs_he", "q_deg_hp", "q_deg_he",
        ),
        0.0,
    )

    soc_hp = sys.soc0_hp if hp.present else 1.0
    soc_he = sys.soc0_he if he.present else 1.0
    t_hp = sys.t0
    t_he = sys.t0

    status = STATUS_OK
    err_step = -1
    err_lo = 0.0
    err_hi = 0.0

    for k in range(n):
        pk = float(p_em[k])

        # -- pack electrical state (quasi-static within the step)
        if hp.present:
            tl = sys.t_amb if sys.freeze_temperature else t_hp
            sl = min(max(soc_hp, sys.soc_floor), 1.0)
            voc_hp = hp.n_s * _ocv_cell(hp, sl, tl)
            r_c_hp = _bilinear(hp.r_soc_bp, hp.r_t_bp, hp.r_vals, sl, tl)
            r_hp = hp.r_scale * r_c_hp
        else:
            voc_hp = r_c_hp = r_hp = 0.0
        if he.present:
            tl = sys.t_amb if sys.freeze_temperature else t_he
            sl = min(max(soc_he, sys.soc_floor), 1.0)
            voc_he = he.n_s * _ocv_cell(he, sl, tl)
            r_c_he = _bilinear(he.r_soc_bp, he.r_t_bp, he.r_vals, sl, tl)
            r_he = he.r_scale * r_c_he
        else:
            voc_he = r_c_he = r_he = 0.0

        # -- per-branch power windows (absent pack: [0, 0]) and friction clip
        hp_lo = hp_hi = 0.0
        if hp.present:
            hp_lo = max(
                hp.i_min * (voc_hp - r_hp * hp.i_min),
                (voc_hp - hp.v_max) * hp.v_max / r_hp,
            )
            hp_hi = voc_hp * voc_hp / (4.0 * r_hp)
            if hp.i_max < voc_hp / (2.0 * r_hp):
                hp_hi = min(hp_hi, hp.i_max * (voc_hp - r_hp * hp.i_max))
            if hp.v_min >= 0.5 * voc_hp:
                hp_hi = min(hp_hi, (voc_hp - hp.v_min) * hp.v_min / r_hp)
        he_lo = he_hi = 0.0
        if he.present:
            he_lo = max(
                he.i_min * (voc_he - r_he * he.i_min) * eta,
                (voc_he - he.v_max) * he.v_max * eta / r_he,
            )
            he_hi = eta * voc_he * voc_he / (4.0 * r_he)
            if he.i_max < voc_he / (2.0 * r_he):
                he_hi = min(he_hi, he.i_max * (voc_he - r_he * he.i_max) / eta)
            if he.v_min >= 0.5 * voc_he:
                he_hi = min(he_hi, (voc_he - he.v_min) * he.v_min / (r_he * eta))

        pk = max(pk, hp_lo + he_lo)  # friction brakes absorb excess regen
        u_lo = max(he_lo, pk - hp_hi)
        u_hi = min(he_hi, pk - hp_lo)
        if u_lo > u_hi:
            status, err_step, err_lo, err_hi = STATUS_INFEASIBLE, k, u_lo, u_hi
            break
        if not he.present:
            ustar = 0.0
        elif not hp.present:
            ustar = pk
        elif u_hi - u_lo <= sys.u_tol:
            ustar = u_lo
        else:
            ustar = _optimal_u(sys, voc_hp, r_hp, voc_he, r_he, pk, u_lo, u_hi)

        # -- currents at the chosen control
        if hp.present:
            i_hp = _branch_current(voc_hp, r_hp, pk - ustar)
            disc = voc_hp * voc_hp - 4.0 * (pk - ustar) * r_hp
            v_dc = 0.5 * (voc_hp + math.sqrt(disc if disc > 0.0 else 0.0))
        else:
            i_hp = 0.0
            v_dc = 0.0
        if he.present:
            p_term_he = ustar / eta if ustar > 0.0 else ustar * eta
            i_he = _branch_current(voc_he, r_he, p_term_he)
        else:
            p_term_he = 0.0
            i_he = 0.0

        p_l_hp = r_hp * i_hp * i_hp
        p_l_he = r_he * i_he * i_he
        p_l_dc = p_term_he - ustar

        out["u"][k] = ustar
        out["v_dc"][k] = v_dc
        out["i_hp"][k] = i_hp
        out["i_he"][k] = i_he
        out["v_hp"][k] = voc_hp - r_hp * i_hp
        out["v_he"][k] = voc_he - r_he * i_he
        out["t_hp"][k] = t_hp
        out["t_he"][k] = t_he
        out["p_loss_hp"][k] = p_l_hp
        out["p_loss_he"][k] = p_l_he
        out["p_loss_dc"][k] = p_l_dc

        tot["e_ec_hp"] += voc_hp * i_hp * wh
        tot["e_ec_he"] += voc_he * i_he * wh
        tot["e_t_hp"] += (voc_hp - r_hp * i_hp) * i_hp * wh
        tot["e_t_he"] += (voc_he - r_he * i_he) * i_he * wh
        tot["e_l_hp"] += p_l_hp * wh
        tot["e_l_he"] += p_l_he * wh
        tot["e_l_dc"] += p_l_dc * wh
        tot["e_s_em"] += float(p_shaft[k]) * wh
        tot["e_l_em"] += (pk - float(p_shaft[k])) * wh

        # -- state integration (SoC decreases under discharge-positive current)
        if hp.present:
            soc_hp -= i_hp * dt / (3600.0 * hp.q_pack)
            if soc_hp < sys.soc_floor:
                status, err_step = STATUS_DEPLETED_HP, k
                out["soc_hp"][k] = soc_hp
                break
            i_c = i_hp / hp.n_p
            if not sys.freeze_temperature:
                t_hp = t_hp + dt * (
                    r_c_hp * i_c * i_c - hp.kappa * (t_hp - sys.t_amb)
                ) / (hp.m_c * hp.c_p)
            amps = abs(i_c)
            d_q = hp.a_cy * math.exp(amps * hp.b_cy) * (amps * dt / 3600.0)
            tot["it_abs_hp"] += amps * dt / 3600.0
            tot["q_deg_hp"] += d_q
            tot["delta_deg_hp"] += d_q / ((1.0 - hp.soh_eol) * hp.q_nom)
        if he.present:
            soc_he -= i_he * dt / (3600.0 * he.q_pack)
            if soc_he < sys.soc_floor:
                status, err_step = STATUS_DEPLETED_HE, k
                out["soc_he"][k] = soc_he
                break
            i_c = i_he / he.n_p
            if not sys.freeze_temperature:
                t_he = t_he + dt * (
                    r_c_he * i_c * i_c - he.kappa * (t_he - sys.t_amb)
                ) / (he.m_c * he.c_p)
            amps = abs(i_c)
            d_q = he.a_cy * math.exp(amps * he.b_cy) * (amps * dt / 3600.0)
            tot["it_abs_he"] += amps * dt / 3600.0
            tot["q_deg_he"] += d_q
            tot["delta_deg_he"] += d_q / ((1.0 - he.soh_eol) * he.q_nom)

        out["soc_hp"][k] = soc_hp
        out["soc_he"][k] = soc_he

    tot["delta_soc_hp"] = (sys.soc0_hp - soc_hp) if hp.present else 0.0
    tot["delta_soc_he"] = (sys.soc0_he - soc_he) if he.present else 0.0
    return {
        "status": status,
        "err_step": err_step,
        "err_u_lo": err_lo,
        "err_u_hi": err_hi,
        "trace": out,
        "totals": tot,
    }


def _stage_terms(sys, voc_hp, r_hp, voc_he, r_he, pk, u):
    """Scalar currents and Hamiltonian value at one control candidate."""
    hp, he = sys.hp, sys.he
    if hp.present:
        i_hp = _branch_current(voc_hp, r_hp, pk - u)
    else:
        i_hp = 0.0
    if he.present:
        p_term = u / sys.eta_dc if u > 0.0 else u * sys.eta_dc
        i_he = _branch_current(voc_he, r_he, p_term)
    else:
        i_he = 0.0
    p_ec = voc_hp * i_hp + voc_he * i_he
    if sys.objective == OBJECTIVE_TCO:
        cost = sys.j_q * p_ec / 3600.0
        if hp.present:
            a = abs(i_hp / hp.n_p)
            cost += sys.jb_hp * hp.a_cy * math.exp(a * hp.b_cy) * a / (
                3600.0 * (1.0 - hp.soh_eol) * hp.q_nom
            )
        if he.present:
            a = abs(i_he / he.n_p)
            cost += sys.jb_he * he.a_cy * math.exp(a * he.b_cy) * a / (
                3600.0 * (1.0 - he.soh_eol) * he.q_nom
            )
    else:
        cost = p_ec
    if sys.lambda1 != 0.0 and he.present:
        cost += sys.lambda1 * (-i_he / (3600.0 * he.q_pack))
    if sys.lambda2 != 0.0 and hp.present:
        cost += sys.lambda2 * (-i_hp / (3600.0 * hp.q_pack))
    return cost


def _h_grid(sys, voc_hp, r_hp, voc_he, r_he, pk, u):
    """Vectorized Hamiltonian over a grid of control candidates."""
    hp, he = sys.hp, sys.he
    disc_hp = np.maximum(voc_hp * voc_hp - 4.0 * (pk - u) * r_hp, 0.0)
    i_hp = (voc_hp - np.sqrt(disc_hp)) / (2.0 * r_hp)
    p_term = np.where(u > 0.0, u / sys.eta_dc, u * sys.eta_dc)
    disc_he = np.maximum(voc_he * voc_he - 4.0 * p_term * r_he, 0.0)
    i_he = (voc_he - np.sqrt(disc_he)) / (2.0 * r_he)
    p_ec = voc_hp * i_hp + voc_he * i_he
    if sys.objective == OBJECTIVE_TCO:
        a_hp = np.abs(i_hp / hp.n_p)
        a_he = np.abs(i_he / he.n_p)
        cost = (
            sys.j_q * p_ec / 3600.0
            + sys.jb_hp * hp.a_cy * np.exp(a_hp * hp.b_cy) * a_hp
            / (3600.0 * (1.0 - hp.soh_eol) * hp.q_nom)
            + sys.jb_he * he.a_cy * np.exp(a_he * he.b_cy) * a_he
            / (3600.0 * (1.0 - he.soh_eol) * he.q_nom)
        )
    else:
        cost = p_ec
    if sys.lambda1 != 0.0:
        cost = cost + sys.lambda1 * (-i_he / (3600.0 * he.q_pack))
    if sys.lambda2 != 0.0:
        cost = cost + sys.lambda2 * (-i_hp / (3600.0 * hp.q_pack))
    return cost


def _optimal_u(sys, voc_hp, r_hp, voc_he, r_he, pk, u_lo, u_hi):
    """Grid scan plus golden-section refinement; ties break to smaller u."""
    if u_hi - u_lo <= sys.u_tol:
        return u_lo
    n = sys.n_grid
    grid = u_lo + (u_hi - u_lo) * np.arange(n) / (n - 1)
    h = _h_grid(sys, voc_hp, r_hp, voc_he, r_he, pk, grid)
    best = int(np.argmin(h))  # first index on ties -> smallest u
    best_u = float(grid[best])
    best_h = float(h[best])

    a = float(grid[best - 1]) if best > 0 else u_lo
    b = float(grid[best + 1]) if best < n - 1 else u_hi
    span = b - a
    c = a + INVPHI2 * span
    d = a + INVPHI * span
    yc = _stage_terms(sys, voc_hp, r_hp, voc_he, r_he, pk, c)
    yd = _stage_terms(sys, voc_hp, r_hp, voc_he, r_he, pk, d)
    for _ in range(_GOLDEN_MAX_ITER):
        if b - a <= sys.u_tol:
            break
        if yc < yd:
            b, d, yd = d, c, yc
            span = b - a
            c = a + INVPHI2 * span
            yc = _stage_terms(sys, voc_hp, r_hp, voc_he, r_he, pk, c)
        else:
            a, c, yc = c, d, yd
            span = b - a
            d = a + INVPHI * span
            yd = _stage_terms(sys, voc_hp, r_hp, voc_he, r_he, pk, d)
    if yc < yd:
        cand_u, cand_h = c, yc
    else:
        cand_u, cand_h = d, yd
    if cand_h < best_h or (cand_h == best_h and cand_u < best_u):
        best_u, best_h = cand_u, cand_h
    # zero transfer preferred when feasible and not strictly worse
    if u_lo <= 0.0 <= u_hi:
        h0 = _stage_terms(sys, voc_hp, r_hp, voc_he, r_he, pk, 0.0)
        if h0 <= best_h:
            return 0.0
    return best_u
