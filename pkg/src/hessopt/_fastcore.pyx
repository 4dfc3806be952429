# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel.

Operation-for-operation mirror of hessopt._core_py (the pure-Python twin);
see that module for the semantics. Keep the two in sync: the backend
equivalence test compares full runs.
"""

from libc.math cimport exp, fabs, sqrt

import numpy as np

from ._system import OBJECTIVE_TCO

cdef double BIG = 1e30
cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef double INVPHI2 = (3.0 - sqrt(5.0)) / 2.0

STATUS_OK = 0
STATUS_INFEASIBLE = 1
STATUS_DEPLETED_HP = 2
STATUS_DEPLETED_HE = 3

cdef int _ST_OK = 0
cdef int _ST_INFEASIBLE = 1
cdef int _ST_DEPLETED_HP = 2
cdef int _ST_DEPLETED_HE = 3


cdef struct PackC:
    bint present
    int n_s
    int n_p
    double q_pack
    double r_scale
    double v_min
    double v_max
    double i_min
    double i_max
    double b_const
    double m_c
    double c_p
    double kappa
    double a_cy
    double b_cy
    double soh_eol
    double q_nom


cdef inline int _bracket(double[:] bp, int n, double x) nogil:
    # largest interval start i in [0, n-2] with bp[i] <= x
    cdef int i = 0
    while i < n - 2 and x >= bp[i + 1]:
        i += 1
    return i


cdef inline double _interp1(double[:] xbp, double[:] ybp, int n, double x) nogil:
    if n == 1 or x <= xbp[0]:
        return ybp[0]
    if x >= xbp[n - 1]:
        return ybp[n - 1]
    cdef int i = _bracket(xbp, n, x)
    cdef double t = (x - xbp[i]) / (xbp[i + 1] - xbp[i])
    return ybp[i] + t * (ybp[i + 1] - ybp[i])


cdef inline double _bilinear(double[:] xbp, int nx, double[:] ybp, int ny,
                             double[:, :] z, double x, double y) nogil:
    cdef int i, i1, j, j1
    cdef double tx, ty
    if x < xbp[0]:
        x = xbp[0]
    elif x > xbp[nx - 1]:
        x = xbp[nx - 1]
    if y < ybp[0]:
        y = ybp[0]
    elif y > ybp[ny - 1]:
        y = ybp[ny - 1]
    if nx == 1:
        i = 0
        i1 = 0
        tx = 0.0
    else:
        i = _bracket(xbp, nx, x)
        i1 = i + 1
        tx = (x - xbp[i]) / (xbp[i1] - xbp[i])
    if ny == 1:
        j = 0
        j1 = 0
        ty = 0.0
    else:
        j = _bracket(ybp, ny, y)
        j1 = j + 1
        ty = (y - ybp[j]) / (ybp[j1] - ybp[j])
    return (z[i, j] * (1.0 - tx) * (1.0 - ty)
            + z[i1, j] * tx * (1.0 - ty)
            + z[i, j1] * (1.0 - tx) * ty
            + z[i1, j1] * tx * ty)


cdef inline double _ocv_cell(double[:] tbp, double[:] v0, double[:] k,
                             double[:] a, double[:] qeff, int nt,
                             double b_const, double soc, double temp) nogil:
    cdef double q_eff = _interp1(tbp, qeff, nt, temp)
    cdef double it = (1.0 - soc) * q_eff
    return (_interp1(tbp, v0, nt, temp)
            + _interp1(tbp, k, nt, temp) * q_eff / (q_eff - it)
            + _interp1(tbp, a, nt, temp) * exp(-b_const * it))


cdef inline double _branch_current(double voc, double r, double p_term) nogil:
    cdef double disc = voc * voc - 4.0 * p_term * r
    if disc < 0.0:
        disc = 0.0
    return (voc - sqrt(disc)) / (2.0 * r)


cdef inline double _hval(PackC *hp, PackC *he, double voc_hp, double r_hp,
                         double voc_he, double r_he, double pk, double u,
                         double eta, int objective, double jb_hp, double jb_he,
                         double j_q, double lam1, double lam2) nogil:
    cdef double i_hp = 0.0
    cdef double i_he = 0.0
    cdef double p_term, p_ec, cost, a
    if hp.present:
        i_hp = _branch_current(voc_hp, r_hp, pk - u)
    if he.present:
        p_term = u / eta if u > 0.0 else u * eta
        i_he = _branch_current(voc_he, r_he, p_term)
    p_ec = voc_hp * i_hp + voc_he * i_he
    if objective == 1:
        cost = j_q * p_ec / 3600.0
        if hp.present:
            a = fabs(i_hp / hp.n_p)
            cost += jb_hp * hp.a_cy * exp(a * hp.b_cy) * a / (
                3600.0 * (1.0 - hp.soh_eol) * hp.q_nom)
        if he.present:
            a = fabs(i_he / he.n_p)
            cost += jb_he * he.a_cy * exp(a * he.b_cy) * a / (
                3600.0 * (1.0 - he.soh_eol) * he.q_nom)
    else:
        cost = p_ec
    if lam1 != 0.0 and he.present:
        cost += lam1 * (-i_he / (3600.0 * he.q_pack))
    if lam2 != 0.0 and hp.present:
        cost += lam2 * (-i_hp / (3600.0 * hp.q_pack))
    return cost


cdef PackC _pack_c(p):
    cdef PackC c
    c.present = 1 if p.present else 0
    c.n_s = p.n_s
    c.n_p = p.n_p
    c.q_pack = p.q_pack
    c.r_scale = p.r_scale
    c.v_min = p.v_min
    c.v_max = p.v_max
    c.i_min = p.i_min
    c.i_max = p.i_max
    c.b_const = p.b_const
    c.m_c = p.m_c
    c.c_p = p.c_p
    c.kappa = p.kappa
    c.a_cy = p.a_cy
    c.b_cy = p.b_cy
    c.soh_eol = p.soh_eol
    c.q_nom = p.q_nom
    return c


def simulate_arrays(sys, p_em_in, p_shaft_in):
    """Run the full cycle; same contract as hessopt._core_py.simulate_arrays."""
    cdef double[:] p_em = np.ascontiguousarray(p_em_in, dtype=np.float64)
    cdef double[:] p_shaft = np.ascontiguousarray(p_shaft_in, dtype=np.float64)
    cdef Py_ssize_t n = p_em.shape[0]

    cdef PackC hp = _pack_c(sys.hp)
    cdef PackC he = _pack_c(sys.he)

    cdef double[:] hp_tbp = sys.hp.t_bp
    cdef double[:] hp_v0 = sys.hp.v0
    cdef double[:] hp_k = sys.hp.k
    cdef double[:] hp_a = sys.hp.a
    cdef double[:] hp_qe = sys.hp.q_eff
    cdef double[:] hp_rs = sys.hp.r_soc_bp
    cdef double[:] hp_rt = sys.hp.r_t_bp
    cdef double[:, :] hp_rv = sys.hp.r_vals
    cdef int hp_nt = hp_tbp.shape[0]
    cdef int hp_nrs = hp_rs.shape[0]
    cdef int hp_nrt = hp_rt.shape[0]

    cdef double[:] he_tbp = sys.he.t_bp
    cdef double[:] he_v0 = sys.he.v0
    cdef double[:] he_k = sys.he.k
    cdef double[:] he_a = sys.he.a
    cdef double[:] he_qe = sys.he.q_eff
    cdef double[:] he_rs = sys.he.r_soc_bp
    cdef double[:] he_rt = sys.he.r_t_bp
    cdef double[:, :] he_rv = sys.he.r_vals
    cdef int he_nt = he_tbp.shape[0]
    cdef int he_nrs = he_rs.shape[0]
    cdef int he_nrt = he_rt.shape[0]

    cdef double eta = sys.eta_dc
    cdef double dt = sys.dt
    cdef double wh = dt / 3600.0
    cdef double t_amb = sys.t_amb
    cdef bint freeze = 1 if sys.freeze_temperature else 0
    cdef double soc_floor = sys.soc_floor
    cdef int n_grid = sys.n_grid
    cdef double u_tol = sys.u_tol
    cdef double lam1 = sys.lambda1
    cdef double lam2 = sys.lambda2
    cdef int objective = 1 if sys.objective == OBJECTIVE_TCO else 0
    cdef double jb_hp = sys.jb_hp
    cdef double jb_he = sys.jb_he
    cdef double j_q = sys.j_q

    trace = {
        name: np.zeros(n)
        for name in (
            "u", "v_dc", "i_hp", "i_he", "v_hp", "v_he", "soc_hp", "soc_he",
            "t_hp", "t_he", "p_loss_hp", "p_loss_he", "p_loss_dc",
        )
    }
    cdef double[:] o_u = trace["u"]
    cdef double[:] o_vdc = trace["v_dc"]
    cdef double[:] o_ihp = trace["i_hp"]
    cdef double[:] o_ihe = trace["i_he"]
    cdef double[:] o_vhp = trace["v_hp"]
    cdef double[:] o_vhe = trace["v_he"]
    cdef double[:] o_shp = trace["soc_hp"]
    cdef double[:] o_she = trace["soc_he"]
    cdef double[:] o_thp = trace["t_hp"]
    cdef double[:] o_the = trace["t_he"]
    cdef double[:] o_plhp = trace["p_loss_hp"]
    cdef double[:] o_plhe = trace["p_loss_he"]
    cdef double[:] o_pldc = trace["p_loss_dc"]

    cdef double soc_hp = sys.soc0_hp if hp.present else 1.0
    cdef double soc_he = sys.soc0_he if he.present else 1.0
    cdef double t_hp = sys.t0
    cdef double t_he = sys.t0

    cdef double e_ec_hp = 0.0, e_ec_he = 0.0, e_t_hp = 0.0, e_t_he = 0.0
    cdef double e_l_hp = 0.0, e_l_he = 0.0, e_l_dc = 0.0
    cdef double e_s_em = 0.0, e_l_em = 0.0
    cdef double it_abs_hp = 0.0, it_abs_he = 0.0
    cdef double q_deg_hp = 0.0, q_deg_he = 0.0
    cdef double ddeg_hp = 0.0, ddeg_he = 0.0

    cdef int status = _ST_OK
    cdef Py_ssize_t err_step = -1
    cdef double err_lo = 0.0, err_hi = 0.0

    cdef Py_ssize_t k
    cdef int i, best_i, it_count
    cdef double pk, tl, sl
    cdef double voc_hp, r_c_hp, r_hp, voc_he, r_c_he, r_he
    cdef double u_lo, u_hi, ustar, gu, gh, best_u, best_h
    cdef double hp_lo, hp_hi, he_lo, he_hi
    cdef double a, b, span, c, d, yc, yd, cand_u, cand_h
    cdef double i_hp_s, i_he_s, p_term_he, v_dc, p_l_hp, p_l_he, p_l_dc
    cdef double i_c, amps, d_q, disc

    with nogil:
        for k in range(n):
            pk = p_em[k]

            if hp.present:
                tl = t_amb if freeze else t_hp
                sl = soc_hp
                if sl < soc_floor:
                    sl = soc_floor
                elif sl > 1.0:
                    sl = 1.0
                voc_hp = hp.n_s * _ocv_cell(hp_tbp, hp_v0, hp_k, hp_a, hp_qe,
                                            hp_nt, hp.b_const, sl, tl)
                r_c_hp = _bilinear(hp_rs, hp_nrs, hp_rt, hp_nrt, hp_rv, sl, tl)
                r_hp = hp.r_scale * r_c_hp
            else:
                voc_hp = 0.0
                r_c_hp = 0.0
                r_hp = 0.0
            if he.present:
                tl = t_amb if freeze else t_he
                sl = soc_he
                if sl < soc_floor:
                    sl = soc_floor
                elif sl > 1.0:
                    sl = 1.0
                voc_he = he.n_s * _ocv_cell(he_tbp, he_v0, he_k, he_a, he_qe,
                                            he_nt, he.b_const, sl, tl)
                r_c_he = _bilinear(he_rs, he_nrs, he_rt, he_nrt, he_rv, sl, tl)
                r_he = he.r_scale * r_c_he
            else:
                voc_he = 0.0
                r_c_he = 0.0
                r_he = 0.0

            hp_lo = 0.0
            hp_hi = 0.0
            if hp.present:
                hp_lo = hp.i_min * (voc_hp - r_hp * hp.i_min)
                gu = (voc_hp - hp.v_max) * hp.v_max / r_hp
                if gu > hp_lo:
                    hp_lo = gu
                hp_hi = voc_hp * voc_hp / (4.0 * r_hp)
                if hp.i_max < voc_hp / (2.0 * r_hp):
                    gu = hp.i_max * (voc_hp - r_hp * hp.i_max)
                    if gu < hp_hi:
                        hp_hi = gu
                if hp.v_min >= 0.5 * voc_hp:
                    gu = (voc_hp - hp.v_min) * hp.v_min / r_hp
                    if gu < hp_hi:
                        hp_hi = gu
            he_lo = 0.0
            he_hi = 0.0
            if he.present:
                he_lo = he.i_min * (voc_he - r_he * he.i_min) * eta
                gu = (voc_he - he.v_max) * he.v_max * eta / r_he
                if gu > he_lo:
                    he_lo = gu
                he_hi = eta * voc_he * voc_he / (4.0 * r_he)
                if he.i_max < voc_he / (2.0 * r_he):
                    gu = he.i_max * (voc_he - r_he * he.i_max) / eta
                    if gu < he_hi:
                        he_hi = gu
                if he.v_min >= 0.5 * voc_he:
                    gu = (voc_he - he.v_min) * he.v_min / (r_he * eta)
                    if gu < he_hi:
                        he_hi = gu

            if hp_lo + he_lo > pk:
                pk = hp_lo + he_lo  # friction brakes absorb excess regen
            u_lo = he_lo
            gu = pk - hp_hi
            if gu > u_lo:
                u_lo = gu
            u_hi = he_hi
            gu = pk - hp_lo
            if gu < u_hi:
                u_hi = gu
            if u_lo > u_hi:
                status = _ST_INFEASIBLE
                err_step = k
                err_lo = u_lo
                err_hi = u_hi
                break
            if not he.present:
                ustar = 0.0
            elif not hp.present:
                ustar = pk
            else:
                if u_hi - u_lo <= u_tol:
                    ustar = u_lo
                else:
                    best_i = 0
                    best_u = u_lo
                    best_h = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he, pk,
                                   u_lo, eta, objective, jb_hp, jb_he, j_q,
                                   lam1, lam2)
                    for i in range(1, n_grid):
                        gu = u_lo + (u_hi - u_lo) * i / (n_grid - 1)
                        gh = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he, pk,
                                   gu, eta, objective, jb_hp, jb_he, j_q,
                                   lam1, lam2)
                        if gh < best_h:
                            best_h = gh
                            best_u = gu
                            best_i = i
                    if best_i > 0:
                        a = u_lo + (u_hi - u_lo) * (best_i - 1) / (n_grid - 1)
                    else:
                        a = u_lo
                    if best_i < n_grid - 1:
                        b = u_lo + (u_hi - u_lo) * (best_i + 1) / (n_grid - 1)
                    else:
                        b = u_hi
                    span = b - a
                    c = a + INVPHI2 * span
                    d = a + INVPHI * span
                    yc = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he, pk, c,
                               eta, objective, jb_hp, jb_he, j_q, lam1, lam2)
                    yd = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he, pk, d,
                               eta, objective, jb_hp, jb_he, j_q, lam1, lam2)
                    it_count = 0
                    while b - a > u_tol and it_count < 200:
                        if yc < yd:
                            b = d
                            d = c
                            yd = yc
                            span = b - a
                            c = a + INVPHI2 * span
                            yc = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he,
                                       pk, c, eta, objective, jb_hp, jb_he,
                                       j_q, lam1, lam2)
                        else:
                            a = c
                            c = d
                            yc = yd
                            span = b - a
                            d = a + INVPHI * span
                            yd = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he,
                                       pk, d, eta, objective, jb_hp, jb_he,
                                       j_q, lam1, lam2)
                        it_count += 1
                    if yc < yd:
                        cand_u = c
                        cand_h = yc
                    else:
                        cand_u = d
                        cand_h = yd
                    if cand_h < best_h or (cand_h == best_h and cand_u < best_u):
                        best_u = cand_u
                        best_h = cand_h
                    # zero transfer preferred when feasible and not strictly worse
                    if u_lo <= 0.0 <= u_hi:
                        gh = _hval(&hp, &he, voc_hp, r_hp, voc_he, r_he, pk,
                                   0.0, eta, objective, jb_hp, jb_he, j_q,
                                   lam1, lam2)
                        if gh <= best_h:
                            best_u = 0.0
                    ustar = best_u

            if hp.present:
                i_hp_s = _branch_current(voc_hp, r_hp, pk - ustar)
                disc = voc_hp * voc_hp - 4.0 * (pk - ustar) * r_hp
                if disc < 0.0:
                    disc = 0.0
                v_dc = 0.5 * (voc_hp + sqrt(disc))
            else:
                i_hp_s = 0.0
                v_dc = 0.0
            if he.present:
                p_term_he = ustar / eta if ustar > 0.0 else ustar * eta
                i_he_s = _branch_current(voc_he, r_he, p_term_he)
            else:
                p_term_he = 0.0
                i_he_s = 0.0

            p_l_hp = r_hp * i_hp_s * i_hp_s
            p_l_he = r_he * i_he_s * i_he_s
            p_l_dc = p_term_he - ustar

            o_u[k] = ustar
            o_vdc[k] = v_dc
            o_ihp[k] = i_hp_s
            o_ihe[k] = i_he_s
            o_vhp[k] = voc_hp - r_hp * i_hp_s
            o_vhe[k] = voc_he - r_he * i_he_s
            o_thp[k] = t_hp
            o_the[k] = t_he
            o_plhp[k] = p_l_hp
            o_plhe[k] = p_l_he
            o_pldc[k] = p_l_dc

            e_ec_hp += voc_hp * i_hp_s * wh
            e_ec_he += voc_he * i_he_s * wh
            e_t_hp += (voc_hp - r_hp * i_hp_s) * i_hp_s * wh
            e_t_he += (voc_he - r_he * i_he_s) * i_he_s * wh
            e_l_hp += p_l_hp * wh
            e_l_he += p_l_he * wh
            e_l_dc += p_l_dc * wh
            e_s_em += p_shaft[k] * wh
            e_l_em += (pk - p_shaft[k]) * wh

            if hp.present:
                soc_hp -= i_hp_s * dt / (3600.0 * hp.q_pack)
                if soc_hp < soc_floor:
                    status = _ST_DEPLETED_HP
                    err_step = k
                    o_shp[k] = soc_hp
                    break
                i_c = i_hp_s / hp.n_p
                if not freeze:
                    t_hp = t_hp + dt * (
                        r_c_hp * i_c * i_c - hp.kappa * (t_hp - t_amb)
                    ) / (hp.m_c * hp.c_p)
                amps = fabs(i_c)
                d_q = hp.a_cy * exp(amps * hp.b_cy) * (amps * dt / 3600.0)
                it_abs_hp += amps * dt / 3600.0
                q_deg_hp += d_q
                ddeg_hp += d_q / ((1.0 - hp.soh_eol) * hp.q_nom)
            if he.present:
                soc_he -= i_he_s * dt / (3600.0 * he.q_pack)
                if soc_he < soc_floor:
                    status = _ST_DEPLETED_HE
                    err_step = k
                    o_she[k] = soc_he
                    break
                i_c = i_he_s / he.n_p
                if not freeze:
                    t_he = t_he + dt * (
                        r_c_he * i_c * i_c - he.kappa * (t_he - t_amb)
                    ) / (he.m_c * he.c_p)
                amps = fabs(i_c)
                d_q = he.a_cy * exp(amps * he.b_cy) * (amps * dt / 3600.0)
                it_abs_he += amps * dt / 3600.0
                q_deg_he += d_q
                ddeg_he += d_q / ((1.0 - he.soh_eol) * he.q_nom)

            o_shp[k] = soc_hp
            o_she[k] = soc_he

    totals = {
        "e_ec_hp": e_ec_hp,
        "e_ec_he": e_ec_he,
        "e_t_hp": e_t_hp,
        "e_t_he": e_t_he,
        "e_l_hp": e_l_hp,
        "e_l_he": e_l_he,
        "e_l_dc": e_l_dc,
        "e_s_em": e_s_em,
        "e_l_em": e_l_em,
        "delta_deg_hp": ddeg_hp,
        "delta_deg_he": ddeg_he,
        "it_abs_hp": it_abs_hp,
        "it_abs_he": it_abs_he,
        "q_deg_hp": q_deg_hp,
        "q_deg_he": q_deg_he,
        "delta_soc_hp": (sys.soc0_hp - soc_hp) if hp.present else 0.0,
        "delta_soc_he": (sys.soc0_he - soc_he) if he.present else 0.0,
    }
    return {
        "status": status,
        "err_step": err_step,
        "err_u_lo": err_lo,
        "err_u_hi": err_hi,
        "trace": trace,
        "totals": totals,
    }
