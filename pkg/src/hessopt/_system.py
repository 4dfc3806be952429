"""Flattened numeric view of a sized system for the simulation kernels.

Both the compiled kernel and the pure-Python twin consume plain float64
arrays and scalars; this module is the single place where pack designs and
run settings are lowered into that form, so the two backends cannot drift
apart on interpretation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cells import SOC_FLOOR, CellParams
from .pack import HessDesign, PackDesign, pack_limits

OBJECTIVE_ENERGY = 0
OBJECTIVE_TCO = 1


@dataclass(frozen=True, eq=False)
class PackArrays:
    """One pack's kernel-ready parameters (pack-level limits, cell tables)."""

    present: bool
    n_s: int
    n_p: int
    n_cells: int
    q_pack: float          # Ah
    r_scale: float         # n_s / n_p
    v_min: float           # V pack
    v_max: float           # V pack
    i_min: float           # A pack
    i_max: float           # A pack
    t_bp: np.ndarray       # temperature breakpoints
    v0: np.ndarray
    k: np.ndarray
    a: np.ndarray
    q_eff: np.ndarray
    b_const: float
    r_soc_bp: np.ndarray
    r_t_bp: np.ndarray
    r_vals: np.ndarray     # shape (soc, temp)
    m_c: float
    c_p: float
    kappa: float
    a_cy: float
    b_cy: float
    soh_eol: float
    q_nom: float


@dataclass(frozen=True, eq=False)
class KernelSystem:
    """Everything the per-step loop needs, with no object lookups inside."""

    hp: PackArrays
    he: PackArrays
    eta_dc: float
    dt: float
    t_amb: float
    freeze_temperature: bool
    soc_floor: float
    n_grid: int
    u_tol: float
    lambda1: float         # weights soc_he dynamics
    lambda2: float         # weights soc_hp dynamics
    objective: int         # OBJECTIVE_ENERGY or OBJECTIVE_TCO
    jb_hp: float           # currency, pack purchase cost
    jb_he: float
    j_q: float             # currency per Wh
    soc0_hp: float
    soc0_he: float
    t0: float


def _pack_arrays(design: PackDesign, kappa_override: float | None) -> PackArrays:
    cell: CellParams = design.cell
    lim = pack_limits(design)
    return PackArrays(
        present=design.present,
        n_s=design.n_s,
        n_p=design.n_p,
        n_cells=design.n_cells,
        q_pack=design.q_pack,
        r_scale=design.r_scale if design.present else 0.0,
        v_min=lim.v_min,
        v_max=lim.v_max,
        i_min=lim.i_min,
        i_max=lim.i_max,
        t_bp=np.ascontiguousarray(cell.v0_table.x),
        v0=np.ascontiguousarray(cell.v0_table.y),
        k=np.ascontiguousarray(cell.k_table.y),
        a=np.ascontiguousarray(cell.a_table.y),
        q_eff=np.ascontiguousarray(cell.q_eff_table.y),
        b_const=cell.b_const,
        r_soc_bp=np.ascontiguousarray(cell.r_table.x),
        r_t_bp=np.ascontiguousarray(cell.r_table.y),
        r_vals=np.ascontiguousarray(cell.r_table.z),
        m_c=cell.m_c,
        c_p=cell.c_p_c,
        kappa=cell.kappa_tot if kappa_override is None else kappa_override,
        a_cy=cell.a_cy,
        b_cy=cell.b_cy,
        soh_eol=cell.soh_eol,
        q_nom=cell.q_nom,
    )


def build_kernel_system(
    hess: HessDesign,
    *,
    dt: float,
    t_amb: float = 25.0,
    freeze_temperature: bool = False,
    kappa_override: float | None = None,
    soc_floor: float = SOC_FLOOR,
    n_grid: int = 200,
    u_tol: float = 0.1,
    lambda1: float = 0.0,
    lambda2: float = 0.0,
    objective: int = OBJECTIVE_ENERGY,
    j_q: float = 0.0,
    soc0_hp: float = 0.9,
    soc0_he: float = 0.9,
    t0: float | None = None,
) -> KernelSystem:
    """Lower a sized system plus run settings into kernel form.

    The cell temperature tables for V0/K/A/q_eff must share one breakpoint
    grid per cell (the bundled files do); this keeps the kernels simple.
    """
    for pack in (hess.hp, hess.he):
        tb = pack.cell.v0_table.x
        for t in (pack.cell.k_table, pack.cell.a_table, pack.cell.q_eff_table):
            if t.x.shape != tb.shape or not np.array_equal(t.x, tb):
                raise ValueError(
                    f"{pack.cell.chemistry_id}: v0/k/a/q_eff tables must share "
                    "one temperature grid"
                )
    return KernelSystem(
        hp=_pack_arrays(hess.hp, kappa_override),
        he=_pack_arrays(hess.he, kappa_override),
        eta_dc=hess.eta_dc,
        dt=dt,
        t_amb=t_amb,
        freeze_temperature=freeze_temperature,
        soc_floor=soc_floor,
        n_grid=int(n_grid),
        u_tol=u_tol,
        lambda1=lambda1,
        lambda2=lambda2,
        objective=objective,
        jb_hp=hess.hp.n_cells * hess.hp.cell.cost_per_cell,
        jb_he=hess.he.n_cells * hess.he.cell.cost_per_cell,
        j_q=j_q,
        soc0_hp=soc0_hp,
        soc0_he=soc0_he,
        t0=t_amb if (t0 is None or freeze_temperature) else t0,
    )
