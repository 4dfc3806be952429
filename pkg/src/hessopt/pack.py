"""Pack scaling and two-pack system sizing.

Cell models scale linearly to packs: series count from the design voltage,
parallel count from the designed pack energy, voltage limits times the
series count, current limits times the parallel count, and resistance by
the series/parallel ratio. The capacity-split fraction assigns a share of
the total designed energy to the high-power pack and the remainder to the
high-energy pack; cell-count ceilings mean the built packs never undersize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cells import CellParams, internal_resistance, ocv


@dataclass(frozen=True)
class PackLimits:
    v_max: float   # V
    v_min: float   # V
    i_max: float   # A
    i_min: float   # A
    p_max: float   # W deliverable at full charge


@dataclass(frozen=True, eq=False)
class PackDesign:
    """One sized pack: a cell type replicated n_s in series, n_p in parallel."""

    cell: CellParams
    n_s: int
    n_p: int
    e_designed: float      # Wh requested before quantization

    def __post_init__(self):
        if self.n_s < 1:
            raise ValueError("n_s must be >= 1")
        if self.n_p < 0:
            raise ValueError("n_p must be >= 0")

    @property
    def present(self) -> bool:
        """Degenerate zero-energy packs (n_p = 0) carry no current."""
        return self.n_p > 0

    @property
    def n_cells(self) -> int:
        return self.n_s * self.n_p

    @property
    def mass(self) -> float:
        """kg of cells (no enclosure mass)."""
        return self.n_cells * self.cell.m_c

    @property
    def q_pack(self) -> float:
        """Ah at pack level."""
        return self.n_p * self.cell.q_nom

    @property
    def e_actual(self) -> float:
        """Wh actually built: n_s * n_p * v_c_nom * q_nom."""
        return self.n_cells * self.cell.v_c_nom * self.cell.q_nom

    @property
    def r_scale(self) -> float:
        """Pack resistance per cell resistance, n_s / n_p."""
        return self.n_s / self.n_p if self.n_p else math.inf


@dataclass(frozen=True, eq=False)
class HessDesign:
    """A sized two-pack system for one capacity split."""

    gamma: float           # fraction of e_tot assigned to the high-power pack
    e_tot: float           # Wh design constant
    v_design: float        # V
    hp: PackDesign
    he: PackDesign
    eta_dc: float
    p_em_max: float        # W, maximum motor power the system must cover
    feasible: bool

    @property
    def mass(self) -> float:
        return self.hp.mass + self.he.mass

    @property
    def e_actual(self) -> float:
        return self.hp.e_actual + self.he.e_actual

    @property
    def energy_density(self) -> float:
        """Wh/kg of the built system (packaging factor 1.0)."""
        return self.e_actual / self.mass

    def power_density(self, t_ref: float = 25.0) -> float:
        """W/kg deliverable at the bus at full charge."""
        p_sys = (
            pack_limits(self.hp, t_ref).p_max
            + self.eta_dc * pack_limits(self.he, t_ref).p_max
        )
        return p_sys / self.mass


def split_capacity(gamma: float, e_tot: float) -> tuple[float, float]:
    """Designed energies (e_hp, e_he) in Wh; they sum to e_tot exactly."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    if e_tot <= 0.0:
        raise ValueError("e_tot must be positive")
    e_hp = gamma * e_tot
    return e_hp, e_tot - e_hp


def series_count(v_design: float, v_c_max: float) -> int:
    """Cells in series so the full-charge string reaches the design voltage."""
    return math.ceil(v_design / v_c_max)


def parallel_count(e_target: float, n_s: int, v_c_nom: float, q_c: float) -> int:
    """Strings in parallel to hold e_target Wh; 0 for an empty pack."""
    if e_target == 0.0:
        return 0
    return math.ceil(e_target / (n_s * v_c_nom * q_c))


def pack_limits(pack: PackDesign, t_ref: float = 25.0) -> PackLimits:
    """Voltage/current limits scaled to pack level plus deliverable power.

    The power rating is a design-time value evaluated at full charge and the
    reference temperature: the resistance-limited power at the minimum
    voltage, capped by the current-limited power at that same voltage.
    """
    cell = pack.cell
    if not pack.present:
        return PackLimits(
            v_max=pack.n_s * cell.v_c_max,
            v_min=pack.n_s * cell.v_c_min,
            i_max=0.0,
            i_min=0.0,
            p_max=0.0,
        )
    v_oc_full = pack.n_s * ocv(cell, 1.0, t_ref)
    v_min = pack.n_s * cell.v_c_min
    r_pack = pack.r_scale * internal_resistance(cell, 1.0, t_ref)
    p_resistance = (v_oc_full - v_min) / r_pack * v_min
    p_current = pack.n_p * cell.i_c_max * v_min
    return PackLimits(
        v_max=pack.n_s * cell.v_c_max,
        v_min=v_min,
        i_max=pack.n_p * cell.i_c_max,
        i_min=pack.n_p * cell.i_c_min,
        p_max=min(p_resistance, p_current),
    )


def build_hess(
    gamma: float,
    e_tot: float,
    v_design: float,
    hp_cell: CellParams,
    he_cell: CellParams,
    eta_dc: float,
    p_em_max: float,
    t_ref: float = 25.0,
) -> HessDesign:
    """Size both packs for one split and check the system power constraint.

    Infeasible designs are returned flagged, not rejected; capacity sweeps
    need them to locate the feasibility boundary.
    """
    e_hp, e_he = split_capacity(gamma, e_tot)
    n_s_hp = series_count(v_design, hp_cell.v_c_max)
    n_s_he = series_count(v_design, he_cell.v_c_max)
    hp = PackDesign(
        cell=hp_cell,
        n_s=n_s_hp,
        n_p=parallel_count(e_hp, n_s_hp, hp_cell.v_c_nom, hp_cell.q_nom),
        e_designed=e_hp,
    )
    he = PackDesign(
        cell=he_cell,
        n_s=n_s_he,
        n_p=parallel_count(e_he, n_s_he, he_cell.v_c_nom, he_cell.q_nom),
        e_designed=e_he,
    )
    p_deliverable = pack_limits(hp, t_ref).p_max + eta_dc * pack_limits(he, t_ref).p_max
    return HessDesign(
        gamma=gamma,
        e_tot=e_tot,
        v_design=v_design,
        hp=hp,
        he=he,
        eta_dc=eta_dc,
        p_em_max=p_em_max,
        feasible=p_em_max <= p_deliverable,
    )
