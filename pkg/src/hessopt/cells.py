"""Single-cell equivalent-circuit model (OCV source in series with a resistance).

The open-circuit voltage follows a datasheet-style exponential model driven
by discharged capacity, with all coefficients except the exponential-zone
constant given as temperature tables. The terminal behavior is the plain
Rint circuit: ``V = V_oc(SoC, T) - R(SoC, T) * I`` with discharge-positive
current everywhere in this package.

Discharged capacity maps to state of charge as ``it = (1 - soc) * q_eff(T)``,
so ``soc = 1`` is a full cell. Because the model has a pole at full
depletion, SoC lookups are clamped to ``[SOC_FLOOR, 1]``; callers that
disable clamping get a domain error instead.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import OcvDomainError, ParameterFileError, PowerExceedsCapabilityError
from .tables import Table1D, Table2D

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

# Lookups below this state of charge are clamped; the datasheet OCV model is
# not valid near full depletion.
SOC_FLOOR = 0.01

KNOWN_CHEMISTRIES = ("nca", "nmc", "lfp", "lto")


@dataclass(frozen=True, eq=False)
class CellParams:
    """Full electro-thermal-aging parameter set for one cell chemistry.

    Units: volts, amps, amp-hours, ohms, kilograms, J/(kg K), W/K; aging
    constants ``a_cy`` [1/Ah -> Ah fade per Ah throughput] and ``b_cy`` [1/A];
    density metadata in Wh/kg and W/kg. Currents are discharge-positive,
    so ``i_c_min <= 0`` is the charge limit.
    """

    chemistry_id: str
    v0_table: Table1D        # V_0(T) [V]
    k_table: Table1D         # polarization coefficient K(T) [V]
    a_table: Table1D         # exponential-zone amplitude A(T) [V]
    b_const: float           # exponential-zone constant B [1/Ah], temperature-independent
    q_eff_table: Table1D     # effective capacity of the OCV model [Ah]
    r_table: Table2D         # R_c(SoC, T) [ohm]
    q_nom: float             # nominal capacity [Ah]
    v_c_max: float
    v_c_nom: float
    v_c_min: float
    i_c_max: float
    i_c_min: float
    m_c: float               # cell mass [kg]
    c_p_c: float             # specific heat [J/(kg K)]
    kappa_tot: float         # heat transfer to coolant [W/K]
    a_cy: float
    b_cy: float
    soh_eol: float
    cost_per_cell: float
    energy_density: float    # [Wh/kg], metadata
    power_density: float     # [W/kg], metadata

    def __post_init__(self):
        if not (self.v_c_min < self.v_c_nom < self.v_c_max):
            raise ParameterFileError(
                f"{self.chemistry_id}: voltage limits must satisfy min < nom < max"
            )
        if not (self.i_c_min <= 0.0 < self.i_c_max):
            raise ParameterFileError(
                f"{self.chemistry_id}: current limits must satisfy i_c_min <= 0 < i_c_max"
            )
        if self.q_nom <= 0 or self.m_c <= 0 or self.c_p_c <= 0:
            raise ParameterFileError(
                f"{self.chemistry_id}: q_nom, m_c and c_p_c must be positive"
            )
        if self.kappa_tot < 0:
            raise ParameterFileError(f"{self.chemistry_id}: kappa_tot must be >= 0")
        if not (0.0 < self.soh_eol < 1.0):
            raise ParameterFileError(f"{self.chemistry_id}: soh_eol must be in (0, 1)")
        if (self.r_table.z <= 0.0).any():
            raise ParameterFileError(f"{self.chemistry_id}: resistances must be positive")
        if (self.q_eff_table.y <= 0.0).any():
            raise ParameterFileError(f"{self.chemistry_id}: q_eff must be positive")


def clamp_soc(soc: float) -> float:
    """Clamp a state of charge into the model validity window [SOC_FLOOR, 1]."""
    return min(max(soc, SOC_FLOOR), 1.0)


def ocv(params: CellParams, soc: float, temp: float, clamp: bool = True) -> float:
    """Open-circuit voltage [V] at a state of charge and temperature [degC].

    Evaluates ``V_0(T) + K(T) * q_eff / (q_eff - it) + A(T) * exp(-B * it)``
    with ``it = (1 - soc) * q_eff(T)``. With ``clamp`` (the default) the SoC
    is first limited to ``[SOC_FLOOR, 1]``; otherwise reaching the pole at
    full depletion raises :class:`OcvDomainError`.
    """
    if clamp:
        soc = clamp_soc(soc)
    q_eff = params.q_eff_table(temp)
    it = (1.0 - soc) * q_eff
    denom = q_eff - it
    if denom <= 0.0:
        raise OcvDomainError(
            f"{params.chemistry_id}: OCV pole at soc={soc:.4f} (it={it:.4f} Ah)"
        )
    return (
        params.v0_table(temp)
        + params.k_table(temp) * q_eff / denom
        + params.a_table(temp) * math.exp(-params.b_const * it)
    )


def internal_resistance(params: CellParams, soc: float, temp: float) -> float:
    """Internal resistance [ohm] from the bilinear (SoC, T) table."""
    return params.r_table(clamp_soc(soc), temp)


def terminal_voltage(params: CellParams, soc: float, current: float, temp: float) -> float:
    """Terminal voltage [V] under load; exceeds the OCV when charging."""
    return ocv(params, soc, temp) - internal_resistance(params, soc, temp) * current


def max_deliverable_power(v_oc: float, r: float) -> float:
    """Peak of the terminal power V_oc*I - R*I^2, reached at I = V_oc/(2R)."""
    return v_oc * v_oc / (4.0 * r)


def current_from_power(params: CellParams, soc: float, power: float, temp: float) -> float:
    """Invert the terminal power map to a discharge-positive current [A].

    Solves ``V_oc * I - R * I^2 = power`` and returns the physical branch
    (the root continuous through I = 0 at zero power). Demands above the
    theoretical maximum ``V_oc^2 / (4R)`` raise
    :class:`PowerExceedsCapabilityError` carrying that maximum.
    """
    v_oc = ocv(params, soc, temp)
    r = internal_resistance(params, soc, temp)
    return solve_branch_current(v_oc, r, power)


def solve_branch_current(v_oc: float, r: float, power: float) -> float:
    """Physical root of ``v_oc * i - r * i**2 = power`` for a known circuit."""
    disc = v_oc * v_oc - 4.0 * power * r
    if disc < 0.0:
        raise PowerExceedsCapabilityError(power, max_deliverable_power(v_oc, r))
    return (v_oc - math.sqrt(disc)) / (2.0 * r)


def cell_loss_power(params: CellParams, soc: float, current: float, temp: float) -> float:
    """Ohmic loss R*I^2 [W]; even in the sign of the current."""
    return internal_resistance(params, soc, temp) * current * current


# ---------------------------------------------------------------------------
# Parameter files


def _load_table_1d(doc: dict, key: str, chem: str) -> Table1D:
    try:
        rows = doc[key]
        bp = [row["breakpoint"] for row in rows]
        vals = [row["value"] for row in rows]
    except (KeyError, TypeError) as exc:
        raise ParameterFileError(f"{chem}: bad or missing table '{key}': {exc}") from exc
    return Table1D(bp, vals, name=f"{chem}.{key}")


def _load_r_table(doc: dict, chem: str) -> Table2D:
    try:
        spec = doc["r_table"]
        return Table2D(
            spec["soc_breakpoints"],
            spec["temp_breakpoints"],
            spec["values"],
            name=f"{chem}.r_table",
        )
    except (KeyError, TypeError) as exc:
        raise ParameterFileError(f"{chem}: bad or missing 'r_table': {exc}") from exc


_SCALAR_KEYS = (
    "b_const", "q_nom", "v_c_max", "v_c_nom", "v_c_min", "i_c_max", "i_c_min",
    "m_c", "c_p_c", "kappa_tot", "a_cy", "b_cy", "soh_eol", "cost_per_cell",
    "energy_density", "power_density",
)


def load_cell_file(path: str | Path) -> CellParams:
    """Load one chemistry's parameter document (TOML)."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ParameterFileError(f"cell parameter file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ParameterFileError(f"{path}: {exc}") from exc

    chem = str(doc.get("chemistry_id", path.stem)).lower()
    scalars = {}
    for key in _SCALAR_KEYS:
        if key not in doc:
            raise ParameterFileError(f"{path}: missing key '{key}'")
        scalars[key] = float(doc[key])

    return CellParams(
        chemistry_id=chem,
        v0_table=_load_table_1d(doc, "v0_table", chem),
        k_table=_load_table_1d(doc, "k_table", chem),
        a_table=_load_table_1d(doc, "a_table", chem),
        q_eff_table=_load_table_1d(doc, "q_eff_table", chem),
        r_table=_load_r_table(doc, chem),
        **scalars,
    )


def bundled_cell_path(chemistry_id: str) -> Path:
    """Path to one of the bundled default chemistry files."""
    chem = chemistry_id.lower()
    path = Path(__file__).parent / "data" / f"{chem}.toml"
    if not path.exists():
        raise ParameterFileError(
            f"no bundled parameters for chemistry '{chemistry_id}' "
            f"(bundled: {', '.join(KNOWN_CHEMISTRIES)})"
        )
    return path


def load_chemistry(chemistry_id: str, cells_dir: str | Path | None = None) -> CellParams:
    """Load a chemistry by id from a directory, falling back to bundled data."""
    if cells_dir is not None:
        candidate = Path(cells_dir) / f"{chemistry_id.lower()}.toml"
        if candidate.exists():
            return load_cell_file(candidate)
    return load_cell_file(bundled_cell_path(chemistry_id))
