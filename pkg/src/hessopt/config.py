"""Run configuration: one TOML document describing a complete study.

Every section has defaults matching the bundled data, so an empty document
is a valid configuration. File paths are resolved relative to the config
file's directory.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .cells import CellParams, load_chemistry
from .drivetrain import DriveCycle, VehicleParams, bundled_cycle_path, load_cycle
from .errors import ConfigError
from .powersplit import (
    Costates,
    Objective,
    SimInit,
    SolverConfig,
    TcoParams,
    ThermalSettings,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_PAIRS = (("nca", "nmc"), ("nca", "lfp"), ("nca", "lto"))


@dataclass(frozen=True)
class HessSettings:
    e_tot_wh: float = 60_000.0
    v_design_v: float = 400.0
    eta_dc: float = 0.98

    def __post_init__(self):
        if self.e_tot_wh <= 0 or self.v_design_v <= 0:
            raise ConfigError("e_tot_wh and v_design_v must be positive")
        if not (0.0 < self.eta_dc <= 1.0):
            raise ConfigError("eta_dc must be in (0, 1]")


@dataclass(frozen=True)
class SweepSettings:
    gamma_points: int = 51
    pairs: tuple = DEFAULT_PAIRS
    lossless_dcdc: bool = False

    def __post_init__(self):
        if self.gamma_points < 2:
            raise ConfigError("gamma_points must be >= 2")
        if not self.pairs:
            raise ConfigError("at least one chemistry pair is required")

    @property
    def gamma_grid(self) -> list[float]:
        n = self.gamma_points
        return [i / (n - 1) for i in range(n)]


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated configuration plus loaded inputs."""

    vehicle: VehicleParams
    hess: HessSettings
    thermal: ThermalSettings
    objective: Objective
    costates: Costates
    solver: SolverConfig
    init: SimInit
    sweep: SweepSettings
    cycle: DriveCycle
    cycle_path: Path
    cycle_repeat: int
    cells_dir: Path | None
    output_dir: Path
    cells: dict = field(default_factory=dict)

    def cell(self, chemistry_id: str) -> CellParams:
        chem = chemistry_id.lower()
        if chem not in self.cells:
            raise ConfigError(f"chemistry '{chemistry_id}' not loaded in this config")
        return self.cells[chem]

    @property
    def run_cycle(self) -> DriveCycle:
        """The simulated cycle: the loaded trace driven cycle_repeat times."""
        return self.cycle.repeated(self.cycle_repeat)

    def threads(self) -> int:
        env = os.environ.get("HESS_OPT_THREADS", "")
        if env:
            try:
                cap = int(env)
            except ValueError:
                raise ConfigError(f"HESS_OPT_THREADS must be an integer, got {env!r}")
            if cap < 1:
                raise ConfigError("HESS_OPT_THREADS must be >= 1")
            return cap
        return min(4, os.cpu_count() or 1)


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _take(sec: dict, defaults: dict, section_name: str) -> dict:
    unknown = set(sec) - set(defaults)
    if unknown:
        raise ConfigError(
            f"[{section_name}]: unknown keys {sorted(unknown)}; "
            f"expected a subset of {sorted(defaults)}"
        )
    merged = dict(defaults)
    merged.update(sec)
    return merged


def load_config(path: str | Path | None = None) -> RunConfig:
    """Load and validate a configuration document (None = all defaults)."""
    if path is None:
        doc: dict = {}
        base = Path.cwd()
    else:
        path = Path(path)
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        base = path.parent

    paths = _take(
        _section(doc, "paths"),
        {"cells_dir": None, "cycle_file": None, "output_dir": "out"},
        "paths",
    )
    cells_dir = Path(base / paths["cells_dir"]) if paths["cells_dir"] else None
    cycle_path = (
        Path(base / paths["cycle_file"]) if paths["cycle_file"] else bundled_cycle_path()
    )
    output_dir = Path(base / paths["output_dir"])

    veh = _take(
        _section(doc, "vehicle"),
        {
            "m_base_kg": 1200.0,
            "c_d": 0.26,
            "a_f_m2": 2.5,
            "c_r": 0.012,
            "rho_air_kg_m3": 1.2,
            "g_m_s2": 9.81,
            "lambda_rot": 1.05,
            "p_aux_w": 600.0,
            "p_em_max_w": 235_000.0,
            "eta_em": 0.886,
            "regen_limit": 1.0,
        },
        "vehicle",
    )
    try:
        vehicle = VehicleParams(
            m_base=float(veh["m_base_kg"]),
            c_d=float(veh["c_d"]),
            a_f=float(veh["a_f_m2"]),
            c_r=float(veh["c_r"]),
            rho_air=float(veh["rho_air_kg_m3"]),
            g=float(veh["g_m_s2"]),
            lambda_rot=float(veh["lambda_rot"]),
            p_aux=float(veh["p_aux_w"]),
            p_em_max=float(veh["p_em_max_w"]),
            eta_em=float(veh["eta_em"]),
            regen_limit=float(veh["regen_limit"]),
        )
    except ValueError as exc:
        raise ConfigError(f"[vehicle]: {exc}") from exc

    hess_sec = _take(
        _section(doc, "hess"),
        {"e_tot_wh": 60_000.0, "v_design_v": 400.0, "eta_dc": 0.98},
        "hess",
    )
    hess = HessSettings(
        e_tot_wh=float(hess_sec["e_tot_wh"]),
        v_design_v=float(hess_sec["v_design_v"]),
        eta_dc=float(hess_sec["eta_dc"]),
    )

    th = _take(
        _section(doc, "thermal"),
        {"t_amb_c": 25.0, "freeze_temperature": False, "kappa_override_w_k": None},
        "thermal",
    )
    thermal = ThermalSettings(
        t_amb=float(th["t_amb_c"]),
        freeze_temperature=bool(th["freeze_temperature"]),
        kappa_override=(
            None if th["kappa_override_w_k"] is None else float(th["kappa_override_w_k"])
        ),
    )

    obj = _take(
        _section(doc, "objective"),
        {"kind": "energy", "j_q_per_kwh": 0.25, "d_l_km": 250_000.0},
        "objective",
    )
    kind = str(obj["kind"]).lower()
    if kind not in ("energy", "tco"):
        raise ConfigError(f"[objective]: kind must be 'energy' or 'tco', got {kind!r}")
    try:
        objective = Objective(
            kind=kind,
            tco=(
                TcoParams(
                    j_q_per_wh=float(obj["j_q_per_kwh"]) / 1000.0,
                    d_l_km=float(obj["d_l_km"]),
                )
                if kind == "tco"
                else None
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"[objective]: {exc}") from exc

    sol = _take(
        _section(doc, "solver"),
        {
            "u_grid_points": 200,
            "u_tol_w": 0.1,
            "costate_lambda1": 0.0,
            "costate_lambda2": 0.0,
        },
        "solver",
    )
    try:
        solver = SolverConfig(
            u_grid_points=int(sol["u_grid_points"]), u_tol_w=float(sol["u_tol_w"])
        )
    except ValueError as exc:
        raise ConfigError(f"[solver]: {exc}") from exc
    costates = Costates(
        lambda1=float(sol["costate_lambda1"]), lambda2=float(sol["costate_lambda2"])
    )

    sim = _take(
        _section(doc, "simulation"),
        {"soc0_hp": 0.9, "soc0_he": 0.9, "t0_c": None, "dt_s": 1.0, "cycle_repeat": 3},
        "simulation",
    )
    for key in ("soc0_hp", "soc0_he"):
        if not (0.0 < float(sim[key]) <= 1.0):
            raise ConfigError(f"[simulation]: {key} must be in (0, 1]")
    init = SimInit(
        soc0_hp=float(sim["soc0_hp"]),
        soc0_he=float(sim["soc0_he"]),
        t0=None if sim["t0_c"] is None else float(sim["t0_c"]),
    )
    repeat = int(sim["cycle_repeat"])
    if repeat < 1:
        raise ConfigError("[simulation]: cycle_repeat must be >= 1")

    sw = _take(
        _section(doc, "sweep"),
        {
            "gamma_points": 51,
            "pairs": [list(p) for p in DEFAULT_PAIRS],
            "lossless_dcdc": False,
        },
        "sweep",
    )
    pairs = []
    for entry in sw["pairs"]:
        if isinstance(entry, str):
            parts = entry.split("-")
        else:
            parts = list(entry)
        if len(parts) != 2:
            raise ConfigError(f"[sweep]: pair {entry!r} must be (he, hp)")
        pairs.append((parts[0].lower(), parts[1].lower()))
    sweep = SweepSettings(
        gamma_points=int(sw["gamma_points"]),
        pairs=tuple(pairs),
        lossless_dcdc=bool(sw["lossless_dcdc"]),
    )

    cycle = load_cycle(cycle_path, dt_expected=float(sim["dt_s"]))

    cells: dict[str, CellParams] = {}
    for he_id, hp_id in sweep.pairs:
        for chem in (he_id, hp_id):
            if chem not in cells:
                cells[chem] = load_chemistry(chem, cells_dir)

    return RunConfig(
        vehicle=vehicle,
        hess=hess,
        thermal=thermal,
        objective=objective,
        costates=costates,
        solver=solver,
        init=init,
        sweep=sweep,
        cycle=cycle,
        cycle_path=cycle_path,
        cycle_repeat=repeat,
        cells_dir=cells_dir,
        output_dir=output_dir,
        cells=cells,
    )
