"""Drive-cycle ingestion and quasi-static backward vehicle model.

The speed trace prescribes the motion; road load plus inertia give the
shaft power, and a constant-efficiency motor maps it to the electrical
demand seen by the battery system. Braking power is recoverable at the
motor up to a regeneration factor; whatever the batteries cannot absorb is
implicitly taken by friction brakes through the converter power limits
downstream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CycleParseError

WH_PER_J = 1.0 / 3600.0


@dataclass(frozen=True, eq=False)
class DriveCycle:
    """Uniformly sampled speed trace."""

    dt: float                # s
    speed: np.ndarray        # m/s

    def __post_init__(self):
        object.__setattr__(self, "speed", np.asarray(self.speed, dtype=float))
        if self.dt <= 0:
            raise CycleParseError("dt must be positive")
        if self.speed.size == 0:
            raise CycleParseError("empty speed trace")
        if (self.speed < 0).any():
            raise CycleParseError("negative speeds in trace")

    @property
    def duration(self) -> float:
        return self.dt * self.speed.size

    @property
    def distance_km(self) -> float:
        return float(self.speed.sum()) * self.dt / 1000.0

    def repeated(self, times: int) -> "DriveCycle":
        """The same trace driven back to back ``times`` times."""
        if times < 1:
            raise CycleParseError("repeat count must be >= 1")
        if times == 1:
            return self
        return DriveCycle(self.dt, np.tile(self.speed, times))


@dataclass(frozen=True)
class VehicleParams:
    m_base: float            # kg without batteries
    c_d: float               # aerodynamic drag coefficient
    a_f: float               # frontal area m^2
    c_r: float               # rolling resistance coefficient
    rho_air: float = 1.2     # kg/m^3
    g: float = 9.81          # m/s^2
    lambda_rot: float = 1.05  # rotating-mass factor
    p_aux: float = 400.0     # W constant auxiliary load
    p_em_max: float = 235e3  # W peak motor power (design constraint)
    eta_em: float = 0.886    # constant motor+inverter efficiency
    regen_limit: float = 1.0  # fraction of braking power recoverable at the motor

    def __post_init__(self):
        if not (0.0 < self.eta_em <= 1.0):
            raise ValueError("eta_em must be in (0, 1]")
        if not (0.0 <= self.regen_limit <= 1.0):
            raise ValueError("regen_limit must be in [0, 1]")
        for name in ("m_base", "c_d", "a_f", "c_r", "rho_air", "g", "lambda_rot", "p_em_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class PowerTrace:
    """Per-step motor powers for one cycle at one total vehicle mass."""

    dt: float
    p_shaft: np.ndarray          # W at the shaft, negative while braking
    p_em: np.ndarray             # W electrical at the DC bus
    exceeds_p_em_max: bool = field(default=False)

    @property
    def e_s_em(self) -> float:
        """Wh net shaft energy."""
        return float(self.p_shaft.sum()) * self.dt * WH_PER_J

    @property
    def e_l_em(self) -> float:
        """Wh dissipated between bus and shaft (motor loss + auxiliaries)."""
        return float((self.p_em - self.p_shaft).sum()) * self.dt * WH_PER_J


def load_cycle(path: str | Path, dt_expected: float = 1.0) -> DriveCycle:
    """Read a ``t_s,v_mps`` CSV, resampling to a uniform grid if needed."""
    path = Path(path)
    times: list[float] = []
    speeds: list[float] = []
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise CycleParseError(f"drive-cycle file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CycleParseError("empty file", line=1)
        if [c.strip().lower() for c in header[:2]] != ["t_s", "v_mps"]:
            raise CycleParseError(f"expected header 't_s,v_mps', got {header!r}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise CycleParseError("expected two columns", line=lineno)
            try:
                t = float(row[0])
                v = float(row[1])
            except ValueError:
                raise CycleParseError(f"non-numeric row {row!r}", line=lineno) from None
            if times and t <= times[-1]:
                raise CycleParseError("time not strictly increasing", line=lineno)
            if v < 0:
                raise CycleParseError(f"negative speed {v}", line=lineno)
            times.append(t)
            speeds.append(v)
    if not times:
        raise CycleParseError("no samples in file", line=2)

    t_arr = np.array(times)
    v_arr = np.array(speeds)
    steps = np.diff(t_arr)
    if steps.size == 0 or np.allclose(steps, dt_expected):
        return DriveCycle(dt_expected, v_arr)
    # non-uniform or differently sampled input: linear resample
    t_uniform = np.arange(t_arr[0], t_arr[-1] + 0.5 * dt_expected, dt_expected)
    return DriveCycle(dt_expected, np.interp(t_uniform, t_arr, v_arr))


def shaft_power(vehicle: VehicleParams, mass_total: float, v: float, a: float) -> float:
    """Road-load power [W] at the wheel/shaft; negative while braking."""
    if v <= 0.0:
        return 0.0
    rolling = mass_total * vehicle.g * vehicle.c_r
    drag = 0.5 * vehicle.rho_air * vehicle.c_d * vehicle.a_f * v * v
    inertia = vehicle.lambda_rot * mass_total * a
    return (inertia + rolling + drag) * v


def electrical_power(
    p_shaft: float, eta_em: float, p_aux: float, regen_limit: float
) -> float:
    """Electrical power [W] at the bus for a given shaft power."""
    if p_shaft >= 0.0:
        return p_shaft / eta_em + p_aux
    return p_shaft * eta_em * regen_limit + p_aux


def power_trace(cycle: DriveCycle, vehicle: VehicleParams, mass_total: float) -> PowerTrace:
    """Backward-simulate the cycle into shaft and electrical power arrays.

    Acceleration at step k is the forward difference (v[k+1] - v[k]) / dt,
    zero at the final step.
    """
    v = cycle.speed
    a = np.zeros_like(v)
    if v.size > 1:
        a[:-1] = np.diff(v) / cycle.dt
    p_s = np.empty_like(v)
    p_e = np.empty_like(v)
    for k in range(v.size):
        p_s[k] = shaft_power(vehicle, mass_total, float(v[k]), float(a[k]))
        p_e[k] = electrical_power(p_s[k], vehicle.eta_em, vehicle.p_aux, vehicle.regen_limit)
    return PowerTrace(
        dt=cycle.dt,
        p_shaft=p_s,
        p_em=p_e,
        exceeds_p_em_max=bool(np.max(p_e, initial=0.0) > vehicle.p_em_max),
    )


def bundled_cycle_path() -> Path:
    """Path of the bundled default drive cycle (urban/suburban/highway mix)."""
    return Path(__file__).parent / "data" / "cycle_1800s.csv"


def cycle_checksum(path: str | Path) -> str:
    """Stable content hash used to pin the bundled cycle in tests."""
    import hashlib

    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
