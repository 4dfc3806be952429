"""Design optimization for dual-chemistry hybrid battery systems.

Simulates a high-power plus high-energy pack pair over a drive cycle,
solves the optimal DC-DC power split per time step, and searches the
capacity split and chemistry pairing for minimum energy consumption or
minimum total cost of ownership.
"""

from . import _backend
from .aging import DegradationAccumulator, accumulate, degradation_rate
from .cells import (
    CellParams,
    cell_loss_power,
    current_from_power,
    internal_resistance,
    load_cell_file,
    load_chemistry,
    ocv,
    terminal_voltage,
)
from .drivetrain import (
    DriveCycle,
    PowerTrace,
    VehicleParams,
    electrical_power,
    load_cycle,
    power_trace,
    shaft_power,
)
from .pack import (
    HessDesign,
    PackDesign,
    build_hess,
    pack_limits,
    parallel_count,
    series_count,
    split_capacity,
)
from .powersplit import (
    ControlState,
    Costates,
    Objective,
    SimulationLog,
    SolverConfig,
    TcoParams,
    branch_currents,
    bus_voltage,
    feasible_domain,
    hamiltonian,
    optimal_u,
    simulate,
    stage_cost,
)
from .thermal import cooling_power, step_temperature

__version__ = "0.1.0"

backend_name = _backend.backend_name
