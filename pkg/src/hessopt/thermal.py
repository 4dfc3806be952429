"""Lumped-mass cell temperature dynamics with liquid cooling to ambient.

Each pack evolves uniformly (no cell-to-cell interaction) so the pack state
is one cell temperature driven by the per-cell ohmic loss. Integration is
explicit Euler at the drive-cycle time step, which is stable for
dt < 2 * m_c * c_p / kappa.
"""

from __future__ import annotations

from .errors import ConfigError


def cooling_power(kappa_tot: float, t_c: float, t_amb: float) -> float:
    """Heat flow to the coolant [W]; negative when ambient heats the cell."""
    return kappa_tot * (t_c - t_amb)


def step_temperature(
    t_c: float,
    p_loss_cell: float,
    dt: float,
    m_c: float,
    c_p: float,
    kappa: float,
    t_amb: float,
) -> float:
    """One explicit-Euler update of the cell heat balance."""
    return t_c + dt * (p_loss_cell - cooling_power(kappa, t_c, t_amb)) / (m_c * c_p)


def check_stability(dt: float, m_c: float, c_p: float, kappa: float) -> None:
    """Reject time steps that make the Euler cooling update divergent."""
    if kappa > 0.0 and dt >= 2.0 * m_c * c_p / kappa:
        raise ConfigError(
            f"thermal step dt={dt} s unstable: requires dt < {2.0 * m_c * c_p / kappa:.1f} s "
            f"(m_c*c_p={m_c * c_p:.1f} J/K, kappa={kappa} W/K)"
        )
