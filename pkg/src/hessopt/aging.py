"""Cyclic capacity-fade accumulation.

Capacity fade grows with absolute charge throughput, amplified exponentially
by the current magnitude: under constant current the fade over a segment is
``a_cy * exp(|I| * b_cy) * |It|`` with ``|It|`` the segment throughput in Ah.
The normalized degradation divides the fade by the usable capacity window
``(1 - soh_eol) * q0`` and reaches 1.0 exactly at end of life. Throughput is
integrated in seconds, hence the 1/3600 Ah conversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class DegradationAccumulator:
    """Running cyclic-aging totals for one pack's cells."""

    it_abs: float = 0.0       # Ah absolute throughput
    q_deg: float = 0.0        # Ah capacity fade
    delta_deg: float = 0.0    # fade normalized by the end-of-life window

    def __post_init__(self):
        if self.it_abs < 0 or self.q_deg < 0 or self.delta_deg < 0:
            raise ValueError("degradation totals cannot be negative")


def degradation_rate(
    a_cy: float, b_cy: float, current: float, soh_eol: float, q0: float
) -> float:
    """Normalized degradation rate [1/s] at a constant cell current [A]."""
    amps = abs(current)
    fade_per_second = a_cy * math.exp(amps * b_cy) * amps / SECONDS_PER_HOUR
    return fade_per_second / ((1.0 - soh_eol) * q0)


def accumulate(
    acc: DegradationAccumulator,
    current: float,
    dt: float,
    a_cy: float,
    b_cy: float,
    soh_eol: float,
    q0: float,
) -> DegradationAccumulator:
    """Advance the accumulator by one constant-current interval of dt seconds."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    amps = abs(current)
    d_it = amps * dt / SECONDS_PER_HOUR
    d_q = a_cy * math.exp(amps * b_cy) * d_it
    return DegradationAccumulator(
        it_abs=acc.it_abs + d_it,
        q_deg=acc.q_deg + d_q,
        delta_deg=acc.delta_deg + d_q / ((1.0 - soh_eol) * q0),
    )
