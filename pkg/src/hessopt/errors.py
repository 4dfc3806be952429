"""Exception types shared across the package."""

from __future__ import annotations


class HessOptError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HessOptError):
    """Invalid configuration file or parameter value."""


class ParameterFileError(HessOptError):
    """Malformed or inconsistent cell parameter file."""


class CycleParseError(HessOptError):
    """Malformed drive-cycle file.

    Carries the offending 1-based line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OcvDomainError(HessOptError):
    """Open-circuit-voltage model evaluated at or beyond full depletion."""


class PowerExceedsCapabilityError(HessOptError):
    """Requested power is above what the source can deliver.

    ``p_max_w`` is the maximum deliverable power at the evaluated state.
    """

    def __init__(self, requested_w: float, p_max_w: float, source: str = "cell"):
        self.requested_w = requested_w
        self.p_max_w = p_max_w
        super().__init__(
            f"power {requested_w:.3f} W exceeds {source} capability {p_max_w:.3f} W"
        )


class InfeasibleStepError(HessOptError):
    """No converter power satisfies all limits at one simulation step."""

    def __init__(self, step: int, u_lo: float, u_hi: float, p_em_w: float):
        self.step = step
        self.u_lo = u_lo
        self.u_hi = u_hi
        self.p_em_w = p_em_w
        super().__init__(
            f"step {step}: empty feasible domain "
            f"[{u_lo:.3f}, {u_hi:.3f}] W for motor demand {p_em_w:.3f} W"
        )


class SocDepletionError(HessOptError):
    """A pack state of charge fell below the model validity floor."""

    def __init__(self, step: int, pack: str, soc: float, floor: float):
        self.step = step
        self.pack = pack
        self.soc = soc
        super().__init__(
            f"step {step}: {pack} pack SoC {soc:.4f} fell below floor {floor:.4f}"
        )


class NoFeasibleDesignError(HessOptError):
    """No point of the capacity-split grid produced a usable design."""
