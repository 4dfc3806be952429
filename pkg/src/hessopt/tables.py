"""Breakpoint tables with linear interpolation and boundary clamping.

Cell parameters vary with temperature (1-D tables) and with state of
charge and temperature (2-D tables). Queries outside the declared
breakpoint range are clamped to the boundary value; interpolation is
exact at every breakpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterFileError


def _as_sorted_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterFileError(f"{name}: expected a non-empty 1-D array")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ParameterFileError(f"{name}: breakpoints must be strictly increasing")
    return arr


@dataclass(frozen=True, eq=False)
class Table1D:
    """Piecewise-linear y(x) with clamped evaluation outside [x[0], x[-1]]."""

    x: np.ndarray
    y: np.ndarray
    name: str = "table"

    def __post_init__(self):
        object.__setattr__(self, "x", _as_sorted_array(self.x, self.name))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.y.shape != self.x.shape:
            raise ParameterFileError(f"{self.name}: breakpoint/value length mismatch")

    def __call__(self, xq: float) -> float:
        # np.interp already clamps to the end values
        return float(np.interp(xq, self.x, self.y))

    @classmethod
    def constant(cls, value: float, name: str = "const") -> "Table1D":
        return cls(np.array([0.0]), np.array([float(value)]), name)


@dataclass(frozen=True, eq=False)
class Table2D:
    """Bilinear z(x, y) over a rectangular grid, clamped at the edges.

    ``z`` is indexed ``z[i, j]`` for ``x[i]``, ``y[j]``.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    name: str = "table2d"

    def __post_init__(self):
        object.__setattr__(self, "x", _as_sorted_array(self.x, self.name + ".x"))
        object.__setattr__(self, "y", _as_sorted_array(self.y, self.name + ".y"))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        if self.z.shape != (self.x.size, self.y.size):
            raise ParameterFileError(
                f"{self.name}: values must have shape ({self.x.size}, {self.y.size})"
            )

    def __call__(self, xq: float, yq: float) -> float:
        xq = min(max(xq, float(self.x[0])), float(self.x[-1]))
        yq = min(max(yq, float(self.y[0])), float(self.y[-1]))
        if self.x.size == 1:
            i, i1, tx = 0, 0, 0.0
        else:
            i = min(max(int(np.searchsorted(self.x, xq, side="right")) - 1, 0), self.x.size - 2)
            i1 = i + 1
            tx = (xq - self.x[i]) / (self.x[i1] - self.x[i])
        if self.y.size == 1:
            j, j1, ty = 0, 0, 0.0
        else:
            j = min(max(int(np.searchsorted(self.y, yq, side="right")) - 1, 0), self.y.size - 2)
            j1 = j + 1
            ty = (yq - self.y[j]) / (self.y[j1] - self.y[j])
        return float(
            self.z[i, j] * (1.0 - tx) * (1.0 - ty)
            + self.z[i1, j] * tx * (1.0 - ty)
            + self.z[i, j1] * (1.0 - tx) * ty
            + self.z[i1, j1] * tx * ty
        )

    @classmethod
    def constant(cls, value: float, name: str = "const2d") -> "Table2D":
        return cls(np.array([0.0]), np.array([0.0]), np.array([[float(value)]]), name)
