"""Uniform time/frequency grid conventions.

A :class:`GridSpec` describes a centered uniform time grid of ``n`` samples
spanning ``span`` seconds: t_j = -span/2 + j*dt with dt = span/n.  Its
conjugate frequency grid is the fftshifted DFT grid, ascending:
omega_j = (j - n/2) * (2*pi/span), covering [-pi/dt, pi/dt).  All transform
code in the package assumes this pairing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch


def is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Centered uniform grid: n samples, total span in seconds."""

    n: int
    span: float

    def __post_init__(self):
        if not is_power_of_two(self.n):
            raise GridMismatch(f"grid length must be a power of two, got {self.n}")
        if not (self.span > 0 and np.isfinite(self.span)):
            raise GridMismatch(f"grid span must be positive and finite, got {self.span}")

    @property
    def dt(self) -> float:
        return self.span / self.n

    @property
    def t0(self) -> float:
        return -self.span / 2.0

    @property
    def domega(self) -> float:
        return 2.0 * np.pi / self.span

    @property
    def omega0(self) -> float:
        return -(self.n // 2) * self.domega

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def omegas(self) -> np.ndarray:
        return self.omega0 + self.domega * np.arange(self.n)


def default_grid(min_pole_rate: float, omega_interest: float) -> GridSpec:
    """Default pipeline grid: 8x oversampling of the highest retained
    frequency, span long enough that exp(-min_pole_rate * span) is negligible.
    """
    span = 400.0 / min_pole_rate
    dt_target = np.pi / (8.0 * omega_interest)
    n = 1 << int(np.ceil(np.log2(span / dt_target)))
    return GridSpec(n=max(n, 2), span=span)
