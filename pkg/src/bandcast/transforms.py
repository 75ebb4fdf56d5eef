"""Raw discrete Fourier transforms between conjugate uniform grids.

Convention: forward transform approximates integral e^{-i*omega*t} x(t) dt
with no prefactor; the inverse carries 1/(2*pi) and e^{+i*omega*t}.  Arrays
only; the typed wrappers live in :mod:`bandcast.engine`.

Frequency grids are ascending with omega_j = omega0 + j*domega.  For a time
grid (t0, dt, n) the conjugate frequency grid is omega0 = -(n//2)*domega,
domega = 2*pi/(n*dt); the pair round-trips exactly (up to rounding).
"""

from __future__ import annotations

import numpy as np


def spectrum_from_signal(values: np.ndarray, dt: float, t0: float):
    """Forward transform.  Returns (spectrum_values, omega0, domega)."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    domega = 2.0 * np.pi / (n * dt)
    omega0 = -(n // 2) * domega
    omegas_fft = 2.0 * np.pi * np.fft.fftfreq(n, d=dt)
    spec = dt * np.exp(-1j * omegas_fft * t0) * np.fft.fft(values)
    return np.fft.fftshift(spec), omega0, domega


def signal_from_spectrum(values: np.ndarray, omega0: float, domega: float, t0=None):
    """Inverse transform onto the conjugate time grid.

    Returns (signal_values, t0, dt).  The default t0 centers the grid; any
    uniform frequency grid is accepted (a non-centered omega0 shows up as a
    phase factor e^{i*omega_offset*t}).
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    dt = 2.0 * np.pi / (n * domega)
    if t0 is None:
        t0 = -(n // 2) * dt
    t = t0 + dt * np.arange(n)
    inner = values * np.exp(1j * np.arange(n) * domega * t0)
    sig = (domega * n / (2.0 * np.pi)) * np.exp(1j * omega0 * t) * np.fft.ifft(inner)
    return sig, float(t0), dt
