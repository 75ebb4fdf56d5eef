"""Sampled signals/spectra, test-signal generators, and mixed spectra.

Two signal families are generated here:

* square-integrable signals whose spectra vanish exactly outside a declared
  support (either inside the band [-omega, omega] or outside it), built on
  uniform grids and inverse-transformed;
* bounded "mixed" signals made of spectral atoms plus an integrable density,
  x(t) = (1/2pi) * (sum c_k e^{i w_k t} + integral e^{i w t} X_c(w) dw),
  measured in the total-variation norm sum|c_k| + ||X_c||_L1.

Band-edge convention: the ideal low-pass indicator is closed, so grid points
with |omega| == band constant go to the LOW part of a split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ClassConstraintViolation,
    GridMismatch,
    QuadratureNotConverged,
    SupportViolation,
)
from .grids import GridSpec
from .transforms import signal_from_spectrum


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Complex samples on the uniform grid t_j = t0 + j*dt."""

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.dt <= 0 or not np.isfinite(self.dt):
            raise GridMismatch(f"dt must be positive, got {self.dt}")
        if len(self.values) < 2:
            raise GridMismatch("signal needs at least 2 samples")

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))

    @property
    def span(self) -> float:
        return (len(self.values) - 1) * self.dt

    def energy(self) -> float:
        """Rectangle-rule energy sum |x|^2 dt (exact Parseval partner)."""
        return float(np.sum(np.abs(self.values) ** 2) * self.dt)


@dataclass(frozen=True, eq=False)
class SampledSpectrum:
    """Complex samples on the uniform grid omega_j = omega0 + j*domega."""

    omega0: float
    domega: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.domega <= 0 or not np.isfinite(self.domega):
            raise GridMismatch(f"domega must be positive, got {self.domega}")
        if len(self.values) < 2:
            raise GridMismatch("spectrum needs at least 2 samples")

    def omegas(self) -> np.ndarray:
        return self.omega0 + self.domega * np.arange(len(self.values))

    def energy(self) -> float:
        """(1/2pi) sum |X|^2 domega; equals the paired signal energy."""
        return float(np.sum(np.abs(self.values) ** 2) * self.domega / (2.0 * np.pi))


def same_time_grid(a: SampledSignal, b: SampledSignal, tol: float = 1e-12) -> bool:
    scale = max(abs(a.t0), abs(a.dt), 1.0)
    return (
        len(a.values) == len(b.values)
        and abs(a.t0 - b.t0) <= tol * scale
        and abs(a.dt - b.dt) <= tol * scale
    )


# ---------------------------------------------------------------------------
# Band-restricted L2 signal generators


def _envelope_values(envelope_spec, omegas: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Evaluate a named envelope; exactly zero off the declared support."""
    if isinstance(envelope_spec, str):
        name, params = envelope_spec, {}
    else:
        name, params = envelope_spec
    height = float(params.get("height", 1.0))
    out = np.zeros(len(omegas))
    if name == "indicator":
        inside = (omegas >= lo) & (omegas <= hi)
        out[inside] = height
    elif name == "raised_cosine":
        center, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        inside = (omegas > lo) & (omegas < hi)
        u = (omegas[inside] - center) / half
        out[inside] = height * 0.5 * (1.0 + np.cos(np.pi * u))
    elif name == "gaussian":
        sigma = float(params.get("sigma", (hi - lo) / 4.0))
        center = (lo + hi) / 2.0
        inside = (omegas > lo) & (omegas < hi)
        out[inside] = height * np.exp(-((omegas[inside] - center) ** 2) / (2 * sigma**2))
    else:
        raise SupportViolation(f"unknown envelope {name!r}")
    return out


def _pair_from_spectrum(spec_values: np.ndarray, grid: GridSpec):
    spectrum = SampledSpectrum(grid.omega0, grid.domega, spec_values)
    sig, t0, dt = signal_from_spectrum(spec_values, grid.omega0, grid.domega)
    return SampledSignal(t0, dt, sig), spectrum


def make_bandlimited_signal(
    envelope_spec,
    support: tuple[float, float],
    grid_spec: GridSpec,
    omega: float,
    hermitian: bool = False,
) -> tuple[SampledSignal, SampledSpectrum]:
    """Signal whose spectrum is `envelope` on `support` inside [-omega, omega].

    With hermitian=True the support must be symmetric (lo == -hi) so the real
    envelope yields a Hermitian spectrum and a real-valued signal.
    """
    lo, hi = float(support[0]), float(support[1])
    if not (-omega <= lo < hi <= omega):
        raise SupportViolation(
            f"support [{lo}, {hi}] not inside the band [-{omega}, {omega}]"
        )
    if hermitian and lo != -hi:
        raise SupportViolation("hermitian option requires a symmetric support")
    vals = _envelope_values(envelope_spec, grid_spec.omegas(), lo, hi).astype(complex)
    return _pair_from_spectrum(vals, grid_spec)


def make_highfreq_signal(
    envelope_spec,
    support: tuple[float, float],
    grid_spec: GridSpec,
    omega: float,
    hermitian: bool = True,
) -> tuple[SampledSignal, SampledSpectrum]:
    """Signal with spectrum on |w| in [lo, hi], lo >= omega.

    hermitian=True places the envelope on both +/-[lo, hi] (real signal);
    hermitian=False uses the positive side only (complex signal).
    """
    lo, hi = float(support[0]), float(support[1])
    if not (omega <= lo < hi):
        raise SupportViolation(
            f"high-frequency support [{lo}, {hi}] must satisfy omega <= lo < hi"
        )
    og = grid_spec.omegas()
    if hi > og[-1]:
        raise SupportViolation(f"support end {hi} beyond grid maximum {og[-1]:.6g}")
    vals = _envelope_values(envelope_spec, og, lo, hi).astype(complex)
    if hermitian:
        vals = vals + np.conj(_envelope_values(envelope_spec, -og, lo, hi))
    return _pair_from_spectrum(vals, grid_spec)


# ---------------------------------------------------------------------------
# Mixed spectra: atoms + integrable density


def _gauss_legendre_panels(lo: float, hi: float, panels: int, order: int = 8):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def _oscillatory_integral(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    t_values: np.ndarray,
    rel_tol: float = 1e-9,
) -> np.ndarray:
    """integral_lo^hi f(w) e^{i w t} dw for each t, fixed-order Gauss panels.

    Panel count scales with the oscillation count; a doubled-panel pass
    certifies convergence.
    """
    t = np.asarray(t_values, dtype=float)
    tmax = float(np.max(np.abs(t))) if len(t) else 0.0
    panels = max(16, int(math.ceil((hi - lo) * (tmax + 1.0) / 3.0)))

    def compute(npanels: int) -> np.ndarray:
        x, w = _gauss_legendre_panels(lo, hi, npanels)
        fx = np.asarray(f(x), dtype=complex) * w
        return np.exp(1j * np.outer(t, x)) @ fx

    coarse = compute(panels)
    fine = compute(2 * panels)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    if float(np.max(np.abs(fine - coarse))) > rel_tol * scale + 1e-13:
        raise QuadratureNotConverged(
            f"oscillatory integral not converged on [{lo}, {hi}] "
            f"({np.max(np.abs(fine - coarse)):.3e} vs scale {scale:.3e})"
        )
    return fine


@dataclass(frozen=True)
class RaisedCosineBump:
    """Closed-form density: height * cos^2(pi*(w-center)/(2*half)) on [lo, hi]."""

    lo: float
    hi: float
    height: float = 1.0

    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def mass(self) -> float:
        return abs(self.height) * (self.hi - self.lo) / 2.0

    def __call__(self, omegas: np.ndarray) -> np.ndarray:
        center, half = (self.lo + self.hi) / 2.0, (self.hi - self.lo) / 2.0
        out = np.zeros(len(omegas), dtype=complex)
        inside = (omegas > self.lo) & (omegas < self.hi)
        u = (omegas[inside] - center) / half
        out[inside] = self.height * 0.5 * (1.0 + np.cos(np.pi * u))
        return out

    def integrate_against(self, weight, t_values) -> np.ndarray:
        f = self if weight is None else (lambda w: self(w) * weight(w))
        return _oscillatory_integral(f, self.lo, self.hi, t_values)


@dataclass(frozen=True)
class GaussianBump:
    """Closed-form density: height * exp(-(w-center)^2/(2 sigma^2)) on [lo, hi]."""

    lo: float
    hi: float
    height: float = 1.0
    sigma: float | None = None

    def _sigma(self) -> float:
        return self.sigma if self.sigma is not None else (self.hi - self.lo) / 4.0

    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def mass(self) -> float:
        s = self._sigma()
        center = (self.lo + self.hi) / 2.0
        z0 = (self.lo - center) / (s * math.sqrt(2.0))
        z1 = (self.hi - center) / (s * math.sqrt(2.0))
        return abs(self.height) * s * math.sqrt(math.pi / 2.0) * (math.erf(z1) - math.erf(z0))

    def __call__(self, omegas: np.ndarray) -> np.ndarray:
        s = self._sigma()
        center = (self.lo + self.hi) / 2.0
        out = np.zeros(len(omegas), dtype=complex)
        inside = (omegas > self.lo) & (omegas < self.hi)
        out[inside] = self.height * np.exp(-((omegas[inside] - center) ** 2) / (2 * s * s))
        return out

    def integrate_against(self, weight, t_values) -> np.ndarray:
        f = self if weight is None else (lambda w: self(w) * weight(w))
        return _oscillatory_integral(f, self.lo, self.hi, t_values)


@dataclass(frozen=True, eq=False)
class SampledDensity:
    """Density given by samples with piecewise-linear interpolation."""

    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omegas", np.asarray(self.omegas, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if len(self.omegas) < 2 or np.any(np.diff(self.omegas) <= 0):
            raise SupportViolation("sampled density needs an increasing grid")

    def support(self) -> tuple[float, float]:
        return (float(self.omegas[0]), float(self.omegas[-1]))

    def __call__(self, w: np.ndarray) -> np.ndarray:
        re = np.interp(w, self.omegas, self.values.real, left=0.0, right=0.0)
        im = np.interp(w, self.omegas, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def mass(self) -> float:
        lo, hi = self.support()
        for refine in (16, 32):
            x = np.linspace(lo, hi, refine * (len(self.omegas) - 1) + 1)
            val = float(np.trapezoid(np.abs(self(x)), x))
            if refine == 16:
                coarse = val
        if abs(val - coarse) > 1e-9 * max(val, 1e-300) + 1e-13:
            raise QuadratureNotConverged("density L1 mass did not converge")
        return val

    def integrate_against(self, weight, t_values) -> np.ndarray:
        lo, hi = self.support()
        f = self if weight is None else (lambda w: self(w) * weight(w))
        return _oscillatory_integral(f, lo, hi, t_values)


@dataclass(frozen=True, eq=False)
class MixedSpectrum:
    """Atoms (w_k, c_k) plus density components, with its class declaration."""

    atoms: tuple[tuple[float, complex], ...]
    density: tuple
    class_tag: str
    epsilon: float
    omega: float

    def evaluate(self, t_values) -> np.ndarray:
        """x(t) = (1/2pi) (sum c_k e^{i w_k t} + integral e^{i w t} X_c dw)."""
        t = np.asarray(t_values, dtype=float)
        acc = np.zeros(len(t), dtype=complex)
        for wk, ck in self.atoms:
            acc += ck * np.exp(1j * wk * t)
        for comp in self.density:
            acc += comp.integrate_against(None, t)
        return acc / (2.0 * np.pi)


def make_mixed_signal(
    atoms: Sequence[tuple[float, complex]],
    density_spec: Sequence,
    class_tag: str,
    epsilon: float,
    omega: float,
) -> MixedSpectrum:
    """Validate and construct a mixed spectrum of the declared class."""
    if class_tag not in ("LOW", "HIGH"):
        raise ClassConstraintViolation(f"class_tag must be LOW or HIGH, got {class_tag!r}")
    if not (0.0 < epsilon < omega):
        raise ClassConstraintViolation(
            f"epsilon must lie in (0, omega) = (0, {omega}), got {epsilon}"
        )
    norm_atoms = []
    for wk, ck in atoms:
        wk, ck = float(wk), complex(ck)
        if not (np.isfinite(wk) and np.isfinite(ck.real) and np.isfinite(ck.imag)):
            raise ClassConstraintViolation(f"non-finite atom ({wk}, {ck})")
        if class_tag == "LOW" and abs(wk) > omega - epsilon:
            raise ClassConstraintViolation(
                f"atom at {wk} outside [-(omega-eps), omega-eps] = "
                f"[-{omega - epsilon}, {omega - epsilon}]"
            )
        if class_tag == "HIGH" and abs(wk) < omega + epsilon:
            raise ClassConstraintViolation(
                f"atom at {wk} inside the forbidden gap (|w| < {omega + epsilon})"
            )
        norm_atoms.append((wk, ck))
    comps = tuple(density_spec)
    for comp in comps:
        lo, hi = comp.support()
        if class_tag == "LOW":
            if not (-(omega - epsilon) <= lo < hi <= omega - epsilon):
                raise ClassConstraintViolation(
                    f"density support [{lo}, {hi}] not inside "
                    f"[-{omega - epsilon}, {omega - epsilon}]"
                )
        else:
            one_side = (omega + epsilon <= lo < hi) or (lo < hi <= -(omega + epsilon))
            if not one_side:
                raise ClassConstraintViolation(
                    f"density support [{lo}, {hi}] overlaps the gap "
                    f"(-{omega + epsilon}, {omega + epsilon})"
                )
    return MixedSpectrum(
        atoms=tuple(norm_atoms),
        density=comps,
        class_tag=class_tag,
        epsilon=float(epsilon),
        omega=float(omega),
    )


def cstar_norm(ms: MixedSpectrum) -> float:
    """Total-variation norm: sum |c_k| + integral |X_c|."""
    return float(sum(abs(ck) for _wk, ck in ms.atoms)) + float(
        sum(comp.mass() for comp in ms.density)
    )


# ---------------------------------------------------------------------------
# Ideal split and out-of-band perturbation


def ideal_lowpass_split(
    spectrum: SampledSpectrum, omega: float
) -> tuple[SampledSpectrum, SampledSpectrum]:
    """Split X into (low, high) by the closed indicator |w| <= omega.

    The parts carry the original grid and sum to X bit-exactly; |w| == omega
    goes to the LOW part.
    """
    og = spectrum.omegas()
    mask = np.abs(og) <= omega
    low = np.where(mask, spectrum.values, 0.0 + 0.0j)
    high = np.where(mask, 0.0 + 0.0j, spectrum.values)
    return (
        SampledSpectrum(spectrum.omega0, spectrum.domega, low),
        SampledSpectrum(spectrum.omega0, spectrum.domega, high),
    )


def add_outofband_noise(
    signal: SampledSignal,
    spectrum: SampledSpectrum,
    eta: float,
    noise_support: tuple[float, float],
    seed: int,
    omega: float,
) -> tuple[SampledSignal, SampledSpectrum]:
    """Add a Hermitian pseudo-random spectrum component on |w| in noise_support.

    The perturbation carries exactly eta * (signal energy); the in-band part
    of the spectrum is untouched.  Deterministic given seed.
    """
    lo, hi = float(noise_support[0]), float(noise_support[1])
    if eta < 0:
        raise SupportViolation(f"eta must be >= 0, got {eta}")
    if lo <= omega:
        raise SupportViolation(
            f"noise support [{lo}, {hi}] must be disjoint from [-{omega}, {omega}]"
        )
    if eta == 0.0:
        return signal, spectrum

    og = spectrum.omegas()
    n = len(og)
    pos = np.where((og >= lo) & (og <= hi))[0]
    pos = pos[og[pos] > 0]
    if len(pos) == 0:
        raise SupportViolation("noise support contains no positive-frequency grid points")

    rng = np.random.default_rng(seed)
    noise = np.zeros(n, dtype=complex)
    draws = rng.standard_normal(len(pos)) + 1j * rng.standard_normal(len(pos))
    noise[pos] = draws
    # Hermitian mate: omega_{n-j} = -omega_j on the centered grid (j != 0).
    mirror = n - pos
    keep = (mirror > 0) & (mirror < n)
    noise[mirror[keep]] = np.conj(draws[keep])

    sig_energy = spectrum.energy()
    noise_energy = float(np.sum(np.abs(noise) ** 2) * spectrum.domega / (2 * np.pi))
    scale = math.sqrt(eta * sig_energy / noise_energy) if noise_energy > 0 else 0.0
    noise *= scale

    pert = SampledSpectrum(spectrum.omega0, spectrum.domega, spectrum.values + noise)
    nsig, t0, dt = signal_from_spectrum(noise, spectrum.omega0, spectrum.domega, t0=signal.t0)
    return SampledSignal(signal.t0, signal.dt, signal.values + nsig), pert


def signal_to_csv(signal: SampledSignal) -> str:
    lines = ["t,re,im"]
    t = signal.times()
    for ti, v in zip(t, signal.values):
        lines.append(f"{float(ti)!r},{float(v.real)!r},{float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def spectrum_to_csv(spectrum: SampledSpectrum) -> str:
    lines = ["omega,re,im"]
    og = spectrum.omegas()
    for wi, v in zip(og, spectrum.values):
        lines.append(f"{float(wi)!r},{float(v.real)!r},{float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def mixed_to_json_dict(ms: MixedSpectrum) -> dict:
    density = []
    for comp in ms.density:
        if isinstance(comp, RaisedCosineBump):
            density.append(
                {"kind": "raised_cosine", "lo": comp.lo, "hi": comp.hi, "height": comp.height}
            )
        elif isinstance(comp, GaussianBump):
            density.append(
                {
                    "kind": "gaussian",
                    "lo": comp.lo,
                    "hi": comp.hi,
                    "height": comp.height,
                    "sigma": comp._sigma(),
                }
            )
        elif isinstance(comp, SampledDensity):
            density.append(
                {
                    "kind": "sampled",
                    "omegas": list(map(float, comp.omegas)),
                    "re": list(map(float, comp.values.real)),
                    "im": list(map(float, comp.values.imag)),
                }
            )
        else:
            raise SupportViolation(f"cannot serialize density {type(comp).__name__}")
    return {
        "atoms": [[wk, ck.real, ck.imag] for wk, ck in ms.atoms],
        "density": density,
        "class": ms.class_tag,
        "epsilon": ms.epsilon,
        "omega": ms.omega,
    }


def mixed_from_json_dict(doc: dict) -> MixedSpectrum:
    atoms = [(float(a[0]), complex(a[1], a[2])) for a in doc.get("atoms", [])]
    comps = []
    for d in doc.get("density", []):
        if d["kind"] == "raised_cosine":
            comps.append(RaisedCosineBump(float(d["lo"]), float(d["hi"]), float(d.get("height", 1.0))))
        elif d["kind"] == "gaussian":
            comps.append(
                GaussianBump(
                    float(d["lo"]),
                    float(d["hi"]),
                    float(d.get("height", 1.0)),
                    float(d["sigma"]) if "sigma" in d else None,
                )
            )
        elif d["kind"] == "sampled":
            vals = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
            comps.append(SampledDensity(np.asarray(d["omegas"], dtype=float), vals))
        else:
            raise SupportViolation(f"unknown density kind {d['kind']!r}")
    return make_mixed_signal(atoms, comps, doc["class"], float(doc["epsilon"]), float(doc["omega"]))
