"""
Scattering amplitudes of point measures on uniform momentum grids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import hilbert

from .errors import DomainError, EmptyRequestError
from .kernels import nudft_kernel
from .lattice import PointMeasure

__all__ = [
    "KGrid",
    "Spectrum",
    "nudft",
    "dirichlet_power",
    "power_series",
    "Detrended",
    "detrend",
    "running_median",
    "resonance_power",
    "lorentzian_model",
]


@dataclass(frozen=True)
class KGrid:
    k_min: float
    k_max: float
    samples: int

    def __post_init__(self):
        if not (np.isfinite(self.k_min) and np.isfinite(self.k_max)):
            raise DomainError("grid bounds must be finite")
        if not self.k_min < self.k_max:
            raise DomainError(f"k_min must be < k_max, got [{self.k_min}, {self.k_max}]")
        if int(self.samples) != self.samples or self.samples < 2:
            raise DomainError(f"samples must be an integer >= 2, got {self.samples}")
        object.__setattr__(self, "samples", int(self.samples))

    @property
    def spacing(self) -> float:
        return (self.k_max - self.k_min) / (self.samples - 1)

    def values(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.samples)


@dataclass(frozen=True)
class Spectrum:
    grid: KGrid
    amplitude: np.ndarray
    source_label: str = ""
    atom_count: int = 1
    power: np.ndarray = field(init=False)

    def __post_init__(self):
        amp = np.array(self.amplitude, dtype=np.complex128)
        if amp.shape != (self.grid.samples,):
            raise DomainError(f"amplitude has shape {amp.shape}, grid has {self.grid.samples} samples")
        power = amp.real**2 + amp.imag**2
        amp.setflags(write=False)
        power.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "power", power)

    @property
    def k(self) -> np.ndarray:
        return self.grid.values()


def nudft(measure: PointMeasure, grid: KGrid) -> Spectrum:
    """Scattering amplitude sum_n w_n exp(-2 pi i k x_n) on every grid sample."""
    if len(measure) == 0:  # pragma: no cover - PointMeasure forbids it
        raise EmptyRequestError("empty measure")
    amp = nudft_kernel(measure.positions, measure.weights, grid.values())
    return Spectrum(grid, amp, source_label=measure.label, atom_count=len(measure))


def dirichlet_power(L: int, k):
    """Closed-form power sin^2(pi k L) / sin^2(pi k) of the L-atom integer lattice.

    Evaluated as L^2 (sinc(L d) / sinc(d))^2 with d the offset of k from the
    nearest integer, which has the L^2 limit at integer k built in.
    """
    if int(L) != L or L < 1:
        raise DomainError(f"L must be a positive integer, got {L}")
    k = np.asarray(k, dtype=np.float64)
    d = k - np.rint(k)
    out = float(L) ** 2 * (np.sinc(L * d) / np.sinc(d)) ** 2
    return float(out) if out.ndim == 0 else out


def power_series(spectrum: Spectrum) -> tuple[np.ndarray, np.ndarray]:
    """(k, power) columns, k ascending."""
    return spectrum.k, np.array(spectrum.power)


def running_median(values: np.ndarray, window: int) -> np.ndarray:
    """Centered running median; the window shrinks one-sidedly at the edges."""
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    half = window // 2
    out = np.empty(n)
    if n >= window:
        out[half : n - half] = np.median(sliding_window_view(v, window), axis=1)
        edge = range(half)
    else:  # pragma: no cover - guarded by detrend
        edge = range(n)
    for i in edge:
        out[i] = np.median(v[: i + half + 1])
        j = n - 1 - i
        out[j] = np.median(v[j - half :])
    return out


class Detrended(NamedTuple):
    k: np.ndarray
    power: np.ndarray
    baseline: np.ndarray
    residual: np.ndarray


def detrend(k, power, window_samples: int = 101) -> Detrended:
    """Split power into a running-median baseline and a residual clamped at 0."""
    k = np.asarray(k, dtype=np.float64)
    p = np.asarray(power, dtype=np.float64)
    if k.shape != p.shape or p.ndim != 1:
        raise DomainError("k and power must be 1-d arrays of equal length")
    if int(window_samples) != window_samples or window_samples < 3 or window_samples % 2 == 0:
        raise DomainError(f"window must be an odd integer >= 3, got {window_samples}")
    if window_samples > p.size:
        raise DomainError(f"window {window_samples} exceeds series length {p.size}")
    base = running_median(p, int(window_samples))
    resid = np.clip(p - base, 0.0, None)
    return Detrended(k, p, base, resid)


def resonance_power(power, baseline, pad: int | None = None) -> np.ndarray:
    """Resonance power of narrow features riding on a smooth background.

    In a truncated sum the resonance amplitude Z(k) interferes with the smooth
    boundary term S(k), so ``power - baseline`` is dominated by the cross term
    2 Re(S Z*) whose phase shifts maxima by up to a half-width. The cross term
    has a one-sided spectrum in k, so its analytic-signal envelope is
    2 |S| |Z|; dividing by 2 sqrt(baseline) ~ 2 |S| leaves |Z|, returned squared.

    The residual is mirrored at both ends before the FFT-based Hilbert
    transform to keep wrap-around artifacts away from the interior.
    """
    p = np.asarray(power, dtype=np.float64)
    b = np.asarray(baseline, dtype=np.float64)
    if p.shape != b.shape or p.ndim != 1:
        raise DomainError("power and baseline must be 1-d arrays of equal length")
    n = p.size
    bmax = float(np.max(b)) if n else 0.0
    scale = 2.0 * np.sqrt(np.maximum(b, 1e-12 * bmax)) if bmax > 0 else np.ones(n)
    # normalize first so a slowly varying |S| does not leak into the envelope
    r = (p - b) / scale
    if pad is None:
        pad = n - 1
    pad = min(int(pad), n - 1)
    padded = np.concatenate((r[pad:0:-1], r, r[-2 : -pad - 2 : -1])) if pad > 0 else r
    env = np.abs(hilbert(padded))[pad : pad + n]
    return env**2


def lorentzian_model(k, center: float, beta: float, scale: float):
    """scale / (beta^2 + 4 pi^2 (k - center)^2); peak scale/beta^2, HWHM beta/(2 pi)."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    k = np.asarray(k, dtype=np.float64)
    out = scale / (beta * beta + 4.0 * np.pi**2 * (k - center) ** 2)
    return float(out) if out.ndim == 0 else out
