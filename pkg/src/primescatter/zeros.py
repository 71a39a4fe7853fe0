"""
Zeta-zero tables and the truncated von Mangoldt explicit formula.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DomainError, EmptyRequestError, ParseError

__all__ = ["ZeroTable", "load_zero_table", "bundled_zeros", "zero_to_k", "psi_explicit", "psi_smooth_part"]

BUNDLED_NAME = "zeros100.txt"


@dataclass(frozen=True)
class ZeroTable:
    """Ordinates gamma_m of non-trivial zeros, ascending."""

    gammas: np.ndarray
    source: str = ""

    def __post_init__(self):
        g = np.array(self.gammas, dtype=np.float64)
        if g.ndim != 1 or g.size == 0:
            raise EmptyRequestError("zero table is empty")
        if not np.all(np.isfinite(g)) or np.any(g <= 14.0):
            raise DomainError("zero ordinates must be finite and exceed 14")
        if np.any(np.diff(g) <= 1e-6):
            raise DomainError("zero ordinates must be strictly increasing (no duplicates within 1e-6)")
        g.setflags(write=False)
        object.__setattr__(self, "gammas", g)

    def __len__(self) -> int:
        return int(self.gammas.size)

    @property
    def k_positions(self) -> np.ndarray:
        return self.gammas / (2.0 * np.pi)

    def within(self, k_min: float, k_max: float) -> np.ndarray:
        """Ordinates whose k = gamma/2pi lies in [k_min, k_max]."""
        k = self.k_positions
        return self.gammas[(k >= k_min) & (k <= k_max)]

    def head(self, count: int) -> "ZeroTable":
        return ZeroTable(self.gammas[:count], source=self.source)


def load_zero_table(source: str | Iterable[str] | io.TextIOBase, provenance: str = "") -> ZeroTable:
    """Parse one ordinate per line; blank lines and ``#`` comments are skipped."""
    lines = source.splitlines() if isinstance(source, str) else source
    values: list[float] = []
    prev = -math.inf
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = float(line)
        except ValueError:
            raise ParseError(f"not a number: {line!r}", lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"not a finite number: {line!r}", lineno)
        if v <= prev:
            raise ParseError(f"ordinates must be strictly increasing ({v} after {prev})", lineno)
        values.append(v)
        prev = v
    if not values:
        raise EmptyRequestError("zero table contains no ordinates")
    return ZeroTable(np.array(values), source=provenance)


def bundled_zeros() -> ZeroTable:
    """First 100 ordinates shipped with the package (mpmath, 6 decimals)."""
    text = resources.files("primescatter.data").joinpath(BUNDLED_NAME).read_text()
    return load_zero_table(text, provenance=f"bundled:{BUNDLED_NAME}")


def read_zero_file(path: str | Path) -> ZeroTable:
    with open(path) as fh:
        return load_zero_table(fh, provenance=str(path))


def zero_to_k(gamma):
    g = np.asarray(gamma, dtype=np.float64)
    if np.any(g <= 0):
        raise DomainError("gamma must be positive")
    out = g / (2.0 * np.pi)
    return float(out) if out.ndim == 0 else out


def psi_smooth_part(x: float) -> float:
    """x - log(2 pi) - log(1 - x^-2) / 2."""
    if not x > 1:
        raise DomainError(f"x must exceed 1, got {x}")
    return x - math.log(2.0 * math.pi) - 0.5 * math.log1p(-(x**-2.0))


def psi_explicit(x: float, zeros: ZeroTable, count: int) -> float:
    """Chebyshev psi(x) from the first ``count`` zeros on the critical line.

    Each conjugate pair rho, conj(rho) contributes 2 Re(x^rho / rho).
    """
    if not x > 1 or not math.isfinite(x):
        raise DomainError(f"x must be finite and exceed 1, got {x}")
    if count < 0 or count > len(zeros):
        raise DomainError(f"count must lie in [0, {len(zeros)}], got {count}")
    smooth = psi_smooth_part(x)
    if count == 0:
        return smooth
    rho = 0.5 + 1j * zeros.gammas[:count]
    terms = np.exp(rho * math.log(x)) / rho
    return smooth - 2.0 * math.fsum(terms.real.tolist())
