"""
One-dimensional delta-function potentials as finite weighted point measures.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyRequestError
from .numtheory import primes_first

__all__ = [
    "WeightScheme",
    "PointMeasure",
    "integer_lattice",
    "prime_lattice",
    "chi_lattice",
    "shifted_prime_lattice",
    "emit_positions",
    "write_positions_csv",
    "density_profile",
]


class WeightScheme(enum.Enum):
    UNIFORM = "uniform"
    INV_SQRT = "inv-sqrt"
    GUINAND_WEIL = "guinand-weil"

    @classmethod
    def parse(cls, text: str) -> "WeightScheme":
        key = text.strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown weight scheme {text!r}; expected one of {[m.value for m in cls]}")

    def weights(self, primes: np.ndarray) -> np.ndarray:
        p = np.asarray(primes, dtype=np.float64)
        if self is WeightScheme.UNIFORM:
            return np.ones_like(p)
        if self is WeightScheme.INV_SQRT:
            return 1.0 / np.sqrt(p)
        return np.log(p) / np.sqrt(p)


@dataclass(frozen=True)
class PointMeasure:
    """Finite sum of weighted delta functions, ``sum_n w_n delta(x - x_n)``.

    Arrays are copied and frozen on construction.
    """

    positions: np.ndarray
    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64)
        w = np.array(self.weights, dtype=np.float64)
        if pos.ndim != 1 or w.ndim != 1:
            raise DomainError("positions and weights must be one-dimensional")
        if pos.size != w.size:
            raise DomainError(f"length mismatch: {pos.size} positions, {w.size} weights")
        if pos.size == 0:
            raise EmptyRequestError("a point measure needs at least one atom")
        if not np.all(np.isfinite(pos)):
            raise DomainError("positions must be finite")
        if np.any(np.diff(pos) <= 0):
            raise DomainError("positions must be strictly increasing")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("weights must be finite and positive")
        pos.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.positions.size)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    @property
    def extent(self) -> float:
        return float(self.positions[-1] - self.positions[0])


def _check_size(n: int, name: str) -> int:
    if int(n) != n:
        raise DomainError(f"{name} must be an integer, got {n}")
    n = int(n)
    if n == 0:
        raise EmptyRequestError(f"{name} must be at least 1")
    if n < 0:
        raise DomainError(f"{name} must be positive, got {n}")
    return n


def integer_lattice(L: int) -> PointMeasure:
    L = _check_size(L, "L")
    return PointMeasure(np.arange(L, dtype=np.float64), np.ones(L), label=f"integer(L={L})")


def prime_lattice(L_chi: int) -> PointMeasure:
    L_chi = _check_size(L_chi, "L_chi")
    p = primes_first(L_chi).values
    return PointMeasure(p.astype(np.float64), np.ones(L_chi), label=f"prime(L={L_chi})")


def chi_lattice(L_chi: int, scheme: WeightScheme = WeightScheme.UNIFORM) -> PointMeasure:
    """Atoms at log p_n for the first ``L_chi`` primes."""
    L_chi = _check_size(L_chi, "L_chi")
    p = primes_first(L_chi).values
    return PointMeasure(np.log(p.astype(np.float64)), scheme.weights(p), label=f"chi(L={L_chi},{scheme.value})")


def shifted_prime_lattice(L_chi: int) -> PointMeasure:
    """Atoms at p_n / pi(p_n) = p_n / n, sorted ascending.

    The map is not monotone for small n (2/1 > 3/2), so positions are sorted;
    exact coincidences would merge atoms and are rejected.
    """
    L_chi = _check_size(L_chi, "L_chi")
    p = primes_first(L_chi).values.astype(np.float64)
    n = np.arange(1, L_chi + 1, dtype=np.float64)
    pos = np.sort(p / n)
    if np.any(np.diff(pos) == 0):
        raise DomainError("shifted positions contain exact duplicates")
    return PointMeasure(pos, np.ones(L_chi), label=f"shifted-prime(L={L_chi})")


def emit_positions(measure: PointMeasure) -> list[tuple[int, float, float]]:
    return [(i, float(x), float(w)) for i, (x, w) in enumerate(zip(measure.positions, measure.weights))]


def write_positions_csv(measure: PointMeasure, stream: io.TextIOBase | None = None) -> str:
    """CSV ``index,position,weight`` at 17 significant digits.

    Writes to ``stream`` if given and returns the text either way.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "position", "weight"])
    for i, x, w in emit_positions(measure):
        writer.writerow([i, f"{x:.17g}", f"{w:.17g}"])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def density_profile(measure: PointMeasure, bin_width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Atoms per unit length in consecutive bins; returns (bin centers, density).

    For the log-prime lattice the density grows roughly like e^u / u, so this
    is a diagnostic rather than a check of constant density.
    """
    if bin_width <= 0:
        raise DomainError("bin_width must be positive")
    lo = measure.positions[0]
    nbins = max(1, int(np.ceil((measure.positions[-1] - lo) / bin_width + 1e-12)))
    edges = lo + bin_width * np.arange(nbins + 1)
    counts, _ = np.histogram(measure.positions, bins=edges)
    return 0.5 * (edges[:-1] + edges[1:]), counts / bin_width
