"""
Peak detection, Lorentzian refinement, zero matching and lattice-size sweeps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import peak_prominences

from .errors import DomainError, FitError
from .lattice import WeightScheme, chi_lattice
from .spectrum import KGrid, detrend, nudft, resonance_power
from .zeros import ZeroTable

__all__ = [
    "Peak",
    "find_peaks",
    "fit_lorentzian",
    "MatchResult",
    "match_zeros",
    "PipelineConfig",
    "PipelineResult",
    "analyze_power",
    "SweepReport",
    "growth_sweep",
    "loglog_slope",
]


@dataclass(frozen=True)
class Peak:
    center_k: float
    height: float
    hwhm: float
    prominence: float
    matched_gamma: float | None = None
    match_error_k: float | None = None
    fit_residual: float | None = None

    def __post_init__(self):
        if not self.hwhm > 0:
            raise DomainError(f"hwhm must be positive, got {self.hwhm}")
        if not self.height > 0:
            raise DomainError(f"height must be positive, got {self.height}")
        if self.prominence > self.height:
            raise DomainError("prominence cannot exceed height")

    @property
    def matched(self) -> bool:
        return self.matched_gamma is not None


def _as_series(k, power):
    k = np.asarray(k, dtype=np.float64)
    y = np.asarray(power, dtype=np.float64)
    if k.ndim != 1 or k.shape != y.shape:
        raise DomainError("k and power must be 1-d arrays of equal length")
    return k, y


def _half_width(k, y, i, half):
    """Half width at ``half`` around sample i, by linear interpolation."""
    n = y.size
    sides = []
    j = i
    while j > 0 and y[j] > half:
        j -= 1
    if y[j] <= half:
        kl = k[j] + (half - y[j]) * (k[j + 1] - k[j]) / (y[j + 1] - y[j])
        sides.append(k[i] - kl)
    j = i
    while j < n - 1 and y[j] > half:
        j += 1
    if y[j] <= half:
        kr = k[j - 1] + (y[j - 1] - half) * (k[j] - k[j - 1]) / (y[j - 1] - y[j])
        sides.append(kr - k[i])
    if sides:
        return max(float(np.mean(sides)), 1e-12)
    return float(max(k[i] - k[0], k[-1] - k[i]))


def find_peaks(k, power, min_prominence: float, min_separation_k: float) -> list[Peak]:
    """Strict local maxima passing a prominence threshold, tallest first.

    Of two maxima closer than ``min_separation_k`` only the taller is kept.
    Centers and heights are refined by a parabola through the three samples
    around each maximum.
    """
    k, y = _as_series(k, power)
    if y.size < 3:
        raise DomainError(f"series needs at least 3 samples, got {y.size}")
    if not min_prominence > 0 or not min_separation_k > 0:
        raise DomainError("min_prominence and min_separation_k must be positive")
    idx = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])) + 1
    idx = idx[y[idx] > 0]
    if idx.size == 0:
        return []
    prom = peak_prominences(y, idx)[0]
    keep = prom >= min_prominence
    idx, prom = idx[keep], prom[keep]

    # tallest first; stable sort keeps ties in k order
    order = np.argsort(-y[idx], kind="stable")
    accepted: list[int] = []
    for o in order:
        kc = k[idx[o]]
        if all(abs(kc - k[idx[a]]) >= min_separation_k for a in accepted):
            accepted.append(int(o))

    peaks = []
    for o in accepted:
        i = int(idx[o])
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = y0 - 2.0 * y1 + y2
        delta = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        center = k[i] + delta * (k[i + 1] - k[i])
        height = y1 - 0.25 * (y0 - y2) * delta
        hwhm = _half_width(k, y, i, 0.5 * height)
        peaks.append(Peak(float(center), float(height), hwhm, float(min(prom[o], height))))
    peaks.sort(key=lambda p: -p.height)
    return peaks


def fit_lorentzian(k, power, seed: Peak, window_k: float, max_nfev: int = 400) -> Peak:
    """Least-squares Lorentzian scale / (beta^2 + 4 pi^2 (k - c)^2) around ``seed``.

    Fits samples with |k - seed.center_k| <= window_k. Raises FitError (with the
    seed attached) when the window holds no interior maximum or the solver
    fails to converge.
    """
    k, y = _as_series(k, power)
    if not window_k > 0:
        raise DomainError("window_k must be positive")
    sel = np.abs(k - seed.center_k) <= window_k
    kw, yw = k[sel], y[sel]
    if kw.size < 7:
        raise DomainError(f"fit window holds {kw.size} samples, need at least 7")
    imax = int(np.argmax(yw))
    if imax == 0 or imax == kw.size - 1:
        raise FitError("no interior maximum in fit window", seed)
    ymax = float(yw[imax])
    if not ymax > 0:
        raise FitError("fit window has no positive data", seed)
    yn = yw / ymax

    beta0 = 2.0 * math.pi * seed.hwhm
    c0 = float(kw[imax])
    # parameters: center, log beta, log scale (scale in normalized units)
    x0 = np.array([c0, math.log(beta0), math.log(beta0 * beta0)])

    def resid(p):
        c, lb, ls = p
        b = math.exp(lb)
        return math.exp(ls) / (b * b + 4.0 * math.pi**2 * (kw - c) ** 2) - yn

    lo = np.array([kw[0], -30.0, -80.0])
    hi = np.array([kw[-1], 10.0, 30.0])
    try:
        sol = least_squares(resid, x0, bounds=(lo, hi), method="trf", x_scale="jac", max_nfev=max_nfev)
    except (ValueError, FloatingPointError) as exc:  # pragma: no cover - defensive
        raise FitError(f"least squares failed: {exc}", seed) from exc
    if sol.status <= 0 or not np.all(np.isfinite(sol.x)):
        raise FitError(f"fit did not converge: {sol.message}", seed)
    c, lb, ls = sol.x
    beta = math.exp(lb)
    scale = math.exp(ls) * ymax
    if not (kw[0] < c < kw[-1]):
        raise FitError("fitted center left the window", seed)
    height = scale / beta**2
    rms = float(np.sqrt(np.mean(sol.fun**2))) * ymax
    return replace(
        seed,
        center_k=float(c),
        height=float(height),
        hwhm=float(beta / (2.0 * math.pi)),
        prominence=float(min(seed.prominence, height)),
        fit_residual=rms,
    )


@dataclass
class MatchResult:
    peaks: list[Peak]
    matched: int
    spurious: int
    missed: int
    missed_gammas: list[float] = field(default_factory=list)


def match_zeros(peaks: list[Peak], zeros: ZeroTable, tolerance_k: float, k_range: tuple[float, float] | None = None) -> MatchResult:
    """Greedy matching, tallest peak first, each to the nearest free gamma/2pi.

    Returns peaks in their input order, annotated. ``missed`` counts zeros
    inside ``k_range`` (the whole table if None) that no peak claimed.
    """
    if not tolerance_k > 0:
        raise DomainError("tolerance_k must be positive")
    kz = zeros.k_positions
    taken = np.zeros(kz.size, dtype=bool)
    out: list[Peak] = [replace(p, matched_gamma=None, match_error_k=None) for p in peaks]
    order = sorted(range(len(peaks)), key=lambda i: -peaks[i].height)
    for i in order:
        c = peaks[i].center_k
        dist = np.abs(kz - c)
        dist[taken] = np.inf
        j = int(np.argmin(dist))
        if dist[j] <= tolerance_k:
            taken[j] = True
            out[i] = replace(out[i], matched_gamma=float(zeros.gammas[j]), match_error_k=float(c - kz[j]))
    if k_range is None:
        in_range = np.ones(kz.size, dtype=bool)
    else:
        in_range = (kz >= k_range[0]) & (kz <= k_range[1])
    missed = in_range & ~taken
    matched = int(taken.sum())
    return MatchResult(out, matched, len(peaks) - matched, int(missed.sum()), zeros.gammas[missed].tolist())


@dataclass(frozen=True)
class PipelineConfig:
    """Settings for detrend -> resonance -> peaks -> Lorentzian -> match.

    ``rel_prominence`` is a fraction of the tallest sample of the analyzed
    series. ``mode`` picks the analyzed series: "resonance" (analytic envelope
    of the detrended power, normalized by the baseline) or "residual" (the
    clamped detrended power as is).
    """

    window_samples: int = 101
    rel_prominence: float = 0.02
    min_separation_k: float = 0.2
    tolerance_k: float = 0.05
    fit: bool = True
    fit_window_hwhm: float = 2.0
    mode: str = "resonance"

    def __post_init__(self):
        if self.mode not in ("resonance", "residual"):
            raise DomainError(f"mode must be 'resonance' or 'residual', got {self.mode!r}")
        if not 0 < self.rel_prominence < 1:
            raise DomainError("rel_prominence must lie in (0, 1)")
        if not self.min_separation_k > 0 or not self.tolerance_k > 0 or not self.fit_window_hwhm > 0:
            raise DomainError("separation, tolerance and fit window must be positive")


@dataclass
class PipelineResult:
    k: np.ndarray
    power: np.ndarray
    baseline: np.ndarray
    residual: np.ndarray
    analyzed: np.ndarray
    peaks: list[Peak]
    fit_failures: int
    match: MatchResult | None = None


def analyze_power(k, power, config: PipelineConfig = PipelineConfig(), zeros: ZeroTable | None = None) -> PipelineResult:
    k, y = _as_series(k, power)
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(k))):
        raise FloatingPointError("spectrum contains non-finite values")
    det = detrend(k, y, config.window_samples)
    if config.mode == "resonance":
        series = resonance_power(y, det.baseline)
    else:
        series = det.residual
    top = float(np.max(series)) if series.size else 0.0
    peaks: list[Peak] = []
    failures = 0
    if top > 0:
        dk = k[1] - k[0]
        for seed in find_peaks(k, series, config.rel_prominence * top, config.min_separation_k):
            if config.fit:
                window = max(config.fit_window_hwhm * seed.hwhm, 3.5 * dk)
                try:
                    seed = fit_lorentzian(k, series, seed, window)
                except FitError:
                    failures += 1
            peaks.append(seed)
        peaks.sort(key=lambda p: -p.height)
    match = None
    if zeros is not None:
        match = match_zeros(peaks, zeros, config.tolerance_k, (float(k[0]), float(k[-1])))
        peaks = match.peaks
    return PipelineResult(k, y, det.baseline, det.residual, series, peaks, failures, match)


def loglog_slope(x, y) -> tuple[float, float]:
    """OLS slope of log y against log x and the RMS residual."""
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.asarray(y, dtype=np.float64))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    r = ly - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(r**2)))


@dataclass
class SweepReport:
    lattice_sizes: list[int]
    scheme: str
    zeros_tracked: list[float]
    position_ranges: list[float]
    trajectories: dict[float, list[tuple[int, float, float]]]
    growth_exponents: dict[float, float | None]
    growth_residuals: dict[float, float | None]
    width_exponents: dict[float, float | None]
    width_scaling_exponent: float | None
    width_scaling_residual: float | None
    never_matched: list[float]
    baseline_median: list[float]
    detrend_windows: list[int] = field(default_factory=list)

    @property
    def growth_spread(self) -> float | None:
        vals = [v for g, v in self.growth_exponents.items() if v is not None and g in self.zeros_tracked[:5]]
        return max(vals) - min(vals) if len(vals) >= 2 else None

    def to_json(self) -> dict:
        def key(g):
            return f"{g:.6f}"

        return {
            "sizes": self.lattice_sizes,
            "scheme": self.scheme,
            "zeros_tracked": self.zeros_tracked,
            "position_ranges": self.position_ranges,
            "trajectories": {key(g): [{"L": L, "height": h, "hwhm": w} for L, h, w in t] for g, t in self.trajectories.items()},
            "growth_exponents": {key(g): v for g, v in self.growth_exponents.items()},
            "width_exponents": {key(g): v for g, v in self.width_exponents.items()},
            "width_scaling_exponent": self.width_scaling_exponent,
            "growth_spread_first5": self.growth_spread,
            "residuals": {
                "growth": {key(g): v for g, v in self.growth_residuals.items()},
                "width_scaling": self.width_scaling_residual,
            },
            "never_matched": self.never_matched,
            "baseline_median": self.baseline_median,
            "detrend_windows": self.detrend_windows,
        }


def growth_sweep(
    sizes,
    scheme: WeightScheme,
    grid: KGrid,
    zeros: ZeroTable,
    tolerance_k: float = 0.05,
    config: PipelineConfig | None = None,
    window_scale: float | None = 2.0,
) -> SweepReport:
    """Run the peak pipeline on chi lattices of increasing size.

    Per-zero growth exponents are slopes of log height vs log L_chi; the width
    scaling exponent is a common slope of log hwhm vs log(log p_L) with a
    separate intercept per zero. Zeros matched at fewer than 3 sizes stay out
    of the fits.

    Peak widths shrink like 1/log p_L, so by default the detrend window
    follows them: ``window_scale / log p_L`` in k, rounded to an odd sample
    count. Pass ``window_scale=None`` to keep ``config.window_samples`` at
    every size.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 3:
        raise DomainError("a sweep needs at least 3 lattice sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] < 1:
        raise DomainError("sizes must be strictly ascending positive integers")
    first5 = zeros.k_positions[:5]
    if first5.size < 5 or grid.k_min > first5[0] or grid.k_max < first5[-1]:
        raise DomainError("grid must cover the k-positions of the first 5 zeros")
    if window_scale is not None and not window_scale > 0:
        raise DomainError("window_scale must be positive")
    cfg = replace(config or PipelineConfig(), tolerance_k=tolerance_k)
    tracked = zeros.within(grid.k_min, grid.k_max).tolist()
    traj: dict[float, list[tuple[int, float, float]]] = {g: [] for g in tracked}
    ranges = []
    baselines = []
    windows = []
    for L in sizes:
        measure = chi_lattice(L, scheme)
        ranges.append(float(measure.positions[-1]))
        spec = nudft(measure, grid)
        run_cfg = cfg
        if window_scale is not None:
            w = max(3, int(round(window_scale / ranges[-1] / grid.spacing)) | 1)
            run_cfg = replace(cfg, window_samples=w)
        windows.append(run_cfg.window_samples)
        res = analyze_power(spec.k, spec.power, run_cfg, zeros)
        baselines.append(float(np.median(res.baseline)))
        for p in res.peaks:
            if p.matched_gamma in traj:
                traj[p.matched_gamma].append((L, p.height, p.hwhm))

    growth, gres, widths = {}, {}, {}
    pooled_x, pooled_y = [], []
    for g, t in traj.items():
        if len(t) >= 3:
            Ls = [row[0] for row in t]
            growth[g], gres[g] = loglog_slope(Ls, [row[1] for row in t])
            rng = [ranges[sizes.index(L)] for L in Ls]
            widths[g], _ = loglog_slope(rng, [row[2] for row in t])
            lx = np.log(rng)
            ly = np.log([row[2] for row in t])
            pooled_x.append(lx - lx.mean())
            pooled_y.append(ly - ly.mean())
        else:
            growth[g] = gres[g] = widths[g] = None
    if pooled_x:
        x = np.concatenate(pooled_x)
        y = np.concatenate(pooled_y)
        slope = float(np.dot(x, y) / np.dot(x, x))
        wres = float(np.sqrt(np.mean((y - slope * x) ** 2)))
    else:
        slope = wres = None
    never = [g for g, t in traj.items() if not t]
    return SweepReport(
        lattice_sizes=sizes,
        scheme=scheme.value,
        zeros_tracked=tracked,
        position_ranges=ranges,
        trajectories=traj,
        growth_exponents=growth,
        growth_residuals=gres,
        width_exponents=widths,
        width_scaling_exponent=slope,
        width_scaling_residual=wres,
        never_matched=never,
        baseline_median=baselines,
        detrend_windows=windows,
    )
