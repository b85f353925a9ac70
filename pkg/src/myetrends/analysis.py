"""Filtered trends, cross-period compatibility, and comparison bias.

This module applies designed filter families to series data and quantifies
the three ways an analyst might compare estimates of different window
lengths:

``inapt``
    Region A's single-year value against region B's longer-window value at
    the same end year. An averaging window lags a moving signal (a k-year
    window delays a line by (k-1)/2 years), so this comparison is biased
    whenever the underlying signal trends.
``untimely``
    Both regions' equal-length windows at the same end year. The delay is
    shared, so equal trends cancel, but the comparison describes an earlier
    effective date than its end year suggests.
``proper``
    Both sides filtered with a designed family, so each side estimates the
    *same* present-day trend value and polynomial trends produce no bias at
    all.

Also here: the noise-to-signal ratio (NSR) diagnostic comparing a k-year
estimate against the k-year average of single-year estimates, its summary
``C`` (the max absolute NSR over time), analytic expected comparison bias
under a polynomial trend, and a seeded Monte Carlo that measures bias and
noise inflation empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import ndtri

from .exceptions import DomainError, MissingDataError
from .filterdesign import DesignSpec, FilterSet
from .myeseries import IMPUTED, MyeSeries, RegionPair, render_value, sma_of_base
from .ratpoly import RatPoly

__all__ = [
    "MODES",
    "TrendEstimates",
    "CompatibilityEntry",
    "CompatibilityReport",
    "ComparisonSpec",
    "ComparisonResult",
    "SimulationSpec",
    "SimulationSummary",
    "apply_filter",
    "trend_estimates",
    "nsr",
    "compatibility",
    "compare",
    "expected_bias",
    "simulate_bias",
    "synthetic_series",
]

MODES = ("inapt", "untimely", "proper")

TrendCoefficients = Sequence[Union[int, str, float, Fraction]]


# ---------------------------------------------------------------------------
# filter application and trend estimates


def apply_filter(weights: RatPoly, series: MyeSeries, period: int, t: int) -> float:
    """Weighted average of ``series``' ``period``-length values ending at ``t``.

    The coefficient on ``z**j`` weights the observation ending ``j`` years
    before ``t``. Weights are floated once and the dot product is summed
    exactly (``math.fsum``) before the final rounding.

    Raises
    ------
    MissingDataError
        Listing every absent ``(period, year)`` the window needs.
    """
    n = weights.degree + 1
    missing = [(period, t - j) for j in range(n) if not series.has(period, t - j)]
    if missing:
        raise MissingDataError(
            f"{series.name}: filter window needs missing observations {missing}"
        )
    ws = weights.as_floats()
    return math.fsum(w * series.value(period, t - j) for j, w in enumerate(ws))


@dataclass(frozen=True)
class TrendEstimates:
    """Filtered trend values for one end year, one value per period."""

    at: int
    values: dict[int, float]
    design: DesignSpec

    def to_dict(self) -> dict:
        return {
            "at": self.at,
            "periods": list(self.design.periods),
            "degree": self.design.degree,
            "values": {str(k): v for k, v in sorted(self.values.items())},
        }


def trend_estimates(
    series: MyeSeries,
    fs: FilterSet,
    t0: int,
    periods: Optional[Iterable[int]] = None,
) -> TrendEstimates:
    """Apply each period's filter to its own sub-series, all ending at ``t0``.

    By the design identity, every period's result estimates the same
    present-day trend value, so the returned values are directly
    comparable. ``periods`` restricts to a subset of the family (default:
    every period in the design).
    """
    ks = tuple(periods) if periods is not None else fs.spec.periods
    for k in ks:
        if k not in fs.psi:
            raise ValueError(f"filter set {fs.spec} has no period {k}")
    values = {k: apply_filter(fs.psi[k], series, k, t0) for k in ks}
    return TrendEstimates(at=t0, values=values, design=fs.spec)


# ---------------------------------------------------------------------------
# NSR and compatibility


def _log_for_base(log_base) -> Callable[[float], float]:
    if log_base in (10, "10"):
        return math.log10
    if log_base in ("e", math.e):
        return math.log
    raise ValueError(f"log_base must be 10 or 'e', got {log_base!r}")


def nsr(series: MyeSeries, period: int, t: int, log_base=10) -> float:
    """Log ratio of the ``period``-length value to the matching 1y average.

    If a k-year estimate behaved exactly like the k-year average of the
    single-year estimates, this would be zero. Base-10 logs by default;
    pass ``log_base="e"`` for natural logs.

    Raises
    ------
    MissingDataError
        If the k-year value or part of the 1y window is absent.
    DomainError
        If either quantity is not strictly positive.
    """
    log = _log_for_base(log_base)
    y = series.value(period, t)
    base_mean = sma_of_base(series, period, t)
    if y <= 0:
        raise DomainError(f"{series.name}: {period}y value ending {t} is {y}, not positive")
    if base_mean <= 0:
        raise DomainError(
            f"{series.name}: 1y window mean ending {t} is {base_mean}, not positive"
        )
    return log(y) - log(base_mean)


@dataclass(frozen=True)
class CompatibilityEntry:
    """NSR by end year for one period, and the max absolute value."""

    nsr: dict[int, float]
    c: float


@dataclass(frozen=True)
class CompatibilityReport:
    """Cross-period compatibility diagnostics for one series."""

    series: str
    log_base: str
    include_imputed: bool
    entries: dict[int, CompatibilityEntry]

    def c(self, period: int) -> float:
        return self.entries[period].c

    def to_dict(self) -> dict:
        return {
            "series": self.series,
            "log_base": self.log_base,
            "include_imputed": self.include_imputed,
            "periods": {
                str(k): {
                    "c": e.c,
                    "nsr": {str(t): v for t, v in sorted(e.nsr.items())},
                }
                for k, e in sorted(self.entries.items())
            },
        }


def compatibility(
    series: MyeSeries,
    periods: Iterable[int],
    log_base=10,
    include_imputed: bool = True,
) -> CompatibilityReport:
    """NSR across all usable end years, and ``C = max |NSR|``, per period.

    An end year is usable when the k-year value and the full k-long window
    of 1y values all exist. With ``include_imputed=False``, years whose
    k-year value or 1y window touches an imputed observation are dropped;
    the default keeps them, treating forecast extensions as data.

    Raises
    ------
    MissingDataError
        If a requested period has no usable end years.
    """
    _log_for_base(log_base)
    entries: dict[int, CompatibilityEntry] = {}
    for k in sorted(set(periods)):
        if k < 1:
            raise ValueError(f"period must be >= 1, got {k}")
        table: dict[int, float] = {}
        for t in series.years(k):
            window = range(t - k + 1, t + 1)
            if not all(series.has(1, yr) for yr in window):
                continue
            if not include_imputed:
                touched = [series.provenance(k, t)] + [
                    series.provenance(1, yr) for yr in window
                ]
                if IMPUTED in touched:
                    continue
            table[t] = nsr(series, k, t, log_base)
        if not table:
            raise MissingDataError(
                f"{series.name}: no end year has both a {k}y value and "
                f"a complete 1y window"
            )
        entries[k] = CompatibilityEntry(
            nsr=table, c=max(abs(v) for v in table.values())
        )
    return CompatibilityReport(
        series=series.name,
        log_base="e" if log_base in ("e", math.e) else "10",
        include_imputed=include_imputed,
        entries=entries,
    )


# ---------------------------------------------------------------------------
# comparisons


@dataclass(frozen=True)
class ComparisonSpec:
    """What to compare: mode, end year, and the period for each side.

    ``reference_period`` belongs to region A (the denominator side),
    ``other_period`` to region B. Mode rules: inapt fixes the reference at
    1 and needs a longer other period; untimely needs both periods equal
    and above 1; proper accepts any pair present in the filter design.
    """

    mode: str
    t0: int
    reference_period: int = 1
    other_period: int = 3

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        for label, k in (
            ("reference_period", self.reference_period),
            ("other_period", self.other_period),
        ):
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise ValueError(f"{label} must be an integer >= 1, got {k!r}")
        if not isinstance(self.t0, int) or isinstance(self.t0, bool):
            raise ValueError(f"t0 must be an integer year, got {self.t0!r}")
        if self.mode == "inapt":
            if self.reference_period != 1:
                raise ValueError("inapt comparisons fix reference_period = 1")
            if self.other_period == 1:
                raise ValueError("inapt comparisons need other_period > 1")
        elif self.mode == "untimely":
            if self.reference_period != self.other_period:
                raise ValueError(
                    "untimely comparisons use the same period on both sides; "
                    f"got {self.reference_period} and {self.other_period}"
                )
            if self.other_period == 1:
                raise ValueError("untimely comparisons need periods > 1")


@dataclass(frozen=True)
class ComparisonResult:
    """Two compared values and their relative discrepancy ``b/a - 1``."""

    spec: ComparisonSpec
    value_a: float
    value_b: float
    discrepancy: float
    reference_period_used: int
    other_period_used: int

    def percent(self, decimals: int = 1) -> str:
        """Discrepancy as a percentage string, e.g. ``"-13.7"``."""
        return render_value(100.0 * self.discrepancy, decimals)

    def to_dict(self) -> dict:
        return {
            "mode": self.spec.mode,
            "t0": self.spec.t0,
            "reference_period": self.reference_period_used,
            "other_period": self.other_period_used,
            "value_a": self.value_a,
            "value_b": self.value_b,
            "discrepancy": self.discrepancy,
            "percent": self.percent(),
        }


def _resolve_reference_period(series: MyeSeries, wanted: int, fs: FilterSet) -> int:
    """Reference side of a proper comparison: the wanted period if the region
    publishes it, else the shortest designed period the region does have."""
    available = set(series.periods())
    if wanted in available and wanted in fs.psi:
        return wanted
    for k in fs.spec.periods:
        if k in available:
            return k
    raise MissingDataError(
        f"{series.name}: none of the designed periods {list(fs.spec.periods)} "
        f"have observations"
    )


def compare(
    pair: RegionPair, spec: ComparisonSpec, fs: Optional[FilterSet] = None
) -> ComparisonResult:
    """Carry out one comparison between two regions.

    Inapt and untimely modes read raw observations at ``spec.t0``. Proper
    mode filters both sides with ``fs`` (required): region A with its
    reference period's filter, falling back to the shortest period A
    actually has; region B with the other period's filter.

    Raises
    ------
    MissingDataError
        A needed observation or filter window is absent.
    DomainError
        Region A's value is zero, so the relative discrepancy is undefined.
    ValueError
        Proper mode without ``fs``, or a period missing from ``fs``.
    """
    t0 = spec.t0
    if spec.mode == "inapt":
        ra, kb = spec.reference_period, spec.other_period
        va = pair.a.value(ra, t0)
        vb = pair.b.value(kb, t0)
    elif spec.mode == "untimely":
        ra = kb = spec.other_period
        va = pair.a.value(ra, t0)
        vb = pair.b.value(kb, t0)
    else:
        if fs is None:
            raise ValueError("proper-mode comparison requires a designed filter set")
        if spec.other_period not in fs.psi:
            raise ValueError(
                f"filter set {fs.spec} has no period {spec.other_period}"
            )
        ra = _resolve_reference_period(pair.a, spec.reference_period, fs)
        kb = spec.other_period
        va = apply_filter(fs.psi[ra], pair.a, ra, t0)
        vb = apply_filter(fs.psi[kb], pair.b, kb, t0)
    if va == 0:
        raise DomainError(
            f"reference value for {pair.a.name} at {t0} is zero; "
            "relative discrepancy is undefined"
        )
    return ComparisonResult(
        spec=spec,
        value_a=va,
        value_b=vb,
        discrepancy=vb / va - 1.0,
        reference_period_used=ra,
        other_period_used=kb,
    )


# ---------------------------------------------------------------------------
# expected bias under a polynomial trend


def _as_fractions(trend: TrendCoefficients) -> tuple[Fraction, ...]:
    return tuple(c if isinstance(c, Fraction) else Fraction(c) for c in trend)


def _mu(trend: tuple[Fraction, ...], t: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(trend):
        acc = acc * t + c
    return acc


def _window_mean_mu(trend: tuple[Fraction, ...], k: int, t: int) -> Fraction:
    """The k-year average of the trend ending at t, exactly."""
    return sum((_mu(trend, t - i) for i in range(k)), Fraction(0)) / k


def _side_periods(spec) -> tuple[int, int]:
    if spec.mode == "untimely":
        return spec.other_period, spec.other_period
    return spec.reference_period, spec.other_period


def _deterministic_sides(
    trend: tuple[Fraction, ...],
    mode: str,
    t0: int,
    ra: int,
    kb: int,
    fs: Optional[FilterSet],
) -> tuple[Fraction, Fraction]:
    """Noise-free comparison sides under the trend, in exact arithmetic."""
    if mode == "proper":
        assert fs is not None
        wa, wb = fs.psi[ra].coeffs, fs.psi[kb].coeffs
    else:
        wa = wb = (Fraction(1),)
    a = sum((w * _window_mean_mu(trend, ra, t0 - j) for j, w in enumerate(wa)), Fraction(0))
    b = sum((w * _window_mean_mu(trend, kb, t0 - j) for j, w in enumerate(wb)), Fraction(0))
    return a, b


def expected_bias(
    trend: TrendCoefficients,
    spec: ComparisonSpec,
    fs: Optional[FilterSet] = None,
) -> float:
    """Expectation of ``value_a - value_b`` when both regions share ``trend``.

    ``trend`` lists polynomial coefficients ``a0, a1, ...`` of the common
    signal ``a0 + a1*t + ...``; errors are mean zero, so only the trend
    moves the expectation.

    Mode behavior: inapt compares the trend's present value to its lagged
    window average, so any moving trend biases it (a line of slope ``b``
    against a k-year window gives exactly ``b*(k-1)/2``). Untimely is zero
    for equal trends (both sides lag identically). Proper is zero for
    *every* common trend: both sides reduce to the same composite weights,
    so the two expectations are the same number. For proper mode ``fs``
    is optional; when given, the zero arises from the exact filter algebra
    rather than by fiat.
    """
    coeffs = _as_fractions(trend)
    if spec.mode == "inapt" and spec.reference_period == 1:
        # present trend value minus the lagged window average
        a = _mu(coeffs, spec.t0)
        b = _window_mean_mu(coeffs, spec.other_period, spec.t0)
        return float(a - b)
    if spec.mode == "proper" and fs is None:
        return 0.0
    ra, kb = _side_periods(spec)
    a, b = _deterministic_sides(coeffs, spec.mode, spec.t0, ra, kb, fs)
    return float(a - b)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class SimulationSpec:
    """A reproducible bias experiment.

    Synthetic data follow ``Y(k, t) = (k-year average of trend at t) +
    noise``, with independent mean-zero noise scaled by ``noise_sd[k]``
    (periods absent from the map are noise-free). Both regions share the
    trend, so any systematic ``value_a - value_b`` is comparison bias.

    ``seed`` fixes the stream completely: replicate ``r`` draws from a
    counter-derived substream at offset ``r``, so results do not depend on
    batch sizes or execution order.
    """

    trend: tuple[Fraction, ...]
    noise_sd: dict[int, float]
    mode: str
    t0: int
    replicates: int
    seed: int
    reference_period: int = 1
    other_period: int = 3

    def __init__(
        self,
        trend: TrendCoefficients,
        noise_sd: Mapping[int, float],
        mode: str,
        t0: int,
        replicates: int,
        seed: int,
        reference_period: int = 1,
        other_period: int = 3,
    ) -> None:
        object.__setattr__(self, "trend", _as_fractions(trend))
        sds = {}
        for k, sd in dict(noise_sd).items():
            k = int(k)
            sd = float(sd)
            if sd < 0:
                raise ValueError(f"noise sd for period {k} must be >= 0, got {sd}")
            sds[k] = sd
        object.__setattr__(self, "noise_sd", sds)
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "t0", int(t0))
        if not isinstance(replicates, int) or replicates < 1:
            raise ValueError(f"replicates must be a positive integer, got {replicates!r}")
        object.__setattr__(self, "replicates", replicates)
        if not isinstance(seed, int) or not (0 <= seed < 2**64):
            raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "reference_period", int(reference_period))
        object.__setattr__(self, "other_period", int(other_period))
        # reuse the comparison-mode validation
        ComparisonSpec(mode, int(t0), int(reference_period), int(other_period))

    def comparison_spec(self) -> ComparisonSpec:
        return ComparisonSpec(self.mode, self.t0, self.reference_period, self.other_period)


@dataclass(frozen=True)
class SimulationSummary:
    """Empirical results of a bias experiment."""

    mode: str
    replicates: int
    seed: int
    bias: float
    std_error: float
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "replicates": self.replicates,
            "seed": self.seed,
            "bias": self.bias,
            "std_error": self.std_error,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "var_a": self.var_a,
            "var_b": self.var_b,
        }


# Replicates per generation batch. Fixed so that accumulation order, and
# therefore every output bit, is independent of the replicate count's size.
_BATCH = 1 << 16


def _gaussian_quantile(u: np.ndarray) -> np.ndarray:
    return ndtri(u)


def simulate_bias(
    spec: SimulationSpec,
    fs: Optional[FilterSet] = None,
    quantile: Callable[[np.ndarray], np.ndarray] = _gaussian_quantile,
) -> SimulationSummary:
    """Monte Carlo estimate of comparison bias under ``spec``.

    The deterministic (trend) part of each side is computed once in exact
    rational arithmetic; noise is simulated around it. With all noise
    standard deviations zero the reported bias therefore equals
    :func:`expected_bias` down to the last bit.

    ``quantile`` maps uniforms in (0, 1) to draws of a mean-zero,
    unit-scale distribution (inverse CDF); the default is standard normal.
    Each replicate consumes a fixed number of uniforms from its own
    counter-derived substream, so any two runs with the same spec agree
    byte for byte regardless of batching or parallel scheduling.

    Returns
    -------
    SimulationSummary
        ``bias`` is the mean of ``value_a - value_b``; ``std_error`` its
        Monte Carlo standard error; ``var_a``/``var_b`` are the sample
        variances of the two sides (for checking noise inflation against
        the design's variance_inflation).
    """
    cspec = spec.comparison_spec()
    ra, kb = _side_periods(spec)
    if spec.mode == "proper":
        if fs is None:
            raise ValueError("proper-mode simulation requires a designed filter set")
        for k in (ra, kb):
            if k not in fs.psi:
                raise ValueError(f"filter set {fs.spec} has no period {k}")
        wa = np.array(fs.psi[ra].as_floats(), dtype=np.float64)
        wb = np.array(fs.psi[kb].as_floats(), dtype=np.float64)
    else:
        wa = np.ones(1)
        wb = np.ones(1)

    det_a, det_b = _deterministic_sides(spec.trend, spec.mode, spec.t0, ra, kb, fs)
    det_diff = det_a - det_b

    sd_a = spec.noise_sd.get(ra, 0.0)
    sd_b = spec.noise_sd.get(kb, 0.0)
    n_a, n_b = len(wa), len(wb)
    draws = n_a + n_b
    blocks_per_rep = max(1, -(-draws // 4))  # Philox emits 4 words per block

    total = spec.replicates
    sum_d = sumsq_d = 0.0
    sum_a = sumsq_a = 0.0
    sum_b = sumsq_b = 0.0
    for start in range(0, total, _BATCH):
        m = min(_BATCH, total - start)
        bitgen = np.random.Philox(key=spec.seed, counter=start * blocks_per_rep)
        raw = bitgen.random_raw(m * blocks_per_rep * 4).reshape(m, blocks_per_rep * 4)
        u = ((raw[:, :draws] >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        z = np.asarray(quantile(u), dtype=np.float64)
        noise_a = (z[:, :n_a] @ wa) * sd_a
        noise_b = (z[:, n_a:draws] @ wb) * sd_b
        d = noise_a - noise_b
        sum_d += float(d.sum())
        sumsq_d += float((d * d).sum())
        sum_a += float(noise_a.sum())
        sumsq_a += float((noise_a * noise_a).sum())
        sum_b += float(noise_b.sum())
        sumsq_b += float((noise_b * noise_b).sum())

    mean_d = sum_d / total
    bias = float(det_diff) + mean_d

    def _sample_var(s: float, ss: float) -> float:
        if total < 2:
            return 0.0
        return max(0.0, (ss - total * (s / total) ** 2) / (total - 1))

    var_d = _sample_var(sum_d, sumsq_d)
    return SimulationSummary(
        mode=spec.mode,
        replicates=total,
        seed=spec.seed,
        bias=bias,
        std_error=math.sqrt(var_d / total),
        mean_a=float(det_a) + sum_a / total,
        mean_b=float(det_b) + sum_b / total,
        var_a=_sample_var(sum_a, sumsq_a),
        var_b=_sample_var(sum_b, sumsq_b),
    )


# ---------------------------------------------------------------------------
# synthetic data


def synthetic_series(
    trend: TrendCoefficients,
    periods: Iterable[int],
    start_year: int,
    end_year: int,
    name: str = "synthetic",
    unit: str = "count",
) -> MyeSeries:
    """Noise-free series whose k-year values average a polynomial trend.

    For each requested period ``k`` and each end year in range, the value
    is the exact k-year mean of the trend, floated at the end. Useful for
    demonstrations and for checking that designed filters recover the
    trend itself.

    The 1y sub-series starts ``max(periods) - 1`` years early so every
    k-year value has a complete single-year window for diagnostics.
    """
    coeffs = _as_fractions(trend)
    ks = sorted(set(periods))
    if not ks:
        raise ValueError("periods must be nonempty")
    if end_year < start_year:
        raise ValueError(f"end_year {end_year} precedes start_year {start_year}")
    pad = max(ks) - 1
    obs: dict[tuple[int, int], float] = {}
    for t in range(start_year - pad, end_year + 1):
        obs[(1, t)] = float(_mu(coeffs, t))
    for k in ks:
        if k == 1:
            continue
        for t in range(start_year, end_year + 1):
            obs[(k, t)] = float(_window_mean_mu(coeffs, k, t))
    return MyeSeries(name, unit, obs)
