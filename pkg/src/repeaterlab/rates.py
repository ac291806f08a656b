"""Rate-versus-distance analysis: curves, threshold location, scaling fits.

Rates come in two deliberately separate flavors, because "bit rate" is
meaningless without a denominator: ``resource_normalized`` is end-to-end
yield per elementary pair consumed, ``time_normalized`` is yield per second
of protocol latency.  Every curve point carries its metric label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .chain import ChainConfig, resource_count, simulate_chain
from .noise import LinkModel, MemoryModel
from .werner import GateNoiseParams, purification_fixed_points, werner_weight

METRICS = ("resource_normalized", "time_normalized")


class InsufficientPointsError(ValueError):
    """A scaling fit needs at least five points inside the window."""


@dataclass(frozen=True)
class RatePoint:
    distance_km: float
    rate: float
    metric: str

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; expected {METRICS}")
        if self.distance_km <= 0.0:
            raise ValueError(f"distance must be positive, got {self.distance_km!r}")
        if not self.rate > 0.0 or not math.isfinite(self.rate):
            raise ValueError(f"rate must be finite and positive, got {self.rate!r}")


@dataclass(frozen=True)
class RateCurve:
    """One regime's rate-versus-distance points, strictly increasing in D."""

    regime: str
    points: tuple[RatePoint, ...]

    def __post_init__(self) -> None:
        distances = [p.distance_km for p in self.points]
        if any(b <= a for a, b in zip(distances, distances[1:])):
            raise ValueError("curve distances must increase strictly")

    @property
    def distances(self) -> tuple[float, ...]:
        return tuple(p.distance_km for p in self.points)

    @property
    def rates(self) -> tuple[float, ...]:
        return tuple(p.rate for p in self.points)


def direct_transmission_rate(distance_km: float, link: LinkModel) -> float:
    """Per-attempt success probability of sending one photon the whole way."""
    if distance_km < 0.0:
        raise ValueError(f"distance must be >= 0, got {distance_km!r}")
    return 10.0 ** (-link.alpha_db_per_km * distance_km / 10.0)


def usefulness_weight(f: float, f_useful: float) -> float:
    """QKD usefulness gate s(F): 1 above ``f_useful``, else squared weight.

    Below the useful band the pair still carries some correlation; weighting
    by the squared Werner weight keeps the rate continuous and sends it to
    zero exactly at the fully mixed state, instead of a hard step that would
    flatten every asymptotic-shape question into "rate is zero".
    """
    if f >= f_useful:
        return 1.0
    return max(0.0, werner_weight(f)) ** 2


class RepeaterRate(NamedTuple):
    rate_resource: float
    rate_time: float
    final_fidelity: float


def repeater_rate(
    cfg: ChainConfig,
    g: GateNoiseParams,
    mem: MemoryModel,
    f_useful: float | None = None,
) -> RepeaterRate:
    """Both rate metrics for one chain, from its simulated trace.

    ``f_useful`` defaults to the lower purification fixed point of ``g`` —
    the fidelity below which purification stops winning.  A degenerate
    (truncated) trace yields rate 0 in both metrics.  A zero-latency run
    (n = 0) has no meaningful time normalization; its ``rate_time`` is
    ``inf`` when the pair is useful at all.
    """
    if f_useful is None:
        f_useful = purification_fixed_points(g).f_min
    trace = simulate_chain(cfg, g, mem)
    s = 0.0 if trace.degenerate else usefulness_weight(trace.final_fidelity, f_useful)
    rate_resource = s / resource_count(cfg)
    elapsed = trace.total_elapsed_seconds
    if elapsed > 0.0:
        rate_time = s / elapsed
    else:
        rate_time = math.inf if s > 0.0 else 0.0
    return RepeaterRate(rate_resource, rate_time, trace.final_fidelity)


@dataclass(frozen=True)
class ThresholdResult:
    """Where memory decay first defeats purification, if anywhere.

    ``distance_km`` is ``l**level * d`` for the first level whose post-swap,
    post-decay fidelity drops below ``f_min``; ``inf`` (with ``level`` None)
    when no level up to the configured depth crosses.
    """

    distance_km: float
    level: int | None
    f_min: float
    crossing_fidelity: float | None


def threshold_distance(
    cfg: ChainConfig, g: GateNoiseParams, mem: MemoryModel
) -> ThresholdResult:
    """Locate the first level where stored pairs decay below ``f_min``.

    Levels nest, so a single simulation at depth ``cfg.n`` exposes every
    prefix: the crossing is read off the trace's post-decay records.  Below
    ``f_min`` purification only lowers fidelity further, so the first dip is
    terminal.  With a perfect memory there is nothing to cross.
    """
    fp = purification_fixed_points(g)
    if mem.mode == "none":
        return ThresholdResult(math.inf, None, fp.f_min, None)
    trace = simulate_chain(cfg, g, mem)
    for step in trace.steps:
        if step.stage == "after_memory" and step.fidelity < fp.f_min:
            distance = cfg.l**step.level * cfg.link.d_km
            return ThresholdResult(distance, step.level, fp.f_min, step.fidelity)
    if trace.degenerate:
        # Truncated before a post-decay record could dip: the pair is already
        # fully mixed, which is certainly below f_min.
        last = trace.steps[-1]
        distance = cfg.l**last.level * cfg.link.d_km
        return ThresholdResult(distance, last.level, fp.f_min, last.fidelity)
    return ThresholdResult(math.inf, None, fp.f_min, None)


@dataclass(frozen=True)
class ScalingFit:
    """Winner of the polynomial-versus-exponential decay comparison.

    ``parameter`` is the polynomial degree or the exponential constant per
    km, depending on ``kind``; both hypotheses' full results are kept so a
    caller can see how decisive the classification was.
    """

    kind: str
    parameter: float
    goodness: float
    polynomial_degree: float
    polynomial_goodness: float
    exponential_constant_per_km: float
    exponential_goodness: float


def _linear_fit_r2(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of y on x and the R^2, clamped into [0, 1]."""
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_res = float(np.dot(residual, residual))
    centered = y - float(np.mean(y))
    ss_tot = float(np.dot(centered, centered))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-24 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), min(1.0, max(0.0, r2))


def scaling_fit(
    curve: RateCurve, window: tuple[float, float] | None = None
) -> ScalingFit:
    """Classify a rate curve's decay as polynomial or exponential in D.

    Fits log(rate) against log(D) (polynomial hypothesis, slope = -degree)
    and against D (exponential hypothesis, slope = -constant per km) over
    the points with ``window[0] <= D <= window[1]``, then returns whichever
    hypothesis explains more variance.  Requires at least five points in the
    window.
    """
    points = curve.points
    if window is not None:
        lo, hi = window
        points = tuple(p for p in points if lo <= p.distance_km <= hi)
    if len(points) < 5:
        raise InsufficientPointsError(
            f"need >= 5 points for a scaling fit, got {len(points)}"
            + (f" in window {window}" if window is not None else "")
        )
    d = np.array([p.distance_km for p in points])
    log_rate = np.log(np.array([p.rate for p in points]))
    poly_slope, poly_r2 = _linear_fit_r2(np.log(d), log_rate)
    expo_slope, expo_r2 = _linear_fit_r2(d, log_rate)
    degree = -poly_slope
    constant = -expo_slope
    if poly_r2 >= expo_r2:
        return ScalingFit("polynomial", degree, poly_r2, degree, poly_r2, constant, expo_r2)
    return ScalingFit("exponential", constant, expo_r2, degree, poly_r2, constant, expo_r2)


def sweep_rates(
    cfg: ChainConfig,
    g: GateNoiseParams,
    mem: MemoryModel,
    n_values: Sequence[int],
    f_useful: float | None = None,
) -> list[RateCurve]:
    """Rate curves over chain depth for the three regimes under study.

    For each depth in ``n_values`` (ascending): direct transmission over the
    same total distance, the repeater with a perfect memory, and the repeater
    with ``mem``.  Repeater regimes yield one curve per metric; points whose
    rate is exactly zero (degenerate chains) are omitted, since a rate curve
    carries only positive rates.
    """
    if list(n_values) != sorted(set(n_values)):
        raise ValueError("n_values must be strictly increasing")
    if f_useful is None:
        f_useful = purification_fixed_points(g).f_min
    no_mem = MemoryModel.none()
    direct_points = []
    repeater_points: dict[tuple[str, str], list[RatePoint]] = {
        ("repeater_ideal_memory", "resource_normalized"): [],
        ("repeater_ideal_memory", "time_normalized"): [],
        ("repeater_noisy_memory", "resource_normalized"): [],
        ("repeater_noisy_memory", "time_normalized"): [],
    }
    for n in n_values:
        cfg_n = replace(cfg, n=n)
        distance = cfg_n.total_distance_km
        direct_rate = direct_transmission_rate(distance, cfg.link)
        if direct_rate > 0.0 and math.isfinite(direct_rate):
            direct_points.append(
                RatePoint(distance, direct_rate, "resource_normalized")
            )
        for regime, regime_mem in (
            ("repeater_ideal_memory", no_mem),
            ("repeater_noisy_memory", mem),
        ):
            rr = repeater_rate(cfg_n, g, regime_mem, f_useful)
            for metric, value in (
                ("resource_normalized", rr.rate_resource),
                ("time_normalized", rr.rate_time),
            ):
                if value > 0.0 and math.isfinite(value):
                    repeater_points[(regime, metric)].append(
                        RatePoint(distance, value, metric)
                    )
    curves = [RateCurve("direct", tuple(direct_points))]
    for (regime, _metric), pts in repeater_points.items():
        curves.append(RateCurve(regime, tuple(pts)))
    return curves


def curves_to_csv(curves: Sequence[RateCurve]) -> str:
    """All curves in one CSV: distance_km, rate, metric, regime."""
    lines = ["distance_km,rate,metric,regime"]
    for curve in curves:
        for p in curve.points:
            lines.append(
                f"{p.distance_km:.12g},{p.rate:.12g},{p.metric},{curve.regime}"
            )
    return "\n".join(lines) + "\n"


def curves_from_csv(text: str) -> list[RateCurve]:
    """Inverse of :func:`curves_to_csv`; curves are contiguous row blocks."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != "distance_km,rate,metric,regime":
        raise ValueError("missing or malformed rate-curve CSV header")
    curves: list[RateCurve] = []
    block: list[RatePoint] = []
    block_key: tuple[str, str] | None = None
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 4:
            raise ValueError(f"expected 4 CSV columns, got {line!r}")
        distance, rate, metric, regime = cells
        key = (regime, metric)
        if block_key is not None and key != block_key:
            curves.append(RateCurve(block_key[0], tuple(block)))
            block = []
        block_key = key
        block.append(RatePoint(float(distance), float(rate), metric))
    if block_key is not None:
        curves.append(RateCurve(block_key[0], tuple(block)))
    return curves
