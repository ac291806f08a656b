"""Closed-form fidelity maps for Werner pairs under swapping and purification.

A Werner pair with fidelity ``f`` is the rank-4 mixture that keeps weight
``f`` on the target Bell state and spreads ``(1 - f)/3`` over the other
three.  Everything in this module is plain scalar arithmetic on that one
number; the density-matrix reference circuits live in :mod:`repeaterlab.dmsim`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

FIDELITY_TOL = 1e-12

# Fully mixed two-qubit state: fidelity 1/4 to every Bell state.
MIXED_FIDELITY = 0.25


class NoValidRangeError(ValueError):
    """Purification cannot gain fidelity anywhere in (1/4, 1] for these gates."""


def validate_fidelity(f: float, name: str = "f") -> float:
    """Check ``f`` is a physical fidelity and clamp rounding spill to [0, 1].

    Values outside [0, 1] by more than ``FIDELITY_TOL`` are rejected;
    anything closer is treated as accumulated floating-point error.
    """
    if not math.isfinite(f):
        raise ValueError(f"{name} must be finite, got {f!r}")
    if f < -FIDELITY_TOL or f > 1.0 + FIDELITY_TOL:
        raise ValueError(f"{name} must lie in [0, 1], got {f!r}")
    return min(1.0, max(0.0, f))


@dataclass(frozen=True)
class GateNoiseParams:
    """Local gate and measurement quality (p1, p2, eta).

    p1  reliability of a one-qubit operation (depolarizing weight),
    p2  reliability of a two-qubit operation,
    eta probability a single-qubit measurement reports the true outcome.
    All live in (0, 1]; eta additionally must exceed 1/2 or outcomes carry
    no information.
    """

    p1: float = 1.0
    p2: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "eta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite number, got {v!r}")
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v!r}")
        if self.eta <= 0.5:
            raise ValueError(f"eta must exceed 0.5, got {self.eta!r}")

    @classmethod
    def ideal(cls) -> "GateNoiseParams":
        return cls(1.0, 1.0, 1.0)

    @property
    def is_ideal(self) -> bool:
        return self.p1 == 1.0 and self.p2 == 1.0 and self.eta == 1.0


def werner_weight(f: float) -> float:
    """Weight of the target Bell projector in the Werner decomposition, (4f-1)/3."""
    return (4.0 * f - 1.0) / 3.0


def fidelity_from_weight(w: float) -> float:
    """Inverse of :func:`werner_weight`."""
    return (1.0 + 3.0 * w) / 4.0


def purify_ideal(f: float) -> float:
    """One round of the two-pair recurrence with perfect gates.

    Both input pairs carry fidelity ``f``; the kept pair, conditioned on
    coincident check outcomes, has fidelity ``(f^2 + fb^2) / (f^2 + 2 f fb +
    5 fb^2)`` with ``fb = (1 - f)/3``.
    """
    f = validate_fidelity(f)
    fb = (1.0 - f) / 3.0
    phi = f * f + fb * fb
    lam = f * f + 2.0 * f * fb + 5.0 * fb * fb
    return phi / lam


def purify_success_probability(f: float, g: GateNoiseParams | None = None) -> float:
    """Probability the coincidence check passes for two fidelity-``f`` inputs.

    With perfect gates this is the classic ``f^2 + 2 f fb + 5 fb^2``.  Noisy
    two-qubit gates and misreporting measurements add their own pass/fail
    branches; one-qubit reliability never enters (the circuit uses none).
    """
    f = validate_fidelity(f)
    fb = (1.0 - f) / 3.0
    lam = f * f + 2.0 * f * fb + 5.0 * fb * fb
    if g is None or g.is_ideal:
        return lam
    eta, p2 = g.eta, g.p2
    etab = 1.0 - eta
    theta = eta * eta + etab * etab
    xi = f * fb + fb * fb
    pi = (1.0 - p2 * p2) / (8.0 * p2 * p2)
    return p2 * p2 * (theta * lam + 4.0 * (2.0 * eta * etab * xi + pi))


def purify_noisy(f: float, g: GateNoiseParams) -> float:
    """One purification round with unreliable gates and measurements.

    Output fidelity of the kept pair:

        (theta*phi + 2*eta*etab*xi + pi) / (theta*lam + 4*(2*eta*etab*xi + pi))

    where ``fb = (1-f)/3``, ``phi = f^2 + fb^2``, ``xi = f*fb + fb^2``,
    ``lam = f^2 + 2 f fb + 5 fb^2``, ``theta = eta^2 + etab^2`` and
    ``pi = (1 - p2^2)/(8 p2^2)``.  Reduces to :func:`purify_ideal` when the
    gates are perfect.
    """
    f = validate_fidelity(f)
    eta, p2 = g.eta, g.p2
    fb = (1.0 - f) / 3.0
    phi = f * f + fb * fb
    xi = f * fb + fb * fb
    lam = f * f + 2.0 * f * fb + 5.0 * fb * fb
    etab = 1.0 - eta
    theta = eta * eta + etab * etab
    pi = (1.0 - p2 * p2) / (8.0 * p2 * p2)
    num = theta * phi + 2.0 * eta * etab * xi + pi
    den = theta * lam + 4.0 * (2.0 * eta * etab * xi + pi)
    return num / den


def swap_chain_fidelity(f: float, l: int, g: GateNoiseParams) -> float:
    """Fidelity after connecting ``l`` equal-fidelity pairs end to end.

    Each of the ``l - 1`` connection points costs a factor
    ``p1^2 * p2 * (4 eta^2 - 1) / 3`` on the Werner weight, and the weight
    itself multiplies across the ``l`` segments:

        F_out = 1/4 + (3/4) * [p1^2 p2 (4 eta^2 - 1)/3]^(l-1) * [(4f-1)/3]^l

    ``l = 1`` is the identity.
    """
    if not isinstance(l, int) or l < 1:
        raise ValueError(f"l must be an integer >= 1, got {l!r}")
    f = validate_fidelity(f)
    k = g.p1 * g.p1 * g.p2 * (4.0 * g.eta * g.eta - 1.0) / 3.0
    w = werner_weight(f)
    return 0.25 + 0.75 * (k ** (l - 1)) * (w**l)


@dataclass(frozen=True)
class FixedPoints:
    """Nontrivial fixed points of the noisy purification map.

    ``f_min`` and ``f_max`` bound the interval on which purification gains
    fidelity; outside it the map loses ground.  ``marginal`` flags the
    degenerate case where the two roots have merged into a tangency.
    """

    f_min: float
    f_max: float
    marginal: bool = False

    def __post_init__(self) -> None:
        if not (MIXED_FIDELITY < self.f_min <= self.f_max <= 1.0 + FIDELITY_TOL):
            raise ValueError(
                f"fixed points must satisfy 1/4 < f_min <= f_max <= 1, "
                f"got ({self.f_min!r}, {self.f_max!r})"
            )


_SCAN_LO = MIXED_FIDELITY + 1e-6
_SCAN_STEP = 1e-4
_BISECT_WIDTH = 1e-12


def _bisect(fn, lo: float, hi: float) -> float:
    """Standard bisection on a bracketing interval, to width < 1e-12."""
    flo = fn(lo)
    if flo == 0.0:
        return lo
    while hi - lo >= _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0.0) == (fmid < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def purification_fixed_points(g: GateNoiseParams) -> FixedPoints:
    """Locate the fixed points of ``purify_noisy(., g)`` above the mixed state.

    A dense scan over (1/4, 1] brackets sign changes of the residual
    ``purify_noisy(f) - f``; each bracket is narrowed by bisection.  Perfect
    gates give exactly (0.5, 1.0).  Raises :class:`NoValidRangeError` when
    the residual is negative everywhere (purification never helps), and
    reports ``marginal=True`` if the two roots have collapsed into one.
    """

    def residual(f: float) -> float:
        return purify_noisy(f, g) - f

    grid = [_SCAN_LO + i * _SCAN_STEP for i in range(int((1.0 - _SCAN_LO) / _SCAN_STEP) + 1)]
    if grid[-1] < 1.0:
        grid.append(1.0)

    roots: list[float] = []
    vals = [residual(x) for x in grid]
    for (x0, r0), (x1, r1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if r0 == 0.0:
            roots.append(x0)
        elif (r0 < 0.0) != (r1 < 0.0):
            roots.append(_bisect(residual, x0, x1))
    if vals[-1] == 0.0:
        roots.append(grid[-1])

    # Drop anything that bisected back onto the trivial fixed point at 1/4.
    roots = sorted(r for r in roots if r > MIXED_FIDELITY + 1e-9)

    if len(roots) >= 2:
        lo, hi = roots[0], roots[-1]
        return FixedPoints(lo, hi, marginal=(hi - lo) < 1e-9)
    if len(roots) == 1:
        # Tangency, or a root sitting exactly on the upper boundary.
        return FixedPoints(roots[0], roots[0], marginal=True)

    peak = max(vals)
    if peak > 0.0:  # pragma: no cover - scan step is far finer than any real gap
        raise RuntimeError("bracketing failed despite positive residual; narrow the scan step")
    raise NoValidRangeError(
        f"purification loses fidelity everywhere in (1/4, 1] for gates {g!r}"
    )
