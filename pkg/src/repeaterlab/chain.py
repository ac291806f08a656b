"""Recursive repeater-chain protocol: station schedule and analytic simulation.

A chain of ``N = l**n`` elementary links is merged level by level.  At level
``x`` every surviving station swaps or purifies according to its index, the
merged pairs wait out the classical-communication latency of their new span,
and ``epp_rounds_per_level`` purification rounds run on the result.  The
simulation tracks one representative fidelity per level (all pairs at a level
are interchangeable under the symmetric noise models), so the whole protocol
reduces to composing the closed-form maps from :mod:`repeaterlab.werner` and
:mod:`repeaterlab.noise`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .noise import (
    LinkModel,
    MemoryModel,
    classical_comm_time,
    link_success_probability,
    memory_decay,
)
from .werner import (
    GateNoiseParams,
    purify_noisy,
    purify_success_probability,
    swap_chain_fidelity,
)

#: Below this the pair is indistinguishable from white noise and every map
#: stops being informative; traces are truncated here rather than continued.
DEGENERACY_THRESHOLD = 0.25 + 1e-12

_INT64_MAX = 2**63 - 1

STAGES = ("init", "after_es", "after_memory", "after_epp")


@dataclass(frozen=True)
class ChainConfig:
    """Static description of one repeater chain.

    ``l`` links merge per swap level, ``n`` levels deep, so the chain has
    ``l**n`` elementary links.  ``m`` is the number of pairs one purification
    round consumes to output one, and ``epp_rounds_per_level`` how many such
    rounds run after each swap level.  ``c_es`` and ``c_epp`` convert the
    one-way classical latency of the current span into the waiting time per
    level: one message for swap corrections, a two-way exchange per
    purification round.
    """

    l: int
    n: int
    link: LinkModel
    m: int = 2
    epp_rounds_per_level: int = 1
    c_es: float = 1.0
    c_epp: float = 2.0

    def __post_init__(self) -> None:
        for name, value, low in (
            ("l", self.l, 2),
            ("n", self.n, 0),
            ("m", self.m, 2),
            ("epp_rounds_per_level", self.epp_rounds_per_level, 0),
        ):
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < low:
                raise ValueError(f"{name} must be >= {low}, got {value}")
        if self.c_es < 0.0 or self.c_epp < 0.0:
            raise ValueError("latency multipliers c_es and c_epp must be >= 0")

    @property
    def checkpoints(self) -> int:
        """Number of elementary links, N = l**n."""
        return self.l**self.n

    @property
    def total_distance_km(self) -> float:
        return self.checkpoints * self.link.d_km


@dataclass(frozen=True)
class ScheduleRound:
    """Which stations act at one level: swap set and purify set are disjoint."""

    level: int
    swap_checkpoints: tuple[int, ...]
    purify_checkpoints: tuple[int, ...]


def build_schedule(cfg: ChainConfig) -> list[ScheduleRound]:
    """Station assignments for every level of the recursive protocol.

    At level ``x`` the stations at interior multiples of ``l**(x-1)`` that are
    not multiples of ``l**x`` perform a swap; the interior multiples of
    ``l**x`` purify the pairs that now terminate there.  The endpoints (0 and
    N) never act.
    """
    n_links = cfg.checkpoints
    rounds = []
    for x in range(1, cfg.n + 1):
        stride = cfg.l ** (x - 1)
        block = stride * cfg.l
        swaps = tuple(
            i for i in range(stride, n_links, stride) if i % block != 0
        )
        purifies = tuple(range(block, n_links, block))
        rounds.append(ScheduleRound(x, swaps, purifies))
    return rounds


def round_time(x: int, cfg: ChainConfig) -> float:
    """Classical-communication latency spent at level ``x``, in seconds.

    The merged pairs span ``l**x`` links; swap corrections cost ``c_es``
    one-way messages over that span and each purification round costs
    ``c_epp`` of them for outcome comparison.
    """
    if not 1 <= x <= cfg.n:
        raise ValueError(f"level must lie in 1..{cfg.n}, got {x}")
    span_km = cfg.l**x * cfg.link.d_km
    messages = cfg.c_es + cfg.c_epp * cfg.epp_rounds_per_level
    return messages * classical_comm_time(span_km, cfg.link)


@dataclass(frozen=True)
class TraceStep:
    level: int
    stage: str
    fidelity: float
    elapsed_seconds: float
    pairs_consumed: int


@dataclass(frozen=True)
class FidelityTrace:
    """Stage-by-stage record of one simulated chain.

    ``degenerate`` marks a run that was cut short because the fidelity hit
    the fully mixed floor; the truncated steps are still recorded.
    """

    steps: tuple[TraceStep, ...]
    degenerate: bool = False

    @property
    def final_fidelity(self) -> float:
        return self.steps[-1].fidelity

    @property
    def total_elapsed_seconds(self) -> float:
        return self.steps[-1].elapsed_seconds

    @property
    def total_pairs_consumed(self) -> int:
        return self.steps[-1].pairs_consumed


def simulate_chain(
    cfg: ChainConfig, g: GateNoiseParams, mem: MemoryModel
) -> FidelityTrace:
    """Run the analytic protocol and record every stage.

    Per level, in order: the swap update over ``l`` segments, memory decay
    over the level's full latency (time advances even when the memory is
    perfect), then each purification round.  Pair accounting is cumulative:
    a swap multiplies consumption by ``l``, each purification round by ``m``,
    so the final count equals :func:`resource_count`.

    If the fidelity ever falls to the fully mixed floor the trace stops there
    with ``degenerate=True``.
    """
    f = cfg.link.f0
    elapsed = 0.0
    pairs = 1
    steps = [TraceStep(0, "init", f, elapsed, pairs)]
    degenerate = False
    for x in range(1, cfg.n + 1):
        f = swap_chain_fidelity(f, cfg.l, g)
        pairs *= cfg.l
        steps.append(TraceStep(x, "after_es", f, elapsed, pairs))
        if f <= DEGENERACY_THRESHOLD:
            degenerate = True
            break

        dt = round_time(x, cfg)
        f = memory_decay(f, dt, mem)
        elapsed += dt
        steps.append(TraceStep(x, "after_memory", f, elapsed, pairs))
        if f <= DEGENERACY_THRESHOLD:
            degenerate = True
            break

        for _ in range(cfg.epp_rounds_per_level):
            f = purify_noisy(f, g)
            pairs *= cfg.m
            steps.append(TraceStep(x, "after_epp", f, elapsed, pairs))
            if f <= DEGENERACY_THRESHOLD:
                degenerate = True
                break
        if degenerate:
            break
    return FidelityTrace(tuple(steps), degenerate)


def resource_count(cfg: ChainConfig) -> int:
    """Elementary pairs consumed by one full protocol execution, exactly.

    Every level multiplies consumption by ``l`` (swapping) and by ``m`` per
    purification round, giving ``(l * m**k)**n`` in integer arithmetic.
    Success probabilities are deliberately excluded; see
    :func:`expected_attempts` for the probabilistic cost.
    """
    per_level = cfg.l * cfg.m**cfg.epp_rounds_per_level
    total = per_level**cfg.n
    if total > _INT64_MAX:
        raise OverflowError(
            f"resource count {per_level}**{cfg.n} exceeds the 64-bit range"
        )
    return total


def resource_scaling_form(cfg: ChainConfig) -> float:
    """The same count written as N**(log_l(M) + 1) with N = l**n, M = m**k.

    Floating-point cross-check of :func:`resource_count`; the two agree to
    rounding error, which is the point: total resources are polynomial in the
    number of links.
    """
    pairs_per_level = cfg.m**cfg.epp_rounds_per_level
    exponent = math.log(pairs_per_level, cfg.l) + 1.0
    return float(cfg.checkpoints) ** exponent


def expected_attempts(
    cfg: ChainConfig, g: GateNoiseParams, mem: MemoryModel
) -> float:
    """Expected elementary-pair generation attempts, counting failures.

    Extends :func:`resource_count` with the transmission success probability
    of each elementary link and the keep probability of each purification
    round (evaluated at the fidelity entering that round).  Purification keep
    probabilities stay positive even for useless states, so this always
    terminates; it measures the cost of finishing the protocol, not of
    producing something worth keeping.
    """
    p_link = link_success_probability(cfg.link.d_km, cfg.link)
    attempts = 1.0 / p_link
    f = cfg.link.f0
    for x in range(1, cfg.n + 1):
        f = swap_chain_fidelity(f, cfg.l, g)
        attempts *= cfg.l
        f = memory_decay(f, round_time(x, cfg), mem)
        for _ in range(cfg.epp_rounds_per_level):
            attempts *= cfg.m / purify_success_probability(f, g)
            f = purify_noisy(f, g)
    return attempts


def trace_to_csv(trace: FidelityTrace) -> str:
    """Render a trace as CSV with 12-significant-digit numeric columns."""
    lines = ["level,stage,fidelity,elapsed_seconds,pairs_consumed"]
    for s in trace.steps:
        lines.append(
            f"{s.level},{s.stage},{s.fidelity:.12g},"
            f"{s.elapsed_seconds:.12g},{s.pairs_consumed}"
        )
    return "\n".join(lines) + "\n"


def trace_from_csv(text: str) -> FidelityTrace:
    """Inverse of :func:`trace_to_csv`.

    The degeneracy flag is not a CSV column; it is re-derived from the last
    row, which is exact because simulation only ever stops early (or ends) on
    a fidelity at or below the floor.
    """
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != "level,stage,fidelity,elapsed_seconds,pairs_consumed":
        raise ValueError("missing or malformed trace CSV header")
    steps = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 5:
            raise ValueError(f"expected 5 CSV columns, got {line!r}")
        level, stage, fidelity, elapsed, pairs = cells
        if stage not in STAGES:
            raise ValueError(f"unknown trace stage {stage!r}")
        steps.append(
            TraceStep(int(level), stage, float(fidelity), float(elapsed), int(pairs))
        )
    if not steps:
        raise ValueError("trace CSV has no rows")
    degenerate = steps[-1].fidelity <= DEGENERACY_THRESHOLD
    return FidelityTrace(tuple(steps), degenerate)
