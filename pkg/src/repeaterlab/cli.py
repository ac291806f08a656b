"""Configuration-driven command line for every analysis in the package.

One flat INI-style config file (sections, ``key = value`` lines, ``#``
comments) feeds all subcommands; anything not set falls back to documented
defaults.  All numeric output is printed with 12 significant digits and the
pipeline contains no randomness, so identical configs produce byte-identical
output — golden files are diffable.

Exit codes: 0 success, 1 analysis-level failure (no valid purification
range, oracle deviation, too few points to fit), 2 usage or config errors.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass

import numpy as np

from .chain import ChainConfig, resource_count, simulate_chain, trace_to_csv
from .dmsim import map_deviations
from .noise import LinkModel, MemoryModel
from .rates import (
    InsufficientPointsError,
    RateCurve,
    curves_to_csv,
    scaling_fit,
    sweep_rates,
    threshold_distance,
)
from .werner import (
    GateNoiseParams,
    NoValidRangeError,
    purification_fixed_points,
    purify_noisy,
    purify_success_probability,
    swap_chain_fidelity,
)

ORACLE_TOLERANCE = 1e-9

_SECTION_KEYS = {
    "chain": ("l", "n", "m", "epp_rounds_per_level", "c_es", "c_epp"),
    "link": ("d_km", "f0", "alpha_db_per_km", "c_signal_km_s"),
    "gates": ("p1", "p2", "eta"),
    "memory": ("mode", "tau_s"),
    "sweep": ("parameter", "start", "stop", "step"),
    "rate": ("f_useful",),
    "query": ("f",),
}


class ConfigError(Exception):
    """Anything wrong with the config file or its values."""


@dataclass(frozen=True)
class SweepSpec:
    """Integer sweep over the chain depth n (the only swept parameter)."""

    parameter: str = "n"
    start: int = 1
    stop: int = 8
    step: int = 1

    def __post_init__(self) -> None:
        if self.parameter != "n":
            raise ConfigError(
                f"section [sweep]: only parameter 'n' is sweepable, got "
                f"{self.parameter!r}"
            )
        if self.start < 0 or self.stop < self.start or self.step < 1:
            raise ConfigError(
                "section [sweep]: need 0 <= start <= stop and step >= 1"
            )

    def values(self) -> list[int]:
        return list(range(self.start, self.stop + 1, self.step))


@dataclass(frozen=True)
class RunConfig:
    chain: ChainConfig
    gates: GateNoiseParams
    memory: MemoryModel
    sweep: SweepSpec
    query_f: float = 0.8
    f_useful: float | None = None


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _convert(raw: str, section: str, key: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"section [{section}] key '{key}': expected {kind.__name__}, "
            f"got {raw!r}"
        ) from None


def load_run_config(path: str | None) -> RunConfig:
    """Parse a config file into validated domain objects (or pure defaults)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if path is not None:
        if not cp.read(path):
            raise ConfigError(f"config file not found or unreadable: {path}")
    for section in cp.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"section [{section}]: unknown key '{key}'")

    def get(section: str, key: str, kind, default):
        if cp.has_option(section, key):
            return _convert(cp.get(section, key), section, key, kind)
        return default

    try:
        link = LinkModel(
            d_km=get("link", "d_km", float, 25.0),
            f0=get("link", "f0", float, 0.96),
            alpha_db_per_km=get("link", "alpha_db_per_km", float, 0.2),
            c_signal_km_s=get("link", "c_signal_km_s", float, 2e5),
        )
    except ValueError as exc:
        raise ConfigError(f"section [link]: {exc}") from None
    try:
        gates = GateNoiseParams(
            p1=get("gates", "p1", float, 1.0),
            p2=get("gates", "p2", float, 1.0),
            eta=get("gates", "eta", float, 1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"section [gates]: {exc}") from None

    mode = get("memory", "mode", str, "none")
    tau_s = get("memory", "tau_s", float, None)
    try:
        if mode == "none":
            if tau_s is not None:
                raise ValueError("tau_s only applies to mode=exponential")
            memory = MemoryModel.none()
        elif mode == "exponential":
            if tau_s is None:
                raise ValueError("mode=exponential requires tau_s")
            memory = MemoryModel.exponential(tau_s)
        else:
            raise ValueError(f"mode must be 'none' or 'exponential', got {mode!r}")
    except ValueError as exc:
        raise ConfigError(f"section [memory]: {exc}") from None

    try:
        chain = ChainConfig(
            l=get("chain", "l", int, 2),
            n=get("chain", "n", int, 3),
            link=link,
            m=get("chain", "m", int, 2),
            epp_rounds_per_level=get("chain", "epp_rounds_per_level", int, 1),
            c_es=get("chain", "c_es", float, 1.0),
            c_epp=get("chain", "c_epp", float, 2.0),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section [chain]: {exc}") from None

    sweep = SweepSpec(
        parameter=get("sweep", "parameter", str, "n"),
        start=get("sweep", "start", int, 1),
        stop=get("sweep", "stop", int, 8),
        step=get("sweep", "step", int, 1),
    )
    query_f = get("query", "f", float, 0.8)
    f_useful = get("rate", "f_useful", float, None)
    return RunConfig(chain, gates, memory, sweep, query_f, f_useful)


def _require_out(args) -> str:
    if args.out is None:
        raise ConfigError(f"'{args.command}' writes a CSV file; --out is required")
    return args.out


def cmd_fixed_points(run: RunConfig, args) -> int:
    fp = purification_fixed_points(run.gates)
    print(f"f_min={fp.f_min:.12f} f_max={fp.f_max:.12f}")
    return 0


def cmd_purify(run: RunConfig, args) -> int:
    f_out = purify_noisy(run.query_f, run.gates)
    success = purify_success_probability(run.query_f, run.gates)
    print(f"f_out={_fmt(f_out)} success_probability={_fmt(success)}")
    return 0


def cmd_swap(run: RunConfig, args) -> int:
    f_out = swap_chain_fidelity(run.query_f, run.chain.l, run.gates)
    print(f"f_out={_fmt(f_out)}")
    return 0


def cmd_trace(run: RunConfig, args) -> int:
    out = _require_out(args)
    trace = simulate_chain(run.chain, run.gates, run.memory)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(trace_to_csv(trace))
    print(f"final_fidelity={_fmt(trace.final_fidelity)}")
    print(f"total_elapsed_seconds={_fmt(trace.total_elapsed_seconds)}")
    print(f"resource_count={resource_count(run.chain)}")
    if trace.degenerate:
        print("degenerate=true")
    return 0


def cmd_threshold(run: RunConfig, args) -> int:
    th = threshold_distance(run.chain, run.gates, run.memory)
    if math.isinf(th.distance_km):
        print(f"D_th_km=Infinite f_min={_fmt(th.f_min)}")
    else:
        print(
            f"D_th_km={_fmt(th.distance_km)} level={th.level} "
            f"f_min={_fmt(th.f_min)} crossing_fidelity={_fmt(th.crossing_fidelity)}"
        )
    return 0


def cmd_rate_sweep(run: RunConfig, args) -> int:
    out = _require_out(args)
    curves = sweep_rates(
        run.chain, run.gates, run.memory, run.sweep.values(), run.f_useful
    )
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(curves_to_csv(curves))

    # Fit beyond the small-n transient: only distances above four elementary
    # links enter the polynomial/exponential discrimination.
    cut = 4.0 * run.chain.link.d_km
    expected = (
        ("direct", "resource_normalized"),
        ("repeater_ideal_memory", "resource_normalized"),
        ("repeater_ideal_memory", "time_normalized"),
        ("repeater_noisy_memory", "resource_normalized"),
        ("repeater_noisy_memory", "time_normalized"),
    )
    fits = []
    failures = []
    for curve, (regime, metric) in zip(curves, expected):
        tail = RateCurve(
            curve.regime, tuple(p for p in curve.points if p.distance_km > cut)
        )
        try:
            fits.append((regime, metric, scaling_fit(tail)))
        except InsufficientPointsError as exc:
            failures.append((regime, metric, str(exc)))
    for regime, metric, fit in fits:
        print(
            f"fit regime={regime} metric={metric} kind={fit.kind} "
            f"parameter={_fmt(fit.parameter)} goodness={_fmt(fit.goodness)}"
        )
    for regime, metric, fit in fits:
        prefix = f"{regime}.{metric}"
        print(f"{prefix}.kind={fit.kind}")
        print(f"{prefix}.parameter={_fmt(fit.parameter)}")
        print(f"{prefix}.goodness={_fmt(fit.goodness)}")
        print(f"{prefix}.polynomial_degree={_fmt(fit.polynomial_degree)}")
        print(f"{prefix}.polynomial_goodness={_fmt(fit.polynomial_goodness)}")
        print(
            f"{prefix}.exponential_constant_per_km="
            f"{_fmt(fit.exponential_constant_per_km)}"
        )
        print(f"{prefix}.exponential_goodness={_fmt(fit.exponential_goodness)}")
    for regime, metric, message in failures:
        print(f"InsufficientPoints regime={regime} metric={metric}: {message}")
    return 1 if failures else 0


def cmd_oracle_check(run: RunConfig, args) -> int:
    fidelities = [float(f) for f in np.linspace(0.3, 1.0, 15)]
    triples = (
        (1.0, 1.0, 1.0),
        (0.99, 0.99, 0.99),
        (0.95, 0.95, 0.95),
        (1.0, 0.99, 0.95),
        (0.95, 1.0, 0.99),
        (0.99, 0.95, 1.0),
        (0.999, 0.99, 0.995),
        (0.95, 0.99, 0.95),
    )
    noise = [GateNoiseParams(*t) for t in triples]
    worst = map_deviations(fidelities, noise)
    for name in ("swap", "purify", "purify_success"):
        print(f"{name}_max_deviation={_fmt(worst[name])}")
    if max(worst.values()) > ORACLE_TOLERANCE:
        print(f"oracle deviation exceeds tolerance {_fmt(ORACLE_TOLERANCE)}")
        return 1
    return 0


_COMMANDS = (
    ("fixed-points", "purification fixed points of the configured gate noise",
     cmd_fixed_points),
    ("purify", "one purification round on the query fidelity", cmd_purify),
    ("swap", "swap a chain of l pairs at the query fidelity", cmd_swap),
    ("trace", "simulate the chain and write its stage-by-stage CSV", cmd_trace),
    ("rate-sweep", "rate-versus-distance curves and scaling fits",
     cmd_rate_sweep),
    ("threshold", "distance where memory decay defeats purification",
     cmd_threshold),
    ("oracle-check", "compare closed-form maps against circuit oracles",
     cmd_oracle_check),
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI-style config file")
    common.add_argument("--out", metavar="PATH", help="output CSV path")
    common.add_argument("--format", choices=("csv",), default="csv",
                        help="output format (only csv)")
    parser = argparse.ArgumentParser(
        prog="repeaterlab",
        description="Analytic repeater-chain toolkit: fidelity maps, chain "
                    "traces, rate scaling, thresholds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text, handler in _COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = load_run_config(args.config)
        return args.handler(run, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NoValidRangeError as exc:
        print(f"NoValidRange: {exc}")
        return 1
    except InsufficientPointsError as exc:
        print(f"InsufficientPoints: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
