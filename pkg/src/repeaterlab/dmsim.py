"""Small dense density-matrix simulator used as ground truth for the maps.

Everything here enumerates measurement branches exhaustively; nothing is
sampled.  States are plain complex ndarrays of shape (2^n, 2^n) with qubit 0
as the leftmost tensor factor.  The two reference circuits (`es_oracle`,
`epp_oracle`) rebuild the swap and purification fidelity maps from explicit
noisy gates, measurements and recovery operations, so the closed forms in
:mod:`repeaterlab.werner` can be checked against circuit-level truth.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .werner import GateNoiseParams, validate_fidelity

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

TRACE_TOL = 1e-12
HERMITICITY_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10


class BellKind(enum.Enum):
    """The four maximally entangled two-qubit states."""

    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"

    @property
    def vector(self) -> np.ndarray:
        return _BELL_VECTORS[self].copy()


_SQRT_HALF = 1.0 / math.sqrt(2.0)
_BELL_VECTORS = {
    BellKind.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _SQRT_HALF,
    BellKind.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _SQRT_HALF,
    BellKind.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _SQRT_HALF,
    BellKind.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _SQRT_HALF,
}


def num_qubits(rho: np.ndarray) -> int:
    """Qubit count of a square matrix whose dimension is a power of two."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    n = int(round(math.log2(rho.shape[0])))
    if 2**n != rho.shape[0]:
        raise ValueError(f"dimension {rho.shape[0]} is not a power of two")
    return n


def check_density_matrix(rho: np.ndarray) -> None:
    """Raise if ``rho`` is not a valid state: unit trace, Hermitian, PSD.

    Tolerances: |tr - 1| <= 1e-12, max |rho - rho^H| <= 1e-12, and all
    eigenvalues >= -1e-10 (tiny negative dust from repeated floating-point
    updates is tolerated, genuine negativity is not).
    """
    num_qubits(rho)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise ValueError("matrix is not Hermitian within 1e-12")
    if float(np.min(np.linalg.eigvalsh(rho))) < EIGENVALUE_FLOOR:
        raise ValueError("matrix has an eigenvalue below -1e-10")


def bell_state(kind: BellKind) -> np.ndarray:
    """Density matrix of one Bell state."""
    v = kind.vector
    return np.outer(v, v.conj())


def werner_state(f: float) -> np.ndarray:
    """Werner pair: weight ``f`` on phi+, ``(1-f)/3`` on each other Bell state."""
    f = validate_fidelity(f)
    rest = (1.0 - f) / 3.0
    rho = f * bell_state(BellKind.PHI_PLUS)
    for kind in (BellKind.PHI_MINUS, BellKind.PSI_PLUS, BellKind.PSI_MINUS):
        rho += rest * bell_state(kind)
    return rho


def fidelity_to_bell(rho: np.ndarray, kind: BellKind = BellKind.PHI_PLUS) -> float:
    """Overlap <bell| rho |bell> of a two-qubit state with a Bell state."""
    if num_qubits(rho) != 2:
        raise ValueError("fidelity_to_bell expects a two-qubit state")
    v = kind.vector
    return float(np.real(v.conj() @ rho @ v))


def expand_operator(op: np.ndarray, positions: tuple[int, ...], n: int) -> np.ndarray:
    """Embed a k-qubit operator acting on ``positions`` into n qubits.

    ``positions[0]`` is the first tensor factor of ``op``.  Positions must be
    distinct and in range.
    """
    k = len(positions)
    if op.shape != (2**k, 2**k):
        raise ValueError(f"operator shape {op.shape} does not match {k} qubits")
    if len(set(positions)) != k or not all(0 <= q < n for q in positions):
        raise ValueError(f"positions {positions} invalid for {n} qubits")
    rest = [q for q in range(n) if q not in positions]
    slot_owner = list(positions) + rest
    full = np.kron(op, np.eye(2 ** (n - k), dtype=complex))
    src = [slot_owner.index(q) for q in range(n)]
    tensor = full.reshape([2] * (2 * n))
    tensor = tensor.transpose(src + [s + n for s in src])
    return np.ascontiguousarray(tensor.reshape(2**n, 2**n))


def partial_trace(rho: np.ndarray, keep: tuple[int, ...]) -> np.ndarray:
    """Trace out every qubit not listed in ``keep`` (order preserved, sorted)."""
    n = num_qubits(rho)
    keep_sorted = sorted(set(keep))
    if keep != tuple(keep_sorted) and list(keep) != keep_sorted:
        raise ValueError(f"keep indices must be sorted and unique, got {keep!r}")
    if not all(0 <= q < n for q in keep_sorted):
        raise ValueError(f"keep indices {keep!r} out of range for {n} qubits")
    rows = [chr(ord("a") + q) for q in range(n)]
    cols = [rows[q].upper() if q in keep_sorted else rows[q] for q in range(n)]
    out = "".join(rows[q] for q in keep_sorted) + "".join(
        rows[q].upper() for q in keep_sorted
    )
    tensor = rho.reshape([2] * (2 * n))
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, tensor)
    k = len(keep_sorted)
    return np.ascontiguousarray(reduced.reshape(2**k, 2**k))


def _insert_mixed_qubit(rho: np.ndarray, position: int) -> np.ndarray:
    """Tensor a fresh maximally mixed qubit into ``rho`` at ``position``."""
    n = num_qubits(rho) + 1
    grown = np.kron(rho, I2 / 2.0)  # new qubit occupies the last slot
    order = list(range(n - 1))
    order.insert(position, n - 1)  # qubit owning each slot after reordering
    src = [order.index(q) for q in range(n)]
    tensor = grown.reshape([2] * (2 * n))
    tensor = tensor.transpose(src + [s + n for s in src])
    return np.ascontiguousarray(tensor.reshape(2**n, 2**n))


def apply_one_qubit_noisy(
    rho: np.ndarray, target: int, op: np.ndarray, p1: float
) -> np.ndarray:
    """Depolarizing one-qubit operation.

    With probability ``p1`` the ideal ``op`` acts on ``target``; otherwise the
    target qubit is discarded and replaced by a maximally mixed one in place.
    """
    n = num_qubits(rho)
    full = expand_operator(op, (target,), n)
    ideal = full @ rho @ full.conj().T
    if p1 == 1.0:
        return ideal
    others = tuple(q for q in range(n) if q != target)
    stripped = partial_trace(rho, others)
    return p1 * ideal + (1.0 - p1) * _insert_mixed_qubit(stripped, target)


def apply_two_qubit_noisy(
    rho: np.ndarray, targets: tuple[int, int], op: np.ndarray, p2: float
) -> np.ndarray:
    """Depolarizing two-qubit operation; failure replaces both targets by I/4."""
    n = num_qubits(rho)
    full = expand_operator(op, targets, n)
    ideal = full @ rho @ full.conj().T
    if p2 == 1.0:
        return ideal
    others = tuple(q for q in range(n) if q not in targets)
    stripped = partial_trace(rho, others)
    lo, hi = sorted(targets)
    regrown = _insert_mixed_qubit(_insert_mixed_qubit(stripped, lo), hi)
    return p2 * ideal + (1.0 - p2) * regrown


@dataclass(frozen=True)
class MeasurementBranch:
    outcome: int
    probability: float
    state: np.ndarray


def measure_noisy(rho: np.ndarray, target: int, eta: float) -> list[MeasurementBranch]:
    """Computational-basis readout with misreporting probability ``1 - eta``.

    The qubit physically projects onto |0> or |1>; the classical record is
    correct with probability ``eta``.  Returns one branch per reported
    outcome with its total probability and normalized post state (the
    measured qubit is kept, collapsed).  Zero-probability branches are
    omitted.
    """
    if not 0.5 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0.5, 1], got {eta!r}")
    n = num_qubits(rho)
    projected = []
    for value in (0, 1):
        ket = np.zeros((2, 1), dtype=complex)
        ket[value, 0] = 1.0
        proj = expand_operator(ket @ ket.conj().T, (target,), n)
        sub = proj @ rho @ proj
        projected.append((float(np.real(np.trace(sub))), sub))
    branches = []
    for reported in (0, 1):
        p_true, rho_true = projected[reported]
        p_flip, rho_flip = projected[1 - reported]
        prob = eta * p_true + (1.0 - eta) * p_flip
        if prob <= 0.0:
            continue
        state = (eta * rho_true + (1.0 - eta) * rho_flip) / prob
        branches.append(MeasurementBranch(reported, prob, state))
    return branches


@dataclass(frozen=True)
class EsResult:
    """Outcome-averaged entanglement-swapping result."""

    fidelity: float
    outcome_probabilities: dict


@dataclass(frozen=True)
class EppResult:
    """Purification round result: kept-pair fidelity and pass probability."""

    f_out: float
    success_probability: float


def es_oracle(
    f_a: float,
    f_b: float,
    g: GateNoiseParams,
    *,
    noisy_hadamard: bool = False,
    noisy_corrections: bool = True,
) -> EsResult:
    """Entanglement swapping on two Werner pairs, built from explicit gates.

    Qubits (0, 1) hold a pair of fidelity ``f_a`` and (2, 3) one of ``f_b``;
    qubits 1 and 2 sit at the middle station.  The station applies a noisy
    CNOT (1 -> 2), a Hadamard on 1, and reads both qubits out with
    misreporting probability ``1 - eta``.  Conditioned on the reported pair
    (m1, m2), the far node applies Z^m1 then X^m2 to qubit 3.

    By default the Hadamard is treated as part of the (already imperfect)
    readout and the two conditional recovery operations carry the one-qubit
    depolarizing noise, applied as channels on every branch.  This is the
    convention under which the circuit reproduces the closed-form
    :func:`repeaterlab.werner.swap_chain_fidelity` exactly; flip the keyword
    flags to study the alternative accounting where the Hadamard is noisy
    and the recoveries are absorbed into the classical frame.

    Returns the probability-weighted fidelity of the surviving pair (0, 3)
    together with the four branch probabilities.
    """
    rho = np.kron(werner_state(f_a), werner_state(f_b))
    rho = apply_two_qubit_noisy(rho, (1, 2), CNOT, g.p2)
    rho = apply_one_qubit_noisy(rho, 1, H, g.p1 if noisy_hadamard else 1.0)

    fidelity = 0.0
    probabilities = {}
    for b1 in measure_noisy(rho, 1, g.eta):
        for b2 in measure_noisy(b1.state, 2, g.eta):
            joint = b1.probability * b2.probability
            state = b2.state
            if noisy_corrections:
                state = apply_one_qubit_noisy(state, 3, Z if b1.outcome else I2, g.p1)
                state = apply_one_qubit_noisy(state, 3, X if b2.outcome else I2, g.p1)
            else:
                correction = (Z if b1.outcome else I2) @ (X if b2.outcome else I2)
                state = apply_one_qubit_noisy(state, 3, correction, 1.0)
            pair = partial_trace(state, (0, 3))
            fidelity += joint * fidelity_to_bell(pair, BellKind.PHI_PLUS)
            probabilities[(b1.outcome, b2.outcome)] = joint
    return EsResult(fidelity, probabilities)


def epp_oracle(f: float, g: GateNoiseParams) -> EppResult:
    """One purification round on two Werner pairs, built from explicit gates.

    Qubits (0, 1) are the pair to keep, (2, 3) the pair to sacrifice; one
    station holds (0, 2), the other (1, 3).  Each station applies a noisy
    CNOT from its kept qubit onto its sacrificed qubit, both sacrificed
    qubits are read out with misreporting probability ``1 - eta``, and the
    pair survives when the two reported bits agree.  No one-qubit gate
    appears anywhere in the circuit, so ``p1`` never enters.

    Returns the fidelity of the kept pair conditioned on passing, and the
    pass probability itself.
    """
    rho = np.kron(werner_state(f), werner_state(f))
    rho = apply_two_qubit_noisy(rho, (0, 2), CNOT, g.p2)
    rho = apply_two_qubit_noisy(rho, (1, 3), CNOT, g.p2)

    success = 0.0
    kept = 0.0
    for b2 in measure_noisy(rho, 2, g.eta):
        for b3 in measure_noisy(b2.state, 3, g.eta):
            if b2.outcome != b3.outcome:
                continue
            joint = b2.probability * b3.probability
            pair = partial_trace(b3.state, (0, 1))
            success += joint
            kept += joint * fidelity_to_bell(pair, BellKind.PHI_PLUS)
    if success <= 0.0:
        raise ValueError("coincidence probability vanished; inputs are unphysical")
    return EppResult(kept / success, success)


def map_deviations(
    fidelities,
    noise_params,
    *,
    swap_map=None,
    purify_map=None,
    purify_success_map=None,
) -> dict:
    """Worst absolute disagreement between circuits and closed-form maps.

    Runs both reference circuits over the fidelity x noise grid and compares
    against the supplied maps (defaulting to the package's own).  Returns the
    maxima keyed by ``swap``, ``purify`` and ``purify_success``.  The map
    arguments exist so a deliberately wrong formula can be fed in to confirm
    the comparison actually discriminates.
    """
    from .werner import purify_noisy, purify_success_probability, swap_chain_fidelity

    if swap_map is None:
        swap_map = swap_chain_fidelity
    if purify_map is None:
        purify_map = purify_noisy
    if purify_success_map is None:
        purify_success_map = purify_success_probability
    worst = {"swap": 0.0, "purify": 0.0, "purify_success": 0.0}
    for g in noise_params:
        for f in fidelities:
            swapped = es_oracle(f, f, g)
            worst["swap"] = max(
                worst["swap"], abs(swapped.fidelity - swap_map(f, 2, g))
            )
            purified = epp_oracle(f, g)
            worst["purify"] = max(
                worst["purify"], abs(purified.f_out - purify_map(f, g))
            )
            worst["purify_success"] = max(
                worst["purify_success"],
                abs(purified.success_probability - purify_success_map(f, g)),
            )
    return worst
