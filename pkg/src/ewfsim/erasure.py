"""Quantum erasure of a which-path record.

Measuring the register M in the {|+_n>, |-_n>} basis, with
|+-_n> = (|0...0> +- |1...1>)/sqrt(2), leaves S in (|0> +- e^{ia}|1>)/sqrt(2)
so the phase a shows up again in interference on S. This only works while the
whole register is at hand and a is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .channels import RecordModel, build_record_state, erasure_possible, record_layout, record_names
from .qstate import (
    OTHER,
    InvariantViolation,
    MeasurementBasis,
    Operator,
    StateVector,
    Subsystem,
    SubsystemLayout,
    apply_operator,
    born_distribution,
    measure,
)
from .rng import trial_draws

PLUS_N = "plus_n"
MINUS_N = "minus_n"

_S_LAYOUT = SubsystemLayout.qubits(["S"])
HADAMARD_BASIS = MeasurementBasis.build(
    _S_LAYOUT, ["S"], {"+": [np.array([1.0, 1.0])], "-": [np.array([1.0, -1.0])]}
)


@dataclass(frozen=True, eq=False)
class ErasureOutcome:
    branch: str
    conditional_state: StateVector
    recovered_phase_visible: bool
    probability: float

    def __post_init__(self):
        if abs(self.conditional_state.norm - 1.0) > 1e-12:
            raise InvariantViolation("conditional state of S is not normalized")


def _ghz_pair(n: int) -> tuple[np.ndarray, np.ndarray]:
    d = 2 ** n
    zeros = np.zeros(d)
    ones = np.zeros(d)
    zeros[0] = 1.0
    ones[-1] = 1.0
    return zeros, ones


@lru_cache(maxsize=None)
def erasure_basis(n: int, names: Optional[tuple[str, ...]] = None) -> MeasurementBasis:
    """{|+_n>, |-_n>} on the register, plus the complement as ``other``."""
    if n < 1:
        raise ValueError(f"need at least one register qubit, got n={n}")
    names = record_names(n) if names is None else tuple(names)
    if len(names) != n:
        raise ValueError(f"{len(names)} register names for n={n}")
    zeros, ones = _ghz_pair(n)
    layout = SubsystemLayout.qubits(names)
    return MeasurementBasis.build(layout, names, {PLUS_N: [zeros + ones], MINUS_N: [zeros - ones]})


def erasure_decomposition(n: int, alpha: float) -> StateVector:
    """Rebuild psi(alpha) from its erasure-basis form.

    psi = 1/2 [ (|0> + e^{ia}|1>) |+_n> + (|0> - e^{ia}|1>) |-_n> ]
    Assembled from kets directly, without going through ``build_record_state``.
    """
    zeros, ones = _ghz_pair(n)
    plus_n = (zeros + ones) / np.sqrt(2.0)
    minus_n = (zeros - ones) / np.sqrt(2.0)
    ph = np.exp(1j * alpha)
    s_plus = np.array([1.0, ph])
    s_minus = np.array([1.0, -ph])
    amps = 0.5 * (np.kron(s_plus, plus_n) + np.kron(s_minus, minus_n))
    return StateVector(record_layout(n), amps)


def _record_names_of(psi: StateVector) -> tuple[str, ...]:
    if "S" not in psi.layout or psi.layout.names[0] != "S":
        raise ValueError("erasure expects S as the first subsystem")
    return psi.layout.names[1:]


def erase(psi: StateVector, n: int, rng_draw: float) -> ErasureOutcome:
    """Projective erasure measurement of the register qubits of ``psi``."""
    names = _record_names_of(psi)
    if len(names) != n:
        raise ValueError(f"state carries {len(names)} register qubits, expected {n}")
    basis = erasure_basis(n, names)
    label, post, p = measure(psi, basis, rng_draw)
    if label == OTHER:
        raise InvariantViolation("erasure measurement left the {|0...0>, |1...1>} span")
    v = basis.vectors(label)[0]
    s = post.amplitudes.reshape(2, -1) @ v.conj()
    s_state = StateVector(_S_LAYOUT, s).normalized()
    visible = abs(s_state.amplitudes[0] * s_state.amplitudes[1]) > 1e-12
    return ErasureOutcome(label, s_state, bool(visible), p)


def _condition_on(psi: StateVector, name: str, label: str) -> StateVector:
    """Remove a factor already projected onto the basis state ``label``."""
    pos = psi.layout.position(name)
    sub = psi.layout.subsystems[pos]
    t = np.take(psi.tensor(), sub.labels.index(label), axis=pos)
    return StateVector(psi.layout.without([name]), t.reshape(-1)).normalized()


def _visibility_trial(model: RecordModel, u: Sequence[float]) -> bool:
    """One run of alpha draw, record loss, erasure and S readout; True on a match."""
    alpha = 2.0 * np.pi * u[0] if model.phase_random else model.alpha
    psi = build_record_state(model.n_qubits, alpha)
    m = model.n_qubits
    if model.lost_qubit_index is not None:
        # an unread environment is equivalent to one that measured L and kept the result
        lost = f"M{model.lost_qubit_index}"
        value, post, _ = measure(psi, MeasurementBasis.computational(psi.layout, lost), u[1])
        psi = _condition_on(post, lost, value)
        m -= 1
    if m >= 1:
        outcome = erase(psi, m, u[2])
        branch, s_state = outcome.branch, outcome.conditional_state
    else:
        # nothing left to erase: S is read without any branch information
        branch, s_state = PLUS_N, psi
    readout, _, _ = measure(s_state, HADAMARD_BASIS, u[3])
    return (branch == PLUS_N) == (readout == "+")


def interference_visibility(model: RecordModel, trials: int, rng_seed=None) -> float:
    """|P(match) - P(mismatch)| between erasure branch and Hadamard readout of S."""
    draws = trial_draws(rng_seed, trials, 4)
    matches = sum(_visibility_trial(model, u) for u in draws)
    return abs(2 * matches - trials) / trials


def exact_visibility(model: RecordModel) -> float:
    """Closed-form limit: |cos a| with full control, 0 otherwise."""
    return abs(float(np.cos(model.alpha))) if erasure_possible(model) else 0.0


CAT_LAYOUT = SubsystemLayout.of(Subsystem("cat", 2, ("A", "D")))
CAT_BASIS = MeasurementBasis.computational(CAT_LAYOUT, "cat")


def cat_revival_unitary() -> Operator:
    """U = [ |A>(<A| + <D|) + |D>(<A| - <D|) ] / sqrt(2)."""
    m = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    return Operator(("cat",), m, unitary=True, name="cat revival")


def cat_revival_distribution(psi: Optional[StateVector] = None) -> dict[str, float]:
    """Apply the revival unitary (default input |D>) and read alive/dead."""
    psi = StateVector.basis(CAT_LAYOUT, ["D"]) if psi is None else psi
    return dict(born_distribution(apply_operator(cat_revival_unitary(), psi), CAT_BASIS))
