"""Decoherence and permanent records.

A qubit S that has interacted with a register M of n qubits is left in
(|0>|0...0> + e^{ia}|1>|1...1>)/sqrt(2). Losing one register qubit, or not
knowing the phase a, both leave the same reduced state: an equal mixture of the
two branches. That equivalence is what this module computes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .qstate import (
    DensityMatrix,
    MeasurementBasis,
    StateVector,
    SubsystemLayout,
    partial_trace,
)

TWO_PI = 2.0 * np.pi


def record_names(n: int) -> tuple[str, ...]:
    return tuple(f"M{k}" for k in range(n))


def record_layout(n: int) -> SubsystemLayout:
    """S followed by the register qubits M0..M{n-1}."""
    return SubsystemLayout.qubits(("S",) + record_names(n))


@dataclass(frozen=True)
class RecordModel:
    """How the which-path record of S is held.

    ``lost_qubit_index`` counts register qubits only (0 is M0). When
    ``phase_random`` is set, ``alpha`` is ignored and redrawn per trial.
    """

    n_qubits: int
    alpha: float = 0.0
    lost_qubit_index: Optional[int] = None
    phase_random: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be positive, got {self.n_qubits}")
        if self.lost_qubit_index is not None and not 0 <= self.lost_qubit_index < self.n_qubits:
            raise ValueError(
                f"lost_qubit_index {self.lost_qubit_index} outside [0, {self.n_qubits})"
            )

    def draw_alpha(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(0.0, TWO_PI)) if self.phase_random else self.alpha


def build_record_state(n: int, alpha: float) -> StateVector:
    if n < 1:
        raise ValueError(f"need at least one register qubit, got n={n}")
    layout = record_layout(n)
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[0] = 1.0 / np.sqrt(2.0)
    amps[-1] = np.exp(1j * alpha) / np.sqrt(2.0)
    return StateVector(layout, amps)


def lose_qubit(psi: StateVector, index: int) -> DensityMatrix:
    """Trace out the subsystem at layout position ``index`` (S is position 0)."""
    names = psi.layout.names
    if not 0 <= index < len(names):
        raise ValueError(f"qubit index {index} outside [0, {len(names)})")
    if len(names) == 1:
        raise ValueError("cannot lose the only subsystem")
    return partial_trace(psi, [n for i, n in enumerate(names) if i != index])


def phase_average(
    builder: Callable[..., StateVector],
    samples: int,
    rng_seed=None,
    n_phases: int = 1,
    chunk: int = 4096,
) -> DensityMatrix:
    """Monte Carlo average of |psi(a)><psi(a)| over phases drawn uniformly on [0, 2pi).

    ``builder`` is called with ``n_phases`` positional phases per sample.
    """
    if samples < 1:
        raise ValueError("phase_average needs at least one sample")
    rng = np.random.default_rng(rng_seed)
    phases = rng.uniform(0.0, TWO_PI, size=(samples, n_phases))
    layout = None
    acc = 0.0
    for start in range(0, samples, chunk):
        block = []
        for row in phases[start:start + chunk]:
            psi = builder(*row)
            if layout is None:
                layout = psi.layout
            elif psi.layout != layout:
                raise ValueError("builder returned states on different layouts")
            block.append(psi.amplitudes)
        a = np.array(block)
        acc = acc + a.T @ a.conj()
    rho = acc / samples
    # exact Hermitian symmetrization; the sum is Hermitian only to rounding
    return DensityMatrix(layout, 0.5 * (rho + rho.conj().T))


def dephase_step(rho: DensityMatrix, pointer_basis: MeasurementBasis, gamma: float, dt: float) -> DensityMatrix:
    """Pure dephasing in ``pointer_basis`` for a time ``dt`` at rate ``gamma``.

    Blocks P_j rho P_k with j != k are scaled by exp(-gamma*dt); the diagonal
    blocks P_k rho P_k are left alone.
    """
    if gamma < 0:
        raise ValueError(f"dephasing rate must be non-negative, got {gamma}")
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    projectors = pointer_basis.full_projectors(rho.layout).values()
    r = rho.entries
    diag = sum(P @ r @ P for P in projectors)
    out = diag + np.exp(-gamma * dt) * (r - diag)
    return DensityMatrix(rho.layout, 0.5 * (out + out.conj().T))


def erasure_possible(model: RecordModel) -> bool:
    """Erasure needs the whole register and a reproducible phase."""
    return model.lost_qubit_index is None and not model.phase_random
