"""Extended Wigner's friend protocol on F-bar (x) S-bar (x) F (x) S.

Two labs: F-bar with the coin S-bar, and F, which receives the spin S. The
spin carries a position label (primed = next to F-bar, unprimed = next to F)
so that moving it between labs is an honest unitary.

Steps, starting from |i, coin, i, dn'>:

1. coin prepared in sqrt(1/3)|h> + sqrt(2/3)|t>
2. F-bar copies the coin  (|i,t> picks up the phase e^{i alpha_bar})
3. on a tails memory F-bar rotates the spin |dn'> -> (|dn'> + |up'>)/sqrt(2)
4. spin moved to F's lab
5. F copies the spin      (|i,dn> picks up the phase e^{i alpha})

then W-bar measures lab F-bar/S-bar and W measures lab F/S.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

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
    joint_distribution,
    measure,
    overlap,
    tensor_product,
)
from .rng import single_draws, trial_draws

RANDOM = "random"
PLUS = "plus"
MINUS = "minus"
TWO_PI = 2.0 * np.pi

FBAR = Subsystem("Fbar", 3, ("i", "Hmem", "Tmem"))
SBAR = Subsystem("Sbar", 2, ("h", "t"))
F = Subsystem("F", 3, ("i", "Up", "Dn"))
# spin-major: (up, primed), (up, unprimed), (dn, primed), (dn, unprimed)
S = Subsystem("S", 4, ("up'", "up", "dn'", "dn"))
EWF_LAYOUT = SubsystemLayout.of(FBAR, SBAR, F, S)

LAB_BAR = ("Fbar", "Sbar")
LAB = ("F", "S")

Phase = Union[float, str]


@dataclass(frozen=True)
class PhaseConfig:
    """Phases of the two copying interactions; either may be ``"random"``.

    Random phases are drawn uniformly on [0, 2pi) every trial. With
    ``correlated`` set and both random, one draw serves for both.
    """

    alpha_bar: Phase = 0.0
    alpha: Phase = 0.0
    correlated: bool = False

    def __post_init__(self):
        for name in ("alpha_bar", "alpha"):
            v = getattr(self, name)
            if isinstance(v, str):
                if v != RANDOM:
                    raise ValueError(f"{name} must be a number or {RANDOM!r}, got {v!r}")
            elif not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            else:
                object.__setattr__(self, name, float(v))

    @property
    def fixed(self) -> bool:
        return self.alpha_bar != RANDOM and self.alpha != RANDOM

    @property
    def any_random(self) -> bool:
        return self.alpha_bar == RANDOM or self.alpha == RANDOM

    def draw(self, u_bar: float, u: float) -> tuple[float, float]:
        if self.correlated and self.alpha_bar == RANDOM and self.alpha == RANDOM:
            u = u_bar
        ab = TWO_PI * u_bar if self.alpha_bar == RANDOM else self.alpha_bar
        a = TWO_PI * u if self.alpha == RANDOM else self.alpha
        return float(ab), float(a)


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    final_state: StateVector
    wbar_outcome: str
    w_outcome: str
    wbar_prob: float
    w_prob: float
    phases_used: tuple[float, float]


def _phased_transposition(d: int, a: int, b: int, phase: complex) -> np.ndarray:
    # |a> -> phase |b>, |b> -> conj(phase) |a>, identity elsewhere
    m = np.eye(d, dtype=np.complex128)
    m[a, a] = m[b, b] = 0.0
    m[b, a] = phase
    m[a, b] = np.conj(phase)
    return m


def _idx(layout: SubsystemLayout, *labels: str) -> int:
    return layout.index(labels)


_BAR = EWF_LAYOUT.subset(LAB_BAR)
_FS = EWF_LAYOUT.subset(LAB)
_FBAR_S = EWF_LAYOUT.subset(("Fbar", "S"))


_COIN_H = (_idx(_BAR, "i", "h"), _idx(_BAR, "Hmem", "h"))
_COIN_T = (_idx(_BAR, "i", "t"), _idx(_BAR, "Tmem", "t"))
_SPIN_UP = (_idx(_FS, "i", "up"), _idx(_FS, "Up", "up"))
_SPIN_DN = (_idx(_FS, "i", "dn"), _idx(_FS, "Dn", "dn"))


def coin_interaction(alpha_bar: float = 0.0) -> Operator:
    m = _phased_transposition(6, *_COIN_H, 1.0)
    m = m @ _phased_transposition(6, *_COIN_T, np.exp(1j * alpha_bar))
    return Operator(LAB_BAR, m, unitary=True, name="coin copy")


@lru_cache(maxsize=1)
def spin_preparation() -> Operator:
    m = np.eye(12, dtype=np.complex128)
    up, dn = _idx(_FBAR_S, "Tmem", "up'"), _idx(_FBAR_S, "Tmem", "dn'")
    # columns: |up'> -> (|up'> - |dn'>)/sqrt2, |dn'> -> (|dn'> + |up'>)/sqrt2
    r = np.array([[1.0, 1.0], [-1.0, 1.0]]) / np.sqrt(2.0)
    m[np.ix_([up, dn], [up, dn])] = r
    return Operator(("Fbar", "S"), m, unitary=True, name="spin preparation")


@lru_cache(maxsize=1)
def spin_move() -> Operator:
    m = np.zeros((4, 4))
    for a, b in (("up'", "up"), ("dn'", "dn")):
        i, j = S.labels.index(a), S.labels.index(b)
        m[i, j] = m[j, i] = 1.0
    return Operator(("S",), m, unitary=True, name="spin move")


def spin_interaction(alpha: float = 0.0) -> Operator:
    # only acts with the spin in F's lab; primed positions are left alone
    m = _phased_transposition(12, *_SPIN_UP, 1.0)
    m = m @ _phased_transposition(12, *_SPIN_DN, np.exp(1j * alpha))
    return Operator(LAB, m, unitary=True, name="spin copy")


@lru_cache(maxsize=1)
def step1_prepare() -> StateVector:
    return StateVector.from_terms(
        EWF_LAYOUT,
        [
            (np.sqrt(1.0 / 3.0), ("i", "h", "i", "dn'")),
            (np.sqrt(2.0 / 3.0), ("i", "t", "i", "dn'")),
        ],
    )


def step2_coin_interaction(psi: StateVector, alpha_bar: float = 0.0) -> StateVector:
    return apply_operator(coin_interaction(alpha_bar), psi)


def step3_prepare_spin(psi: StateVector) -> StateVector:
    return apply_operator(spin_preparation(), psi)


def step4_move_spin(psi: StateVector) -> StateVector:
    return apply_operator(spin_move(), psi)


def step5_spin_measurement_interaction(psi: StateVector, alpha: float = 0.0) -> StateVector:
    return apply_operator(spin_interaction(alpha), psi)


def run_steps(alpha_bar: float = 0.0, alpha: float = 0.0) -> list[StateVector]:
    """States psi_1 .. psi_5 for the given phases."""
    states = [step1_prepare()]
    states.append(step2_coin_interaction(states[-1], alpha_bar))
    states.append(step3_prepare_spin(states[-1]))
    states.append(step4_move_spin(states[-1]))
    states.append(step5_spin_measurement_interaction(states[-1], alpha))
    for k, s in enumerate(states, 1):
        if abs(s.norm - 1.0) > 1e-12:
            raise InvariantViolation(f"state after step {k} has norm {s.norm!r}")
    return states


@lru_cache(maxsize=4096)
def final_state(alpha_bar: float = 0.0, alpha: float = 0.0) -> StateVector:
    return run_steps(alpha_bar, alpha)[-1]


def psi5() -> StateVector:
    return final_state(0.0, 0.0)


def overlap_closed_form(alpha_bar: float, alpha: float) -> complex:
    """<psi_5|psi~_5> = (e^{ia} + e^{i(ab + a)} + e^{iab}) / 3."""
    return (np.exp(1j * alpha) + np.exp(1j * (alpha_bar + alpha)) + np.exp(1j * alpha_bar)) / 3.0


def _lab_pair(layout: SubsystemLayout, first: tuple[str, str], second: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
    v = np.zeros(layout.dim)
    v[layout.index([first[0], first[1]])] = 1.0
    w = np.zeros(layout.dim)
    w[layout.index([second[0], second[1]])] = 1.0
    return v, w


@lru_cache(maxsize=1)
def wbar_basis() -> MeasurementBasis:
    """|+-'> = (|Hmem h> +- |Tmem t>)/sqrt2 on lab F-bar, rest as ``other``."""
    hh, tt = _lab_pair(_BAR, ("Hmem", "h"), ("Tmem", "t"))
    return MeasurementBasis.build(EWF_LAYOUT, LAB_BAR, {PLUS: [hh + tt], MINUS: [hh - tt]})


@lru_cache(maxsize=1)
def w_basis() -> MeasurementBasis:
    """|+-> = (|Up up> +- |Dn dn>)/sqrt2 on lab F (spin unprimed), rest as ``other``."""
    uu, dd = _lab_pair(_FS, ("Up", "up"), ("Dn", "dn"))
    return MeasurementBasis.build(EWF_LAYOUT, LAB, {PLUS: [uu + dd], MINUS: [uu - dd]})


def exact_joint(alpha_bar: float = 0.0, alpha: float = 0.0) -> dict[tuple[str, str], float]:
    """Born probabilities for (W-bar, W) outcomes on the step-5 state."""
    return joint_distribution(final_state(alpha_bar, alpha), wbar_basis(), w_basis())


def _run(phases: PhaseConfig, u: Sequence[float]) -> ProtocolResult:
    ab, a = phases.draw(u[0], u[1])
    psi = final_state(ab, a) if phases.fixed else run_steps(ab, a)[-1]
    wbar, psi_m, p_bar = measure(psi, wbar_basis(), u[2])
    w, psi_mm, p_w = measure(psi_m, w_basis(), u[3])
    if OTHER in (wbar, w):
        raise InvariantViolation(f"superobserver outcome {(wbar, w)} outside the plus/minus span")
    return ProtocolResult(psi_mm, wbar, w, p_bar, p_w, (ab, a))


def run_protocol(phases: PhaseConfig, rng_seed=None) -> ProtocolResult:
    """Steps 1-5, then W-bar measures lab F-bar and W measures lab F.

    Uses four uniforms from ``rng_seed``: two phase draws (consumed even when
    the phases are fixed) and one per measurement.
    """
    return _run(phases, single_draws(rng_seed, 4))


def run_trials(phases: PhaseConfig, trials: int, rng_seed=None) -> list[ProtocolResult]:
    """``trials`` independent runs; trial k reads row k of the seeded draw table."""
    return [_run(phases, u) for u in trial_draws(rng_seed, trials, 4)]


C_QUBIT = Subsystem("C", 2, ("0", "1"))
_C_FLIP = Operator(("C",), np.array([[0.0, 1.0], [1.0, 0.0]]), unitary=True, name="C flip")


@lru_cache(maxsize=1)
def _confirm_basis() -> MeasurementBasis:
    layout = EWF_LAYOUT + SubsystemLayout.of(C_QUBIT)
    return MeasurementBasis.build(layout, EWF_LAYOUT.names, {"confirm": [psi5().amplitudes]})


def kastner_extension(phases: PhaseConfig, rng_seed=None) -> tuple[int, float]:
    """Append C in |0>, test the labs for |psi_5>, set C to |1> on a confirm.

    Returns C's value and the confirm probability |<psi_5|state>|^2.
    """
    u = single_draws(rng_seed, 4)
    ab, a = phases.draw(u[0], u[1])
    c0 = StateVector.basis(SubsystemLayout.of(C_QUBIT), ["0"])
    joint = tensor_product(final_state(ab, a), c0)
    probs = dict(born_distribution(joint, _confirm_basis()))
    label, post, _ = measure(joint, _confirm_basis(), u[2])
    if label == "confirm":
        post = apply_operator(_C_FLIP, post)
    c, _, _ = measure(post, MeasurementBasis.computational(post.layout, "C"), u[3])
    return int(c), probs["confirm"]


def confirm_probability(alpha_bar: float, alpha: float) -> float:
    return abs(overlap(psi5(), final_state(alpha_bar, alpha))) ** 2


def averaged_density(phases: PhaseConfig, points: int = 4) -> np.ndarray:
    """Step-5 density matrix averaged over the random phases of ``phases``.

    The state is a first-degree trigonometric polynomial in each random phase,
    so rho has degree at most 2 and a uniform grid of ``points`` >= 3 nodes
    averages it exactly.
    """
    if points < 3:
        raise ValueError("need at least 3 grid points for an exact phase average")
    grid = TWO_PI * np.arange(points) / points
    if phases.correlated and phases.alpha_bar == RANDOM and phases.alpha == RANDOM:
        pairs = [(g, g) for g in grid]
    else:
        bars = grid if phases.alpha_bar == RANDOM else [phases.alpha_bar]
        alphas = grid if phases.alpha == RANDOM else [phases.alpha]
        pairs = [(ab, a) for ab in bars for a in alphas]
    amps = np.array([run_steps(ab, a)[-1].amplitudes for ab, a in pairs])
    return amps.T @ amps.conj() / len(pairs)


def exact_joint_averaged(phases: PhaseConfig) -> dict[tuple[str, str], float]:
    """(W-bar, W) Born probabilities for the phase-averaged step-5 state."""
    if phases.fixed:
        return exact_joint(phases.alpha_bar, phases.alpha)
    rho = averaged_density(phases)
    pb = wbar_basis().full_projectors(EWF_LAYOUT)
    pw = w_basis().full_projectors(EWF_LAYOUT)
    return {(a, b): float(np.trace(pb[a] @ pw[b] @ rho).real) for a in pb for b in pw}
