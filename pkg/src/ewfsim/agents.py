"""Reasoning rules for the friend and how often they contradict W's result.

A1  naive chain: W-bar saw minus, so lab F holds |Up up>, so F-bar (having
    seen tails) expects |Tmem t, +>, so W is certain to see plus.
A2  unitarity-aware: the tails memory is one branch of an entangled state
    that W-bar's measurement will undo; no certain prediction.
A3  certainty only for a record that is never erased *and* for which the
    A1 chain of unitary, phase-controlled continuation still holds. No valid
    model has both, so in practice A3 predicts like A2.

The rules are pure functions of (rule, model, W-bar outcome); the quantum part
is all in :mod:`ewfsim.ewf`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .channels import RecordModel, erasure_possible
from .ewf import MINUS, PLUS, PhaseConfig, ProtocolResult, run_trials

CERTAIN_PLUS = "certain_plus"
CERTAIN_MINUS = "certain_minus"
UNCERTAIN = "uncertain"


class ReasoningRule(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"


class EvolutionKind(str, Enum):
    UNITARY_CONTROLLED = "unitary_controlled"
    OBJECTIVE_COLLAPSE = "objective_collapse"


@dataclass(frozen=True)
class EvolutionModel:
    """How the friends' interactions actually evolve.

    Controlled unitary evolution needs fixed phases and leaves no permanent
    record. Objective collapse is realized through per-trial random phases,
    which is statistically the same as a projection, and its records are
    always permanent.
    """

    kind: EvolutionKind
    phase_config: PhaseConfig
    record_permanent: Optional[bool] = None

    def __post_init__(self):
        kind = EvolutionKind(self.kind)
        object.__setattr__(self, "kind", kind)
        permanent = self.record_permanent
        if permanent is None:
            permanent = kind is EvolutionKind.OBJECTIVE_COLLAPSE
        object.__setattr__(self, "record_permanent", bool(permanent))
        if kind is EvolutionKind.UNITARY_CONTROLLED:
            if not self.phase_config.fixed:
                raise ValueError("unitary_controlled evolution needs fixed phases")
            if permanent:
                raise ValueError("controlled unitary evolution cannot leave a permanent record")
        else:
            if self.phase_config.alpha_bar != "random" or self.phase_config.alpha != "random":
                raise ValueError("objective_collapse is modeled with both phases random")
            if not permanent:
                raise ValueError("an uncontrolled phase makes the record permanent")

    @classmethod
    def unitary(cls, alpha_bar: float = 0.0, alpha: float = 0.0) -> "EvolutionModel":
        return cls(EvolutionKind.UNITARY_CONTROLLED, PhaseConfig(alpha_bar, alpha))

    @classmethod
    def collapse(cls, correlated: bool = False) -> "EvolutionModel":
        return cls(EvolutionKind.OBJECTIVE_COLLAPSE, PhaseConfig("random", "random", correlated))

    def record_model(self) -> RecordModel:
        """The friend's record seen through the erasure criterion."""
        alpha = self.phase_config.alpha
        return RecordModel(
            n_qubits=1,
            alpha=alpha if isinstance(alpha, float) else 0.0,
            lost_qubit_index=0 if self.record_permanent else None,
            phase_random=self.phase_config.any_random,
        )


@dataclass(frozen=True)
class Prediction:
    about: str
    content: str

    @property
    def certain(self) -> Optional[str]:
        """The outcome asserted with certainty, if any."""
        return {CERTAIN_PLUS: PLUS, CERTAIN_MINUS: MINUS}.get(self.content)


@dataclass(frozen=True)
class TrialRecord:
    phases: tuple[float, float]
    wbar_outcome: str
    prediction: Prediction
    w_outcome: str

    @property
    def contradiction(self) -> bool:
        certain = self.prediction.certain
        return certain is not None and certain != self.w_outcome


def _a1_chain_holds(model: EvolutionModel) -> bool:
    # F-bar's tails branch evolves to |Tmem t, +> only under controlled unitary continuation
    return model.kind is EvolutionKind.UNITARY_CONTROLLED


def predict(rule: ReasoningRule, model: EvolutionModel, wbar_outcome: str) -> Prediction:
    """What the friend's rule says W will see, given W-bar's outcome."""
    rule = ReasoningRule(rule)
    if wbar_outcome not in (PLUS, MINUS):
        raise ValueError(f"W-bar outcome must be plus or minus, got {wbar_outcome!r}")
    content = UNCERTAIN
    if rule is ReasoningRule.A1 and wbar_outcome == MINUS:
        content = CERTAIN_PLUS
    elif (
        rule is ReasoningRule.A3
        and wbar_outcome == MINUS
        and model.record_permanent
        and _a1_chain_holds(model)
    ):
        content = CERTAIN_PLUS
    return Prediction("w_outcome", content)


def trial_record(rule: ReasoningRule, model: EvolutionModel, result: ProtocolResult) -> TrialRecord:
    return TrialRecord(
        phases=result.phases_used,
        wbar_outcome=result.wbar_outcome,
        prediction=predict(rule, model, result.wbar_outcome),
        w_outcome=result.w_outcome,
    )


def contradiction_rate(
    rule: ReasoningRule, model: EvolutionModel, trials: int, rng_seed=None
) -> tuple[float, Counter]:
    """Fraction of trials where a certain prediction is contradicted by W.

    The tally counts (W-bar outcome, W outcome) pairs plus the key
    ``"contradiction"``.
    """
    counts: Counter = Counter()
    for result in run_trials(model.phase_config, trials, rng_seed):
        rec = trial_record(rule, model, result)
        counts[(rec.wbar_outcome, rec.w_outcome)] += 1
        counts["contradiction"] += rec.contradiction
    return counts["contradiction"] / trials, counts


def is_observation(model: EvolutionModel) -> bool:
    """An outcome counts as observed only if it can never be quantum-erased."""
    return not erasure_possible(model.record_model())
