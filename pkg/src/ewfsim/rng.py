"""Seeded uniform draws for Monte Carlo loops.

Trial k always reads row k of one table drawn from ``default_rng(seed)``, so
results depend only on (seed, trial index) and not on how trials are scheduled.
"""

from __future__ import annotations

import numpy as np


def trial_draws(seed, trials: int, width: int) -> np.ndarray:
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    return np.random.default_rng(seed).random((trials, width))


def single_draws(seed, width: int) -> np.ndarray:
    return trial_draws(seed, 1, width)[0]
