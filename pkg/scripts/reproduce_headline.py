"""Exact and sampled outcome statistics of the two-lab protocol.

Prints the W-bar/W probabilities on psi_5, the contradiction rate of each
reasoning rule under both evolution models, and the sampled frequencies.

    python scripts/reproduce_headline.py --trials 120000 --seed 1
"""

import argparse
import time

from ewfsim import agents, ewf
from ewfsim.qstate import born_distribution


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--trials", type=int, default=120_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    wbar = dict(born_distribution(ewf.psi5(), ewf.wbar_basis()))
    joint = ewf.exact_joint()
    print("exact, phases (0, 0)")
    print(f"  P(W-bar = plus)       {wbar['plus']:.15f}   (5/6 = {5 / 6:.15f})")
    print(f"  P(W-bar = minus)      {wbar['minus']:.15f}   (1/6 = {1 / 6:.15f})")
    print(f"  P(minus, minus)       {joint[('minus', 'minus')]:.15f}   (1/12 = {1 / 12:.15f})")

    averaged = ewf.exact_joint_averaged(ewf.PhaseConfig("random", "random"))
    print("exact, random phases")
    print(f"  P(W-bar = minus)      {averaged[('minus', 'plus')] + averaged[('minus', 'minus')]:.15f}")
    print(f"  P(minus, minus)       {averaged[('minus', 'minus')]:.15f}")

    print(f"\nsampled, {args.trials} trials, seed {args.seed}")
    print(f"  {'rule':4s} {'model':20s} {'rate':>8s} {'P(W-bar=-)':>11s} {'P(W=-|W-bar=-)':>15s} {'time':>7s}")
    for model in (agents.EvolutionModel.unitary(), agents.EvolutionModel.collapse()):
        for rule in agents.ReasoningRule:
            t0 = time.perf_counter()
            rate, counts = agents.contradiction_rate(rule, model, args.trials, args.seed)
            dt = time.perf_counter() - t0
            n_minus = counts[("minus", "plus")] + counts[("minus", "minus")]
            cond = counts[("minus", "minus")] / n_minus if n_minus else float("nan")
            print(f"  {rule.value:4s} {model.kind.value:20s} {rate:8.5f} {n_minus / args.trials:11.5f} {cond:15.5f} {dt:6.1f}s")


if __name__ == "__main__":
    main()
