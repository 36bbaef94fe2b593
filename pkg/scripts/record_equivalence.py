"""Losing one record qubit versus not knowing the phase: same reduced state.

    python scripts/record_equivalence.py --n-qubits 2 --samples 100000
"""

import argparse

import numpy as np

from ewfsim.channels import build_record_state, lose_qubit, phase_average
from ewfsim.qstate import partial_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n-qubits", type=int, default=2)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    n = args.n_qubits

    np.set_printoptions(precision=4, suppress=True)
    for alpha in (0.0, np.pi / 3, np.pi):
        rho = lose_qubit(build_record_state(n, alpha), n)
        print(f"alpha = {alpha:.4f}: S and remaining register after losing M{n - 1}")
        print(rho.entries.real)

    avg = phase_average(lambda a: build_record_state(n, a), args.samples, args.seed)
    reduced = partial_trace(avg, avg.layout.names[:-1])
    target = lose_qubit(build_record_state(n, 0.0), n).entries
    print(f"\nphase-averaged full state, {args.samples} samples, same subsystems:")
    print(reduced.entries.real)
    print(f"max entrywise difference {np.max(np.abs(reduced.entries - target)):.4f}")
    full_coh = abs(avg.entries[0, -1])
    print(f"coherence left in the full averaged state |rho_0,last| = {full_coh:.4f}")


if __name__ == "__main__":
    main()
