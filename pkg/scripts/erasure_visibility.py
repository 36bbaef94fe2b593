"""Interference visibility of S after erasing its n-qubit record.

Compares full control of the register with a lost register qubit and with a
per-trial random phase.

    python scripts/erasure_visibility.py --n-qubits 3 --trials 20000
"""

import argparse

import numpy as np

from ewfsim.channels import RecordModel
from ewfsim.erasure import exact_visibility, interference_visibility


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n-qubits", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()

    n = args.n_qubits
    print(f"{'alpha':>7s} {'controlled':>11s} {'|cos a|':>8s} {'qubit lost':>11s} {'random phase':>13s}")
    for alpha in np.linspace(0, np.pi, args.points):
        full = RecordModel(n, alpha=alpha)
        lost = RecordModel(n, alpha=alpha, lost_qubit_index=n - 1)
        rand = RecordModel(n, phase_random=True)
        print(
            f"{alpha:7.4f} {interference_visibility(full, args.trials, args.seed):11.4f} "
            f"{exact_visibility(full):8.4f} {interference_visibility(lost, args.trials, args.seed):11.4f} "
            f"{interference_visibility(rand, args.trials, args.seed):13.4f}"
        )
    print(f"statistical resolution ~ {1 / np.sqrt(args.trials):.4f}")


if __name__ == "__main__":
    main()
