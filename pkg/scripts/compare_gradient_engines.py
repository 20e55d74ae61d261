#!/usr/bin/env python3
"""Time the adjoint sweep against the parameter-shift rule.

The shift rule needs 2 * 2(n-1)L full circuit runs per gradient, the adjoint
sweep one forward plus one reverse pass, so the gap widens with both qubit
count and depth.
"""

import argparse
import time

import numpy as np

from vqcnet.ansatz import AnsatzConfig, param_count
from vqcnet.measurement import adjoint_grad, parameter_shift_grad


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--layers", type=int, default=3)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--max-qubits", type=int, default=12)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'n':>3} {'params':>7} {'adjoint ms':>11} {'shift ms':>10} {'ratio':>7}")
    for n in range(2, args.max_qubits + 1):
        cfg = AnsatzConfig(n, args.layers)
        theta = rng.uniform(-np.pi, np.pi, param_count(n, args.layers))
        vec = rng.normal(size=1 << n)
        state = (vec / np.linalg.norm(vec)).astype(complex)
        upstream = rng.normal(size=n)

        t0 = time.perf_counter()
        for _ in range(args.repeats):
            adjoint_grad(cfg, theta, state, upstream)
        adj_ms = 1e3 * (time.perf_counter() - t0) / args.repeats

        t0 = time.perf_counter()
        for _ in range(args.repeats):
            parameter_shift_grad(cfg, theta, state, upstream)
        shift_ms = 1e3 * (time.perf_counter() - t0) / args.repeats

        print(
            f"{n:>3} {param_count(n, args.layers):>7} "
            f"{adj_ms:>11.2f} {shift_ms:>10.2f} {shift_ms / adj_ms:>7.1f}"
        )


if __name__ == "__main__":
    main()
