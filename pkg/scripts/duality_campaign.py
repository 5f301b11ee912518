"""Subspace decoding error against forgetfulness of the complement on random codes."""

import argparse
import math

import numpy as np

from alphabit.channels import amplitude_damping, erasure_channel
from alphabit.decouple import CodeSpec, duality_check, random_code


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print("channel  eta    n  k  delta    eps      8sqrt(delta)  2sqrt(2eps)")
    for _ in range(args.instances):
        eta = float(rng.uniform(0.5, 1.0))
        name, ch = (("erasure", erasure_channel(eta)), ("damping", amplitude_damping(eta)))[int(rng.integers(2))]
        n = 1 if name == "erasure" else int(rng.integers(1, 3))
        inst = random_code(ch, n, CodeSpec(d_s=2, d_f=2), rng=rng)
        rep = duality_check(inst, 2, n_subspaces=4, rng=rng, restarts=8)
        print(
            f"{name:8s} {eta:.3f}  {n}  2  {rep.delta:.4f}   {rep.epsilon:.4f}   "
            f"{8 * math.sqrt(rep.delta):.4f}        {rep.forward_rhs:.4f}"
        )


if __name__ == "__main__":
    main()
