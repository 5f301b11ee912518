"""Width of the damping channel's critical region across eta."""

import argparse

import numpy as np

from alphabit.entropix import critical_region


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.005)
    args = ap.parse_args()
    etas = np.round(np.arange(0.5, 1.0 + args.step / 2, args.step), 10)
    regs = [critical_region(float(e)) for e in etas]
    for r in regs[:: max(1, len(regs) // 20)]:
        print(f"eta {r.eta:.3f}  alpha in [{r.alpha_lo:.5f}, {r.alpha_hi:.5f}]  width {r.width:.6f}")
    best = max(regs, key=lambda r: r.width)
    print(f"widest region: {best.width:.6f} at eta = {best.eta}")


if __name__ == "__main__":
    main()
