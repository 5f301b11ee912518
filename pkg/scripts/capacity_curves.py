"""Write alpha-bit capacity curves for erasure and damping channels as CSV."""

import argparse
import pathlib

from alphabit.cli import CAPACITY_HEADER, csv_text, fmt
from alphabit.entropix import ChannelSpec, capacity_curve, max_increase


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/curves")
    ap.add_argument("--etas", default="0.6,0.75,0.9")
    ap.add_argument("--points", type=int, default=100)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    alphas = [round(i / args.points, 10) for i in range(1, args.points + 1)]
    for kind in ("erasure", "damping"):
        for eta in (float(e) for e in args.etas.split(",")):
            pts = capacity_curve(ChannelSpec(kind, eta), alphas)
            rows = [(fmt(p.alpha), fmt(eta), fmt(p.value), p.phase.value, fmt(p.witness_p)) for p in pts]
            path = out / f"{kind}_{eta:g}.csv"
            path.write_text(csv_text(CAPACITY_HEADER, rows))
            print(f"{path}: Q(0.01) = {pts[0].value:.4f}, Q(1) = {pts[-1].value:.4f}, max rise {max_increase(pts):.1e}")


if __name__ == "__main__":
    main()
