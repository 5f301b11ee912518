"""Monte Carlo decoupling averages against the exact Haar value, with and without assistance."""

import argparse
import json

from alphabit.decouple import decoupling_mc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    for dims in ((16, 4, 4, 2), (16, 8, 2, 2)):
        for ensemble in ("haar", "clifford"):
            for d_l in (1, 4):
                if d_l * dims[3] > dims[0]:
                    continue
                rep = decoupling_mc(dims, ensemble, args.samples, args.seed, d_l=d_l, threads=args.threads)
                row = rep.to_dict() | {"d_l": d_l, "agrees": rep.agrees_with_oracle}
                print(json.dumps(row))


if __name__ == "__main__":
    main()
