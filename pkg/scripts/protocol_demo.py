"""Classical transmission over an alpha-dit, and the half-keep distinguishability demo."""

import numpy as np

from alphabit.channels import constant_channel, identity_channel
from alphabit.decouple import CodeSpec, random_code
from alphabit.protosim import alphadit_classical_protocol, haar_half_keep_demo


def main():
    for d, alpha in ((8, 1 / 3), (4, 0.5), (6, 0.4)):
        res = alphadit_classical_protocol(d, alpha)
        chance = alphadit_classical_protocol(d, alpha, constant_channel(np.eye(d) / d, d))
        print(f"d = {d}, alpha = {alpha:.3f}: {res.messages} messages, noiseless {res.success_prob:.6f}, "
              f"constant {chance.success_prob:.4f} (1/messages = {1 / res.messages:.4f})")
    rng = np.random.default_rng(0)
    for keep in (1, 2, 3):
        vals = [
            alphadit_classical_protocol(8, 1 / 3, random_code(identity_channel(2), keep, CodeSpec(8, d_f=2 ** (3 - keep)), rng=rng)).success_prob
            for _ in range(5)
        ]
        print(f"random 3-qubit code, keep {keep} qubits: mean success {np.mean(vals):.3f}")
    for keep in (2, 5, 8):
        st = haar_half_keep_demo(8, keep, 2, 100, rng=1)
        print(f"8 qubits, keep {keep}: kept median {st.kept_median:.3f}, discarded median {st.discarded_median:.3f}")


if __name__ == "__main__":
    main()
