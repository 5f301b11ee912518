"""Acceptance suite: ten criteria at their stated tolerances and time limits.

Run alone with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""

import time
from fractions import Fraction as F

import numpy as np
import pytest

from alphabit import qcore
from alphabit.channels import amplitude_damping, constant_channel, erasure_channel, random_channel
from alphabit.decouple import CodeError, CodeSpec, decoupling_mc, duality_check, ea_decoupling_mc, haar_decoupling_bound, random_code
from alphabit.entropix import (
    ChannelSpec,
    OptimizerConfig,
    capacity_curve,
    critical_region,
    entropy_report,
    erasure_capacity_closed,
    max_increase,
    q1_alpha,
    tripartite_entropies,
)
from alphabit.protosim import alphadit_classical_protocol
from alphabit.resource import BASIS, Verdict, alpha_bit, compare, statement_holds

ETAS = (0.6, 0.75, 0.9)
ALPHAS = [round(0.1 * i, 10) for i in range(1, 11)]
GRID = [F(i, 4) for i in range(5)]


@pytest.fixture(scope="module")
def erasure_optimizer_curves():
    start = time.perf_counter()
    curves = {eta: [q1_alpha(erasure_channel(eta), a, OptimizerConfig()) for a in ALPHAS] for eta in ETAS}
    return curves, time.perf_counter() - start


def test_criterion_01_erasure_capacity(erasure_optimizer_curves, record_property):
    curves, elapsed = erasure_optimizer_curves
    worst = max(
        abs(pt.value - min(2 * eta / (1 + a), (2 * eta - 1) / a))
        for eta, pts in curves.items()
        for a, pt in zip(ALPHAS, pts)
    )
    record_property("detail", f"max error {worst:.2e} bits over 30 points, {elapsed:.1f} s")
    assert worst <= 1e-3
    assert elapsed <= 60


def test_criterion_02_erasure_critical_point(record_property):
    worst_a, worst_v = 0.0, 0.0
    for eta in ETAS:
        a_crit = entropy_report(erasure_channel(eta), np.eye(2) / 2).alpha_crit
        worst_a = max(worst_a, abs(a_crit - (2 * eta - 1)), abs(critical_region(eta, "erasure").alpha_lo - (2 * eta - 1)))
        closed = erasure_capacity_closed(eta, 2 * eta - 1).value
        searched = q1_alpha(erasure_channel(eta), 2 * eta - 1, OptimizerConfig(restarts=8)).value
        worst_v = max(worst_v, abs(closed - 1), abs(searched - 1))
    record_property("detail", f"alpha_crit error {worst_a:.1e}, capacity error {worst_v:.1e}")
    assert worst_a <= 1e-9
    assert worst_v <= 1e-6


def test_criterion_03_damping_critical_region(record_property):
    start = time.perf_counter()
    etas = np.round(np.arange(0, 101) * 0.005 + 0.5, 10)
    regs = [critical_region(float(e)) for e in etas]
    elapsed = time.perf_counter() - start
    widths = np.array([r.width for r in regs])
    best = int(np.argmax(widths))
    interior = [r for r in regs if 0.5 < r.eta < 1.0]
    ordered = all(abs(r.p_mutual - 0.5) < abs(r.p_coherent - 0.5) for r in interior)
    record_property(
        "detail", f"max width {widths[best]:.6f} at eta {etas[best]}, p ordering {'ok' if ordered else 'broken'}, {elapsed:.1f} s"
    )
    assert 0.003 <= widths[best] <= 0.008
    assert ordered
    assert elapsed <= 120


def test_criterion_04_monotone_curves(erasure_optimizer_curves, record_property):
    curves = list(erasure_optimizer_curves[0].values())
    fine = [round(0.01 * i, 10) for i in range(1, 101)]
    for eta in ETAS:
        curves.append(capacity_curve(ChannelSpec("erasure", eta), fine))
    for eta in (0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95, 1.0):
        curves.append(capacity_curve(ChannelSpec("damping", eta), fine))
    worst = max(max_increase(c) for c in curves)
    record_property("detail", f"{len(curves)} curves, largest rise {worst:.1e}")
    assert worst <= 1e-6


def test_criterion_05_decoupling_oracle(record_property):
    start = time.perf_counter()
    parts = []
    ok = True
    for dims in ((16, 4, 4, 2), (16, 8, 2, 2)):
        for ensemble in ("haar", "clifford"):
            rep = decoupling_mc(dims, ensemble, samples=2000, seed=0)
            z = abs(rep.two_norm_mean - rep.oracle_mean) / rep.sigma
            parts.append(f"{dims}/{ensemble} {z:.2f}sd")
            ok &= rep.agrees_with_oracle
            ok &= rep.oracle_mean <= haar_decoupling_bound(dims)
    elapsed = time.perf_counter() - start
    record_property("detail", ", ".join(parts) + f", {elapsed:.1f} s")
    assert ok
    assert elapsed <= 600


def test_criterion_06_assistance_suppression(record_property):
    wins = 0
    for seed in range(50):
        one = ea_decoupling_mc((16, 4, 4, 2), d_l=1, samples=200, seed=seed)
        four = ea_decoupling_mc((16, 4, 4, 2), d_l=4, samples=200, seed=seed)
        wins += four.two_norm_mean <= one.two_norm_mean
    record_property("detail", f"d_l = 4 below d_l = 1 in {wins}/50 paired seeds")
    assert wins >= 0.95 * 50


def _random_instance(rng):
    while True:
        eta = float(rng.uniform(0.5, 1.0))
        kind = int(rng.integers(3))
        ch = (erasure_channel(eta), amplitude_damping(eta), random_channel(2, 2, 2, rng))[kind]
        n = int(rng.integers(1, 3))
        spec = CodeSpec(d_s=int(rng.integers(2, 4)), d_f=int(rng.integers(1, 3)))
        if (ch.d_out * ch.env_dim) ** n * spec.d_f > 64:
            continue
        try:
            return random_code(ch, n, spec, rng=rng)
        except CodeError:
            continue


def test_criterion_07_duality_converse(record_property):
    rng = np.random.default_rng(7)
    holds, forward_misses = 0, 0
    for _ in range(100):
        inst = _random_instance(rng)
        assert inst.d_b * inst.d_e <= 64
        k = int(rng.integers(2, inst.d_s + 1))
        rep = duality_check(inst, k, n_subspaces=4, rng=rng, restarts=8, strict=False)
        holds += rep.epsilon <= 8 * np.sqrt(rep.delta) + 1e-6
        forward_misses += not rep.forward_holds
    record_property("detail", f"converse {holds}/100; forward bound missed by the Petz decoder {forward_misses} times")
    assert holds == 100


def test_criterion_08_protocol(record_property):
    noiseless = alphadit_classical_protocol(8, 1 / 3)
    worst = max(abs(p - 1) for p in noiseless.per_message)
    gaps = []
    for d, alpha in ((8, 1 / 3), (4, 0.5)):
        res = alphadit_classical_protocol(d, alpha, constant_channel(np.eye(d) / d, d))
        gaps.append(abs(res.success_prob - 1 / res.messages))
    record_property("detail", f"noiseless error {worst:.1e} over {noiseless.messages} messages, chance gaps {max(gaps):.3f}")
    assert noiseless.messages == 16
    assert worst <= 1e-9
    assert max(gaps) <= 0.05


def test_criterion_09_resource_identities(record_property):
    qubit, ebit, cobit, zero = BASIS["qubit"], BASIS["ebit"], BASIS["cobit"], BASIS["zero_bit"]
    checks = [
        2 * cobit == qubit + ebit,
        ebit + zero == cobit,
        cobit + zero == qubit,
        ebit + 2 * zero == qubit,
        statement_holds("2*cobit = qubit + ebit"),
        statement_holds("ebit + 2*zero_bit = qubit"),
    ]
    for a in GRID:
        checks.append((1 + a) * qubit == 2 * alpha_bit(a) + (1 - a) * ebit)
        checks.append((1 + a) * cobit == alpha_bit(a) + ebit)
        checks.append(statement_holds(f"(1 + {a}) * cobit = alpha_bit({a}) + ebit"))
        for b in GRID:
            checks.append((1 + b) * alpha_bit(a) == (1 + a) * alpha_bit(b) + (a - b) * ebit)
            checks.append(statement_holds(f"(1 + {b}) * alpha_bit({a}) = (1 + {a}) * alpha_bit({b}) + ({a} - {b}) * ebit"))
    verdict = compare(BASIS["cbit"], ebit)
    record_property("detail", f"{sum(checks)}/{len(checks)} identities exact, cbit vs ebit {verdict.value}")
    assert all(checks)
    assert verdict is Verdict.INCOMPARABLE


def test_criterion_10_invariant_suites(record_property):
    rng = np.random.default_rng(10)
    fvdg_bad = 0
    for i in range(1000):
        d = 2 + i % 3
        rho = qcore.random_density(d, rng, None if i % 2 else 1)
        sigma = qcore.random_density(d, rng)
        f = qcore.fidelity(rho, sigma)
        half = 0.5 * qcore.trace_norm(rho - sigma)
        fvdg_bad += not (1 - np.sqrt(f) <= half + 1e-8 and half <= np.sqrt(1 - f) + 1e-8)
    purity_bad = 0
    for _ in range(1000):
        d_in, d_out = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        ch = random_channel(d_in, d_out, max(int(rng.integers(1, 4)), -(-d_in // d_out)), rng)
        ent = tripartite_entropies(ch, qcore.random_density(d_in, rng))
        purity_bad += not all(abs(ent[x] - ent[y]) <= 1e-8 for x, y in (("A", "BE"), ("B", "AE"), ("E", "AB")))
    record_property("detail", f"Fuchs-van de Graaf violations {fvdg_bad}/1000, purity violations {purity_bad}/1000")
    assert fvdg_bad == 0
    assert purity_bad == 0


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
