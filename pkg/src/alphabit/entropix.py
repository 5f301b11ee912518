"""Entropic quantities, alpha-bit capacity formulas and transmission phases.

Capacities are single-letter (one channel use) unless ``uses=2`` is requested.
For degradable channels the single-letter value is the capacity; for other
channels the optimizer result is flagged as a lower bound only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .channels import Channel, amplitude_damping, complementary, erasure_channel, stinespring, tensor_channels
from .qcore import DensityOp, binary_entropy, entropy_of_spectrum, make_rng, purify, vn_entropy

PHASE_TOL = 1e-6
TOL_CI = 1e-6
GOLDEN_TOL = 1e-9
GRID_POINTS = 2001


class Phase(str, Enum):
    CORRELATION = "corr"
    COHERENCE = "coh"
    CRITICAL = "crit"


@dataclass(frozen=True)
class EntropyReport:
    h_a: float
    h_b: float
    h_e: float
    mutual: float
    coherent: float
    coherent_signed: float
    alpha_crit: float

    @property
    def mutual_ae(self) -> float:
        """I(A;E) of the same purification."""
        return self.h_a + self.h_e - self.h_b


def report_from_entropies(h_a: float, h_b: float, h_e: float) -> EntropyReport:
    """Assemble a report from H(A), H(B) and H(E) = H(AB) of a pure state on ABE.

    ``alpha_crit`` is set to 0 for pure inputs (H(A) = 0) where the ratio is undefined.
    """
    ic = h_b - h_e
    alpha_crit = ic / h_a if h_a > 1e-12 else 0.0
    return EntropyReport(h_a, h_b, h_e, h_a + h_b - h_e, max(ic, 0.0), ic, alpha_crit)


def _as_array(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOp) else np.asarray(rho, dtype=complex)


def entropy_report(ch: Channel, rho_a) -> EntropyReport:
    """Entropies of (Id (x) V)|psi> for a purification psi of ``rho_a``."""
    psi = tripartite_state(ch, rho_a)
    d = ch.d_in
    t = psi.reshape(d, ch.d_out * ch.env_dim)
    h_a = entropy_of_spectrum(np.linalg.svd(t, compute_uv=False) ** 2)
    t = psi.reshape(d, ch.d_out, ch.env_dim)
    h_b = entropy_of_spectrum(np.linalg.svd(t.transpose(1, 0, 2).reshape(ch.d_out, -1), compute_uv=False) ** 2)
    h_e = entropy_of_spectrum(np.linalg.svd(t.reshape(-1, ch.env_dim), compute_uv=False) ** 2)
    return report_from_entropies(h_a, h_b, h_e)


def tripartite_state(ch: Channel, rho_a) -> np.ndarray:
    """Pure state on R (x) B (x) E with R purifying the channel input."""
    m = _as_array(rho_a)
    if m.shape != (ch.d_in, ch.d_in):
        raise ValueError(f"input of shape {m.shape} for a channel on dimension {ch.d_in}")
    psi = purify(m).reshape(ch.d_in, ch.d_in)
    v = stinespring(ch).matrix
    return (psi @ v.T).reshape(-1)


def tripartite_entropies(ch: Channel, rho_a) -> dict[str, float]:
    """All marginal entropies of the pure R B E state (keys 'A', 'B', 'E', 'AB', 'AE', 'BE')."""
    psi = tripartite_state(ch, rho_a)
    dims = [ch.d_in, ch.d_out, ch.env_dim]
    t = psi.reshape(dims)
    out = {}
    names = "ABE"
    for keep in ([0], [1], [2], [0, 1], [0, 2], [1, 2]):
        drop = [i for i in range(3) if i not in keep]
        m = t.transpose(keep + drop).reshape(int(np.prod([dims[i] for i in keep])), -1)
        out["".join(names[i] for i in keep)] = entropy_of_spectrum(np.linalg.svd(m, compute_uv=False) ** 2)
    return out


class _FastEntropies:
    """H(A), H(B), H(E) for many inputs to one channel, without building the purification."""

    def __init__(self, ch: Channel):
        self.k = ch.kraus
        self.kc = complementary(ch).kraus

    def __call__(self, rho: np.ndarray) -> tuple[float, float, float]:
        k, kc = self.k, self.kc
        rb = np.einsum("iab,bc,idc->ad", k, rho, k.conj())
        re = np.einsum("iab,bc,idc->ad", kc, rho, kc.conj())
        return (
            entropy_of_spectrum(np.linalg.eigvalsh(rho)),
            entropy_of_spectrum(np.linalg.eigvalsh(rb)),
            entropy_of_spectrum(np.linalg.eigvalsh(re)),
        )


# --- input-state parameterization ------------------------------------------------

@lru_cache(maxsize=None)
def _triu(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(d, 1)


def n_state_params(d: int) -> int:
    return d * d - 1


def state_from_params(x: np.ndarray, d: int) -> np.ndarray:
    """Density matrix U diag(softmax(l)) U^dag from d^2 - 1 real numbers.

    The first d - 1 entries are logits (the last logit is pinned to 0); the
    remaining d(d - 1) fill the off-diagonal part of a Hermitian generator H with
    U = exp(iH). Diagonal phases of H commute with the spectrum and are dropped.
    """
    logits = np.append(x[: d - 1], 0.0)
    w = np.exp(logits - logits.max())
    w /= w.sum()
    if d == 1:
        return np.ones((1, 1), dtype=complex)
    h = np.zeros((d, d), dtype=complex)
    iu = _triu(d)
    n_off = len(iu[0])
    gen = x[d - 1:]
    h[iu] = gen[:n_off] + 1j * gen[n_off:]
    h = h + h.conj().T
    lam, vec = np.linalg.eigh(h)
    u = (vec * np.exp(1j * lam)) @ vec.conj().T
    rho = (u * w) @ u.conj().T
    return (rho + rho.conj().T) / 2


def diagonal_state(p: float) -> np.ndarray:
    return np.diag([1 - p, p]).astype(complex)


@dataclass
class OptimizerConfig:
    """Multi-start Nelder-Mead settings for the input-state search."""

    restarts: int = 32
    seed: int = 0
    xatol: float = 1e-9
    fatol: float = 1e-12
    max_iter_per_param: int = 400
    init_scale: float = 1.5
    diagonal_only: bool = False


@dataclass(frozen=True)
class CapacityPoint:
    alpha: float
    value: float
    phase: Phase
    witness: np.ndarray | float | None = field(default=None, compare=False)
    witness_p: float = float("nan")
    converged: bool = True
    lower_bound_only: bool = False
    mutual: float = float("nan")
    coherent: float = float("nan")


def _alpha_objective(alpha: float) -> Callable[[float, float, float], float]:
    """Signed objective of the single-letter alpha-bit formula.

    The coherent term is left signed so the search sees a slope when it is negative.
    For alpha = 0 the coherence requirement becomes a penalised constraint.
    """
    if alpha == 0.0:
        def f(h_a, h_b, h_e):
            ic = h_b - h_e
            mi = h_a + h_b - h_e
            return mi if ic >= TOL_CI else -10.0 * (1.0 + TOL_CI - ic)
        return f

    def g(h_a, h_b, h_e):
        return min((h_a + h_b - h_e) / (1 + alpha), (h_b - h_e) / alpha)
    return g


def _maximize_over_states(
    ents: _FastEntropies,
    d: int,
    objective: Callable[[float, float, float], float],
    opt: OptimizerConfig,
    starts: int | None = None,
) -> tuple[float, np.ndarray, bool]:
    rng = make_rng(opt.seed)
    if opt.diagonal_only:
        n = d - 1

        def build(x):
            return state_from_params(np.concatenate([x, np.zeros(d * (d - 1))]), d)
    else:
        n = n_state_params(d)

        def build(x):
            return state_from_params(x, d)

    def neg(x):
        return -objective(*ents(build(x)))

    best_val, best_x, all_ok = -np.inf, np.zeros(n), True
    count = opt.restarts if starts is None else starts
    for r in range(count):
        # first start is the maximally mixed input
        x0 = np.zeros(n) if r == 0 else rng.normal(scale=opt.init_scale, size=n)
        res = minimize(
            neg,
            x0,
            method="Nelder-Mead",
            options=dict(
                xatol=opt.xatol,
                fatol=opt.fatol,
                maxiter=opt.max_iter_per_param * max(n, 1),
                maxfev=opt.max_iter_per_param * max(n, 1) * 2,
                adaptive=n > 4,
            ),
        )
        if -res.fun > best_val:
            best_val, best_x = -res.fun, res.x
            all_ok = bool(res.success)
    return best_val, build(best_x), all_ok


def q1_alpha(ch: Channel, alpha: float, opt: OptimizerConfig | None = None, uses: int = 1) -> CapacityPoint:
    """Single-letter alpha-bit capacity sup_rho min(I(A;B)/(1+alpha), I(A>B)/alpha).

    With ``uses=2`` the formula is evaluated on two parallel uses (qubit input
    only) and divided by two. ``alpha = 0`` maximises I(A;B) subject to a
    positive coherent information; an infeasible search reports 0.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    opt = opt or OptimizerConfig()
    target = ch
    if uses == 2:
        if ch.d_in != 2:
            raise ValueError("two-use mode needs a qubit-input channel")
        target = tensor_channels(ch, ch)
    elif uses != 1:
        raise ValueError("only one or two channel uses are supported")
    if target.d_in > 4:
        raise ValueError(f"input dimension {target.d_in} is beyond the generic optimizer")
    ents = _FastEntropies(target)
    val, rho, ok = _maximize_over_states(ents, target.d_in, _alpha_objective(alpha), opt)
    rep = report_from_entropies(*ents(rho))
    value = max(val, 0.0) / uses
    if alpha == 0.0 and rep.coherent_signed < TOL_CI:
        value = 0.0
    phase = _phase_from_terms(rep.mutual, rep.coherent, alpha)
    return CapacityPoint(
        alpha=alpha,
        value=value,
        phase=phase,
        witness=rho,
        witness_p=float(rho[1, 1].real) if target.d_in == 2 else float("nan"),
        converged=ok,
        lower_bound_only=not bool(ch.degradable),
        mutual=rep.mutual / uses,
        coherent=rep.coherent / uses,
    )


def ea_capacity(ch: Channel, alpha: float, opt: OptimizerConfig | None = None) -> float:
    """Entanglement-assisted alpha-bit capacity sup I(A;B) / (1 + alpha).

    I(A;B) is concave in the input so one search from the maximally mixed
    input is used. At alpha = 1 the same formula is reported.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    opt = opt or OptimizerConfig()
    ents = _FastEntropies(ch)
    val, _, _ = _maximize_over_states(ents, ch.d_in, lambda a, b, e: a + b - e, opt, starts=1)
    return val / (1 + alpha)


def _phase_from_terms(mutual: float, coherent: float, alpha: float, tol: float = PHASE_TOL) -> Phase:
    if alpha == 0.0:
        return Phase.CORRELATION
    corr = mutual / (1 + alpha)
    coh = coherent / alpha
    if abs(corr - coh) <= tol:
        return Phase.CRITICAL
    return Phase.CORRELATION if corr < coh else Phase.COHERENCE


def phase_classify(ch: Channel, alpha: float, witness) -> Phase:
    """Which of the two single-letter terms binds at the optimizing input.

    ``witness`` is an input density matrix or, for qubit channels, the
    excited-state population p of a diagonal input.
    """
    rho = diagonal_state(float(witness)) if np.isscalar(witness) else _as_array(witness)
    rep = entropy_report(ch, rho)
    return _phase_from_terms(rep.mutual, rep.coherent, alpha)


# --- closed forms for the two example channels ----------------------------------------

def _check_degradable_range(eta: float, alpha: float, allow_zero_alpha: bool = False):
    if not 0.5 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0.5, 1], got {eta!r}")
    lo_ok = alpha >= 0.0 if allow_zero_alpha else alpha > 0.0
    if not (lo_ok and alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def erasure_capacity_closed(eta: float, alpha: float) -> CapacityPoint:
    _check_degradable_range(eta, alpha)
    mutual, coherent = 2 * eta, 2 * eta - 1
    value = min(mutual / (1 + alpha), coherent / alpha)
    return CapacityPoint(
        alpha=alpha,
        value=value,
        phase=_phase_from_terms(mutual, coherent, alpha),
        witness=0.5,
        witness_p=0.5,
        mutual=mutual,
        coherent=coherent,
    )


def ad_mutual(eta: float, p: float) -> float:
    """I(A;B) for damping(eta) with diagonal input diag(1 - p, p)."""
    return binary_entropy(p) + binary_entropy(eta * p) - binary_entropy((1 - eta) * p)


def ad_coherent(eta: float, p: float) -> float:
    """Signed coherent information for damping(eta) with diagonal input."""
    return binary_entropy(eta * p) - binary_entropy((1 - eta) * p)


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    """Maximiser of a unimodal function on [lo, hi], to an interval of width ``tol``."""
    invphi = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def grid_then_golden(f: Callable[[float], float], lo: float = 0.0, hi: float = 1.0, n: int = GRID_POINTS) -> tuple[float, float]:
    """Global grid search followed by golden-section refinement around the best node."""
    grid = np.linspace(lo, hi, n)
    vals = np.array([f(float(p)) for p in grid])
    i = int(np.argmax(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
    p = golden_section_max(f, float(a), float(b))
    fp = f(p)
    if vals[i] > fp:
        return float(grid[i]), float(vals[i])
    return p, fp


def ad_capacity(eta: float, alpha: float) -> CapacityPoint:
    """Damping-channel capacity from the one-parameter diagonal-input formula."""
    _check_degradable_range(eta, alpha, allow_zero_alpha=True)
    if alpha == 0.0:
        def f(p):
            c = ad_coherent(eta, p)
            return ad_mutual(eta, p) if c >= TOL_CI else -10.0 * (1.0 + TOL_CI - c)
    else:
        def f(p):
            return min(ad_mutual(eta, p) / (1 + alpha), ad_coherent(eta, p) / alpha)
    p, val = grid_then_golden(f)
    mutual, coherent = ad_mutual(eta, p), max(ad_coherent(eta, p), 0.0)
    value = max(val, 0.0)
    if alpha == 0.0 and coherent < TOL_CI:
        value = 0.0
    return CapacityPoint(
        alpha=alpha,
        value=value,
        phase=_phase_from_terms(mutual, coherent, alpha),
        witness=p,
        witness_p=p,
        mutual=mutual,
        coherent=coherent,
    )


@dataclass(frozen=True)
class CriticalRegion:
    eta: float
    alpha_lo: float
    alpha_hi: float
    p_mutual: float
    p_coherent: float

    @property
    def width(self) -> float:
        return self.alpha_hi - self.alpha_lo


def _alpha_crit_diag(eta: float, p: float, kind: str) -> float:
    h = binary_entropy(p)
    if h < 1e-12:
        return 0.0
    c = (2 * eta - 1) * h if kind == "erasure" else ad_coherent(eta, p)
    return c / h


def critical_region(eta: float, kind: str = "damping") -> CriticalRegion:
    """Alpha interval between the critical ratios of the I(A;B)- and I(A>B)-optimal inputs."""
    if not 0.5 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0.5, 1], got {eta!r}")
    if kind == "erasure":
        # both terms are maximised by the maximally mixed input
        p0 = p1 = 0.5
    elif kind == "damping":
        p0, _ = grid_then_golden(lambda p: ad_mutual(eta, p))
        p1, _ = grid_then_golden(lambda p: ad_coherent(eta, p))
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return CriticalRegion(eta, _alpha_crit_diag(eta, p0, kind), _alpha_crit_diag(eta, p1, kind), p0, p1)


# --- curves -------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    eta: float

    def build(self) -> Channel:
        if self.kind == "erasure":
            return erasure_channel(self.eta)
        if self.kind == "damping":
            return amplitude_damping(self.eta)
        raise ValueError(f"unknown channel kind {self.kind!r}")


def capacity_curve(
    spec: ChannelSpec | Channel,
    alphas: Sequence[float],
    method: str = "closed",
    opt: OptimizerConfig | None = None,
) -> list[CapacityPoint]:
    """One CapacityPoint per alpha.

    ``method`` is "closed" (closed form or one-parameter search for the named
    channels) or "optimizer" (generic input-state search, any channel).
    """
    if method == "optimizer":
        ch = spec.build() if isinstance(spec, ChannelSpec) else spec
        return [q1_alpha(ch, float(a), opt) for a in alphas]
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if not isinstance(spec, ChannelSpec):
        raise ValueError("closed-form curves need a named channel spec")
    if spec.kind == "erasure":
        return [erasure_capacity_closed(spec.eta, float(a)) for a in alphas]
    if spec.kind == "damping":
        return [ad_capacity(spec.eta, float(a)) for a in alphas]
    raise ValueError(f"unknown channel kind {spec.kind!r}")


def max_increase(points: Sequence[CapacityPoint]) -> float:
    """Largest rise between neighbouring points (points sorted by alpha)."""
    vals = [pt.value for pt in sorted(points, key=lambda pt: pt.alpha)]
    if len(vals) < 2:
        return 0.0
    return float(max(np.diff(vals).max(), 0.0))


def mutual_information(ch: Channel, rho) -> float:
    return entropy_report(ch, rho).mutual


def coherent_information(ch: Channel, rho) -> float:
    return entropy_report(ch, rho).coherent


def input_entropy(rho) -> float:
    return vn_entropy(_as_array(rho))
