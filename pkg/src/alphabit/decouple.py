"""Finite-dimensional checks of decoupling, forgetfulness and subspace decoding.

Typical projectors are identities here, so every average below is over the
full encoded space.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import (
    Channel,
    apply_on,
    complementary,
    channel_from_kraus,
    compose_channels,
    constant_channel,
    identity_channel,
    isometry_channel,
    stinespring,
)
from .qcore import (
    DimensionError,
    DimsProfile,
    PureState,
    derived_rng,
    haar_unitary,
    make_rng,
    random_clifford,
    trace_norm,
)

PINV_CUTOFF = 1e-10
SEESAW_RTOL = 1e-9
SEESAW_MAX_ITER = 500
SIGN_TOL = 1e-12


class CodeError(ValueError):
    """Code parameters that cannot be realised."""


@dataclass(frozen=True)
class CodeSpec:
    """Dimensions of a random code: S embeds with K into A_hat = C (x) A^n (x) F.

    ``d_r`` is the largest subspace dimension the code must protect.
    """

    d_s: int
    d_f: int = 1
    d_c: int = 1
    d_k: int = 1
    d_l: int = 1
    alpha: float = 0.0

    def __post_init__(self):
        if self.d_k != self.d_l:
            raise CodeError("assistance halves K and L must have equal dimension")
        if min(self.d_s, self.d_f, self.d_c, self.d_k) < 1:
            raise CodeError("dimensions must be positive")

    @property
    def d_r(self) -> int:
        return int(math.floor(self.d_s ** self.alpha + 1e-12)) + 1

    def d_hat(self, d_in: int, n: int) -> int:
        return self.d_c * d_in ** n * self.d_f


@dataclass(frozen=True, eq=False)
class EncodedInstance:
    """Random code S -> A_hat followed by n channel uses.

    ``isometry`` maps S into B_hat (x) E_hat, where B_hat = C (x) B^n (x) L and
    E_hat = E^n (x) F.
    """

    encoder: np.ndarray
    isometry: np.ndarray
    d_b: int
    d_e: int
    spec: CodeSpec
    n: int
    ensemble: str
    channel_name: str = ""

    @property
    def d_s(self) -> int:
        return self.isometry.shape[1]

    @property
    def effective(self) -> Channel:
        k = self.isometry.reshape(self.d_b, self.d_e, self.d_s).transpose(1, 0, 2)
        return Channel(np.ascontiguousarray(k), name="effective")

    @property
    def complementary(self) -> Channel:
        k = self.isometry.reshape(self.d_b, self.d_e, self.d_s)
        return Channel(np.ascontiguousarray(k), name="effective_c")


def _unitary(d: int, ensemble: str, rng) -> np.ndarray:
    if ensemble == "haar":
        return haar_unitary(d, rng)
    if ensemble == "clifford":
        n = int(round(math.log2(d)))
        if 2 ** n != d:
            raise CodeError(f"clifford ensemble needs a power-of-two dimension, got {d}")
        return random_clifford(n, rng)
    raise ValueError(f"unknown ensemble {ensemble!r}")


def _channel_power_isometry(ch: Channel, n: int) -> np.ndarray:
    v = stinespring(ch).matrix
    out = v
    for _ in range(n - 1):
        out = np.kron(out, v)
    return out


def random_code(ch: Channel, n: int, spec: CodeSpec, ensemble: str = "haar", rng=None) -> EncodedInstance:
    d_hat = spec.d_hat(ch.d_in, n)
    if spec.d_s * spec.d_k > d_hat:
        raise CodeError(f"cannot embed S (x) K of dim {spec.d_s * spec.d_k} into A_hat of dim {d_hat}")
    if d_hat > 4096:
        raise CodeError(f"encoded dimension {d_hat} exceeds 4096")
    rng = make_rng(rng)
    u = _unitary(d_hat, ensemble, rng)
    enc = u[:, : spec.d_s * spec.d_k]
    r = ch.env_dim
    vn = _channel_power_isometry(ch, n)
    t = enc.reshape(spec.d_c, ch.d_in ** n, spec.d_f, spec.d_s * spec.d_k)
    full = np.einsum("oa,cafs->cofs", vn, t)
    # split the channel output into (B_1, E_1, ..., B_n, E_n) and regroup as B^n, E^n
    full = full.reshape([spec.d_c] + [ch.d_out, r] * n + [spec.d_f, spec.d_s, spec.d_k])
    b_axes = [1 + 2 * j for j in range(n)]
    e_axes = [2 + 2 * j for j in range(n)]
    f_ax, s_ax, k_ax = 1 + 2 * n, 2 + 2 * n, 3 + 2 * n
    full = full.transpose([0] + b_axes + [k_ax] + e_axes + [f_ax, s_ax])
    d_b = spec.d_c * ch.d_out ** n * spec.d_k
    d_e = r ** n * spec.d_f
    iso = full.reshape(d_b * d_e, spec.d_s) / np.sqrt(spec.d_k)
    return EncodedInstance(enc, iso, d_b, d_e, spec, n, ensemble, ch.name)


# --- Haar averages ------------------------------------------------------------------

def _check_average_args(p, dims):
    p = np.asarray(p, dtype=float)
    d_hat, d_b, d_e, d_r = (int(x) for x in dims)
    if d_hat != d_b * d_e:
        raise DimensionError(f"d_hat = {d_hat} must equal d_b * d_e = {d_b * d_e}")
    if p.size > d_r or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise ValueError("p must be a probability vector with at most d_r entries")
    return p, d_hat, d_b, d_e


def _pair_moments(d: int, d_b: int, d_e: int) -> tuple[float, float, float]:
    """Haar averages of Tr(X_ab X_cd) for X_ab = Tr_B U|a><b|U^dag.

    Returns the values for a = b = c = d, for (a = d, b = c, a != b) and for
    (a = b, c = d, a != c).
    """
    tb, te = 1.0 / d_b, 1.0 / d_e
    if d == 1:
        return 1.0, 0.0, 0.0
    same = d * (te + tb) / (d + 1)
    swap = (d * d * tb - d * te) / (d * d - 1)
    diag = (d * d * te - d * tb) / (d * d - 1)
    return same, swap, diag


def exact_haar_average(p: Sequence[float], dims: Sequence[int], d_l: int = 1) -> float:
    """Exact Haar mean of Tr(rho^{E R} - Omega^E (x) phi^R)^2.

    The input is sum_i sqrt(p_i)|i>_S|i>_R, optionally alongside a maximally
    entangled K L pair of dimension ``d_l`` whose L half is not in E_hat.
    """
    p, d, d_b, d_e = _check_average_args(p, dims)
    s2 = float(np.sum(p ** 2))
    same, swap, diag = _pair_moments(d, d_b, d_e)
    second = (s2 * (d_l * same + d_l * (d_l - 1) * diag) + (1 - s2) * d_l * swap) / d_l ** 2
    return second - s2 / d_e


def haar_decoupling_bound(dims: Sequence[int]) -> float:
    """(4/3) Tr Omega_B^2 for the maximally mixed encoded state."""
    return 4.0 / 3.0 / int(dims[1])


def ea_bound(dims: Sequence[int], d_l: int) -> float:
    """(4 / 3 d_L) Tr Omega_B^2 + (2 / d_hat^2) Tr Omega_E^2."""
    d, d_b, d_e = int(dims[0]), int(dims[1]), int(dims[2])
    return 4.0 / (3.0 * d_l * d_b) + 2.0 / (d * d * d_e)


def trace_distance_bound(dims: Sequence[int]) -> float:
    """sqrt(4 d_E d_R Tr Omega_B^2 / 3), the trace-norm version of the two-norm bound."""
    _, d_b, d_e, d_r = (int(x) for x in dims)
    return math.sqrt(4.0 * d_e * d_r / (3.0 * d_b))


@dataclass
class ForgetfulnessReport:
    two_norm_mean: float
    oracle_mean: float
    bound_value: float
    diamond_lower: float
    samples: int
    sigma: float
    ensemble: str = "haar"
    dims: tuple[int, ...] = ()
    seed: int = 0
    d_l: int = 1
    trace_bound: float = float("nan")
    values: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @property
    def agrees_with_oracle(self) -> bool:
        return abs(self.two_norm_mean - self.oracle_mean) <= 4 * self.sigma

    def to_dict(self) -> dict:
        return {
            "mean": float(self.two_norm_mean),
            "oracle": float(self.oracle_mean),
            "bound": float(self.bound_value),
            "sigma": float(self.sigma),
            "samples": int(self.samples),
            "ensemble": self.ensemble,
            "dims": [int(x) for x in self.dims],
            "seed": int(self.seed),
        }


def _decoupling_sample(u: np.ndarray, sqrt_p: np.ndarray, d_b: int, d_e: int, d_l: int):
    d_s = sqrt_p.size
    cols = u[:, : d_s * d_l].reshape(d_b, d_e, d_s, d_l)
    a = cols * (sqrt_p[None, None, :, None] / np.sqrt(d_l))
    rho = np.einsum("beik,bfjk->eifj", a, a.conj()).reshape(d_e * d_s, d_e * d_s)
    target = np.kron(np.eye(d_e) / d_e, np.diag(sqrt_p ** 2))
    diff = rho - target
    two = float(np.real(np.vdot(diff, diff)))
    return two, trace_norm(diff)


def decoupling_mc(
    dims: Sequence[int],
    ensemble: str = "haar",
    samples: int = 2000,
    seed: int = 0,
    p: Sequence[float] | None = None,
    d_l: int = 1,
    threads: int = 1,
) -> ForgetfulnessReport:
    """Monte Carlo mean of Tr(rho^{ER} - Omega^E (x) phi^R)^2 over random encoders.

    Sample i uses the stream ``derived_rng(seed, i)``, so results do not depend on
    ``threads``.
    """
    dims = tuple(int(x) for x in dims)
    d_hat, d_b, d_e, d_r = dims
    p = np.full(d_r, 1.0 / d_r) if p is None else np.asarray(p, dtype=float)
    _check_average_args(p, dims)
    if p.size * d_l > d_hat:
        raise CodeError("input does not fit into the encoded space")
    if d_hat > 4096:
        raise CodeError("encoded dimension exceeds 4096")
    sqrt_p = np.sqrt(p)

    def one(i):
        u = _unitary(d_hat, ensemble, derived_rng(seed, i))
        return _decoupling_sample(u, sqrt_p, d_b, d_e, d_l)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(one, range(samples)))
    else:
        out = [one(i) for i in range(samples)]
    vals = np.array([o[0] for o in out])
    tn = np.array([o[1] for o in out])
    bound = haar_decoupling_bound(dims) if d_l == 1 else ea_bound(dims, d_l)
    return ForgetfulnessReport(
        two_norm_mean=float(vals.mean()),
        oracle_mean=exact_haar_average(p, dims, d_l),
        bound_value=bound,
        diamond_lower=float(tn.mean()),
        samples=samples,
        sigma=float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0,
        ensemble=ensemble,
        dims=dims,
        seed=seed,
        d_l=d_l,
        trace_bound=trace_distance_bound(dims),
        values=vals,
    )


def ea_decoupling_mc(
    dims: Sequence[int],
    d_l: int,
    samples: int = 2000,
    seed: int = 0,
    p: Sequence[float] | None = None,
    ensemble: str = "haar",
    threads: int = 1,
) -> ForgetfulnessReport:
    """Decoupling with a maximally entangled K L pair of dimension ``d_l`` fed alongside S."""
    return decoupling_mc(dims, ensemble, samples, seed, p, d_l, threads)


# --- k-diamond lower bound by see-saw ---------------------------------------------------

def _sign(m: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(m)
    scale = max(float(np.max(np.abs(lam))), 1e-300)
    s = np.where(lam >= -SIGN_TOL * scale, 1.0, -1.0)
    return (vec * s) @ vec.conj().T


def _gamma_output(plus: np.ndarray, minus: np.ndarray, psi: np.ndarray, k: int) -> np.ndarray:
    """(Id_k (x) Gamma)(psi psi^dag) for psi given as a k x d_in matrix."""
    a = np.einsum("ra,iba->irb", psi, plus).reshape(plus.shape[0], -1)
    b = np.einsum("ra,iba->irb", psi, minus).reshape(minus.shape[0], -1)
    return a.T @ a.conj() - b.T @ b.conj()


def _dual_step(plus: np.ndarray, minus: np.ndarray, w: np.ndarray, k: int) -> np.ndarray:
    """Hermitian G with <psi|G|psi> = Re Tr(W (Id (x) Gamma)(psi psi^dag))."""
    d_out, d_in = plus.shape[1], plus.shape[2]
    wt = w.reshape(k, d_out, k, d_out)
    g = np.einsum("iba,rbsc,icd->rasd", plus.conj(), wt, plus)
    g -= np.einsum("iba,rbsc,icd->rasd", minus.conj(), wt, minus)
    g = g.reshape(k * d_in, k * d_in)
    return (g + g.conj().T) / 2


def _seesaw_run(plus, minus, psi, k) -> tuple[float, np.ndarray]:
    d_in = plus.shape[2]
    m = _gamma_output(plus, minus, psi, k)
    val = trace_norm(m)
    for _ in range(SEESAW_MAX_ITER):
        w = _sign(m)
        g = _dual_step(plus, minus, w, k)
        lam, vec = np.linalg.eigh(g)
        new = vec[:, -1].reshape(k, d_in)
        m_new = _gamma_output(plus, minus, new, k)
        new_val = trace_norm(m_new)
        if new_val < val:
            # numerical noise only; the step cannot decrease the objective
            break
        improved = new_val - val
        psi, m, val = new, m_new, new_val
        if improved <= SEESAW_RTOL * max(val, 1e-300):
            break
    return val, psi


def _random_input(k: int, d: int, rng) -> np.ndarray:
    v = rng.standard_normal(k * d) + 1j * rng.standard_normal(k * d)
    return (v / np.linalg.norm(v)).reshape(k, d)


def _pad_reference(psi: np.ndarray, k: int, d_in: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1, d_in)
    if psi.shape[0] > k:
        # compress the reference to its support, then pad
        u, s, vh = np.linalg.svd(psi, full_matrices=False)
        psi = (s[:, None] * vh)
        psi = psi[: k]
    out = np.zeros((k, d_in), dtype=complex)
    out[: psi.shape[0]] = psi
    return out / np.linalg.norm(out)


def k_diamond_lower(
    ch1: Channel,
    ch2: Channel,
    k: int,
    restarts: int = 16,
    rng=None,
    warm_start=None,
    scale: float = 1.0,
) -> tuple[float, PureState]:
    """See-saw lower bound on ||scale * (ch1 - ch2)||_diamond^(k).

    Alternates the dual sign operator W = sign(M) with the top eigenvector of
    the induced operator on inputs. Each step cannot lower ||M||_1, so the
    returned value is a certified lower bound attained by the returned input.
    ``warm_start`` (a vector on C^k' (x) A) is used as an additional start; a
    reference smaller than k is zero-padded.
    """
    if (ch1.d_in, ch1.d_out) != (ch2.d_in, ch2.d_out):
        raise DimensionError("channels in a difference must share input and output dimensions")
    if k < 1:
        raise ValueError("k must be at least 1")
    c = abs(float(scale))
    if c == 0.0:
        d_in = ch1.d_in
        return 0.0, PureState(_pad_reference(np.eye(k, d_in), k, d_in).reshape(-1), DimsProfile(("R", "A"), (k, d_in)))
    plus = ch1.kraus * np.sqrt(c)
    minus = ch2.kraus * np.sqrt(c)
    d_in = ch1.d_in
    rng = make_rng(rng)
    starts = []
    if warm_start is not None:
        ws = warm_start.amplitudes if isinstance(warm_start, PureState) else warm_start
        starts.append(_pad_reference(ws, k, d_in))
    starts.append(_pad_reference(np.eye(min(k, d_in), d_in), k, d_in))
    while len(starts) < max(restarts, 1) + (warm_start is not None):
        starts.append(_random_input(k, d_in, rng))
    best_val, best_psi = -1.0, starts[0]
    for psi in starts:
        val, out = _seesaw_run(plus, minus, psi, k)
        if val > best_val:
            best_val, best_psi = val, out
    witness = PureState(best_psi.reshape(-1) / np.linalg.norm(best_psi), DimsProfile(("R", "A"), (k, d_in)))
    return float(best_val), witness


def forgetfulness(ch: Channel, k: int, restarts: int = 16, rng=None, warm_start=None) -> float:
    """See-saw estimate of ||ch - R||_diamond^(k) with R the replacer by ch(omega)."""
    omega = np.eye(ch.d_in, dtype=complex) / ch.d_in
    const = constant_channel(ch(omega), ch.d_in)
    return k_diamond_lower(ch, const, k, restarts, rng, warm_start)[0]


# --- decoders -----------------------------------------------------------------------------

def _psd_power(m: np.ndarray, power: float, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    lam, vec = np.linalg.eigh((m + m.conj().T) / 2)
    keep = lam > cutoff
    out = np.zeros_like(lam)
    out[keep] = lam[keep] ** power
    return (vec * out) @ vec.conj().T


def random_subspace(d_s: int, m: int, rng) -> np.ndarray:
    """Isometry onto a Haar-random m-dimensional subspace of C^d_s."""
    return haar_unitary(d_s, make_rng(rng))[:, :m]


def petz_decoder(effective: Channel, w: np.ndarray | None = None) -> Channel:
    """Transpose channel of effective o W for the maximally mixed prior on the subspace.

    Output lives on the subspace (dimension m = W.shape[1]). The part of the
    output space outside the support of the prior's image is sent to |0>.
    """
    w = np.eye(effective.d_in, dtype=complex) if w is None else np.asarray(w, dtype=complex)
    m_dim = w.shape[1]
    kw = np.einsum("iba,ac->ibc", effective.kraus, w)
    image = np.einsum("iab,icb->ac", kw, kw.conj()) / m_dim
    inv_sqrt = _psd_power(image, -0.5)
    kraus = [np.conj(k.T) @ inv_sqrt / np.sqrt(m_dim) for k in kw]
    gram = sum(r.conj().T @ r for r in kraus)
    lam, vec = np.linalg.eigh(np.eye(effective.d_out) - (gram + gram.conj().T) / 2)
    for l, v in zip(lam, vec.T):
        if l > PINV_CUTOFF:
            comp = np.zeros((m_dim, effective.d_out), dtype=complex)
            comp[0] = np.sqrt(l) * v.conj()
            kraus.append(comp)
    return channel_from_kraus(kraus, name="petz")


def logical_channel(effective: Channel, w: np.ndarray, decoder: Channel | None = None) -> Channel:
    """decoder o effective o W on the subspace."""
    decoder = decoder if decoder is not None else petz_decoder(effective, w)
    return compose_channels(decoder, compose_channels(effective, isometry_channel(w)))


def entanglement_fidelity(ch: Channel) -> float:
    """<phi+| (Id (x) ch)(phi+) |phi+>."""
    d = ch.d_in
    return float(np.sum(np.abs(np.einsum("iaa->i", ch.kraus)) ** 2) / d ** 2)


def subspace_decode_error(
    instance: EncodedInstance | Channel,
    w: np.ndarray,
    decoder: Channel | None = None,
    restarts: int = 16,
    rng=None,
    warm_start=None,
) -> float:
    """See-saw lower bound on ||D o N o W - Id||_diamond on the subspace spanned by W."""
    eff = instance.effective if isinstance(instance, EncodedInstance) else instance
    lg = logical_channel(eff, w, decoder)
    m = w.shape[1]
    return k_diamond_lower(lg, identity_channel(m), m, restarts, rng, warm_start)[0]


@dataclass
class DualityReport:
    delta: float
    epsilon: float
    k: int
    converse_rhs: float
    forward_rhs: float
    converse_holds: bool
    forward_holds: bool
    deltas: list[float] = field(default_factory=list)


def duality_check(
    instance: EncodedInstance | Channel,
    k: int,
    n_subspaces: int = 8,
    rng=None,
    restarts: int = 16,
    strict: bool = True,
) -> DualityReport:
    """Compare decoding error on random k-dim subspaces with k-forgetfulness of the complement.

    The converse eps <= 8 sqrt(delta) must hold for any achieved decoder and is
    asserted when ``strict``. The forward relation delta <= 2 sqrt(2 eps) refers
    to an optimal decoder and is only reported for the Petz decoder used here.
    The converse needs k >= 2: one-dimensional subspaces are always decodable,
    so they say nothing about the complementary channel.
    """
    if k < 2:
        raise ValueError("duality needs subspaces of dimension k >= 2")
    rng = make_rng(rng)
    if isinstance(instance, EncodedInstance):
        eff, comp = instance.effective, instance.complementary
    else:
        eff, comp = instance, complementary(instance)
    deltas = []
    for _ in range(n_subspaces):
        w = random_subspace(eff.d_in, k, rng)
        deltas.append(subspace_decode_error(eff, w, restarts=restarts, rng=rng))
    delta = max(deltas)
    eps = forgetfulness(comp, k, restarts, rng)
    conv = 8 * math.sqrt(delta)
    fwd = 2 * math.sqrt(2 * eps)
    rep = DualityReport(delta, eps, k, conv, fwd, eps <= conv + 1e-6, delta <= fwd + 1e-6, deltas)
    if strict and not rep.converse_holds:
        raise AssertionError(f"converse violated: eps = {eps:.6g} > 8 sqrt(delta) = {conv:.6g}")
    return rep


# --- subadditivity of the total error ---------------------------------------------------

@dataclass
class TotalErrorReport:
    joint_error: float
    individual: list[float]
    total: float
    holds: bool


def total_error_check(
    logicals: Sequence[Channel],
    joint_input: np.ndarray | None = None,
    rng=None,
    restarts: int = 16,
) -> TotalErrorReport:
    """Joint error of the parallel logical maps against the sum of individual diamond errors.

    Each individual see-saw is warm-started from a purification of the joint
    input's marginal on that block, which makes joint <= sum a theorem about the
    computed numbers rather than about unknown optima.
    """
    if len(logicals) > 3:
        raise ValueError("at most three blocks are supported")
    rng = make_rng(rng)
    dims = [ch.d_in for ch in logicals]
    for ch in logicals:
        if ch.d_out != ch.d_in:
            raise DimensionError("logical maps must act on a fixed space")
    d_sys = int(np.prod(dims))
    d_r = d_sys
    if d_sys * d_r > 4096:
        raise DimensionError("joint space too large")
    if joint_input is None:
        v = rng.standard_normal(d_sys * d_r) + 1j * rng.standard_normal(d_sys * d_r)
        joint_input = v / np.linalg.norm(v)
    psi = np.asarray(joint_input, dtype=complex).reshape(-1)
    d_r = psi.size // d_sys
    sizes = dims + [d_r]
    rho = np.outer(psi, psi.conj())
    out = rho
    for i, ch in enumerate(logicals):
        out = apply_on(ch, out, sizes, i)
    joint = trace_norm(out - rho)
    individual = []
    t = psi.reshape(sizes)
    for i, ch in enumerate(logicals):
        # block i against everything else as reference
        mat = np.moveaxis(t, i, -1).reshape(-1, dims[i])
        val, _ = k_diamond_lower(ch, identity_channel(dims[i]), dims[i], restarts, rng, warm_start=mat)
        individual.append(val)
    total = float(sum(individual))
    return TotalErrorReport(joint, individual, total, joint <= total + 1e-8)
