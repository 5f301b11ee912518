"""Quantum channels in Kraus form, Stinespring dilations and complements."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import DensityOp, DimensionError, DimsProfile, haar_isometry, make_rng, ptrace

COMPLETENESS_TOL = 1e-6


class ChannelError(ValueError):
    """Kraus family is inconsistent or not trace preserving."""


@dataclass(frozen=True, eq=False)
class Channel:
    """CPTP map held as a stack of Kraus operators of shape (r, d_out, d_in).

    ``degradable`` is a hint set by the named constructors; None means unknown.
    """

    kraus: np.ndarray
    name: str = "channel"
    degradable: bool | None = None

    @property
    def d_in(self) -> int:
        return self.kraus.shape[2]

    @property
    def d_out(self) -> int:
        return self.kraus.shape[1]

    @property
    def env_dim(self) -> int:
        return self.kraus.shape[0]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        k = self.kraus
        return np.einsum("iab,bc,idc->ad", k, rho, k.conj())

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        k = self.kraus
        return np.einsum("iba,bc,icd->ad", k.conj(), y, k)


def channel_from_kraus(kraus: Sequence, name: str = "channel", degradable: bool | None = None) -> Channel:
    try:
        stack = np.array([np.asarray(k, dtype=complex) for k in kraus])
    except ValueError as exc:
        raise ChannelError(f"Kraus operators have inconsistent shapes: {exc}") from None
    if stack.ndim != 3 or stack.shape[0] == 0:
        raise ChannelError(f"expected a non-empty list of matrices, got shape {stack.shape}")
    gram = np.einsum("iba,ibc->ac", stack.conj(), stack)
    residual = float(np.linalg.norm(gram - np.eye(stack.shape[2])))
    if residual > COMPLETENESS_TOL:
        raise ChannelError(f"Kraus family is not trace preserving (residual norm {residual:.3e})")
    return Channel(stack, name=name, degradable=degradable)


@dataclass(frozen=True, eq=False)
class StinespringIsometry:
    matrix: np.ndarray
    dims: DimsProfile

    @property
    def d_in(self) -> int:
        return self.matrix.shape[1]


def stinespring(ch: Channel) -> StinespringIsometry:
    """V = sum_i K_i (x) |i>_E with output ordered (B, E)."""
    r, d_out, d_in = ch.kraus.shape
    v = ch.kraus.transpose(1, 0, 2).reshape(d_out * r, d_in)
    return StinespringIsometry(v, DimsProfile(("B", "E"), (d_out, r)))


def complementary(ch: Channel) -> Channel:
    """Map to the environment of :func:`stinespring`; Kraus F_b = (<b| (x) 1_E) V."""
    f = ch.kraus.transpose(1, 0, 2).copy()
    return Channel(f, name=f"complementary({ch.name})")


def apply(ch: Channel, rho: DensityOp, on: str | None = None) -> DensityOp:
    """Apply ``ch`` to the labelled factor ``on`` of ``rho`` (identity elsewhere)."""
    if on is None:
        if len(rho.dims.labels) != 1:
            raise DimensionError("multipartite input needs the target label")
        on = rho.dims.labels[0]
    i = rho.dims.index(on)
    if rho.dims.sizes[i] != ch.d_in:
        raise DimensionError(f"subsystem {on!r} has dim {rho.dims.sizes[i]}, channel expects {ch.d_in}")
    out = apply_on(ch, rho.matrix, rho.dims.sizes, i)
    new_dims = rho.dims.replace(on, on, ch.d_out)
    return DensityOp(out, new_dims)


def apply_on(ch: Channel, mat: np.ndarray, sizes: Sequence[int], index: int) -> np.ndarray:
    """Raw-array version of :func:`apply` acting on subsystem ``index``."""
    sizes = [int(s) for s in sizes]
    left = int(np.prod(sizes[:index], dtype=np.int64))
    right = int(np.prod(sizes[index + 1:], dtype=np.int64))
    t = mat.reshape(left, ch.d_in, right, left, ch.d_in, right)
    out = np.einsum("kab,xbyzcw,kdc->xayzdw", ch.kraus, t, ch.kraus.conj(), optimize=True)
    d = left * ch.d_out * right
    return out.reshape(d, d)


def choi(ch: Channel) -> DensityOp:
    """(Id (x) ch)(phi+) on (R, B)."""
    d = ch.d_in
    # column vectors (1/sqrt d) sum_a |a>_R K|a>_B for each Kraus operator
    vecs = ch.kraus.transpose(0, 2, 1).reshape(ch.env_dim, d * ch.d_out) / np.sqrt(d)
    m = vecs.T @ vecs.conj()
    return DensityOp((m + m.conj().T) / 2, DimsProfile(("R", "B"), (d, ch.d_out)))


def _check_eta(eta: float):
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmission parameter must lie in [0, 1], got {eta!r}")


def erasure_channel(eta: float, flagged_input: bool = False) -> Channel:
    """Qubit erasure channel into levels {0, 1, E}.

    The Kraus index doubles as the environment basis {0, 1, E}, which
    reproduces the usual two-branch dilation. With ``flagged_input`` the input
    is already three-level and the flag |E> is passed through unchanged.
    """
    _check_eta(eta)
    d_in = 3 if flagged_input else 2
    a, b = np.sqrt(1 - eta), np.sqrt(eta)
    k0 = np.zeros((3, d_in), dtype=complex)
    k1 = np.zeros((3, d_in), dtype=complex)
    k2 = np.zeros((3, d_in), dtype=complex)
    k0[2, 0] = a
    k1[2, 1] = a
    k2[0, 0] = k2[1, 1] = b
    if flagged_input:
        k2[2, 2] = 1.0
    return channel_from_kraus([k0, k1, k2], name=f"erasure({eta:g})", degradable=eta >= 0.5)


def erasure_degrading_map(eta: float) -> Channel:
    """Map D on {0, 1, E} with D o erasure(eta) = erasure(1 - eta), valid for eta >= 1/2."""
    if eta < 0.5:
        raise ValueError("erasure channel is only degradable for eta >= 1/2")
    return erasure_channel((1 - eta) / eta, flagged_input=True)


def amplitude_damping(eta: float) -> Channel:
    _check_eta(eta)
    a0 = np.array([[1, 0], [0, np.sqrt(eta)]], dtype=complex)
    a1 = np.array([[0, np.sqrt(1 - eta)], [0, 0]], dtype=complex)
    return channel_from_kraus([a0, a1], name=f"damping({eta:g})", degradable=eta >= 0.5)


def identity_channel(d: int) -> Channel:
    return Channel(np.eye(d, dtype=complex)[None], name=f"id({d})", degradable=True)


def unitary_channel(u: np.ndarray, name: str = "unitary") -> Channel:
    return channel_from_kraus([u], name=name, degradable=True)


def isometry_channel(w: np.ndarray, name: str = "embed") -> Channel:
    return channel_from_kraus([w], name=name, degradable=True)


def constant_channel(sigma, d_in: int) -> Channel:
    """Replacer channel sending every input state to ``sigma``."""
    m = sigma.matrix if isinstance(sigma, DensityOp) else np.asarray(sigma, dtype=complex)
    lam, vec = np.linalg.eigh((m + m.conj().T) / 2)
    keep = lam > 1e-14
    lam, vec = lam[keep], vec[:, keep]
    kraus = []
    for l, v in zip(lam, vec.T):
        for j in range(d_in):
            k = np.zeros((m.shape[0], d_in), dtype=complex)
            k[:, j] = np.sqrt(l) * v
            kraus.append(k)
    return channel_from_kraus(kraus, name="constant", degradable=False)


def tensor_channels(a: Channel, b: Channel) -> Channel:
    ka, kb = a.kraus, b.kraus
    k = np.einsum("iab,jcd->ijacbd", ka, kb).reshape(
        a.env_dim * b.env_dim, a.d_out * b.d_out, a.d_in * b.d_in
    )
    deg = True if (a.degradable and b.degradable) else None
    return Channel(k, name=f"{a.name}*{b.name}", degradable=deg)


def compose_channels(a: Channel, b: Channel) -> Channel:
    """a o b: apply ``b`` first, then ``a``."""
    if a.d_in != b.d_out:
        raise DimensionError(f"cannot compose: {b.name} outputs {b.d_out}, {a.name} takes {a.d_in}")
    k = np.einsum("iab,jbc->ijac", a.kraus, b.kraus).reshape(a.env_dim * b.env_dim, a.d_out, b.d_in)
    return Channel(k, name=f"{a.name}.{b.name}")


def tensor_power(ch: Channel, n: int) -> Channel:
    out = ch
    for _ in range(n - 1):
        out = tensor_channels(out, ch)
    return out


def random_channel(d_in: int, d_out: int, n_kraus: int, rng) -> Channel:
    """Channel from slicing a Haar isometry d_in -> d_out * n_kraus."""
    if d_out * n_kraus < d_in:
        raise DimensionError(f"no isometry from {d_in} into {d_out}x{n_kraus}")
    rng = make_rng(rng)
    v = haar_isometry(d_out * n_kraus, d_in, rng)
    k = v.reshape(d_out, n_kraus, d_in).transpose(1, 0, 2)
    return Channel(np.ascontiguousarray(k), name="random")


def choi_spectrum(ch: Channel) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(choi(ch).matrix))


def choi_distance(a: Channel, b: Channel) -> float:
    """Trace distance between Choi states; needs identical input and output dims."""
    ca, cb = choi(a).matrix, choi(b).matrix
    if ca.shape != cb.shape:
        raise DimensionError("Choi states of different sizes")
    return float(np.sum(np.abs(np.linalg.eigvalsh(ca - cb))))


def equivalent_up_to_isometry(a: Channel, b: Channel, tol: float = 1e-8) -> bool:
    """Equality up to an output isometry via sorted nonzero Choi spectra and input marginals."""
    if a.d_in != b.d_in:
        return False
    sa = choi_spectrum(a)
    sb = choi_spectrum(b)
    n = max(sa.size, sb.size)
    sa = np.concatenate([np.zeros(n - sa.size), sa])
    sb = np.concatenate([np.zeros(n - sb.size), sb])
    if np.max(np.abs(sa - sb)) > tol:
        return False
    ca, cb = choi(a), choi(b)
    ra = ptrace(ca.matrix, ca.dims.sizes, [0])
    rb = ptrace(cb.matrix, cb.dims.sizes, [0])
    return bool(np.max(np.abs(ra - rb)) <= tol)


# --- JSON wire format -----------------------------------------------------------

def channel_to_dict(ch: Channel) -> dict:
    return {
        "d_in": int(ch.d_in),
        "d_out": int(ch.d_out),
        "kraus": [[[float(z.real), float(z.imag)] for z in k.reshape(-1)] for k in ch.kraus],
    }


def channel_from_dict(data: dict) -> Channel:
    d_in, d_out = int(data["d_in"]), int(data["d_out"])
    mats = []
    for flat in data["kraus"]:
        if len(flat) != d_in * d_out:
            raise ChannelError(f"Kraus entry of length {len(flat)}, expected {d_in * d_out}")
        arr = np.array([complex(re, im) for re, im in flat], dtype=complex)
        mats.append(arr.reshape(d_out, d_in))
    return channel_from_kraus(mats, name=data.get("name", "channel"))


def channel_to_json(ch: Channel) -> str:
    return json.dumps(channel_to_dict(ch))


def channel_from_json(text: str) -> Channel:
    return channel_from_dict(json.loads(text))
