"""Simulation of dense-coding style classical transmission over an alpha-dit.

Bob holds half of a maximally entangled pair; Alice phase-shifts and cyclically
shifts her half to encode (x, y), sends it through the transport, and Bob runs a
decoder controlled on his half before measuring in the encoding basis.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channels import Channel, identity_channel
from .decouple import EncodedInstance, petz_decoder
from .qcore import haar_unitary, make_rng, trace_norm


@dataclass
class ProtocolResult:
    d: int
    alpha: float
    messages: int
    success_prob: float
    per_message: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def window_size(d: int, alpha: float) -> int:
    return int(math.floor(d ** alpha + 1e-12))


def _transport_isometry(transport) -> tuple[np.ndarray, int, int]:
    """Isometry A -> B (x) E of the transport, with its output dimensions."""
    if transport is None or transport == "noiseless":
        return None, 0, 1
    if isinstance(transport, EncodedInstance):
        return transport.isometry, transport.d_b, transport.d_e
    if isinstance(transport, Channel):
        r, d_out, d_in = transport.kraus.shape
        return transport.kraus.transpose(1, 0, 2).reshape(d_out * r, d_in), d_out, r
    raise TypeError(f"unsupported transport {type(transport).__name__}")


def _effective(iso: np.ndarray, d_b: int, d_e: int, d: int) -> Channel:
    k = iso.reshape(d_b, d_e, d).transpose(1, 0, 2)
    return Channel(np.ascontiguousarray(k), name="transport")


def _decoder_isometries(eff: Channel, d: int, w: int) -> list[np.ndarray]:
    """Stinespring isometries B -> A (x) E' of the window decoders, padded to one E'."""
    kraus_sets = []
    for k in range(d):
        win = np.zeros((d, w), dtype=complex)
        for j in range(w):
            win[(k + j) % d, j] = 1.0
        dec = petz_decoder(eff, win)
        # embed the window output back into A
        kraus_sets.append(np.einsum("aj,ijb->iab", win, dec.kraus))
    e_prime = max(ks.shape[0] for ks in kraus_sets)
    out = []
    for ks in kraus_sets:
        padded = np.zeros((e_prime,) + ks.shape[1:], dtype=complex)
        padded[: ks.shape[0]] = ks
        # V[(a, j), b] = K_j[a, b]
        out.append(padded.transpose(1, 0, 2).reshape(d * e_prime, -1))
    return out, e_prime


def _junk_states(vt: np.ndarray, vks: list[np.ndarray], d: int, w: int, e_prime: int, d_e: int) -> list[np.ndarray]:
    """(<gamma_k| (x) 1)(V_k V_T)|gamma_k> on E' (x) E, gamma_k maximally entangled on the window."""
    out = []
    for k, vk in enumerate(vks):
        vec = np.zeros((e_prime, d_e), dtype=complex)
        for j in range(w):
            a = (k + j) % d
            col = (vk @ vt[:, a].reshape(-1, d_e)).reshape(d, e_prime, d_e)
            vec += col[a] / w
        out.append(vec)
    return out


def _alignment(phis: list[np.ndarray]) -> list[np.ndarray]:
    """Unitaries on E' maximising Re <Phi_0| (U_k (x) 1) |Phi_k>, from a polar decomposition."""
    ref = phis[0]
    out = []
    for phi in phis:
        x = phi @ ref.conj().T
        a, _, bh = np.linalg.svd(x)
        out.append(bh.conj().T @ a.conj().T)
    return out


def alphadit_classical_protocol(d: int, alpha: float, transport=None, rng=None) -> ProtocolResult:
    """Exact success probabilities of every message (x, y), 0 <= x < d, 0 <= y < floor(d^alpha).

    ``transport`` is None (noiseless), a Channel on the d-dim system, or an
    EncodedInstance whose code space has dimension d.
    """
    if d > 8:
        raise ValueError("the protocol simulation is limited to d <= 8")
    m = window_size(d, alpha)
    if m < 1:
        raise ValueError("alpha gives an empty message set")
    w = min(m + 1, d)
    iso, d_b, d_e = _transport_isometry(transport)
    if iso is None:
        iso, d_b, d_e = np.eye(d, dtype=complex), d, 1
    if iso.shape[1] != d:
        raise ValueError(f"transport input dimension {iso.shape[1]} differs from d = {d}")
    if d * d_b * d_e > 4096:
        raise ValueError("transport too large")
    eff = _effective(iso, d_b, d_e, d)
    vks, e_prime = _decoder_isometries(eff, d, w)
    phis = _junk_states(iso, vks, d, w, e_prime, d_e)
    aligns = _alignment(phis)
    # controlled decoder acting on the transport output for each control value k
    full = []
    for k in range(d):
        vk = vks[k].reshape(d, e_prime, d_b)
        vk = np.einsum("fe,aeb->afb", aligns[k], vk).reshape(d * e_prime, d_b)
        full.append(vk)

    per = []
    phases = np.exp(2j * np.pi * np.outer(np.arange(d), np.arange(d)) / d)
    for x in range(d):
        for y in range(m):
            # output state on C (x) A (x) E' (x) E for message (x, y)
            out = np.zeros((d, d, e_prime, d_e), dtype=complex)
            for k in range(d):
                sent = iso[:, (k + y) % d].reshape(d_b, d_e)
                out[k] = (full[k] @ sent).reshape(d, e_prime, d_e) * phases[x, k] / np.sqrt(d)
            # measure C A in the basis |Psi_x'y'>; keep the (x, y) outcome
            proj = np.zeros((e_prime, d_e), dtype=complex)
            for k in range(d):
                proj += np.conj(phases[x, k]) / np.sqrt(d) * out[k, (k + y) % d]
            per.append(float(np.real(np.vdot(proj, proj))))
    per = [min(max(p, 0.0), 1.0) for p in per]
    return ProtocolResult(d, alpha, d * m, float(np.mean(per)), per)


def encoding_state(d: int, x: int, y: int) -> np.ndarray:
    """|Psi_xy> = d^{-1/2} sum_k e^{2 pi i x k / d} |k>_C |k + y>_A."""
    v = np.zeros((d, d), dtype=complex)
    for k in range(d):
        v[k, (k + y) % d] = np.exp(2j * np.pi * x * k / d) / np.sqrt(d)
    return v.reshape(-1)


@dataclass
class HalfKeepStats:
    kept_min: float
    kept_median: float
    discarded_median: float
    kept: np.ndarray = field(repr=False)
    discarded: np.ndarray = field(repr=False)
    kept_sq: np.ndarray = field(repr=False)
    discarded_sq: np.ndarray = field(repr=False)


def haar_half_keep_demo(n_qubits: int, keep: int, subspace_qubits: int, pairs: int, rng=None) -> HalfKeepStats:
    """Distinguishability of orthogonal pairs from a random subspace after discarding qubits.

    A Haar unitary scrambles n qubits; the first ``keep`` qubits are retained.
    Reports trace norms (0 to 2) of the reduced differences on both sides,
    along with their squared two-norms.
    """
    if n_qubits > 10 or keep > n_qubits or subspace_qubits > n_qubits:
        raise ValueError("invalid qubit counts")
    rng = make_rng(rng)
    d = 2 ** n_qubits
    d_k, d_d = 2 ** keep, 2 ** (n_qubits - keep)
    u = haar_unitary(d, rng)
    sub = haar_unitary(d, rng)[:, : 2 ** subspace_qubits]
    code = u @ sub
    kept, disc = np.empty(pairs), np.empty(pairs)
    kept_sq, disc_sq = np.empty(pairs), np.empty(pairs)
    for i in range(pairs):
        pair = haar_unitary(2 ** subspace_qubits, rng)[:, :2]
        a = (code @ pair[:, 0]).reshape(d_k, d_d)
        b = (code @ pair[:, 1]).reshape(d_k, d_d)
        xk = a @ a.conj().T - b @ b.conj().T
        xd = a.T @ a.conj() - b.T @ b.conj()
        kept[i], disc[i] = trace_norm(xk), trace_norm(xd)
        kept_sq[i], disc_sq[i] = np.vdot(xk, xk).real, np.vdot(xd, xd).real
    return HalfKeepStats(
        float(kept.min()), float(np.median(kept)), float(np.median(disc)), kept, disc, kept_sq, disc_sq
    )


def noiseless(d: int) -> Channel:
    return identity_channel(d)
