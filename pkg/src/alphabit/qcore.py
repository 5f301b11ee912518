"""Dense linear algebra and state primitives for small multipartite systems.

Operators are plain ``numpy`` complex arrays. ``DensityOp`` and ``PureState``
attach a :class:`DimsProfile` so subsystems can be addressed by label.
Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-9
EIG_CLAMP = 1e-12
MAX_DIM = 4096


class DimensionError(ValueError):
    """Raised for inconsistent shapes, unknown labels or mismatched dims."""


class StateError(ValueError):
    """Raised when an operator fails the density-operator invariants."""


@dataclass(frozen=True)
class DimsProfile:
    labels: tuple[str, ...]
    sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.sizes):
            raise DimensionError("labels and sizes differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise DimensionError(f"duplicate labels in {self.labels}")
        if any(int(s) < 1 for s in self.sizes):
            raise DimensionError(f"non-positive subsystem size in {self.sizes}")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "DimsProfile":
        return cls(tuple(p[0] for p in pairs), tuple(int(p[1]) for p in pairs))

    @property
    def total(self) -> int:
        return int(np.prod(self.sizes, dtype=np.int64)) if self.sizes else 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DimensionError(f"unknown subsystem label {label!r}; have {self.labels}") from None

    def size(self, label: str) -> int:
        return self.sizes[self.index(label)]

    def concat(self, other: "DimsProfile") -> "DimsProfile":
        return DimsProfile(self.labels + other.labels, self.sizes + other.sizes)

    def select(self, labels: Iterable[str]) -> "DimsProfile":
        keep = set(labels)
        idx = [i for i, lab in enumerate(self.labels) if lab in keep]
        return DimsProfile(tuple(self.labels[i] for i in idx), tuple(self.sizes[i] for i in idx))

    def replace(self, label: str, new_label: str, new_size: int) -> "DimsProfile":
        i = self.index(label)
        labels = list(self.labels)
        sizes = list(self.sizes)
        labels[i], sizes[i] = new_label, int(new_size)
        return DimsProfile(tuple(labels), tuple(sizes))


def _default_dims(d: int, label: str = "A") -> DimsProfile:
    return DimsProfile((label,), (int(d),))


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: DimsProfile

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != self.dims.total:
            raise DimensionError(f"{amps.size} amplitudes for dims {self.dims.sizes}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise StateError(f"state not normalised (norm {norm!r})")

    @classmethod
    def from_vector(cls, vec, dims: DimsProfile | None = None, label: str = "A") -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        return cls(vec, dims if dims is not None else _default_dims(vec.size, label))

    def density(self) -> "DensityOp":
        return DensityOp(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityOp:
    matrix: np.ndarray
    dims: DimsProfile

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        d = self.dims.total
        if m.shape != (d, d):
            raise DimensionError(f"matrix shape {m.shape} does not match dims {self.dims.sizes}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise StateError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"density operator has trace {tr!r}")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -PSD_TOL:
            raise StateError(f"density operator has eigenvalue {lam_min!r}")

    @classmethod
    def from_matrix(cls, m, dims: DimsProfile | None = None, label: str = "A") -> "DensityOp":
        m = np.asarray(m, dtype=complex)
        return cls(m, dims if dims is not None else _default_dims(m.shape[0], label))

    @property
    def dim(self) -> int:
        return self.dims.total


def maximally_mixed(d: int, label: str = "A") -> DensityOp:
    return DensityOp(np.eye(d, dtype=complex) / d, _default_dims(d, label))


def basis_vector(i: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def ket(i: int, d: int, label: str = "A") -> PureState:
    return PureState(basis_vector(i, d), _default_dims(d, label))


def tensor(a, b):
    """Kronecker product; labelled inputs get their dims concatenated (a then b)."""
    if isinstance(a, DensityOp) and isinstance(b, DensityOp):
        return DensityOp(np.kron(a.matrix, b.matrix), a.dims.concat(b.dims))
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims.concat(b.dims))
    if isinstance(a, (DensityOp, PureState)) or isinstance(b, (DensityOp, PureState)):
        raise DimensionError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    return np.kron(np.asarray(a), np.asarray(b))


def ptrace(mat: np.ndarray, sizes: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a square array over all subsystems not in ``keep``.

    ``keep`` holds subsystem indices; the result keeps them in their original order.
    """
    sizes = [int(s) for s in sizes]
    n = len(sizes)
    keep = sorted(set(int(k) for k in keep))
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([sizes[i] for i in keep], dtype=np.int64)) if keep else 1
    dd = int(np.prod([sizes[i] for i in drop], dtype=np.int64)) if drop else 1
    t = np.asarray(mat).reshape(sizes + sizes)
    perm = keep + drop + [n + i for i in keep] + [n + i for i in drop]
    t = t.transpose(perm).reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def partial_trace(rho: DensityOp, keep: Iterable[str]) -> DensityOp:
    keep = list(keep)
    idx = [rho.dims.index(lab) for lab in keep]
    out = ptrace(rho.matrix, rho.dims.sizes, idx)
    return DensityOp(out, rho.dims.select(keep))


def permute(rho: DensityOp, order: Sequence[str]) -> DensityOp:
    """Reorder subsystems of ``rho`` to the label order given."""
    if sorted(order) != sorted(rho.dims.labels):
        raise DimensionError(f"order {tuple(order)} is not a permutation of {rho.dims.labels}")
    idx = [rho.dims.index(lab) for lab in order]
    n = len(idx)
    sizes = list(rho.dims.sizes)
    t = rho.matrix.reshape(sizes + sizes).transpose(idx + [n + i for i in idx])
    d = rho.dims.total
    new_dims = DimsProfile(tuple(order), tuple(sizes[i] for i in idx))
    return DensityOp(t.reshape(d, d), new_dims)


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, DensityOp):
        return m.matrix
    return np.asarray(m)


def trace_norm(m) -> float:
    """Sum of singular values (sum of |eigenvalues| for Hermitian input)."""
    m = _as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"trace_norm needs a square matrix, got shape {m.shape}")
    if np.allclose(m, m.conj().T, atol=HERMITIAN_TOL, rtol=0):
        return float(np.sum(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh((m + m.conj().T) / 2)
    lam = np.sqrt(np.clip(lam, 0.0, None))
    return (vec * lam) @ vec.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    a, b = _as_matrix(rho), _as_matrix(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"fidelity of shapes {a.shape} and {b.shape}")
    if isinstance(rho, DensityOp) and isinstance(sigma, DensityOp) and rho.dims.sizes != sigma.dims.sizes:
        raise DimensionError(f"fidelity of dims {rho.dims.sizes} and {sigma.dims.sizes}")
    s = psd_sqrt(a)
    lam = np.linalg.eigvalsh(s @ b @ s)
    f = float(np.sum(np.sqrt(np.clip(lam, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def entropy_of_spectrum(lam) -> float:
    lam = np.asarray(lam, dtype=float)
    lam = lam[lam > EIG_CLAMP]
    return float(-np.sum(lam * np.log2(lam)))


def vn_entropy(rho) -> float:
    m = _as_matrix(rho)
    return entropy_of_spectrum(np.linalg.eigvalsh((m + m.conj().T) / 2))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy needs 0 <= p <= 1, got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def make_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derived_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent stream ``index`` of a master seed."""
    return np.random.default_rng([int(master_seed), int(index)])


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary from a Ginibre matrix, QR with the R-diagonal phases removed."""
    rng = make_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phases


def haar_isometry(d_out: int, d_in: int, rng) -> np.ndarray:
    return haar_unitary(d_out, rng)[:, :d_in]


def random_pure(d: int, rng) -> np.ndarray:
    rng = make_rng(rng)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density(d: int, rng, rank: int | None = None) -> np.ndarray:
    """Random mixed state, Hilbert-Schmidt measure when ``rank`` is None."""
    rng = make_rng(rng)
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    m = g @ g.conj().T
    return m / np.trace(m).real


def purify(rho) -> np.ndarray:
    """Purification on R (x) A, reference first, with the reference the same size as A."""
    m = _as_matrix(rho)
    lam, vec = np.linalg.eigh((m + m.conj().T) / 2)
    lam = np.clip(lam, 0.0, None)
    d = m.shape[0]
    # psi[r, a] = sqrt(lam_r) vec[a, r]
    psi = (vec * np.sqrt(lam)).T
    return psi.reshape(d * d)


def maximally_entangled(d: int, labels: tuple[str, str] = ("A", "B")) -> PureState:
    amps = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return PureState(amps, DimsProfile(labels, (d, d)))


# --- Pauli / Clifford machinery -------------------------------------------------

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SINGLE = {(0, 0): _I2, (1, 0): _X, (0, 1): _Z, (1, 1): _Y}


def pauli_matrix(bits: np.ndarray, sign: int = 1) -> np.ndarray:
    """Hermitian Pauli for the binary vector (x_1..x_n | z_1..z_n)."""
    n = len(bits) // 2
    out = np.ones((1, 1), dtype=complex)
    for j in range(n):
        out = np.kron(out, _SINGLE[(int(bits[j]), int(bits[n + j]))])
    return sign * out


def _symp(a: np.ndarray, b: np.ndarray) -> int:
    n = len(a) // 2
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) % 2)


def random_symplectic(n: int, rng) -> np.ndarray:
    """Uniform element of Sp(2n, F2) as columns (X_1 image, Z_1 image, ...).

    An ordered symplectic basis is drawn pair by pair; uniform vectors are
    projected onto the symplectic complement of the pairs chosen so far, which
    keeps the draw uniform on that complement.
    """
    rng = make_rng(rng)
    pairs: list[tuple[np.ndarray, np.ndarray]] = []

    def project(u):
        u = u.copy()
        for v, w in pairs:
            u = (u + _symp(u, w) * v + _symp(u, v) * w) % 2
        return u

    for _ in range(n):
        while True:
            v = project(rng.integers(0, 2, 2 * n))
            if v.any():
                break
        while True:
            w = project(rng.integers(0, 2, 2 * n))
            if _symp(v, w) == 1:
                break
        pairs.append((v, w))
    cols = []
    for v, w in pairs:
        cols.extend([v, w])
    return np.array(cols).T


def clifford_from_tableau(images_x, images_z, signs_x, signs_z) -> np.ndarray:
    """Unitary U with U X_j U^dag = signs_x[j] P(images_x[j]) and likewise for Z_j.

    U|0..0> is the joint +1 eigenvector of the Z images and U|x> = prod_j Q_j^{x_j} U|0..0>.
    """
    n = len(images_x)
    d = 2 ** n
    zs = [pauli_matrix(images_z[j], signs_z[j]) for j in range(n)]
    xs = [pauli_matrix(images_x[j], signs_x[j]) for j in range(n)]
    proj = np.eye(d, dtype=complex)
    for p in zs:
        proj = proj @ (np.eye(d) + p) / 2
    # the projector has rank one; take its dominant column
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    s = proj[:, col] / np.linalg.norm(proj[:, col])
    u = np.empty((d, d), dtype=complex)
    for idx in range(d):
        v = s
        for j in range(n):
            if (idx >> (n - 1 - j)) & 1:
                v = xs[j] @ v
        u[:, idx] = v
    return u


def random_clifford(n_qubits: int, rng) -> np.ndarray:
    """Uniformly random n-qubit Clifford unitary (up to global phase)."""
    if not 1 <= n_qubits <= 6:
        raise DimensionError(f"random_clifford supports 1..6 qubits, got {n_qubits}")
    rng = make_rng(rng)
    s = random_symplectic(n_qubits, rng)
    images_x = [s[:, 2 * j] for j in range(n_qubits)]
    images_z = [s[:, 2 * j + 1] for j in range(n_qubits)]
    signs = 1 - 2 * rng.integers(0, 2, 2 * n_qubits)
    return clifford_from_tableau(images_x, images_z, signs[:n_qubits], signs[n_qubits:])


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    return u.shape[0] == u.shape[1] and np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=tol, rtol=0)
