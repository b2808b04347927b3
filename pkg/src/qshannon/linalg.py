"""Dense complex linear algebra on small matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype complex128 in row-major
order. Composite systems use big-endian ordering: for ``A (x) B`` the index is
``i_a * dim_b + i_b`` and qubit 0 is the most significant bit.
"""

from __future__ import annotations

import numpy as np

LOG_CUTOFF = 1e-12
STATE_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, tol: float = 1e-8) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def check_density(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Return ``rho`` as a complex matrix after checking the density-matrix invariants."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if not is_hermitian(rho, tol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix has trace {tr!r}, expected 1")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if lam[0] < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lam[0]!r}")
    return rho


def tensor_product(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace(rho, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Reduced state of a bipartite matrix with subsystem dimensions ``dims``.

    ``keep`` is "A" (trace out B) or "B" (trace out A).
    """
    rho = as_matrix(rho)
    da, db = int(dims[0]), int(dims[1])
    if da < 1 or db < 1 or da * db != rho.shape[0] or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"dims {dims} do not match matrix of shape {rho.shape}")
    t = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijik->jk", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def hermitian_eig(m, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and the matching eigenvector columns."""
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    lam, vec = np.linalg.eigh(0.5 * (m + m.conj().T))
    return lam[::-1].copy(), vec[:, ::-1].copy()


def spectral_function(m, func, cutoff: float | None = None) -> np.ndarray:
    """Apply ``func`` to the eigenvalues of Hermitian ``m``.

    With ``cutoff`` set, eigenvalues at or below it are mapped to 0.
    """
    lam, vec = hermitian_eig(m)
    vals = np.zeros_like(lam)
    mask = lam > cutoff if cutoff is not None else np.ones(lam.shape, dtype=bool)
    vals[mask] = func(lam[mask])
    return (vec * vals) @ vec.conj().T


def matrix_log_on_support(rho, cutoff: float = LOG_CUTOFF) -> np.ndarray:
    """Base-2 matrix logarithm restricted to the support of ``rho``."""
    return spectral_function(rho, np.log2, cutoff)


def exp2_on_support(log_m, support_of) -> np.ndarray:
    """Inverse of :func:`matrix_log_on_support` on the support of ``support_of``."""
    lam, vec = hermitian_eig(support_of)
    proj = vec[:, lam > LOG_CUTOFF]
    p = proj @ proj.conj().T
    return p @ spectral_function(log_m, np.exp2) @ p


def sqrtm_psd(m) -> np.ndarray:
    return spectral_function(m, np.sqrt, 0.0)


def schatten_norm(a, p: float = 1.0) -> float:
    s = np.linalg.svd(as_matrix(a), compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


def trace_norm(a) -> float:
    a = as_matrix(a)
    if is_hermitian(a, 1e-12):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return schatten_norm(a, 1.0)


def ket(amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    n = np.linalg.norm(v)
    if abs(n - 1.0) > STATE_TOL:
        raise ValueError(f"state vector has norm {n!r}, expected 1")
    return v


def projector(amplitudes) -> np.ndarray:
    v = ket(amplitudes)
    return np.outer(v, v.conj())


def basis_state(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def purify(rho) -> np.ndarray:
    """Purification sum_i sqrt(lambda_i) |v_i>|i> on ``dim * dim``."""
    lam, vec = hermitian_eig(rho)
    lam = np.clip(lam, 0.0, None)
    d = lam.shape[0]
    psi = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        psi += np.sqrt(lam[i]) * np.kron(vec[:, i], basis_state(i, d))
    return psi / np.linalg.norm(psi)


def maximally_entangled(d: int = 2) -> np.ndarray:
    """The state sum_i |ii> / sqrt(d) as a vector."""
    psi = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        psi[i * d + i] = 1.0
    return psi / np.sqrt(d)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state from the induced Ginibre ensemble."""
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
