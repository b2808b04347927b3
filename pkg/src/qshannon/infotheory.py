"""Entropies, divergences and distances, all in bits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg as la

SUPPORT_CUTOFF = 1e-10
INF = math.inf


@dataclass(frozen=True)
class Ensemble:
    probabilities: tuple
    states: tuple

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if len(p) != len(self.states) or len(p) == 0:
            raise ValueError("ensemble needs matching, non-empty probabilities and states")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
            raise ValueError("ensemble probabilities must be non-negative and sum to 1")
        dims = {np.shape(s) for s in self.states}
        if len(dims) != 1:
            raise ValueError("ensemble states must share one dimension")

    def average(self) -> np.ndarray:
        return sum(p * la.as_matrix(s) for p, s in zip(self.probabilities, self.states))


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary entropy argument {p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def eigvals_psd(rho) -> np.ndarray:
    rho = la.as_matrix(rho)
    return np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), 0.0, None)


def von_neumann_entropy(rho) -> float:
    lam = eigvals_psd(rho)
    lam = lam[lam > la.LOG_CUTOFF]
    return max(float(-np.sum(lam * np.log2(lam))), 0.0)


def relative_entropy(rho, sigma) -> float:
    """D(rho||sigma) in bits; ``math.inf`` unless supp(rho) is inside supp(sigma)."""
    rho, sigma = la.as_matrix(rho), la.as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("relative entropy needs states of equal dimension")
    lr, vr = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    ls, vs = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    in_r = lr > SUPPORT_CUTOFF
    in_s = ls > SUPPORT_CUTOFF
    # weight of rho outside supp(sigma)
    ker_s = vs[:, ~in_s]
    if ker_s.shape[1]:
        leak = np.real(np.trace(ker_s.conj().T @ rho @ ker_s))
        if leak > SUPPORT_CUTOFF:
            return INF
    lr_s = lr[in_r]
    t1 = float(np.sum(lr_s * np.log2(lr_s)))
    # tr(rho log sigma) = sum_ij lr_i |<r_i|s_j>|^2 log ls_j
    overlap = np.abs(vr[:, in_r].conj().T @ vs[:, in_s]) ** 2
    t2 = float(lr_s @ overlap @ np.log2(ls[in_s]))
    return max(t1 - t2, 0.0)


def mutual_information(rho_ab, dims: tuple[int, int]) -> float:
    rho_ab = la.as_matrix(rho_ab)
    ra = la.partial_trace(rho_ab, dims, "A")
    rb = la.partial_trace(rho_ab, dims, "B")
    val = von_neumann_entropy(ra) + von_neumann_entropy(rb) - von_neumann_entropy(rho_ab)
    return max(val, 0.0)


def conditional_entropy(rho_ab, dims: tuple[int, int]) -> float:
    """H(B|A) = H(AB) - H(A)."""
    return von_neumann_entropy(rho_ab) - von_neumann_entropy(la.partial_trace(rho_ab, dims, "A"))


def fidelity(rho, sigma) -> float:
    """||sqrt(rho) sqrt(sigma)||_1 squared."""
    rho, sigma = la.as_matrix(rho), la.as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("fidelity needs states of equal dimension")
    s = np.linalg.svd(la.sqrtm_psd(rho) @ la.sqrtm_psd(sigma), compute_uv=False)
    return float(min(max(np.sum(s) ** 2, 0.0), 1.0))


def trace_distance(rho, sigma) -> float:
    rho, sigma = la.as_matrix(rho), la.as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ValueError("trace distance needs states of equal dimension")
    return 0.5 * la.trace_norm(rho - sigma)


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distributions of different lengths {p.shape} and {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def holevo_quantity(e: Ensemble) -> float:
    avg = e.average()
    inner = sum(p * von_neumann_entropy(s) for p, s in zip(e.probabilities, e.states))
    return max(von_neumann_entropy(avg) - inner, 0.0)


def cq_state(e: Ensemble) -> np.ndarray:
    """sum_i p_i |i><i| (x) rho_i."""
    n = len(e.probabilities)
    return sum(
        p * np.kron(la.projector(la.basis_state(i, n)), la.as_matrix(s))
        for i, (p, s) in enumerate(zip(e.probabilities, e.states))
    )


def bell_diagonal_phi_q(q: float) -> np.ndarray:
    """(1 - q) phi+ + (q / 3)(phi- + psi+ + psi-)."""
    s = 1 / math.sqrt(2)
    bell = [np.array(v, dtype=np.complex128) * s for v in ([1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0])]
    w = [1 - q, q / 3, q / 3, q / 3]
    return sum(wi * np.outer(b, b.conj()) for wi, b in zip(w, bell))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(256)


def segment_entropy_derivatives(rho, omega, t: float) -> tuple[float, float]:
    """First and second t-derivatives of tr(rho_t log2 rho_t), rho_t = rho + t(omega - rho).

    This is the negative entropy along the segment, so ``second`` is non-negative.
    """
    rho, omega = la.as_matrix(rho), la.as_matrix(omega)
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t={t!r} outside [0, 1)")
    delta = omega - rho
    rt = rho + t * delta
    lam, vec = la.hermitian_eig(rt)
    if lam[-1] <= la.LOG_CUTOFF:
        raise ValueError("rho_t is rank deficient; the derivative formula needs an invertible state")
    log_rt = (vec * np.log2(lam)) @ vec.conj().T
    first = float(np.real(np.trace(delta @ log_rt)))
    # second derivative: int_0^1 tr(delta R(z) delta R(z)) dz with R(z) = ((1-z) rho_t + z)^{-1}
    d_eig = vec.conj().T @ delta @ vec
    z = 0.5 * (_GL_NODES + 1.0)
    w = 0.5 * _GL_WEIGHTS
    inv = 1.0 / ((1.0 - z)[:, None] * lam[None, :] + z[:, None])  # (nz, d)
    abs2 = np.abs(d_eig) ** 2
    second = float(np.sum(w * np.einsum("zi,ij,zj->z", inv, abs2, inv))) / math.log(2)
    return first, second
