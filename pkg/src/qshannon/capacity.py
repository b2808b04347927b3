"""Holevo and entanglement-assisted capacities: closed forms and numerical solvers.

The numerical Holevo solver works on the divergence-radius form
``C_H(T) = min_sigma max_psi D(T(psi) || sigma)``. It alternates between a
Blahut-Arimoto solve over a finite set of candidate output states (whose
weighted mean is the current center) and a search for the pure input whose
output lies farthest from that center. The gap between the two is a
certified optimality gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import channels as ch
from . import infotheory as it
from . import linalg as la

LN2 = math.log(2.0)
GOLDEN_TOL = 1e-9


@dataclass
class CapacityResult:
    value: float
    method: str
    iterations: int = 0
    residual: float = 0.0
    witness: np.ndarray | None = None
    converged: bool = True
    seed: int | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class CenterResult:
    center: np.ndarray
    radius: float
    peripheral_states: list
    weights: list = field(default_factory=list)
    converged: bool = True

    @property
    def largest_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.center)[-1])


class NonConvergence(RuntimeError):
    def __init__(self, msg: str, result=None):
        super().__init__(msg)
        self.result = result


# ------------------------------------------------------------ closed forms


def divergence_to_uniform(q) -> float:
    """D(q || uniform) in bits, accurate when q is close to uniform."""
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    q = q[q > 0]
    return max(float(np.sum(q * np.log1p(n * q - 1.0)) / LN2), 0.0)


def _h(p: float) -> float:
    return it.binary_entropy(min(max(p, 0.0), 1.0))


def golden_section_max(f, lo: float = 0.0, hi: float = 1.0, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on [lo, hi]; returns (argmax, max)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
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
    cands = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)]
    return max(cands, key=lambda t: t[1])


def amplitude_damping_holevo_objective(p: float, gamma: float) -> float:
    r = math.sqrt(max(1.0 - 4.0 * gamma * (1.0 - gamma) * p * p, 0.0))
    return _h((1.0 - gamma) * p) - _h(0.5 * (1.0 + r))


def amplitude_damping_ea_objective(p: float, gamma: float) -> float:
    return _h(p) + _h((1.0 - gamma) * p) - _h(gamma * p)


def depolarizing_output_spectrum(d: int, p: float) -> np.ndarray:
    """Output eigenvalues of a pure input."""
    q = np.full(d, p / d)
    q[0] = 1.0 - p + p / d
    return q


def depolarizing_choi_spectrum(d: int, p: float) -> np.ndarray:
    q = np.full(d * d, p / (d * d))
    q[0] = 1.0 - p + p / (d * d)
    return q


def pauli_lambda_star(f: ch.PauliQubit) -> float:
    p0, p1, p2, p3 = f.probs
    lam = [2 * p0 - 1 + 2 * pk for pk in (p1, p2, p3)]
    return max(abs(x) for x in lam)


def covariant_pauli_holevo(p0: float, p3: float) -> float:
    if (p0 - p3) ** 2 >= (2 * p0 + 2 * p3 - 1) ** 2:
        a = 0.5 * (1.0 - p0 + p3)
        return divergence_to_uniform([a, 1.0 - a])
    s = p0 + p3
    return divergence_to_uniform([s, 1.0 - s])


def covariant_pauli_ea(p0: float, p3: float) -> float:
    r = 0.5 * (1.0 - p0 - p3)
    return divergence_to_uniform([p0, r, r, p3])


def closed_form_holevo(f) -> CapacityResult:
    if isinstance(f, ch.KrausChannel):
        raise ValueError("closed forms need a channel family, not a bare Kraus set")
    ch.validate_family(f)
    if isinstance(f, ch.Identity):
        v = math.log2(f.d)
    elif isinstance(f, ch.Depolarizing):
        v = divergence_to_uniform(depolarizing_output_spectrum(f.d, f.p))
    elif isinstance(f, ch.Erasure):
        v = (1.0 - f.p) * math.log2(f.d)
    elif isinstance(f, ch.CovariantPauli):
        v = covariant_pauli_holevo(f.p0, f.p3)
    elif isinstance(f, ch.PauliQubit):
        lam = pauli_lambda_star(f)
        v = divergence_to_uniform([0.5 * (1 + lam), 0.5 * (1 - lam)])
    elif isinstance(f, ch.AmplitudeDamping):
        g = float(f.gamma)
        p_star, v = golden_section_max(lambda p: amplitude_damping_holevo_objective(p, g))
        v = max(v, 0.0)
        return CapacityResult(v, "closed-form", witness=np.diag([1 - p_star, p_star]).astype(complex),
                              extra={"p_star": p_star})
    elif isinstance(f, ch.Replacer):
        v = 0.0
    else:
        raise ValueError(f"no closed form for {f!r}")
    return CapacityResult(v, "closed-form")


def closed_form_ea(f) -> CapacityResult:
    if isinstance(f, ch.KrausChannel):
        raise ValueError("closed forms need a channel family, not a bare Kraus set")
    ch.validate_family(f)
    if isinstance(f, ch.Identity):
        v = 2.0 * math.log2(f.d)
    elif isinstance(f, ch.Depolarizing):
        v = divergence_to_uniform(depolarizing_choi_spectrum(f.d, f.p))
    elif isinstance(f, ch.Erasure):
        v = 2.0 * (1.0 - f.p) * math.log2(f.d)
    elif isinstance(f, ch.CovariantPauli):
        v = covariant_pauli_ea(f.p0, f.p3)
    elif isinstance(f, ch.PauliQubit):
        v = divergence_to_uniform(f.probs)
    elif isinstance(f, ch.AmplitudeDamping):
        g = float(f.gamma)
        p_star, v = golden_section_max(lambda p: amplitude_damping_ea_objective(p, g))
        return CapacityResult(max(v, 0.0), "closed-form", witness=np.diag([1 - p_star, p_star]).astype(complex),
                              extra={"p_star": p_star})
    elif isinstance(f, ch.Replacer):
        v = 0.0
    else:
        raise ValueError(f"no closed form for {f!r}")
    return CapacityResult(v, "closed-form")


# -------------------------------------------------------- numeric Holevo


def _neg_entropy_batch(states: np.ndarray) -> np.ndarray:
    lam = np.clip(np.linalg.eigvalsh(states), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > la.LOG_CUTOFF, lam * np.log2(np.where(lam > 0, lam, 1.0)), 0.0)
    return terms.sum(axis=-1)


def _log_center(sigma: np.ndarray) -> np.ndarray:
    return la.matrix_log_on_support(sigma)


def _divergences(states, neg_ent, log_sigma) -> np.ndarray:
    # D(tau || sigma) = tr tau log tau - tr tau log sigma
    cross = np.real(np.einsum("kij,ji->k", states, log_sigma))
    return neg_ent - cross


def holevo_weights(states: np.ndarray, weights=None, tol: float = 1e-10, max_iter: int = 200):
    """Maximise the Holevo quantity of a finite output ensemble over its weights.

    A few Blahut-Arimoto sweeps give a starting point for SLSQP, which uses
    the exact gradient D(tau_i || sigma) - 1/ln 2. Returns
    (weights, center, lower, upper) with ``lower`` the Holevo quantity and
    ``upper`` the largest divergence to the center.
    """
    n = states.shape[0]
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float).copy()
    neg_ent = _neg_entropy_batch(states)

    def evaluate(w):
        sigma = np.einsum("k,kij->ij", w, states)
        dv = _divergences(states, neg_ent, _log_center(sigma))
        return sigma, dv

    for _ in range(20):
        _, dv = evaluate(w)
        w = w * np.exp2(dv - dv.max())
        w /= w.sum()
    sigma, dv = evaluate(w)
    if dv.max() - w @ dv >= tol and n > 1:
        res = minimize(
            lambda w: -float(w @ evaluate(np.clip(w, 0, None))[1]),
            w,
            jac=lambda w: -(evaluate(np.clip(w, 0, None))[1] - 1.0 / LN2),
            method="SLSQP",
            bounds=[(0.0, 1.0)] * n,
            constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0, "jac": lambda w: np.ones_like(w)}],
            options={"ftol": 1e-15, "maxiter": max_iter},
        )
        w2 = np.clip(res.x, 0.0, None)
        w2 /= w2.sum()
        sigma2, dv2 = evaluate(w2)
        if w2 @ dv2 >= w @ dv:
            w, sigma, dv = w2, sigma2, dv2
    return w, sigma, float(w @ dv), float(dv.max())


def _farthest_pure_inputs(t: ch.KrausChannel, sigma: np.ndarray, seeds: np.ndarray, n_refine: int = 3):
    """Local maxima of psi -> D(T(psi) || sigma), best first."""
    d = t.dim_in
    log_sigma = _log_center(sigma)

    def score(vecs):
        outs = ch.apply_pure_batch(t, vecs)
        return _divergences(outs, _neg_entropy_batch(outs), log_sigma)

    vals = score(ch._pure_batch(seeds, d))
    order = np.argsort(vals)[::-1]
    picked: list[int] = []
    for i in order:
        if len(picked) == n_refine:
            break
        if all(np.linalg.norm(seeds[i] - seeds[j]) > 0.3 for j in picked):
            picked.append(i)
    found = []
    for i in picked:
        res = minimize(
            lambda x: -score(ch.pure_from_angles(x, d)[None])[0],
            seeds[i],
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 2000},
        )
        found.append((-float(res.fun), ch.pure_from_angles(res.x, d)))
    found.sort(key=lambda t: -t[0])
    return found


def _holevo_solve(t: ch.KrausChannel, tol: float = 1e-6, max_iter: int = 500, seed: int = 0):
    d = t.dim_in
    if d > 4 or t.dim_out > 4:
        raise ValueError("numerical solvers support dimensions up to 4")
    rng = np.random.default_rng(seed)
    seeds = ch.seed_angles(d, rng)
    basis = np.eye(d, dtype=np.complex128)
    cand = [v for v in basis]
    states = ch.apply_pure_batch(t, np.array(cand))
    w = None
    best = None
    for k in range(1, max_iter + 1):
        w, sigma, lower, _ = holevo_weights(states, w, tol=min(tol, 1e-9) * 0.1)
        found = _farthest_pure_inputs(t, sigma, seeds)
        upper = max(found[0][0], lower)
        best = (sigma, lower, upper, w, states, k)
        if upper - lower < tol:
            break
        new = [v for val, v in found if val > lower + 0.1 * tol]
        new_states = ch.apply_pure_batch(t, np.array(new))
        keep = [
            s for s in new_states
            if min(it.trace_distance(s, o) for o in states) >= 1e-4
        ]
        if not keep:
            break
        states = np.concatenate([states, np.array(keep)])
        w = np.concatenate([w * 0.9, np.full(len(keep), 0.1 / len(keep))])
    sigma, lower, upper, w, states, k = best
    return sigma, lower, upper, w, states, k


def numeric_holevo(t, tol: float = 1e-6, max_iter: int = 500, seed: int = 0) -> CapacityResult:
    t = ch.as_channel(t)
    sigma, lower, upper, w, states, k = _holevo_solve(t, tol, max_iter, seed)
    gap = upper - lower
    res = CapacityResult(
        value=0.5 * (lower + upper),
        method="numeric",
        iterations=k,
        residual=gap,
        witness=sigma,
        converged=gap < tol,
        seed=seed,
        extra={"lower": lower, "upper": upper},
    )
    return res


def divergence_center(t, tol: float = 1e-6, max_iter: int = 500, seed: int = 0) -> CenterResult:
    t = ch.as_channel(t)
    sigma, lower, upper, w, states, k = _holevo_solve(t, tol, max_iter, seed)
    mask = w > 1e-4
    return CenterResult(
        center=sigma,
        radius=0.5 * (lower + upper),
        peripheral_states=[s for s in states[mask]],
        weights=list(w[mask]),
        converged=upper - lower < tol,
    )


def equal_distance_residual(c: CenterResult) -> float:
    """Largest deviation of a peripheral divergence from the radius."""
    return max(abs(it.relative_entropy(s, c.center) - c.radius) for s in c.peripheral_states)


# ---------------------------------------------- numeric entanglement-assisted


def density_from_params(x: np.ndarray, d: int) -> np.ndarray:
    """rho = L L^dagger / tr with L lower triangular from d^2 reals."""
    x = np.asarray(x, dtype=float)
    L = np.zeros((d, d), dtype=np.complex128)
    idx = 0
    for i in range(d):
        L[i, i] = x[idx]
        idx += 1
    for i in range(d):
        for j in range(i):
            L[i, j] = x[idx] + 1j * x[idx + 1]
            idx += 2
    rho = L @ L.conj().T
    tr = np.trace(rho).real
    if tr <= 1e-300:
        return np.eye(d, dtype=np.complex128) / d
    return rho / tr


def ea_objective(t: ch.KrausChannel, rho: np.ndarray) -> float:
    """I(A:B) of (id (x) T) applied to a purification of rho.

    Uses S(AB) = S(T^c(rho)), where T^c(rho)_ij = tr(K_i rho K_j^dagger) is
    the complementary channel, so the joint state is never formed.
    """
    ks = np.asarray(t.kraus_ops)
    krk = np.einsum("iab,bc->iac", ks, rho)
    out = np.einsum("iac,idc->ad", krk, ks.conj())
    env = np.einsum("iac,jac->ij", krk, ks.conj())
    return it.von_neumann_entropy(rho) + it.von_neumann_entropy(out) - it.von_neumann_entropy(env)


def ea_objective_joint(t: ch.KrausChannel, rho: np.ndarray) -> float:
    """Reference evaluation of ``ea_objective`` through the joint output state."""
    d = t.dim_in
    psi = reference_first_purification(rho)
    out = ch.extend_and_apply(t, np.outer(psi, psi.conj()), d)
    return it.mutual_information(out, (d, t.dim_out))


def reference_first_purification(rho: np.ndarray) -> np.ndarray:
    """Purification of ``rho`` with the reference as the first tensor factor."""
    d = rho.shape[0]
    return la.purify(rho).reshape(d, d).T.reshape(-1)


def numeric_ea(t, n_seeds: int = 32, tol: float = 1e-6, seed: int = 0) -> CapacityResult:
    t = ch.as_channel(t)
    d = t.dim_in
    if d > 4 or t.dim_out > 4:
        raise ValueError("numerical solvers support dimensions up to 4")
    rng = np.random.default_rng(seed)
    n_par = d * d
    x_mixed = np.concatenate([np.ones(d), np.zeros(n_par - d)])
    starts = [x_mixed] + [rng.normal(size=n_par) for _ in range(n_seeds - 1)]
    best_val, best_rho, iters = -np.inf, None, 0
    for x0 in starts:
        res = minimize(
            lambda x: -ea_objective(t, density_from_params(x, d)),
            x0,
            method="Nelder-Mead",
            options={"xatol": tol, "fatol": tol * 1e-2, "maxiter": 400 * n_par},
        )
        iters += res.nit
        if -res.fun > best_val:
            best_val, best_rho = -float(res.fun), density_from_params(res.x, d)
    return CapacityResult(best_val, "numeric", iterations=iters, residual=tol, witness=best_rho, seed=seed)


def stabilized_divergence_center(t, seed: int = 0) -> CenterResult:
    """Center of the stabilized radius: the output T(rho*) of the optimal input."""
    if isinstance(t, ch.AmplitudeDamping):
        g = float(t.gamma)
        p_star, v = golden_section_max(lambda p: amplitude_damping_ea_objective(p, g))
        s = np.diag([1.0 - (1.0 - g) * p_star, (1.0 - g) * p_star]).astype(np.complex128)
        return CenterResult(center=s, radius=v, peripheral_states=[])
    t = ch.as_channel(t)
    r = numeric_ea(t, seed=seed)
    return CenterResult(center=ch.apply_channel(t, r.witness), radius=r.value, peripheral_states=[])


def stabilized_radius_given_center(t, sigma: np.ndarray, n_seeds: int = 8, seed: int = 0) -> float:
    """sup over inputs rho of D(tau_AB || tau_A (x) sigma) for tau = (id (x) T)(purified rho)."""
    t = ch.as_channel(t)
    d = t.dim_in
    rng = np.random.default_rng(seed)
    n_par = d * d

    def obj(x):
        rho = density_from_params(x, d)
        psi = reference_first_purification(rho)
        tau = ch.extend_and_apply(t, np.outer(psi, psi.conj()), d)
        ta = la.partial_trace(tau, (d, t.dim_out), "A")
        return -it.relative_entropy(tau, np.kron(ta, sigma))

    best = -np.inf
    starts = [np.concatenate([np.ones(d), np.zeros(n_par - d)])] + [rng.normal(size=n_par) for _ in range(n_seeds - 1)]
    for x0 in starts:
        res = minimize(obj, x0, method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-10, "maxiter": 400 * n_par})
        best = max(best, -float(res.fun))
    return best


# ---------------------------------------------------------------- quotient

REPLACER_GUARD = 1e-3


def has_closed_form(f) -> bool:
    return isinstance(f, (ch.Identity, ch.Depolarizing, ch.Erasure, ch.PauliQubit,
                          ch.CovariantPauli, ch.AmplitudeDamping, ch.Replacer))


def capacity_quotient(t, seed: int = 0) -> float:
    """C_ea / C_H, by closed forms when ``t`` is a family, else numerically.

    The numerical path refuses channels within 1e-3 of a replacer in the
    1-to-1 norm, where both capacities vanish quadratically.
    """
    if has_closed_form(t):
        c_h = closed_form_holevo(t).value
        c_ea = closed_form_ea(t).value
        if not c_h > 0.0:
            raise ValueError("replacer vicinity: Holevo capacity vanishes")
        return c_ea / c_h
    t = ch.as_channel(t)
    sigma0 = ch.apply_channel(t, np.eye(t.dim_in) / t.dim_in)
    if ch.distance_1to1_to_replacer(t, sigma0) < REPLACER_GUARD:
        raise ValueError("replacer vicinity: channel within 1e-3 of a replacer")
    c_h = numeric_holevo(t, seed=seed).value
    if c_h <= 1e-9:
        raise ValueError("replacer vicinity: Holevo capacity vanishes")
    return numeric_ea(t, seed=seed).value / c_h
