"""Quantum channels in Kraus form and the named channel families."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import minimize

from . import linalg as la

TP_TOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """Linear map rho -> sum_k K rho K^dagger."""

    kraus_ops: tuple
    dim_in: int
    dim_out: int
    name: str = field(default="kraus", compare=False)

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=np.complex128) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"Kraus operator of shape {k.shape}, expected {(self.dim_out, self.dim_in)}"
                )
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    @classmethod
    def from_ops(cls, ops, check: bool = True, name: str = "kraus") -> "KrausChannel":
        ops = [la.as_matrix(k) for k in ops]
        ch = cls(tuple(ops), ops[0].shape[1], ops[0].shape[0], name)
        if check:
            rep = validate_cptp(ch)
            if rep.tp_residual > TP_TOL:
                raise ValueError(f"Kraus set is not trace preserving (residual {rep.tp_residual:.3g})")
        return ch

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)

    def transfer_matrix(self) -> np.ndarray:
        """Matrix M with vec(T(rho)) = M vec(rho) in row-major vectorisation."""
        return sum(np.kron(k, k.conj()) for k in self.kraus_ops)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class Identity:
    d: int = 2


@dataclass(frozen=True)
class Depolarizing:
    """rho -> (1 - p) rho + p tr(rho) 1/d, completely positive for p <= d^2/(d^2-1)."""

    d: int
    p: float

    @classmethod
    def from_weyl_error(cls, d: int, p_err: float) -> "Depolarizing":
        """Channel applying each non-identity Weyl operator with probability p_err/(d^2-1)."""
        return cls(d, p_err * d * d / (d * d - 1.0))

    @property
    def weyl_error(self) -> float:
        return self.p * (self.d * self.d - 1.0) / (self.d * self.d)


@dataclass(frozen=True)
class Erasure:
    d: int
    p: float


@dataclass(frozen=True)
class PauliQubit:
    p0: float
    p1: float
    p2: float
    p3: float

    @property
    def probs(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3], dtype=float)


@dataclass(frozen=True)
class CovariantPauli:
    """Pauli channel with equal X and Y weights (1 - p0 - p3) / 2."""

    p0: float
    p3: float

    def as_pauli(self) -> PauliQubit:
        r = 0.5 * (1.0 - self.p0 - self.p3)
        return PauliQubit(self.p0, r, r, self.p3)


@dataclass(frozen=True)
class AmplitudeDamping:
    gamma: float


@dataclass(frozen=True)
class Replacer:
    sigma: np.ndarray = field(compare=False)

    def __hash__(self):
        return id(self)


ChannelFamily = Union[Identity, Depolarizing, Erasure, PauliQubit, CovariantPauli, AmplitudeDamping, Replacer]


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not np.isfinite(value) or value < lo - 1e-12 or value > hi + 1e-12:
        raise ValueError(f"{name}={value!r} outside [{lo!r}, {hi!r}]")


def _check_dim(d) -> int:
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def weyl_operators(d: int) -> list[np.ndarray]:
    """The d^2 clock-and-shift unitaries, identity first."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    for a in range(d):
        for b in range(d):
            ops.append(np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b))
    return ops


def validate_family(f: ChannelFamily) -> None:
    if isinstance(f, Identity):
        _check_dim(f.d)
    elif isinstance(f, Depolarizing):
        d = _check_dim(f.d)
        if d < 2:
            raise ValueError("depolarizing channel needs d >= 2")
        _check_range("p", f.p, 0.0, d * d / (d * d - 1.0))
    elif isinstance(f, Erasure):
        _check_dim(f.d)
        _check_range("p", f.p, 0.0, 1.0)
    elif isinstance(f, PauliQubit):
        for i, q in enumerate(f.probs):
            _check_range(f"p{i}", q, 0.0, 1.0)
        if abs(f.probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"Pauli probabilities sum to {f.probs.sum()!r}, expected 1")
    elif isinstance(f, CovariantPauli):
        _check_range("p0", f.p0, 0.0, 1.0)
        _check_range("p3", f.p3, 0.0, 1.0)
        _check_range("p0+p3", f.p0 + f.p3, 0.0, 1.0)
    elif isinstance(f, AmplitudeDamping):
        _check_range("gamma", f.gamma, 0.0, 1.0)
    elif isinstance(f, Replacer):
        la.check_density(f.sigma)
    else:
        raise ValueError(f"unknown channel family {f!r}")


def kraus_from_family(f: ChannelFamily) -> KrausChannel:
    validate_family(f)
    if isinstance(f, Identity):
        return KrausChannel((np.eye(f.d),), f.d, f.d, "identity")
    if isinstance(f, Depolarizing):
        d, p = f.d, float(f.p)
        if p == 0.0:
            return KrausChannel((np.eye(d),), d, d, "depolarizing")
        w = weyl_operators(d)
        c0 = max(1.0 - p * (d * d - 1) / (d * d), 0.0)
        ops = [np.sqrt(p / (d * d)) * u for u in w[1:]]
        if c0 > 0:
            ops.insert(0, np.sqrt(c0) * w[0])
        return KrausChannel(tuple(ops), d, d, "depolarizing")
    if isinstance(f, Erasure):
        d, p = f.d, float(f.p)
        embed = np.vstack([np.eye(d), np.zeros((1, d))])
        ops = [np.sqrt(1.0 - p) * embed]
        for i in range(d):
            k = np.zeros((d + 1, d))
            k[d, i] = np.sqrt(p)
            ops.append(k)
        return KrausChannel(tuple(ops), d, d + 1, "erasure")
    if isinstance(f, (PauliQubit, CovariantPauli)):
        pf = f.as_pauli() if isinstance(f, CovariantPauli) else f
        probs = np.clip(pf.probs, 0.0, None)
        mats = [la.PAULI_I, la.PAULI_X, la.PAULI_Y, la.PAULI_Z]
        ops = [np.sqrt(q) * m for q, m in zip(probs, mats) if q > 0]
        return KrausChannel(tuple(ops), 2, 2, "pauli")
    if isinstance(f, AmplitudeDamping):
        g = float(f.gamma)
        k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - g)]])
        k1 = np.array([[0.0, np.sqrt(g)], [0.0, 0.0]])
        return KrausChannel((k0, k1), 2, 2, "amplitude_damping")
    if isinstance(f, Replacer):
        sigma = la.check_density(f.sigma)
        d_out = sigma.shape[0]
        lam, vec = la.hermitian_eig(sigma)
        ops = []
        for i in range(d_out):
            if lam[i] <= 0:
                continue
            for j in range(d_out):
                ops.append(np.sqrt(lam[i]) * np.outer(vec[:, i], la.basis_state(j, d_out)))
        return KrausChannel(tuple(ops), d_out, d_out, "replacer")
    raise ValueError(f"unknown channel family {f!r}")


def as_channel(t) -> KrausChannel:
    return t if isinstance(t, KrausChannel) else kraus_from_family(t)


# ------------------------------------------------------------- operations


def apply_channel(t: KrausChannel, rho) -> np.ndarray:
    rho = la.as_matrix(rho)
    if rho.shape != (t.dim_in, t.dim_in):
        raise ValueError(f"state of shape {rho.shape} does not match channel input {t.dim_in}")
    out = np.zeros((t.dim_out, t.dim_out), dtype=np.complex128)
    for k in t.kraus_ops:
        out += k @ rho @ k.conj().T
    return 0.5 * (out + out.conj().T)


def extend_and_apply(t: KrausChannel, rho_ref_in, ref_dim: int) -> np.ndarray:
    """(id_ref (x) T)(rho) for a state on ``ref_dim * dim_in``."""
    rho = la.as_matrix(rho_ref_in)
    if rho.shape != (ref_dim * t.dim_in, ref_dim * t.dim_in):
        raise ValueError(f"state of shape {rho.shape} does not match {ref_dim} x {t.dim_in}")
    eye = np.eye(ref_dim)
    out = np.zeros((ref_dim * t.dim_out,) * 2, dtype=np.complex128)
    for k in t.kraus_ops:
        big = np.kron(eye, k)
        out += big @ rho @ big.conj().T
    return 0.5 * (out + out.conj().T)


def choi_matrix(t: KrausChannel) -> np.ndarray:
    omega = la.projector(la.maximally_entangled(t.dim_in))
    return extend_and_apply(t, omega, t.dim_in)


@dataclass(frozen=True)
class CptpReport:
    tp_residual: float
    min_choi_eigenvalue: float

    @property
    def valid(self) -> bool:
        return self.tp_residual <= TP_TOL and self.min_choi_eigenvalue >= -TP_TOL


def validate_cptp(t: KrausChannel) -> CptpReport:
    s = sum(k.conj().T @ k for k in t.kraus_ops)
    resid = float(np.max(np.abs(s - np.eye(t.dim_in))))
    omega = la.projector(la.maximally_entangled(t.dim_in))
    choi = np.zeros((t.dim_in * t.dim_out,) * 2, dtype=np.complex128)
    for k in t.kraus_ops:
        big = np.kron(np.eye(t.dim_in), k)
        choi += big @ omega @ big.conj().T
    lam = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    return CptpReport(resid, float(lam[0]))


# ----------------------------------------------------- pure-state search


def pure_from_angles(x: np.ndarray, d: int) -> np.ndarray:
    """Unit vector from 2(d-1) angles: d-1 hyperspherical magnitudes then d-1 phases."""
    x = np.asarray(x, dtype=float)
    theta, phi = x[: d - 1], x[d - 1 :]
    mags = np.ones(d)
    s = 1.0
    for i in range(d - 1):
        mags[i] = s * np.cos(theta[i])
        s = s * np.sin(theta[i])
    mags[d - 1] = s
    phases = np.concatenate([[0.0], phi])
    return mags * np.exp(1j * phases)


def _pure_batch(xs: np.ndarray, d: int) -> np.ndarray:
    return np.array([pure_from_angles(x, d) for x in xs])


def seed_angles(d: int, rng: np.random.Generator | None = None, n_random: int = 4096) -> np.ndarray:
    """Seed points for pure-state searches: a 64x64 Bloch grid for qubits, random otherwise."""
    if d == 2:
        th = (np.arange(64) + 0.5) * (np.pi / 128)  # theta/2 in (0, pi/2)
        ph = np.arange(64) * (2 * np.pi / 64)
        g = np.array(np.meshgrid(th, ph, indexing="ij")).reshape(2, -1).T
        return g
    rng = np.random.default_rng(1234) if rng is None else rng
    vs = rng.normal(size=(n_random, d)) + 1j * rng.normal(size=(n_random, d))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    return np.array([angles_from_pure(v) for v in vs])


def angles_from_pure(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    d = v.shape[0]
    v = v * np.exp(-1j * np.angle(v[0])) if abs(v[0]) > 0 else v
    mags = np.abs(v)
    theta = np.zeros(d - 1)
    rem = 1.0
    for i in range(d - 1):
        c = np.clip(mags[i] / rem, -1.0, 1.0) if rem > 1e-15 else 1.0
        theta[i] = np.arccos(c)
        rem = rem * np.sin(theta[i])
    phi = np.angle(v[1:])
    return np.concatenate([theta, phi])


def _maximize_over_pure(score_batch, d: int, n_refine: int = 3, tol: float = 1e-7, seeds=None):
    """Maximise a function of pure input vectors; returns (value, best vector)."""
    x0 = seed_angles(d) if seeds is None else seeds
    vals = score_batch(_pure_batch(x0, d))
    order = np.argsort(vals)[::-1][:n_refine]
    best_v, best_x = -np.inf, None
    for i in order:
        res = minimize(
            lambda x: -score_batch(pure_from_angles(x, d)[None])[0],
            x0[i],
            method="Nelder-Mead",
            options={"xatol": tol, "fatol": tol * 1e-3, "maxiter": 4000},
        )
        if -res.fun > best_v:
            best_v, best_x = -res.fun, res.x
    if vals[order[0]] > best_v:
        best_v, best_x = vals[order[0]], x0[order[0]]
    return float(best_v), pure_from_angles(best_x, d)


def apply_pure_batch(t: KrausChannel, vecs: np.ndarray) -> np.ndarray:
    """T(|v><v|) for each row ``v`` of ``vecs``."""
    out = np.zeros((vecs.shape[0], t.dim_out, t.dim_out), dtype=np.complex128)
    for k in t.kraus_ops:
        w = vecs @ k.T
        out += w[:, :, None] * w.conj()[:, None, :]
    return out


def distance_1to1_to_replacer(t: KrausChannel, sigma) -> float:
    """max over pure inputs of ||T(psi) - sigma||_1 (Schatten-1, not halved)."""
    sigma = la.check_density(sigma)
    if sigma.shape[0] != t.dim_out:
        raise ValueError("sigma dimension does not match channel output")

    def score(vecs):
        diff = apply_pure_batch(t, vecs) - sigma[None]
        return np.abs(np.linalg.eigvalsh(diff)).sum(axis=1)

    val, _ = _maximize_over_pure(score, t.dim_in)
    return val


# ------------------------------------------------------------------- JSON

_FAMILY_NAMES = {
    "identity": Identity,
    "depolarizing": Depolarizing,
    "erasure": Erasure,
    "pauli": PauliQubit,
    "covariant_pauli": CovariantPauli,
    "amplitude_damping": AmplitudeDamping,
    "replacer": Replacer,
}


def _parse_complex_matrix(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ValueError(f"{where}: expected a non-empty list of rows")
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ValueError(f"{where}[{i}]: expected a list of [re, im] pairs")
        vals = []
        for j, z in enumerate(row):
            if not (isinstance(z, list) and len(z) == 2 and all(isinstance(u, (int, float)) for u in z)):
                raise ValueError(f"{where}[{i}][{j}]: expected [re, im]")
            vals.append(complex(z[0], z[1]))
        rows.append(vals)
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{where}: ragged rows")
    return np.array(rows, dtype=np.complex128)


def family_from_dict(spec: dict) -> ChannelFamily:
    name = spec.get("family")
    if name not in _FAMILY_NAMES:
        raise ValueError(f"family: unknown family {name!r}; choose from {sorted(_FAMILY_NAMES)}")
    try:
        if name == "identity":
            return Identity(int(spec.get("dim", 2)))
        if name == "depolarizing":
            return Depolarizing(int(spec.get("dim", 2)), float(spec["p"]))
        if name == "erasure":
            return Erasure(int(spec.get("dim", 2)), float(spec["p"]))
        if name == "pauli":
            return PauliQubit(*(float(spec[k]) for k in ("p0", "p1", "p2", "p3")))
        if name == "covariant_pauli":
            return CovariantPauli(float(spec["p0"]), float(spec["p3"]))
        if name == "amplitude_damping":
            return AmplitudeDamping(float(spec["gamma"]))
        return Replacer(_parse_complex_matrix(spec["sigma"], "sigma"))
    except KeyError as exc:
        raise ValueError(f"family {name!r}: missing field {exc.args[0]!r}") from None


def channel_from_dict(spec: dict):
    """Parse the JSON channel schema; returns a family or a :class:`KrausChannel`."""
    if not isinstance(spec, dict):
        raise ValueError("channel spec: expected a JSON object")
    kind = spec.get("kind")
    if kind == "family":
        f = family_from_dict(spec)
        validate_family(f)
        return f
    if kind == "kraus":
        if "kraus" not in spec:
            raise ValueError("kraus: missing field 'kraus'")
        if not isinstance(spec["kraus"], list) or not spec["kraus"]:
            raise ValueError("kraus: expected a non-empty list of matrices")
        ops = [_parse_complex_matrix(m, f"kraus[{i}]") for i, m in enumerate(spec["kraus"])]
        d_in, d_out = spec.get("dim_in"), spec.get("dim_out")
        for i, k in enumerate(ops):
            if (d_in is not None and k.shape[1] != d_in) or (d_out is not None and k.shape[0] != d_out):
                raise ValueError(f"kraus[{i}]: shape {k.shape} does not match dim_out x dim_in")
        return KrausChannel.from_ops(ops, check=True)
    raise ValueError(f"kind: expected 'family' or 'kraus', got {kind!r}")


def load_channel(path: str):
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}: {exc.msg}") from None
    return channel_from_dict(spec)


def channel_to_dict(t: KrausChannel) -> dict:
    return {
        "kind": "kraus",
        "dim_in": t.dim_in,
        "dim_out": t.dim_out,
        "kraus": [[[[z.real, z.imag] for z in row] for row in k] for k in t.kraus_ops],
    }

