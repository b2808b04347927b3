"""Exact density-matrix simulation of small circuits with per-location noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import circuits as cc
from . import infotheory as it
from . import linalg as la
from ._accel import apply_local_kraus

MAX_QUBITS = 5


# ------------------------------------------------------------ noise models


@dataclass(frozen=True)
class NoNoise:
    def kraus(self):
        return None


@dataclass(frozen=True)
class IidPauli:
    p: float

    def kraus(self):
        p = self.p
        return np.array([np.sqrt(1 - p) * la.PAULI_I] + [np.sqrt(p / 3) * m for m in (la.PAULI_X, la.PAULI_Y, la.PAULI_Z)])


@dataclass(frozen=True)
class DepolarizingNoise:
    q: float

    def kraus(self):
        # (1 - q) rho + q 1/2  ==  (1 - 3q/4) rho + (q/4) sum_P P rho P
        q = self.q
        return np.array([np.sqrt(1 - 3 * q / 4) * la.PAULI_I] + [np.sqrt(q / 4) * m for m in (la.PAULI_X, la.PAULI_Y, la.PAULI_Z)])


@dataclass(frozen=True)
class AmplitudeDampingNoise:
    gamma: float

    def kraus(self):
        g = self.gamma
        return np.array([[[1, 0], [0, np.sqrt(1 - g)]], [[0, np.sqrt(g)], [0, 0]]], dtype=np.complex128)


NoiseModel = NoNoise | IidPauli | DepolarizingNoise | AmplitudeDampingNoise


def validate_noise(noise) -> None:
    for name in ("p", "q", "gamma"):
        v = getattr(noise, name, None)
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f"noise parameter {name}={v!r} outside [0, 1]")


def noise_from_name(name: str, value: float = 0.0):
    name = name.lower()
    if name in ("none", "noiseless"):
        return NoNoise()
    if name in ("pauli", "iid_pauli", "iid-pauli"):
        return IidPauli(value)
    if name in ("depolarizing", "depolarising"):
        return DepolarizingNoise(value)
    if name in ("amplitude_damping", "amplitude-damping", "ad"):
        return AmplitudeDampingNoise(value)
    raise ValueError(f"unknown noise model {name!r}")


_RESET = np.array([[[1, 0], [0, 0]], [[0, 1], [0, 0]]], dtype=np.complex128)
_PAULI = {"X": la.PAULI_X, "Y": la.PAULI_Y, "Z": la.PAULI_Z}


# -------------------------------------------------------------- evolution


def _evolve(c: cc.Circuit, noise, faults: dict | None = None, noisy_waits: bool = True) -> np.ndarray:
    n = c.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"circuit has {n} qubits; the exact simulator supports at most {MAX_QUBITS}")
    validate_noise(noise)
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    nk = noise.kraus()
    for i, g in enumerate(c.locations):
        inject = faults.get(i, ()) if faults else ()
        noisy = nk is not None and (noisy_waits or g.kind != "wait")
        if g.kind == "measureZ":
            for q, pauli in inject:
                rho = apply_local_kraus(rho, _PAULI[pauli], (q,), n)
            if noisy:
                rho = apply_local_kraus(rho, nk, g.qubits, n)
            continue
        if g.kind == "prep0":
            rho = apply_local_kraus(rho, _RESET, g.qubits, n)
        elif g.kind != "wait":
            rho = apply_local_kraus(rho, cc.gate_unitary(g), g.qubits, n)
        for q, pauli in inject:
            rho = apply_local_kraus(rho, _PAULI[pauli], (q,), n)
        if noisy:
            for q in g.qubits:
                rho = apply_local_kraus(rho, nk, (q,), n)
    return rho


def simulate_exact(c: cc.Circuit, noise=NoNoise(), noisy_waits: bool = True, faults: dict | None = None) -> np.ndarray:
    """Distribution over all 2^n computational-basis outcomes (qubit 0 most significant)."""
    rho = _evolve(c, noise, faults, noisy_waits)
    p = np.clip(np.real(np.diag(rho)), 0.0, None)
    return p / p.sum()


def outcome_bits(index: int, n: int) -> tuple:
    return tuple((index >> (n - 1 - q)) & 1 for q in range(n))


def postselect(dist: np.ndarray, n_qubits: int) -> tuple[np.ndarray, float]:
    """Logical distribution (00, 01, 10, 11) after decoding and the acceptance probability."""
    logical = np.zeros(4)
    for idx, pr in enumerate(dist):
        if pr == 0:
            continue
        out = cc.decode_bits(outcome_bits(idx, n_qubits), n_qubits)
        if out.accepted:
            logical[2 * out.logical[0] + out.logical[1]] += pr
    acc = float(logical.sum())
    return (logical / acc if acc > 0 else logical), acc


def postselect_counts(counts: np.ndarray, n_qubits: int) -> tuple[np.ndarray, int]:
    logical = np.zeros(4, dtype=np.int64)
    for idx, k in enumerate(counts):
        if k == 0:
            continue
        out = cc.decode_bits(outcome_bits(idx, n_qubits), n_qubits)
        if out.accepted:
            logical[2 * out.logical[0] + out.logical[1]] += k
    return logical, int(logical.sum())


def sample_shots(dist, shots: int, seed: int) -> np.ndarray:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    p = np.clip(np.asarray(dist, dtype=float), 0.0, None)
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    return rng.multinomial(shots, p / p.sum())


# ------------------------------------------------------- fault enumeration


@dataclass(frozen=True)
class FaultReport:
    location: int
    kind: str
    qubit: int
    pauli: str
    outcome: str  # Detected | Harmless | LogicalError
    acceptance: float


def enumerate_single_faults(c: cc.Circuit) -> list[FaultReport]:
    if c.n_qubits < 4:
        raise ValueError("single-fault enumeration needs an encoded circuit")
    ideal, _ = postselect(simulate_exact(c), c.n_qubits)
    reports = []
    for i, g in enumerate(c.locations):
        for q in g.qubits:
            for pauli in "XYZ":
                dist = simulate_exact(c, faults={i: ((q, pauli),)})
                logical, acc = postselect(dist, c.n_qubits)
                if acc < 1e-12:
                    outcome = "Detected"
                elif np.max(np.abs(logical - ideal)) <= 1e-9:
                    outcome = "Harmless" if acc > 1 - 1e-9 else "Detected"
                else:
                    outcome = "LogicalError"
                reports.append(FaultReport(i, g.kind, q, pauli, outcome, acc))
    return reports


def fault_pattern_mixture(c: cc.Circuit, p: float) -> np.ndarray:
    """i.i.d. Pauli output distribution by explicit sum over all fault patterns.

    Every location fails independently with probability p; a failure applies
    one of the 3^k Pauli strings on its k qubits uniformly. Exponential cost.
    """
    locs = list(range(len(c.locations)))
    total = np.zeros(2**c.n_qubits)

    def rec(pos: int, weight: float, faults: dict):
        nonlocal total
        if pos == len(locs):
            total = total + weight * simulate_exact(c, faults=dict(faults))
            return
        g = c.locations[locs[pos]]
        rec(pos + 1, weight * (1 - p) ** len(g.qubits), faults)
        k = len(g.qubits)
        strings = _pauli_strings(k)
        for s in strings:
            n_fail = sum(1 for x in s if x != "I")
            w = (1 - p) ** (k - n_fail) * (p / 3) ** n_fail
            faults[locs[pos]] = tuple((q, x) for q, x in zip(g.qubits, s) if x != "I")
            rec(pos + 1, weight * w, faults)
            del faults[locs[pos]]

    rec(0, 1.0, {})
    return total


def _pauli_strings(k: int) -> list[tuple]:
    out = [()]
    for _ in range(k):
        out = [s + (x,) for s in out for x in "IXYZ"]
    return [s for s in out if any(x != "I" for x in s)]


# ------------------------------------------------------ lifetime experiment


@dataclass(frozen=True)
class ExperimentRow:
    T: int
    variant: str
    shots: int
    accepted: int
    tv_distance: float
    acceptance_rate: float
    seed: int


def substream_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence([int(seed) & (2**63 - 1), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def lifetime_experiment(
    state: str,
    gateset: str,
    noise,
    T_max: int,
    shots: int,
    seed: int,
    noisy_waits: bool = True,
    T_values: Iterable[int] | None = None,
) -> list[ExperimentRow]:
    if T_max > 100:
        raise ValueError("T_max must not exceed 100")
    ideal = cc.ideal_logical_distribution(state)
    base = {enc: cc.build_prep_circuit(state, enc, gateset) for enc in (False, True)}
    rows = []
    ts = range(T_max + 1) if T_values is None else T_values
    for T in ts:
        for j, enc in enumerate((False, True)):
            circ = cc.append_identity_rounds(base[enc], T)
            dist = simulate_exact(circ, noise, noisy_waits)
            counts = sample_shots(dist, shots, substream_seed(seed, 2 * T + j))
            logical, acc = postselect_counts(counts, circ.n_qubits)
            tv = it.tv_distance(logical / acc, ideal) if acc else 1.0
            rows.append(ExperimentRow(T, "encoded" if enc else "unencoded", shots, acc, tv, acc / shots, seed))
    return rows
