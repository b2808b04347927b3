"""Circuits for the [[4,2,2]] error-detection experiments.

A circuit is an ordered list of locations (preparations, gates, waits and
measurements). Preparation circuits are scheduled into time steps: every
qubit is prepared just before its first gate, all qubits are measured in a
common final step, and each idle step in between is an explicit wait.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la

SINGLE_GATES = {"X", "Y", "Z", "H", "S", "T", "GPI", "GPI2"}
TWO_GATES = {"CNOT", "MS"}
NON_UNITARY = {"prep0", "measureZ"}
KINDS = SINGLE_GATES | TWO_GATES | NON_UNITARY | {"wait"}
NATIVE_KINDS = {"GPI", "GPI2", "MS", "prep0", "measureZ", "wait"}
PARAM_COUNT = {"GPI": 1, "GPI2": 1, "MS": 2}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_GATES else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs two distinct qubits")
        if len(self.params) != PARAM_COUNT.get(self.kind, 0):
            raise ValueError(f"{self.kind} takes {PARAM_COUNT.get(self.kind, 0)} parameter(s)")
        if not all(math.isfinite(x) for x in self.params):
            raise ValueError("gate angles must be finite")

    @property
    def is_unitary(self) -> bool:
        return self.kind not in NON_UNITARY


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gateset: str
    locations: tuple
    measured: tuple = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        if self.gateset not in ("standard", "native"):
            raise ValueError(f"unknown gate set {self.gateset!r}")
        object.__setattr__(self, "locations", tuple(self.locations))
        for g in self.locations:
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise ValueError(f"{g} addresses a qubit outside 0..{self.n_qubits - 1}")
            if self.gateset == "native" and g.kind not in NATIVE_KINDS:
                raise ValueError(f"{g.kind} is not a native gate")
        if not self.measured:
            meas = tuple(g.qubits[0] for g in self.locations if g.kind == "measureZ")
            object.__setattr__(self, "measured", meas)

    def __len__(self):
        return len(self.locations)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "gateset": self.gateset,
            "locations": [{"kind": g.kind, "qubits": list(g.qubits), "params": list(g.params)} for g in self.locations],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        for key in ("n_qubits", "gateset", "locations"):
            if key not in d:
                raise ValueError(f"circuit JSON: missing field {key!r}")
        locs = [Gate(x["kind"], tuple(x["qubits"]), tuple(x.get("params", ()))) for x in d["locations"]]
        return cls(int(d["n_qubits"]), d["gateset"], tuple(locs))

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_dict(json.loads(s))


# ------------------------------------------------------------- unitaries


def gpi(phi: float) -> np.ndarray:
    return np.array([[0, np.exp(-1j * phi)], [np.exp(1j * phi), 0]], dtype=np.complex128)


def gpi2(phi: float) -> np.ndarray:
    return np.array([[1, -1j * np.exp(-1j * phi)], [-1j * np.exp(1j * phi), 1]], dtype=np.complex128) / math.sqrt(2)


def ms(phi: float, psi: float) -> np.ndarray:
    a, b = phi + psi, phi - psi
    return np.array(
        [
            [1, 0, 0, -1j * np.exp(-1j * a)],
            [0, 1, -1j * np.exp(-1j * b), 0],
            [0, -1j * np.exp(1j * b), 1, 0],
            [-1j * np.exp(1j * a), 0, 0, 1],
        ],
        dtype=np.complex128,
    ) / math.sqrt(2)


_FIXED = {
    "X": la.PAULI_X,
    "Y": la.PAULI_Y,
    "Z": la.PAULI_Z,
    "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2),
    "S": np.diag([1, 1j]).astype(np.complex128),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]).astype(np.complex128),
    "wait": np.eye(2, dtype=np.complex128),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
}


def gate_unitary(g: Gate) -> np.ndarray:
    if g.kind == "GPI":
        return gpi(*g.params)
    if g.kind == "GPI2":
        return gpi2(*g.params)
    if g.kind == "MS":
        return ms(*g.params)
    if g.kind in _FIXED:
        return _FIXED[g.kind]
    raise ValueError(f"{g.kind} is not unitary")


def embed(u: np.ndarray, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Full 2^n matrix of ``u`` acting on ``qubits`` (big-endian)."""
    k = len(qubits)
    dim = 2**n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    others = [q for q in range(n_qubits) if q not in qubits]
    for col in range(dim):
        bits = [(col >> (n_qubits - 1 - q)) & 1 for q in range(n_qubits)]
        sub = 0
        for q in qubits:
            sub = 2 * sub + bits[q]
        for r in range(2**k):
            amp = u[r, sub]
            if amp == 0:
                continue
            nb = list(bits)
            for i, q in enumerate(qubits):
                nb[q] = (r >> (k - 1 - i)) & 1
            row = 0
            for b in nb:
                row = 2 * row + b
            out[row, col] += amp
    return out


def circuit_unitary(c: Circuit, segment: range | None = None) -> np.ndarray:
    seg = range(len(c.locations)) if segment is None else segment
    u = np.eye(2**c.n_qubits, dtype=np.complex128)
    for i in seg:
        g = c.locations[i]
        if not g.is_unitary:
            raise ValueError(f"location {i} ({g.kind}) is not unitary")
        u = embed(gate_unitary(g), g.qubits, c.n_qubits) @ u
    return u


def phase_equivalent(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(abs(np.trace(u.conj().T @ v)) - u.shape[0]) <= tol * u.shape[0]


# ------------------------------------------------------ native compilation

HALF_PI = math.pi / 2


def compile_to_native(g: Gate) -> list[Gate]:
    k, q = g.kind, g.qubits
    if k in NATIVE_KINDS:
        return [g]
    if k == "X":
        return [Gate("GPI", q, (0.0,))]
    if k == "Y":
        return [Gate("GPI", q, (HALF_PI,))]
    if k == "Z":
        return [Gate("GPI", q, (0.0,)), Gate("GPI", q, (HALF_PI,))]
    if k == "H":
        return [Gate("GPI", q, (0.0,)), Gate("GPI2", q, (-HALF_PI,))]
    if k == "CNOT":
        c, t = q
        return [
            Gate("GPI2", (c,), (HALF_PI,)),
            Gate("MS", (c, t), (0.0, 0.0)),
            Gate("GPI2", (c,), (math.pi,)),
            Gate("GPI2", (t,), (math.pi,)),
            Gate("GPI2", (c,), (-HALF_PI,)),
        ]
    raise ValueError(f"no native decomposition for {k}")


def cancel_inverse_pairs(ops: list[Gate]) -> list[Gate]:
    """Drop consecutive single-qubit gates on one qubit whose product is a phase."""
    ops = list(ops)
    changed = True
    while changed:
        changed = False
        last: dict[int, int] = {}
        for i, g in enumerate(ops):
            if len(g.qubits) == 1 and g.kind in SINGLE_GATES:
                q = g.qubits[0]
                j = last.get(q)
                if j is not None and len(ops[j].qubits) == 1 and ops[j].kind in SINGLE_GATES:
                    prod = gate_unitary(g) @ gate_unitary(ops[j])
                    if phase_equivalent(prod, np.eye(2)):
                        del ops[i]
                        del ops[j]
                        changed = True
                        break
            for q in g.qubits:
                last[q] = i
    return ops


# ------------------------------------------------------------- scheduling


def schedule(ops: Iterable[Gate], n_qubits: int, gateset: str) -> Circuit:
    """Place gates ASAP in time steps and add preparations, waits and measurements."""
    ops = list(ops)
    start: dict[int, int] = {}
    busy: dict[int, set] = {q: set() for q in range(n_qubits)}
    avail = {q: 1 for q in range(n_qubits)}
    placed = []
    for g in ops:
        t = max(avail[q] for q in g.qubits)
        for q in g.qubits:
            if q not in start:
                start[q] = t - 1
            busy[q].add(t)
            avail[q] = t + 1
        placed.append((t, g))
    final = max([1] + [avail[q] for q in range(n_qubits)])
    for q in range(n_qubits):
        start.setdefault(q, final - 1)
    events = []
    for q in range(n_qubits):
        events.append((start[q], q, Gate("prep0", (q,))))
        for t in range(start[q] + 1, final):
            if t not in busy[q]:
                events.append((t, q, Gate("wait", (q,))))
        events.append((final, q, Gate("measureZ", (q,))))
    for t, g in placed:
        events.append((t, min(g.qubits), g))
    events.sort(key=lambda e: (e[0], e[1]))
    return Circuit(n_qubits, gateset, tuple(e[2] for e in events))


# ---------------------------------------------------- preparation circuits

STATES = ("00", "0+", "phi+")


def _prep_gates(state: str, encoded: bool) -> tuple[int, list[Gate]]:
    if not encoded:
        if state == "phi+":
            return 2, [Gate("H", (0,)), Gate("CNOT", (0, 1))]
        if state == "0+":
            return 2, [Gate("H", (1,))]
        if state == "00":
            return 2, []
    else:
        if state == "phi+":
            return 4, [Gate("H", (0,)), Gate("H", (2,)), Gate("CNOT", (2, 1)), Gate("CNOT", (0, 3))]
        if state == "0+":
            return 4, [Gate("H", (0,)), Gate("H", (2,)), Gate("CNOT", (0, 1)), Gate("CNOT", (2, 3))]
        if state == "00":
            # qubit 4 is a flag ancilla that checks the parity of the GHZ preparation
            return 5, [
                Gate("H", (1,)),
                Gate("CNOT", (1, 2)),
                Gate("CNOT", (1, 0)),
                Gate("CNOT", (2, 3)),
                Gate("CNOT", (3, 4)),
                Gate("CNOT", (0, 4)),
            ]
    raise ValueError(f"unknown logical state {state!r}; choose from {STATES}")


def build_prep_circuit(state: str, encoded: bool, gateset: str = "standard") -> Circuit:
    n, ops = _prep_gates(state, encoded)
    if gateset == "native":
        ops = cancel_inverse_pairs([n_g for g in ops for n_g in compile_to_native(g)])
    elif gateset != "standard":
        raise ValueError(f"unknown gate set {gateset!r}")
    return schedule(ops, n, gateset)


def ideal_logical_distribution(state: str) -> np.ndarray:
    """Ideal distribution over the two logical bits, indexed 00, 01, 10, 11."""
    table = {"phi+": [0.5, 0, 0, 0.5], "0+": [0.5, 0.5, 0, 0], "00": [1.0, 0, 0, 0]}
    if state not in table:
        raise ValueError(f"unknown logical state {state!r}")
    return np.array(table[state], dtype=float)


# ---------------------------------------------------------- logical gates

LOGICAL_GATES = {
    # tag: physical single-qubit gates on the 4 code qubits
    "X1": {0: "X", 2: "X"},
    "X2": {0: "X", 1: "X"},
    "Z1": {0: "Z", 1: "Z"},
    "Z2": {0: "Z", 2: "Z"},
    "HHHH": {0: "H", 1: "H", 2: "H", 3: "H"},
    "SSSS": {0: "S", 1: "S", 2: "S", 3: "S"},
}
UNENCODED_GATES = {
    "X1": {0: "X"},
    "X2": {1: "X"},
    "Z1": {0: "Z"},
    "Z2": {1: "Z"},
    "HHHH": {0: "H", 1: "H"},
}


def append_logical_gate(c: Circuit, tag: str) -> Circuit:
    """Insert one transversal logical gate step before the final measurements.

    Code qubits that the gate leaves alone receive a wait, so an encoded step
    always adds 4 locations and an unencoded step 2 (standard gate set).
    """
    encoded = c.n_qubits >= 4
    table = LOGICAL_GATES if encoded else UNENCODED_GATES
    if tag not in table:
        raise ValueError(f"unknown logical gate {tag!r}; choose from {sorted(table)}")
    width = 4 if encoded else 2
    per_qubit: dict[int, list[Gate]] = {}
    for q in range(width):
        kind = table[tag].get(q)
        seq = [Gate(kind, (q,))] if kind else []
        if c.gateset == "native":
            seq = [n for g in seq for n in compile_to_native(g)]
        per_qubit[q] = seq
    depth = max(1, max(len(s) for s in per_qubit.values()))
    block = []
    for step in range(depth):
        for q in range(width):
            seq = per_qubit[q]
            block.append(seq[step] if step < len(seq) else Gate("wait", (q,)))
    locs = list(c.locations)
    cut = len(locs)
    while cut > 0 and locs[cut - 1].kind == "measureZ":
        cut -= 1
    return Circuit(c.n_qubits, c.gateset, tuple(locs[:cut] + block + locs[cut:]))


def append_identity_rounds(c: Circuit, rounds: int, tag: str = "X1") -> Circuit:
    """Each round applies the logical gate twice, leaving the state unchanged."""
    for _ in range(rounds):
        c = append_logical_gate(append_logical_gate(c, tag), tag)
    return c


# ------------------------------------------------------------ counting


@dataclass(frozen=True)
class LocationCount:
    preparations: int = 0
    single_gates: int = 0
    two_gates: int = 0
    waits: int = 0
    measurements: int = 0

    @property
    def total(self) -> int:
        return self.preparations + self.single_gates + self.two_gates + self.waits + self.measurements


def count_locations(c: Circuit) -> LocationCount:
    n = {"prep0": 0, "single": 0, "two": 0, "wait": 0, "measureZ": 0}
    for g in c.locations:
        if g.kind in ("prep0", "wait", "measureZ"):
            n[g.kind] += 1
        elif g.kind in TWO_GATES:
            n["two"] += 1
        else:
            n["single"] += 1
    return LocationCount(n["prep0"], n["single"], n["two"], n["wait"], n["measureZ"])


# ------------------------------------------------------------- decoding


@dataclass(frozen=True)
class DecodeOutcome:
    accepted: bool
    logical: tuple | None = None


REJECT = DecodeOutcome(False)


def decode_422(bits: Sequence[int] | str) -> DecodeOutcome:
    b = [int(x) for x in bits]
    if len(b) != 4 or any(x not in (0, 1) for x in b):
        raise ValueError(f"expected 4 bits, got {bits!r}")
    if (b[0] ^ b[1] ^ b[2] ^ b[3]) == 1:
        return REJECT
    return DecodeOutcome(True, (b[0] ^ b[1], b[0] ^ b[2]))


def decode_bits(bits: Sequence[int], n_qubits: int) -> DecodeOutcome:
    """Decode a full measurement record of a preparation circuit."""
    if n_qubits == 2:
        return DecodeOutcome(True, (int(bits[0]), int(bits[1])))
    if n_qubits == 5 and int(bits[4]) == 1:
        return REJECT
    return decode_422(bits[:4])


CODEWORDS = {
    (0, 0): ("0000", "1111"),
    (0, 1): ("1100", "0011"),
    (1, 0): ("1010", "0101"),
    (1, 1): ("0110", "1001"),
}


# ----------------------------------------------------------- superdense


def build_superdense(a: int, b: int) -> Circuit:
    """Send two bits with one qubit of a shared Bell pair.

    The sender applies Z^a X^b, so the Bell measurement returns the string ab.
    """
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError("message bits must be 0 or 1")
    ops = [Gate("H", (0,)), Gate("CNOT", (0, 1))]
    if b:
        ops.append(Gate("X", (0,)))
    if a:
        ops.append(Gate("Z", (0,)))
    ops += [Gate("CNOT", (0, 1)), Gate("H", (0,))]
    return schedule(ops, 2, "standard")
