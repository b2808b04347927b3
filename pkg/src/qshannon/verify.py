"""Quick invariant checks run by ``qshannon verify``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import capacity as cap
from . import channels as ch
from . import circuits as cc
from . import ftbounds as fb
from . import infotheory as it
from . import linalg as la
from . import simulator as sm


def _pairs(rng, n, d=2):
    return [(la.random_density(d, rng), la.random_density(d, rng)) for _ in range(n)]


def check_linalg(rng) -> bool:
    ok = True
    for _ in range(20):
        r, s = la.random_density(2, rng), la.random_density(3, rng)
        ok &= np.allclose(la.partial_trace(np.kron(r, s), (2, 3), "A"), r, atol=1e-9)
        psi = la.purify(s)
        ok &= np.allclose(la.partial_trace(np.outer(psi, psi.conj()), (3, 3), "A"), s, atol=1e-9)
    return bool(ok)


def check_channels(rng) -> bool:
    fams = [ch.Depolarizing(2, 0.3), ch.Erasure(2, 0.4), ch.AmplitudeDamping(0.7),
            ch.PauliQubit(0.1, 0.2, 0.3, 0.4), ch.CovariantPauli(0.5, 0.2), ch.Depolarizing(3, 1.1)]
    for f in fams:
        t = ch.kraus_from_family(f)
        if not ch.validate_cptp(t).valid:
            return False
        c = ch.choi_matrix(t)
        if not np.allclose(la.partial_trace(c, (t.dim_in, t.dim_out), "A"), np.eye(t.dim_in) / t.dim_in, atol=1e-9):
            return False
    return True


def check_pinsker(rng) -> bool:
    for r, s in _pairs(rng, 100):
        if it.relative_entropy(r, s) < la.trace_norm(r - s) ** 2 / (2 * math.log(2)) - 1e-9:
            return False
    return True


def check_fuchs_van_de_graaf(rng) -> bool:
    for r, s in _pairs(rng, 100):
        f, t = it.fidelity(r, s), it.trace_distance(r, s)
        if not (1 - math.sqrt(f) - 1e-9 <= t <= math.sqrt(1 - f) + 1e-9):
            return False
    return True


def check_average_relative_entropy(rng) -> bool:
    for _ in range(20):
        w = rng.dirichlet(np.ones(3))
        states = [la.random_density(2, rng) for _ in range(3)]
        e = it.Ensemble(tuple(w), tuple(states))
        avg = e.average()
        rhs = sum(p * it.relative_entropy(s, avg) for p, s in zip(w, states))
        if abs(it.holevo_quantity(e) - rhs) > 1e-8:
            return False
    return True


def check_mutual_information(rng) -> bool:
    for _ in range(20):
        r = la.random_density(4, rng)
        ra, rb = la.partial_trace(r, (2, 2), "A"), la.partial_trace(r, (2, 2), "B")
        if abs(it.mutual_information(r, (2, 2)) - it.relative_entropy(r, np.kron(ra, rb))) > 1e-8:
            return False
    return True


def check_entropy_derivatives(rng) -> bool:
    for _ in range(10):
        # well-conditioned pair so central differences are accurate
        r, w = (0.8 * la.random_density(3, rng) + 0.2 * np.eye(3) / 3 for _ in range(2))
        first, second = it.segment_entropy_derivatives(r, w, 0.3)

        def f(t):
            return -it.von_neumann_entropy(r + t * (w - r))

        h = 1e-5
        if abs(first - (f(0.3 + h) - f(0.3 - h)) / (2 * h)) > 1e-6 or second < -1e-8:
            return False
    return True


def check_closed_forms(rng) -> bool:
    ok = abs(cap.closed_form_holevo(ch.Depolarizing(2, 0.2)).value - 0.531004) < 1e-6
    ok &= abs(cap.closed_form_ea(ch.Erasure(2, 0.25)).value - 1.5) < 1e-12
    ok &= abs(cap.capacity_quotient(ch.PauliQubit(0, 1 / 3, 1 / 3, 1 / 3)) - fb.quotient_bound("unital_qubit")) < 1e-6
    for d in (2, 3):
        near = ch.Depolarizing.from_weyl_error(d, (d * d - 1) / (d * d) - 1e-6)
        ok &= abs(cap.capacity_quotient(near) - (d + 1)) < 1e-3
    num = cap.numeric_holevo(ch.Depolarizing(2, 0.2)).value
    ok &= abs(num - 0.5310044064) < 1e-4
    return bool(ok)


def check_thresholds(rng) -> bool:
    from fractions import Fraction as F

    want = {("phi+", "standard"): F(1, 40), ("00", "standard"): F(2, 283), ("0+", "standard"): F(5, 217),
            ("phi+", "native"): F(1, 68), ("00", "native"): F(4, 770), ("0+", "native"): F(3, 268)}
    ok = all(fb.sequence_threshold_exact(s, g, 0) == v for (s, g), v in want.items())
    ok &= all(fb.sequence_threshold_exact("phi+", "standard", T) == F(1, 40 + 14 * T) for T in range(51))
    return bool(ok)


def check_circuits(rng) -> bool:
    accepted = [b for b in range(16) if cc.decode_422([(b >> (3 - i)) & 1 for i in range(4)]).accepted]
    if len(accepted) != 8:
        return False
    for g in (cc.Gate("X", (0,)), cc.Gate("Y", (0,)), cc.Gate("Z", (0,)), cc.Gate("H", (0,)), cc.Gate("CNOT", (0, 1))):
        n = 2
        u = cc.embed(cc.gate_unitary(g), g.qubits, n)
        v = cc.circuit_unitary(cc.Circuit(n, "native", tuple(cc.compile_to_native(g))))
        if not cc.phase_equivalent(u, v):
            return False
    return True


def check_single_faults(rng) -> bool:
    for gs in ("standard", "native"):
        for s in cc.STATES:
            rep = sm.enumerate_single_faults(cc.build_prep_circuit(s, True, gs))
            if any(r.outcome == "LogicalError" for r in rep):
                return False
    return True


CHECKS: list[tuple[str, Callable]] = [
    ("linalg", check_linalg),
    ("channels", check_channels),
    ("pinsker", check_pinsker),
    ("fuchs_van_de_graaf", check_fuchs_van_de_graaf),
    ("average_relative_entropy", check_average_relative_entropy),
    ("mutual_information", check_mutual_information),
    ("entropy_derivatives", check_entropy_derivatives),
    ("closed_forms", check_closed_forms),
    ("thresholds", check_thresholds),
    ("circuits", check_circuits),
    ("single_faults", check_single_faults),
]


def run_all(seed: int = 42) -> list[tuple[str, bool]]:
    out = []
    for i, (name, fn) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, i])
        try:
            ok = bool(fn(rng))
        except Exception:  # a crash counts as a failed check
            ok = False
        out.append((name, ok))
    return out
