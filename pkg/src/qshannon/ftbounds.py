"""Closed-form bound functions for fault-tolerant communication and the
[[4,2,2]] detection thresholds.

All logarithms are base 2 unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import capacity as cap
from . import channels as ch
from . import infotheory as it

LOG2_3 = math.log2(3.0)
DEFAULT_C = 100.0


@dataclass(frozen=True)
class FtParams:
    p: float
    c: float = DEFAULT_C
    j1: int = 1
    j2: int = 1
    p0: float = 1.0
    l: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p!r} outside [0, 1]")
        if not self.c > 0:
            raise ValueError("interface constant c must be positive")
        if self.j1 < 1 or self.j2 < 1:
            raise ValueError("j1 and j2 must be positive integers")
        if not 0.0 < self.p0 <= 1.0:
            raise ValueError("p0 must lie in (0, 1]")

    def in_validity_range(self) -> bool:
        return self.p <= min(self.p0 / 2.0, 1.0 / (2.0 * self.c * (self.j1 + self.j2)))


@dataclass
class Clamped:
    """Monotone envelope of the binary entropy, h(min(x, 1/2)); records saturation.

    Continuity bounds that carry h(x) only hold for x <= 1/2. Beyond that the
    entropy term is replaced by its maximum 1, which keeps every penalty
    monotone in p and still an upper bound.
    """

    vacuous: bool = False

    def h(self, x: float) -> float:
        if x > 0.5:
            self.vacuous = True
        return it.binary_entropy(min(max(x, 0.0), 0.5))


# ------------------------------------------------------------------ AVP


def penalty_g_avp_terms(p: float, dA: int, dB: int) -> tuple[list[float], bool]:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p!r} outside [0, 1]")
    if p == 0.0:
        return [0.0, 0.0, 0.0, 0.0], False
    cl = Clamped()
    dd = dA * dB
    root = math.sqrt(2.0 * math.log2(dB) * p)
    lg = abs(math.log2(p * p / dd))
    terms = [
        2.0 * (dd * math.log2(dd) + 1.0) * root * lg,
        2.0 * cl.h(dd * root * lg),
        5.0 * p * math.log2(dB),
        2.0 * (1.0 + 2.0 * p) * cl.h(2.0 * p / (1.0 + 2.0 * p)),
    ]
    return terms, cl.vacuous


def penalty_g_avp(p: float, dA: int, dB: int) -> float:
    return sum(penalty_g_avp_terms(p, dA, dB)[0])


# --------------------------------------------------------- FT capacity


def distillation_beta(q: float) -> float:
    """1 - h(q) - q log 3; the yield of one-way hashing distillation."""
    return 1.0 - it.binary_entropy(q) - q * LOG2_3


def penalty_f1(fp: FtParams) -> float:
    x = 4.0 * fp.c * fp.p
    if x > 1.0:
        raise ValueError("distillation rate non-positive: 4cp exceeds 1")
    num = it.binary_entropy(x) + x * LOG2_3
    den = distillation_beta(x)
    if den <= 0.0:
        raise ValueError("distillation rate non-positive")
    return num * fp.j2 / den


def _avp_core(fp: FtParams, cl: Clamped) -> tuple[float, float]:
    j1, j2, c, p = fp.j1, fp.j2, fp.c, fp.p
    j = j1 + j2
    root = math.sqrt(2.0 * j2 * p)
    lg = abs(2.0 * math.log2(2.0 * j * c * p / 2.0 ** (j1 * j2)))
    t1 = 2.0 * root * (2.0**j * j + 1.0) * lg
    t2 = 2.0 * cl.h(root * 2.0**j * lg)
    return t1, t2


def _cont_entropy(fp: FtParams, cl: Clamped) -> float:
    x = 4.0 * (fp.j1 + fp.j2) * fp.c * fp.p
    return (1.0 + x) * cl.h(x / (1.0 + x))


def penalty_f2_terms(fp: FtParams) -> tuple[list[float], bool]:
    if fp.p == 0.0:
        return [0.0, 0.0, 0.0, 0.0], False
    cl = Clamped()
    t1, t2 = _avp_core(fp, cl)
    t3 = _cont_entropy(fp, cl)
    t4 = 10.0 * (fp.j1 + fp.j2) * fp.c * fp.p * fp.j2
    return [t1, t2, t3, t4], cl.vacuous


def penalty_f2(fp: FtParams) -> float:
    return sum(penalty_f2_terms(fp)[0])


def distillation_error_bound(q: float, k: int, delta: float) -> float:
    if not 0.0 < q < 1.0:
        raise ValueError(f"q={q!r} must lie strictly inside (0, 1)")
    if delta <= 0:
        raise ValueError("delta must be positive")
    lg2 = math.log2(q / 3.0) ** 2
    return 2.0 * math.exp(-k * delta**2 / lg2) + math.sqrt(2.0 * math.sqrt(3.0) * math.exp(-k * delta**2 / (2.0 * lg2)))


def steane_failure_bound(p: float, p0: float, l: int, loc: int) -> float:
    if not 0.0 <= p < p0:
        raise ValueError(f"need 0 <= p < p0, got p={p!r}, p0={p0!r}")
    return 2.0 * p0 * (p / p0) ** (2**l) * loc


@dataclass
class FtBoundResult:
    value: float
    raw: float
    c_ea: float
    quotient: float
    f1: float
    f2: float
    f_dist: float
    f_cont: float
    f_avp: float
    vacuous: bool
    c: float
    quotient_source: str

    @property
    def gap(self) -> float:
        return self.c_ea - self.raw


def _quotient_for(f, mode: str) -> tuple[float, str]:
    if mode not in ("auto", "exact", "bound"):
        raise ValueError(f"unknown quotient mode {mode!r}")
    if mode in ("auto", "bound") and isinstance(f, ch.Depolarizing):
        return float(quotient_bound("depolarizing_limit", d=f.d)), "bound"
    if mode == "bound":
        raise ValueError(f"no quotient bound available for {f!r}")
    c_h = cap.closed_form_holevo(f).value
    if c_h <= 0:
        raise ValueError("classical capacity vanishes; the bound needs C(T) > 0")
    return cap.closed_form_ea(f).value / c_h, "exact"


def ft_ea_lower_bound(f, fp: FtParams, quotient: str = "auto") -> FtBoundResult:
    """C_ea - 4 f1 C_ea/C - f2 with its three named contributions.

    ``quotient="auto"`` uses the d+1 upper bound on C_ea/C for depolarizing
    channels, which makes the deduction independent of the channel
    parameter, and the exact closed-form ratio otherwise.
    """
    if not cap.has_closed_form(f):
        raise ValueError("the fault-tolerant bound needs a family with closed forms")
    c_ea = cap.closed_form_ea(f).value
    if cap.closed_form_holevo(f).value <= 0:
        raise ValueError("classical capacity vanishes; the bound needs C(T) > 0")
    q_ratio, src = _quotient_for(f, quotient)
    f1 = penalty_f1(fp)
    f2_terms, vac = penalty_f2_terms(fp)
    f2 = sum(f2_terms)
    raw = c_ea - 4.0 * f1 * q_ratio - f2
    x = 4.0 * fp.c * fp.p
    dist_core = (it.binary_entropy(x) + x * LOG2_3) / distillation_beta(x)
    cl = Clamped()
    j = fp.j1 + fp.j2
    if fp.p > 0:
        a1, a2 = _avp_core(fp, cl)
        cont_h = _cont_entropy(fp, cl)
    else:
        a1 = a2 = cont_h = 0.0
    f_dist = 4.0 * q_ratio * dist_core
    f_cont = cont_h + 8.0 * j * fp.c * fp.p * fp.j2
    f_avp = a1 + a2 + 2.0 * j * fp.c * fp.p * fp.j2
    return FtBoundResult(
        value=max(0.0, raw), raw=raw, c_ea=c_ea, quotient=q_ratio, f1=f1, f2=f2,
        f_dist=f_dist, f_cont=f_cont, f_avp=f_avp, vacuous=vac or cl.vacuous,
        c=fp.c, quotient_source=src,
    )


# --------------------------------------------------------------- quotients


def quotient_bound(kind: str, d: int | None = None, dB: int | None = None, lam_min: float | None = None) -> float:
    if kind == "near_replacer":
        if dB is None or lam_min is None:
            raise ValueError("near_replacer needs dB and lam_min")
        if lam_min <= 0:
            raise ValueError("lam_min must be positive")
        return 4.0 * math.log(2.0) * dB**5 / lam_min
    if kind == "far":
        if dB is None:
            raise ValueError("far needs dB")
        return 4.0 * dB * math.log2(dB)
    if kind == "depolarizing_limit":
        if d is None:
            raise ValueError("depolarizing_limit needs d")
        return float(d + 1)
    if kind == "depolarizing_p1":
        if d is None:
            raise ValueError("depolarizing_p1 needs d")
        num = math.log2(d * d / (d * d - 1.0))
        den = math.log2(d) + math.log2(1.0 / (d + 1)) / (d + 1) + (d / (d + 1.0)) * math.log2(d / (d * d - 1.0))
        return num / den
    if kind == "unital_qubit":
        return (6.0 - 3.0 * LOG2_3) / (5.0 - 3.0 * LOG2_3)
    raise ValueError(f"unknown quotient bound kind {kind!r}")


def taylor_bound_value(dB: int, lam_min: float, stab_norm: float) -> float:
    if lam_min <= 0:
        raise ValueError("lam_min must be positive")
    return 2.0 * dB**3 / lam_min * stab_norm**2


@dataclass
class TaylorResult:
    bound: float
    stab_norm: float
    lam_min: float
    ea_value: float | None = None

    @property
    def dominates(self) -> bool | None:
        return None if self.ea_value is None else self.ea_value <= self.bound + 1e-6


def taylor_upper_bound(t, sigma, verify: bool = False, seed: int = 0) -> TaylorResult:
    """Upper bound on C_ea for a channel close to the replacer onto ``sigma``.

    The stabilized norm is bounded by d_B times the 1-to-1 distance, which
    must not exceed 1/2.
    """
    t = ch.as_channel(t)
    dB = t.dim_out
    dist = ch.distance_1to1_to_replacer(t, sigma)
    norm = dB * dist
    if norm > 0.5:
        raise ValueError(f"channel too far from the replacer: norm bound {norm:.6g} > 1/2")
    lam_min = float(np.linalg.eigvalsh(sigma)[0])
    res = TaylorResult(taylor_bound_value(dB, lam_min, norm), norm, lam_min)
    if verify:
        res.ea_value = cap.numeric_ea(t, seed=seed).value
    return res


# ------------------------------------------------------------- thresholds

# (L_u, L_e) per logical state and gate set; these match circuits.build_prep_circuit
# except native 00, where the compiled flag-ancilla circuit has 50 locations and the
# reference count 26 (which gives the threshold 4/770) is kept.
BASE_COUNTS = {
    ("phi+", "standard"): (6, 12),
    ("0+", "standard"): (5, 12),
    ("00", "standard"): (4, 22),
    ("phi+", "native"): (10, 20),
    ("0+", "native"): (6, 20),
    ("00", "native"): (4, 26),
}


def detection_threshold_exact(L_u: int, L_e: int) -> Fraction:
    if L_u < 1 or L_e < 1:
        raise ValueError("location counts must be positive")
    return Fraction(L_u, L_e * (L_e - 1) + L_u * L_e + L_u * L_u)


def detection_threshold(L_u: int, L_e: int) -> float:
    return float(detection_threshold_exact(L_u, L_e))


def sequence_threshold_exact(state: str, gateset: str, T: int) -> Fraction:
    key = (state, gateset)
    if key not in BASE_COUNTS:
        raise ValueError(f"unknown state/gate set {state!r}/{gateset!r}")
    if T < 0:
        raise ValueError("T must be non-negative")
    L_u, L_e = BASE_COUNTS[key]
    return detection_threshold_exact(L_u + 2 * T, L_e + 4 * T)


def sequence_threshold(state: str, gateset: str, T: int) -> float:
    return float(sequence_threshold_exact(state, gateset, T))
