import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_qubit_channel, seeds
from qshannon import capacity as cap
from qshannon import channels as ch
from qshannon import infotheory as it
from qshannon import linalg as la

GRID21 = np.linspace(0.0, 1.0, 21)


def h(p):
    return it.binary_entropy(p)


# ------------------------------------------------------------ closed forms


@pytest.mark.parametrize(
    "family, want",
    [
        (ch.Depolarizing(2, 0.0), 1.0),
        (ch.Erasure(2, 0.5), 0.5),
        (ch.Depolarizing(2, 0.2), 0.531004),
        (ch.Identity(3), math.log2(3)),
        (ch.Replacer(np.eye(2) / 2), 0.0),
    ],
)
def test_closed_form_holevo_examples(family, want):
    assert cap.closed_form_holevo(family).value == pytest.approx(want, abs=1e-6)


@pytest.mark.parametrize(
    "family, want",
    [
        (ch.Identity(2), 2.0),
        (ch.Erasure(2, 0.25), 1.5),
        (ch.Depolarizing(2, 0.2), 1.152415),
        (ch.Replacer(np.eye(2) / 2), 0.0),
    ],
)
def test_closed_form_ea_examples(family, want):
    assert cap.closed_form_ea(family).value == pytest.approx(want, abs=1e-6)


def test_depolarizing_ea_four_digit_value():
    assert cap.closed_form_ea(ch.Depolarizing(2, 0.2)).value == pytest.approx(1.15238, abs=1e-4)


def test_depolarizing_closed_form_scalar_oracle():
    # output eigenvalues 1 - p/2 and p/2 at p = 0.2, uniform average
    want = 1.0 - h(0.1)
    assert cap.closed_form_holevo(ch.Depolarizing(2, 0.2)).value == pytest.approx(want, abs=1e-12)
    # Choi spectrum: 1 - 3p/4 once, p/4 three times
    lam = np.array([0.85, 0.05, 0.05, 0.05])
    assert cap.closed_form_ea(ch.Depolarizing(2, 0.2)).value == pytest.approx(2 + np.sum(lam * np.log2(lam)), abs=1e-12)


@pytest.mark.parametrize("p", GRID21)
def test_erasure_closed_forms(p):
    assert cap.closed_form_holevo(ch.Erasure(2, p)).value == pytest.approx(1 - p, abs=1e-12)
    assert cap.closed_form_ea(ch.Erasure(2, p)).value == pytest.approx(2 * (1 - p), abs=1e-12)


def test_unsupported_family_rejected():
    t = ch.KrausChannel.from_ops([np.eye(2)])
    with pytest.raises((TypeError, ValueError)):
        cap.closed_form_holevo(t)
    with pytest.raises((TypeError, ValueError)):
        cap.closed_form_ea(t)


def test_pauli_and_covariant_forms_agree():
    for p0, p3 in [(0.7, 0.1), (0.4, 0.3), (0.25, 0.25), (0.1, 0.5)]:
        f = ch.CovariantPauli(p0, p3)
        assert cap.closed_form_holevo(f).value == pytest.approx(cap.closed_form_holevo(f.as_pauli()).value, abs=1e-9)
        assert cap.closed_form_ea(f).value == pytest.approx(cap.closed_form_ea(f.as_pauli()).value, abs=1e-9)


def test_amplitude_damping_closed_form_limits():
    assert cap.closed_form_holevo(ch.AmplitudeDamping(0.0)).value == pytest.approx(1.0, abs=1e-9)
    assert cap.closed_form_ea(ch.AmplitudeDamping(0.0)).value == pytest.approx(2.0, abs=1e-9)
    assert cap.closed_form_holevo(ch.AmplitudeDamping(1.0)).value == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=50)
@given(st.floats(0.0, 1.0))
def test_capacity_bounds(g):
    f = ch.AmplitudeDamping(g)
    c_h, c_ea = cap.closed_form_holevo(f).value, cap.closed_form_ea(f).value
    assert -1e-6 <= c_h <= c_ea + 1e-9 <= 2 + 1e-6


# -------------------------------------------------------- numeric solvers


def test_numeric_holevo_replacer():
    assert cap.numeric_holevo(ch.Replacer(np.eye(2) / 2)).value == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("family", [ch.Depolarizing(2, 0.2), ch.AmplitudeDamping(0.5)])
def test_numeric_holevo_examples(family):
    r = cap.numeric_holevo(family)
    assert r.converged
    assert r.value == pytest.approx(cap.closed_form_holevo(family).value, abs=1e-4)
    assert r.extra["lower"] <= r.extra["upper"] + 1e-12


@pytest.mark.parametrize("family", [ch.Identity(2), ch.Depolarizing(2, 0.2), ch.AmplitudeDamping(0.3)])
def test_numeric_ea_examples(family):
    assert cap.numeric_ea(family).value == pytest.approx(cap.closed_form_ea(family).value, abs=1e-4)


def test_numeric_ea_four_digit_depolarizing_value():
    assert cap.numeric_ea(ch.Depolarizing(2, 0.2)).value == pytest.approx(1.15238, abs=1e-4)


def test_ea_objective_matches_joint_state(rng):
    for f in [ch.AmplitudeDamping(0.3), ch.Depolarizing(3, 0.4), ch.Erasure(2, 0.3)]:
        t = ch.as_channel(f)
        rho = la.random_density(t.dim_in, rng)
        assert cap.ea_objective(t, rho) == pytest.approx(cap.ea_objective_joint(t, rho), abs=1e-10)


def test_numeric_solvers_are_deterministic():
    f = ch.AmplitudeDamping(0.4)
    assert cap.numeric_holevo(f, seed=3).value == cap.numeric_holevo(f, seed=3).value
    assert cap.numeric_ea(f, seed=3).value == cap.numeric_ea(f, seed=3).value


def test_numeric_rejects_large_dimension():
    with pytest.raises(ValueError):
        cap.numeric_holevo(ch.Depolarizing(5, 0.1))


def _grid_family(kind, x):
    if kind == "depolarizing":
        return ch.Depolarizing(2, x)
    if kind == "amplitude_damping":
        return ch.AmplitudeDamping(x)
    # covariant Pauli along the p3 = (1 - p0) / 3 line
    return ch.CovariantPauli(x, (1 - x) / 3)


@pytest.mark.slow
@pytest.mark.parametrize("kind", ["depolarizing", "covariant_pauli", "amplitude_damping"])
@pytest.mark.parametrize("x", GRID21)
def test_numeric_matches_closed_form_on_grid(kind, x):
    f = _grid_family(kind, x)
    assert cap.numeric_holevo(f).value == pytest.approx(cap.closed_form_holevo(f).value, abs=1e-4)
    assert cap.numeric_ea(f).value == pytest.approx(cap.closed_form_ea(f).value, abs=1e-4)


@settings(max_examples=15)
@given(seeds)
def test_holevo_below_ea(seed):
    t = random_qubit_channel(np.random.default_rng(seed))
    assert cap.numeric_holevo(t).value <= cap.numeric_ea(t, n_seeds=8).value + 1e-4


@settings(max_examples=15)
@given(seeds)
def test_equal_distance_at_holevo_optimum(seed):
    t = random_qubit_channel(np.random.default_rng(seed), n_kraus=int(np.random.default_rng(seed).integers(1, 4)))
    c = cap.divergence_center(t)
    assert cap.equal_distance_residual(c) < 1e-4


# ---------------------------------------------------------------- centers


def test_depolarizing_center_is_maximally_mixed():
    c = cap.divergence_center(ch.Depolarizing(2, 0.3))
    assert np.allclose(c.center, np.eye(2) / 2, atol=1e-4)
    s = cap.stabilized_divergence_center(ch.Depolarizing(2, 0.3))
    assert np.allclose(s.center, np.eye(2) / 2, atol=1e-4)


@pytest.mark.parametrize("probs", [(0.5, 0.2, 0.2, 0.1), (0.1, 0.6, 0.0, 0.3), (0.7, 0.0, 0.0, 0.3)])
def test_unital_qubit_center(probs):
    c = cap.divergence_center(ch.PauliQubit(*probs))
    assert np.allclose(c.center, np.eye(2) / 2, atol=1e-4)


def test_amplitude_damping_center_limits():
    near_one = cap.divergence_center(ch.AmplitudeDamping(0.99))
    assert near_one.largest_eigenvalue > 0.98
    assert np.real(near_one.center[0, 0]) > 0.98
    near_zero = cap.stabilized_divergence_center(ch.AmplitudeDamping(1e-6))
    assert np.allclose(near_zero.center, np.eye(2) / 2, atol=1e-3)


def test_amplitude_damping_stabilized_center_smaller():
    f = ch.AmplitudeDamping(0.5)
    assert cap.stabilized_divergence_center(f).largest_eigenvalue < cap.divergence_center(f).largest_eigenvalue


@pytest.mark.parametrize("gamma", [0.2, 0.6])
def test_stabilized_center_cross_check(gamma):
    # the closed-form center attains the entanglement-assisted capacity as a radius
    f = ch.AmplitudeDamping(gamma)
    s = cap.stabilized_divergence_center(f)
    radius = cap.stabilized_radius_given_center(f, s.center)
    assert radius == pytest.approx(cap.closed_form_ea(f).value, abs=1e-5)


def test_divergence_center_radius_is_holevo():
    f = ch.AmplitudeDamping(0.5)
    assert cap.divergence_center(f).radius == pytest.approx(cap.closed_form_holevo(f).value, abs=1e-4)


# --------------------------------------------------------------- quotient


def test_quotient_examples():
    assert cap.capacity_quotient(ch.Identity(2)) == pytest.approx(2.0)
    want = (6 - 3 * math.log2(3)) / (5 - 3 * math.log2(3))
    assert cap.capacity_quotient(ch.PauliQubit(0, 1 / 3, 1 / 3, 1 / 3)) == pytest.approx(want, abs=1e-9)
    assert want == pytest.approx(5.0798, abs=1e-3)


def test_quotient_dephasing_is_one():
    assert cap.capacity_quotient(ch.PauliQubit(0.5, 0, 0, 0.5)) == pytest.approx(1.0, abs=1e-3)


def test_quotient_numeric_path():
    t = ch.as_channel(ch.PauliQubit(0, 1 / 3, 1 / 3, 1 / 3))
    assert cap.capacity_quotient(t) == pytest.approx(5.0798, abs=1e-3)


def test_quotient_rejects_replacer():
    with pytest.raises(ValueError, match="replacer"):
        cap.capacity_quotient(ch.Depolarizing(2, 1.0))
    near = ch.as_channel(ch.Depolarizing(2, 1.0 - 1e-5))
    with pytest.raises(ValueError, match="replacer"):
        cap.capacity_quotient(near)


def _is_on_boundary(p0, p3, step):
    return abs(p3 - (1 - p0) / 3) <= step or abs(p3 - (1 - 3 * p0)) <= step


def test_covariant_pauli_extremality():
    step = 1 / 20
    best, arg = -np.inf, None
    for p0 in np.linspace(0, 1, 21):
        for p3 in np.linspace(0, 1, 21):
            if p0 + p3 > 1 + 1e-12:
                continue
            f = ch.CovariantPauli(p0, p3)
            if cap.closed_form_holevo(f).value <= 1e-9:
                continue
            q = cap.capacity_quotient(f)
            if q > best:
                best, arg = q, (p0, p3)
    assert arg is not None and _is_on_boundary(*arg, step)


def test_value_invariants_hold_for_results():
    r = cap.numeric_holevo(ch.AmplitudeDamping(0.7))
    assert -1e-6 <= r.value <= 2 + 1e-6
    assert r.seed == 0
