import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import seeds
from qshannon import _accel
from qshannon import circuits as cc
from qshannon import infotheory as it
from qshannon import linalg as la
from qshannon import simulator as sim

NOISES = [
    sim.NoNoise(),
    sim.IidPauli(0.03),
    sim.DepolarizingNoise(0.05),
    sim.AmplitudeDampingNoise(0.1),
]


def test_phi_unencoded_noiseless():
    p = sim.simulate_exact(cc.build_prep_circuit("phi+", False))
    assert np.allclose(p, [0.5, 0, 0, 0.5], atol=1e-12)


@pytest.mark.parametrize("gateset", ["standard", "native"])
def test_phi_encoded_postselected(gateset):
    logical, acc = sim.postselect(sim.simulate_exact(cc.build_prep_circuit("phi+", True, gateset)), 4)
    assert acc == pytest.approx(1.0)
    assert np.allclose(logical, [0.5, 0, 0, 0.5], atol=1e-12)


@pytest.mark.parametrize("state", cc.STATES)
@pytest.mark.parametrize("gateset", ["standard", "native"])
def test_encoded_prep_matches_ideal(state, gateset):
    c = cc.build_prep_circuit(state, True, gateset)
    logical, acc = sim.postselect(sim.simulate_exact(c), c.n_qubits)
    assert acc == pytest.approx(1.0)
    assert np.allclose(logical, cc.ideal_logical_distribution(state), atol=1e-12)


# -------------------------------------------------- independent oracle


def _full_kraus_oracle(c, noise):
    """Evolution with every channel expanded to full-register Kraus matrices."""
    n = c.n_qubits
    dim = 2**n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1
    nk = noise.kraus()

    def channel(ops, qubits):
        nonlocal rho
        full = [cc.embed(k, qubits, n) for k in ops]
        rho = sum(k @ rho @ k.conj().T for k in full)

    reset = [np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])]
    for g in c.locations:
        if g.kind == "measureZ":
            if nk is not None:
                channel(nk, g.qubits)
            continue
        if g.kind == "prep0":
            channel(reset, g.qubits)
        elif g.kind != "wait":
            channel([cc.gate_unitary(g)], g.qubits)
        if nk is not None:
            for q in g.qubits:
                channel(nk, (q,))
    return np.real(np.diag(rho))


@pytest.mark.parametrize("noise", NOISES[1:])
@pytest.mark.parametrize("key", [("phi+", False, "standard"), ("0+", True, "standard"), ("phi+", True, "native")])
def test_matches_kraus_oracle(noise, key):
    c = cc.build_prep_circuit(*key)
    assert np.allclose(sim.simulate_exact(c, noise), _full_kraus_oracle(c, noise), atol=1e-12)


def test_depolarizing_example_oracle():
    c = cc.build_prep_circuit("phi+", False)
    noise = sim.DepolarizingNoise(0.05)
    assert np.max(np.abs(sim.simulate_exact(c, noise) - _full_kraus_oracle(c, noise))) < 1e-12


def test_depolarizing_noise_form():
    rho = la.random_density(2, np.random.default_rng(0))
    ks = sim.DepolarizingNoise(0.3).kraus()
    out = sum(k @ rho @ k.conj().T for k in ks)
    assert np.allclose(out, 0.7 * rho + 0.3 * np.eye(2) / 2)


@pytest.mark.parametrize("noise", NOISES)
@pytest.mark.parametrize("state", cc.STATES)
def test_output_is_distribution(noise, state):
    for enc in (False, True):
        p = sim.simulate_exact(cc.build_prep_circuit(state, enc), noise)
        assert np.all(p >= 0) and abs(p.sum() - 1) < 1e-10


def test_rejects_large_circuit():
    with pytest.raises(ValueError):
        sim.simulate_exact(cc.Circuit(6, "standard", ()))


@pytest.mark.parametrize("noise", [sim.IidPauli(1.5), sim.DepolarizingNoise(-0.1), sim.AmplitudeDampingNoise(2)])
def test_rejects_bad_noise(noise):
    with pytest.raises(ValueError):
        sim.simulate_exact(cc.build_prep_circuit("phi+", False), noise)


def test_noise_from_name():
    assert sim.noise_from_name("none") == sim.NoNoise()
    assert sim.noise_from_name("depolarizing", 0.1) == sim.DepolarizingNoise(0.1)
    with pytest.raises(ValueError):
        sim.noise_from_name("thermal", 0.1)


def test_noiseless_waits_flag():
    c = cc.append_identity_rounds(cc.build_prep_circuit("phi+", True), 2)
    noise = sim.DepolarizingNoise(0.05)
    noisy = sim.postselect(sim.simulate_exact(c, noise), 4)[1]
    quiet = sim.postselect(sim.simulate_exact(c, noise, noisy_waits=False), 4)[1]
    assert quiet > noisy


# --------------------------------------------------- fault patterns


@pytest.mark.parametrize("key", [("phi+", False, "standard"), ("0+", False, "standard"), ("00", False, "standard")])
def test_fault_pattern_mixture(key):
    c = cc.build_prep_circuit(*key)
    assert len(c.locations) <= 12
    p = 0.07
    assert np.allclose(sim.simulate_exact(c, sim.IidPauli(p)), sim.fault_pattern_mixture(c, p), atol=1e-10)


def test_fault_pattern_mixture_with_appended_gate():
    c = cc.append_logical_gate(cc.build_prep_circuit("phi+", False), "X1")
    assert len(c.locations) <= 12
    assert np.allclose(sim.simulate_exact(c, sim.IidPauli(0.2)), sim.fault_pattern_mixture(c, 0.2), atol=1e-10)


@pytest.mark.parametrize("gateset", ["standard", "native"])
@pytest.mark.parametrize("state", cc.STATES)
def test_single_faults_never_logical(state, gateset):
    reports = sim.enumerate_single_faults(cc.build_prep_circuit(state, True, gateset))
    assert reports
    assert not [r for r in reports if r.outcome == "LogicalError"]


def test_x_fault_after_prep_detected():
    c = cc.build_prep_circuit("phi+", True)
    i = next(i for i, g in enumerate(c.locations) if g.kind == "prep0" and g.qubits == (3,))
    rep = [r for r in sim.enumerate_single_faults(c) if r.location == i and r.pauli == "X"]
    assert rep and rep[0].outcome == "Detected"


def test_single_faults_reject_unencoded():
    with pytest.raises(ValueError):
        sim.enumerate_single_faults(cc.build_prep_circuit("phi+", False))


def test_injected_fault_breaks_unencoded():
    c = cc.build_prep_circuit("phi+", False)
    i = next(i for i, g in enumerate(c.locations) if g.kind == "CNOT")
    p = sim.simulate_exact(c, faults={i: ((1, "X"),)})
    assert np.allclose(p, [0, 0.5, 0.5, 0])


# ------------------------------------------------------------ sampling


def test_sample_deterministic_dist():
    counts = sim.sample_shots([0, 1.0, 0, 0], 500, seed=1)
    assert counts.tolist() == [0, 500, 0, 0]


def test_sample_half_half():
    counts = sim.sample_shots([0.5, 0.5], 10**6, seed=2)
    assert counts.sum() == 10**6
    assert abs(counts[0] - 5 * 10**5) < 5 * math.sqrt(10**6 * 0.25)


@given(seeds)
def test_sampling_reproducible(seed):
    d = [0.1, 0.2, 0.3, 0.4]
    assert np.array_equal(sim.sample_shots(d, 1000, seed), sim.sample_shots(d, 1000, seed))


def test_sample_rejects_zero_shots():
    with pytest.raises(ValueError):
        sim.sample_shots([1.0], 0, 0)


def test_tv_scaling():
    exact = sim.simulate_exact(cc.build_prep_circuit("phi+", True), sim.DepolarizingNoise(0.05))
    scaled = []
    for shots in (10**3, 10**4, 10**5):
        # average over a few substreams to tame the fluctuation of a single draw
        tvs = [it.tv_distance(sim.sample_shots(exact, shots, sim.substream_seed(9, k)) / shots, exact) for k in range(8)]
        scaled.append(np.mean(tvs) * math.sqrt(shots))
    ratios = [scaled[0] / scaled[1], scaled[1] / scaled[2]]
    assert all(0.2 <= r <= 5 for r in ratios)


def test_substreams_differ():
    assert sim.substream_seed(1, 0) != sim.substream_seed(1, 1)
    assert sim.substream_seed(1, 0) == sim.substream_seed(1, 0)


# ---------------------------------------------------------- experiments


def test_lifetime_noiseless_tv_small():
    rows = sim.lifetime_experiment("phi+", "standard", sim.NoNoise(), 3, 10**4, seed=4)
    assert len(rows) == 8
    for r in rows:
        assert r.acceptance_rate == 1.0
        # TV of a two-outcome fair split; sigma of |k/n - 1/2|
        assert r.tv_distance <= 3 * math.sqrt(0.25 / r.shots)


@pytest.mark.parametrize("p", [0.01, 0.03])
def test_acceptance_lower_bound(p):
    L_e = 12
    rows = sim.lifetime_experiment("phi+", "standard", sim.IidPauli(p), 0, 10**4, seed=5)
    enc = [r for r in rows if r.variant == "encoded"][0]
    bound = (1 - p) ** L_e
    sigma = math.sqrt(bound * (1 - bound) / enc.shots)
    assert enc.acceptance_rate >= bound - 3 * sigma


def test_lifetime_deterministic():
    a = sim.lifetime_experiment("0+", "native", sim.DepolarizingNoise(0.05), 2, 1000, seed=11)
    b = sim.lifetime_experiment("0+", "native", sim.DepolarizingNoise(0.05), 2, 1000, seed=11)
    assert a == b


def test_lifetime_rows_valid():
    for r in sim.lifetime_experiment("00", "standard", sim.AmplitudeDampingNoise(0.05), 2, 2000, seed=3):
        assert 0 <= r.accepted <= r.shots
        assert 0.0 <= r.tv_distance <= 1.0


def test_lifetime_rejects_long_runs():
    with pytest.raises(ValueError):
        sim.lifetime_experiment("phi+", "standard", sim.NoNoise(), 101, 10, seed=0)


def test_encoded_beats_unencoded():
    rows = sim.lifetime_experiment("phi+", "standard", sim.DepolarizingNoise(0.05), 10, 10**4, seed=0)
    tv = {(r.T, r.variant): r.tv_distance for r in rows}
    wins = sum(tv[(T, "encoded")] < tv[(T, "unencoded")] for T in range(11))
    assert wins >= 8


# ------------------------------------------------------------- backends


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
@settings(max_examples=30)
@given(seeds, st.integers(2, 5))
def test_numba_matches_numpy(seed, n):
    rng = np.random.default_rng(seed)
    rho = la.random_density(2**n, rng)
    one = np.array([la.random_unitary(2, rng)])
    two = np.array([la.random_unitary(4, rng) / math.sqrt(2), la.random_unitary(4, rng) / math.sqrt(2)])
    q = int(rng.integers(n))
    q0, q1 = (int(x) for x in rng.choice(n, size=2, replace=False))
    for ops, tg in ((one, (q,)), (two, (q0, q1))):
        a = _accel.apply_local_kraus(rho, ops, tg, n, backend="numba")
        b = _accel.apply_local_kraus(rho, ops, tg, n, backend="numpy")
        assert np.allclose(a, b, atol=1e-13)


def test_local_kraus_matches_embed(rng):
    n = 3
    rho = la.random_density(8, rng)
    u = la.random_unitary(4, rng)
    full = cc.embed(u, (2, 0), n)
    for backend in ("numpy",) + (("numba",) if _accel.HAVE_NUMBA else ()):
        out = _accel.apply_local_kraus(rho, np.array([u]), (2, 0), n, backend=backend)
        assert np.allclose(out, full @ rho @ full.conj().T, atol=1e-12)


def test_env_flag_forces_numpy():
    import json
    import os
    import subprocess
    import sys

    code = (
        "import json; from qshannon import _accel, circuits as cc, simulator as sim;"
        "p = sim.simulate_exact(cc.build_prep_circuit('0+', True), sim.DepolarizingNoise(0.05));"
        "print(_accel.HAVE_NUMBA, json.dumps(p.tolist()))"
    )
    env = dict(os.environ, QSHANNON_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    flag, probs = out.split(" ", 1)
    assert flag == "False"
    want = sim.simulate_exact(cc.build_prep_circuit("0+", True), sim.DepolarizingNoise(0.05))
    assert np.allclose(json.loads(probs), want, atol=1e-13)


def test_default_backend_switch(monkeypatch):
    c = cc.build_prep_circuit("phi+", True, "native")
    monkeypatch.setattr(_accel, "DEFAULT_BACKEND", "numpy")
    a = sim.simulate_exact(c, sim.AmplitudeDampingNoise(0.1))
    monkeypatch.setattr(_accel, "DEFAULT_BACKEND", None)
    b = sim.simulate_exact(c, sim.AmplitudeDampingNoise(0.1))
    assert np.allclose(a, b, atol=1e-13)
