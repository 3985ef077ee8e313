import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from helpers import random_kraus
from factorizable import (
    ChoiMatrix,
    NotCompletelyPositive,
    QuantumChannel,
    RawMap,
    adjoint_channel,
    apply_channel,
    channel_from_choi,
    choi_of,
    compose,
    identity_channel,
    map_distance,
    transpose_map,
    unitary_channel,
    verify_channel,
)
from factorizable.channels import choi_trace_conditions
from factorizable.errors import DimensionMismatch, NotHermitian


def test_choi_layout_matches_loop_oracle(rng):
    kraus = random_kraus(rng, 3, 2)
    ch = QuantumChannel(3, kraus)
    expected = oracles.choi(lambda x: oracles.kraus_apply(kraus, x), 3)
    assert np.abs(choi_of(ch).matrix - expected).max() < 1e-13


def test_apply_matches_oracle(rng):
    kraus = random_kraus(rng, 4, 3)
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    got = apply_channel(QuantumChannel(4, kraus), x)
    assert np.abs(got - oracles.kraus_apply(kraus, x)).max() < 1e-13


def test_identity_choi_is_unnormalized_max_entangled():
    c = choi_of(identity_channel(2)).matrix
    omega = np.zeros(4)
    omega[[0, 3]] = 1.0
    assert np.array_equal(c.real, np.outer(omega, omega))


def test_transpose_map_is_not_cp():
    rep = verify_channel(transpose_map(3))
    assert not rep.cp
    assert rep.min_choi_eigenvalue == pytest.approx(-1.0, abs=1e-12)
    assert rep.trace_preserving and rep.unital


def test_transpose_choi_is_flip():
    c = choi_of(transpose_map(2)).matrix
    flip = np.eye(4)[[0, 2, 1, 3]]
    assert np.abs(c - flip).max() == 0.0


def test_channel_from_choi_rejects_transpose():
    with pytest.raises(NotCompletelyPositive) as info:
        channel_from_choi(choi_of(transpose_map(2)))
    assert info.value.min_eigenvalue == pytest.approx(-1.0)


def test_choi_roundtrip_minimal_kraus(rng):
    kraus = random_kraus(rng, 3, 2)
    ch = QuantumChannel(3, kraus)
    back = channel_from_choi(choi_of(ch))
    assert back.num_kraus == 2
    assert map_distance(back, ch, 3) < 1e-12


def test_unitary_channel_rank_one(rng):
    u = oracles.haar(3, rng)
    rep = verify_channel(unitary_channel(u))
    assert rep.ucpt and rep.choi_rank == 1


def test_non_unital_channel_reported():
    # amplitude damping with gamma = 0.3
    g = 0.3
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]])
    k1 = np.array([[0, np.sqrt(g)], [0, 0]])
    rep = verify_channel(QuantumChannel(2, [k0, k1]))
    assert rep.cp and rep.trace_preserving and not rep.unital
    assert not rep.ucpt


def test_trace_conditions_from_choi(rng):
    kraus = random_kraus(rng, 3, 3)
    tr_out, tr_in = choi_trace_conditions(choi_of(QuantumChannel(3, kraus)))
    assert np.abs(tr_out - np.eye(3)).max() < 1e-12
    phi1 = sum(v @ v.conj().T for v in kraus)
    assert np.abs(tr_in - phi1).max() < 1e-12


def test_raw_map_verification_matches_kraus(rng):
    kraus = random_kraus(rng, 2, 2)
    raw = RawMap(2, lambda x: oracles.kraus_apply(kraus, x))
    a, b = verify_channel(raw), verify_channel(QuantumChannel(2, kraus))
    assert (a.cp, a.trace_preserving, a.unital, a.choi_rank) == (
        b.cp, b.trace_preserving, b.unital, b.choi_rank)


def test_compose_order(rng):
    a = QuantumChannel(3, random_kraus(rng, 3, 2))
    b = QuantumChannel(3, random_kraus(rng, 3, 2))
    assert map_distance(compose(a, b), lambda x: b(a(x)), 3) < 1e-13


def test_adjoint_pairing(rng):
    ch = QuantumChannel(3, random_kraus(rng, 3, 2))
    adj = adjoint_channel(ch)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    lhs = np.trace(y.conj().T @ ch(x))
    rhs = np.trace(adj(y).conj().T @ x)
    assert abs(lhs - rhs) < 1e-12


def test_dimension_errors():
    with pytest.raises(DimensionMismatch):
        QuantumChannel(2, np.zeros((1, 3, 3)))
    with pytest.raises(DimensionMismatch):
        apply_channel(identity_channel(2), np.eye(3))


def test_choi_must_be_hermitian():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(NotHermitian):
        ChoiMatrix(2, m)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4), d=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_random_cptp_property(n, d, seed):
    kraus = random_kraus(np.random.default_rng(seed), n, d)
    ch = QuantumChannel(n, kraus)
    rep = verify_channel(ch)
    assert rep.cp and rep.trace_preserving
    assert rep.choi_rank <= min(d, n * n)
    assert map_distance(channel_from_choi(choi_of(ch)), ch, n) < 1e-9
