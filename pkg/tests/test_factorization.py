from fractions import Fraction

import numpy as np
import pytest

import oracles
from helpers import random_factorization
from factorizable import (
    FiniteAncillaSpec,
    FiniteFactorization,
    NotUnital,
    NotTracePreserving,
    QuantumChannel,
    Verdict,
    WeightError,
    channel_of_factorization,
    compose_factorizations,
    convex_combine,
    depolarizing,
    evaluate_factorization,
    holevo_werner,
    map_distance,
    recover_eq2,
    split_factorization,
    stinespring,
    two_unitary_factorization,
    verify_channel,
)
from factorizable.factorization import admissible_ks, noisy_witness, parse_weight

OMEGA = np.exp(2j * np.pi / 3)


def test_parse_weight_forms():
    assert parse_weight("1/3") == Fraction(1, 3)
    assert parse_weight(Fraction(2, 5)) == Fraction(2, 5)
    assert parse_weight(0.25) == 0.25


def test_ancilla_weights_must_sum_to_one():
    with pytest.raises(WeightError):
        FiniteAncillaSpec((2, 2), (Fraction(1, 2), Fraction(2, 5)))
    with pytest.raises(WeightError):
        FiniteAncillaSpec((2,), (0.9,))


@pytest.mark.parametrize("seed", range(5))
def test_kraus_form_matches_loop_oracle(seed):
    rng = np.random.default_rng(seed)
    f = random_factorization(rng, 2)
    ch = channel_of_factorization(f)
    target = lambda x: oracles.factorized_channel(f.blocks, f.weights, f.unitaries, x)
    assert oracles.max_map_gap(ch, target, 2) < 1e-12
    assert oracles.max_map_gap(lambda x: evaluate_factorization(f, x), target, 2) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_factorized_channels_are_ucpt(seed):
    f = random_factorization(np.random.default_rng(seed), 3)
    assert verify_channel(channel_of_factorization(f)).ucpt


@pytest.mark.parametrize("seed", range(5))
def test_pairing_formula_recovery(seed):
    f = random_factorization(np.random.default_rng(100 + seed), 2)
    assert map_distance(recover_eq2(f), channel_of_factorization(f), 2) < 1e-10


def test_trivial_ancilla_gives_automorphism(rng):
    u = oracles.haar(3, rng)
    ch = channel_of_factorization(FiniteFactorization.single(u))
    assert map_distance(ch, lambda x: u @ x @ u.conj().T, 3) < 1e-13


def test_admissible_ks():
    assert admissible_ks(Fraction(1, 3), 6) == (3, 6)
    assert admissible_ks(Fraction(2, 5), 4) == ()
    assert admissible_ks(0.5, 4) == (2, 4)


def test_noisy_witness_relations():
    p, q = noisy_witness(Fraction(1, 3), 3)
    assert np.trace(p).real / 3 == pytest.approx(1 / 3)
    assert np.abs(q.conj().T @ p).max() == 0
    assert np.abs(p.conj().T @ p + q.conj().T @ q - np.eye(3)).max() == 0


def test_two_unitary_constructed():
    u1, u2 = np.eye(3), np.diag([1, OMEGA, OMEGA.conjugate()])
    rep, f = two_unitary_factorization(u1, u2, Fraction(1, 3), 6)
    assert rep.verdict is Verdict.CONSTRUCTED and rep.k == 3 and rep.independent
    target = lambda x: x / 3 + 2 / 3 * (u2 @ x @ u2.conj().T)
    assert map_distance(channel_of_factorization(f), target, 3) < 1e-10


def test_two_unitary_obstructed():
    u1, u2 = np.eye(3), np.diag([1, OMEGA, OMEGA.conjugate()])
    rep, f = two_unitary_factorization(u1, u2, Fraction(2, 5), 4)
    assert rep.verdict is Verdict.OBSTRUCTED and rep.independent and f is None


def test_two_unitary_dependent():
    rep, f = two_unitary_factorization(np.eye(3), OMEGA * np.eye(3), Fraction(2, 5), 4)
    assert rep.verdict is Verdict.CRITERION_INAPPLICABLE and not rep.independent
    assert map_distance(channel_of_factorization(f), lambda x: x, 3) < 1e-12


def test_two_unitary_rejects_bad_t():
    with pytest.raises(WeightError):
        two_unitary_factorization(np.eye(2), np.eye(2), 1, 4)


@pytest.mark.parametrize("seed", range(4))
def test_composition(seed):
    rng = np.random.default_rng(200 + seed)
    f, g = random_factorization(rng, 2), random_factorization(rng, 2)
    h = compose_factorizations(f, g)
    cf, cg = channel_of_factorization(f), channel_of_factorization(g)
    assert map_distance(channel_of_factorization(h), lambda x: cg(cf(x)), 2) < 1e-10
    assert h.blocks == tuple(k * l for k in f.blocks for l in g.blocks)


def test_convex_combination_and_split(rng):
    f, g = random_factorization(rng, 2), random_factorization(rng, 2)
    h = convex_combine([f, g], [Fraction(1, 4), Fraction(3, 4)])
    cf, cg = channel_of_factorization(f), channel_of_factorization(g)
    assert map_distance(channel_of_factorization(h), lambda x: cf(x) / 4 + 3 * cg(x) / 4, 2) < 1e-12
    parts = split_factorization(h)
    assert sum(w for w, _ in parts) == 1
    back = convex_combine([p for _, p in parts], [w for w, _ in parts])
    assert map_distance(channel_of_factorization(back), channel_of_factorization(h), 2) < 1e-12


@pytest.mark.parametrize("mode", ["cptp", "ucp"])
@pytest.mark.parametrize("n", [2, 3])
def test_stinespring_depolarizing(mode, n):
    ch = depolarizing(n)[0]
    d = stinespring(ch, mode)
    assert d.r == n * n
    assert np.abs(d.unitary.conj().T @ d.unitary - np.eye(n * d.r)).max() < 1e-12
    assert map_distance(d, ch, n) < 1e-12


def test_stinespring_cptp_dilation_by_hand():
    ch = holevo_werner(3)
    d = stinespring(ch, "cptp")
    n, r = 3, d.r
    x = np.arange(9).reshape(3, 3) + 1j
    e0 = np.zeros((r, r))
    e0[0, 0] = 1
    z = d.unitary @ np.kron(x, e0) @ d.unitary.conj().T
    assert np.abs(oracles.partial_trace_second(z, n, r) - ch(x)).max() < 1e-12


def test_stinespring_mode_requirements():
    damp = QuantumChannel(2, [np.diag([1, np.sqrt(0.5)]), np.array([[0, np.sqrt(0.5)], [0, 0]])])
    stinespring(damp, "cptp")
    with pytest.raises(NotUnital):
        stinespring(damp, "ucp")
    scaled = QuantumChannel(2, [np.eye(2) * 0.5])
    with pytest.raises(NotTracePreserving):
        stinespring(scaled, "cptp")
    with pytest.raises(ValueError):
        stinespring(damp, "other")
