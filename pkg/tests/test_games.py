import itertools

import numpy as np
import pytest

import oracles
from factorizable import (
    PVM,
    BellFunctional,
    CommutingStrategy,
    CorrelationTable,
    TensorStrategy,
    bell_value,
    chsh_functional,
    classical_table,
    commuting_table,
    is_synchronous,
    membership_Cc,
    tensor_table,
)
from factorizable.errors import DimensionMismatch, InvalidPVM, InvalidTable, NonCommutingPVMs, SizeOverflow
from factorizable.games import (
    deterministic_table,
    lift_tensor_strategy,
    maximize_chsh,
    reference_chsh_strategy,
    strategy_index,
    vertex_tables,
)


def test_vertex_set_matches_oracle():
    n, k = 2, 3
    ours = {tuple(v) for v in vertex_tables(n, k)}
    theirs = {tuple(p.ravel()) for p in oracles.deterministic_tables(n, k)}
    assert ours == theirs and len(ours) == k ** (2 * n)


def test_strategy_index_roundtrip():
    for alice in itertools.product(range(2), repeat=2):
        for bob in itertools.product(range(2), repeat=2):
            t = deterministic_table(alice, bob, 2)
            for x, y in itertools.product(range(2), repeat=2):
                assert t.p[x, y, alice[x], bob[y]] == 1.0


def test_vertex_guard():
    with pytest.raises(SizeOverflow):
        vertex_tables(10, 4)


def test_chsh_functional_matches_oracle(rng):
    w = rng.dirichlet(np.ones(16))
    t = classical_table(w, 2, 2)
    assert bell_value(t, chsh_functional()) == pytest.approx(oracles.chsh(t.p), abs=1e-14)


def test_classical_chsh_bruteforce():
    best = max(oracles.chsh(p) for p in oracles.deterministic_tables(2, 2))
    res = maximize_chsh("classical")
    assert res.value == best == 2.0


def test_reference_strategy_hits_tsirelson():
    t = tensor_table(reference_chsh_strategy())
    assert bell_value(t, chsh_functional()) == pytest.approx(2 * np.sqrt(2), abs=1e-12)
    res = membership_Cc(t)
    assert not res.member and res.residual > 1e-3


def test_classical_tables_are_members(rng):
    for _ in range(5):
        res = membership_Cc(classical_table(rng.dirichlet(np.ones(16) * 0.3), 2, 2))
        assert res.member and res.residual <= 1e-9


def test_membership_weights_reconstruct(rng):
    t = classical_table(rng.dirichlet(np.ones(81)), 2, 3)
    res = membership_Cc(t)
    assert res.member
    assert np.abs(res.weights @ vertex_tables(2, 3) - t.p.ravel()).max() <= 1e-9


def test_commuting_lift_equals_tensor(rng):
    s = reference_chsh_strategy()
    a = tensor_table(s)
    b = commuting_table(lift_tensor_strategy(s))
    assert np.abs(a.p - b.p).max() <= 1e-12


def test_noncommuting_rejected():
    z = PVM(2, (np.diag([1.0, 0]), np.diag([0, 1.0])))
    xb = PVM.from_basis(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    with pytest.raises(NonCommutingPVMs) as info:
        CommutingStrategy(2, (z,), (xb,), np.array([1.0, 0]))
    assert info.value.index[:2] == (0, 0)


def test_pvm_validation():
    with pytest.raises(InvalidPVM):
        PVM(2, (np.diag([1.0, 0]),))
    with pytest.raises(InvalidPVM):
        PVM(2, (np.array([[0.5, 0.5], [0.5, 0.5]]) * 1.1, np.eye(2) - np.array([[0.5, 0.5], [0.5, 0.5]]) * 1.1))


def test_table_validation():
    with pytest.raises(InvalidTable):
        CorrelationTable(2, 2, np.full((2, 2, 2, 2), 0.3))
    with pytest.raises(InvalidTable):
        CorrelationTable(2, 2, np.zeros((2, 2, 2, 3)))


def test_synchronous_tables():
    # perfect correlation on the maximally entangled state with equal measurements
    z = PVM(2, (np.diag([1.0, 0]), np.diag([0, 1.0])))
    xb = PVM.from_basis(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    t = tensor_table(TensorStrategy(2, 2, (z, xb), (z, xb), phi))
    assert is_synchronous(t)
    assert not is_synchronous(deterministic_table((0, 1), (1, 1), 2))


def test_bell_functional_shape_check():
    f = BellFunctional(3, 2, np.zeros((3, 3, 2, 2)))
    with pytest.raises(DimensionMismatch):
        bell_value(deterministic_table((0, 0), (0, 0), 2), f)


def test_product_state_search_stays_local():
    res = maximize_chsh("quantum", seed=3, product=True, starts=8)
    assert res.value <= 2 + 1e-6
