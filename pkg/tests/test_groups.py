import numpy as np
import pytest

from shadow_orbits.groups import (
    InfeasibleError,
    adjoint_action,
    centralizer_subgroup_level1,
    elementary_generators,
    enumerate_special_linear,
    exp_lie_criterion,
    exponential,
    matrix_exp_series,
    sl_membership,
    special_linear_order,
)
from shadow_orbits.lattices import lattice
from shadow_orbits.rings import LocalRing

from conftest import e


def test_membership_examples():
    ring25 = LocalRing(5, 2)
    ring5 = LocalRing(5, 1)
    assert sl_membership(np.eye(2, dtype=np.int64) + 2 * e(2, 0, 1), ring25)
    assert not sl_membership(np.diag([2, 2]), ring5)
    assert sl_membership(np.diag([2, 3, 1]), ring5)  # det 6 = 1 mod 5


def test_group_orders():
    assert special_linear_order(2, LocalRing(5, 1)) == 120
    assert special_linear_order(2, LocalRing(5, 2)) == 15000
    assert special_linear_order(3, LocalRing(5, 1)) == 372000
    assert len(enumerate_special_linear(2, LocalRing(3, 1))) == 24
    assert len(enumerate_special_linear(2, LocalRing(3, 2))) == 648
    with pytest.raises(InfeasibleError):
        enumerate_special_linear(3, LocalRing(5, 2), bound=10**6)


def test_generators_are_unimodular():
    ring = LocalRing(5, 2)
    for g, ginv in elementary_generators(2, ring):
        assert sl_membership(g, ring)
        assert (g @ ginv % 25 == np.eye(2)).all()


def test_adjoint_examples():
    ring = LocalRing(5, 2)
    h = (e(2, 0, 0) - e(2, 1, 1)) % 25
    assert (adjoint_action(np.eye(2, dtype=np.int64), h, ring) == h).all()
    g = np.eye(2, dtype=np.int64) + e(2, 0, 1)
    moved = adjoint_action(g, h, ring)
    assert (moved == (h - 2 * e(2, 0, 1)) % 25).all()
    # Ad is a homomorphism
    rng = np.random.default_rng(0)
    group = enumerate_special_linear(2, LocalRing(5, 1))
    for _ in range(25):
        a, b = group[rng.integers(0, len(group), size=2)]
        x = lattice(2, "sl").from_coords(rng.integers(0, 5, size=3), 5)
        ring5 = LocalRing(5, 1)
        lhs = adjoint_action(a @ b % 5, x, ring5)
        rhs = adjoint_action(a, adjoint_action(b, x, ring5), ring5)
        assert (lhs == rhs).all()


def test_exponential_examples():
    ring = LocalRing(5, 2)
    assert (exponential(np.zeros((2, 2), dtype=np.int64), ring) == np.eye(2)).all()
    assert (exponential(5 * e(2, 0, 1), ring) == np.eye(2, dtype=np.int64) + 5 * e(2, 0, 1)).all()
    h = (e(2, 0, 0) - e(2, 1, 1)) % 25
    assert exponential(5 * h % 25, ring).tolist() == [[6, 0], [0, 21]]
    out = exponential(5 * h % 25, ring) @ exponential(-5 * h % 25, ring) % 25
    assert (out == np.eye(2)).all()


def test_exponential_rejects_units():
    with pytest.raises(ValueError):
        exponential(e(2, 0, 1), LocalRing(5, 2))
    with pytest.raises(ValueError):
        matrix_exp_series(np.eye(2, dtype=np.int64), LocalRing(5, 2))


def test_exp_lie_criterion_examples():
    ring = LocalRing(5, 2)
    assert exp_lie_criterion(5 * e(2, 0, 1), ring)
    assert exponential(5 * e(2, 0, 0), ring).tolist() == [[6, 0], [0, 1]]
    assert not exp_lie_criterion(5 * e(2, 0, 0), ring)
    assert exp_lie_criterion(np.zeros((2, 2), dtype=np.int64), ring)


def test_exp_additivity_spot():
    ring = LocalRing(5, 3)
    x = (5 * (e(2, 0, 1) + 2 * e(2, 1, 0))) % 125
    for a in (0, 1, 7, 24, 124):
        for b in (0, 3, 11, 99):
            lhs = exponential((a + b) * x % 125, ring)
            rhs = exponential(a * x % 125, ring) @ exponential(b * x % 125, ring) % 125
            assert (lhs == rhs).all()


def test_centralizer_level1():
    assert len(centralizer_subgroup_level1(e(2, 0, 1), 5)) == 10
    assert len(centralizer_subgroup_level1(np.diag([1, 1, -2]), 5)) == 480
    e12_3 = e(3, 0, 1)
    assert len(centralizer_subgroup_level1(e12_3, 5)) == 500
    assert len(centralizer_subgroup_level1(e12_3, 7)) == (7 - 1) * 7**3
    with pytest.raises(InfeasibleError):
        centralizer_subgroup_level1(np.zeros((3, 3), dtype=np.int64), 5)
