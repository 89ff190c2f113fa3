import numpy as np
import pytest

from shadow_orbits.lattices import bracket, lattice, span_commutator_matrix
from shadow_orbits.matrices import rank_mod_p
from shadow_orbits.rings import LocalRing

from conftest import e


def test_bracket_examples():
    h = e(2, 0, 0) - e(2, 1, 1)
    assert (bracket(e(2, 0, 1), e(2, 1, 0)) == h).all()
    x = np.array([[1, 2], [3, -1]])
    assert not bracket(x, x).any()
    with pytest.raises(ValueError):
        bracket(np.eye(2), np.eye(3))


def test_structure_constants_expand_brackets():
    sl3 = lattice(3, "sl")
    rng = np.random.default_rng(2)
    for _ in range(40):
        cx, cy = rng.integers(-4, 5, size=(2, 8))
        x = sl3.from_coords(cx)
        y = sl3.from_coords(cy)
        via_matrices = sl3.coords(bracket(x, y))
        via_constants = np.einsum("i,j,ijk->k", cx, cy, sl3.structure)
        assert (via_matrices == via_constants).all()


def test_ad_matrix_examples():
    sl2 = lattice(2, "sl")
    ring = LocalRing(5, 1)
    assert not sl2.ad_matrix(np.zeros((2, 2)), ring).any()
    ad_e = sl2.ad_matrix(e(2, 0, 1), ring)
    assert rank_mod_p(ad_e, 5) == 2
    # ad of a bracket is the commutator of the ads
    rng = np.random.default_rng(4)
    ring25 = LocalRing(5, 2)
    for _ in range(20):
        x = sl2.from_coords(rng.integers(0, 25, size=3), 25)
        y = sl2.from_coords(rng.integers(0, 25, size=3), 25)
        lhs = sl2.ad_matrix(bracket(x, y, 25), ring25)
        ax, ay = sl2.ad_matrix(x, ring25), sl2.ad_matrix(y, ring25)
        assert (lhs == (ax @ ay - ay @ ax) % 25).all()


def test_dual_coordinates_sl2():
    sl2 = lattice(2, "sl")
    assert sl2.gram.tolist() == [[0, 0, 1], [0, 2, 0], [1, 0, 0]]
    ring = LocalRing(5, 1)
    assert sl2.dual_coordinates(np.zeros((2, 2)), ring).tolist() == [0, 0, 0]
    assert sl2.dual_coordinates(e(2, 0, 1), ring).tolist() == [0, 0, 1]
    h = e(2, 0, 0) - e(2, 1, 1)
    assert sl2.dual_coordinates(h, ring).tolist() == [0, 2, 0]


def test_dual_coordinates_bijective_and_primitive():
    sl2 = lattice(2, "sl")
    ring = LocalRing(5, 2)
    seen = set()
    for idx in range(25**3):
        c = np.array([idx % 25, (idx // 25) % 25, idx // 625])
        w = sl2.gram @ c % 25
        seen.add(tuple(int(v) for v in w))
        assert ((c % 5).any()) == ((w % 5).any())
    assert len(seen) == 25**3


def test_commutator_matrix_sl2_form():
    sl2 = lattice(2, "sl")
    cm = sl2.commutator_matrix()
    assert cm.coeffs[0, 1].tolist() == [-2, 0, 0]
    assert cm.coeffs[0, 2].tolist() == [0, 1, 0]
    assert cm.coeffs[1, 2].tolist() == [0, 0, -2]


def test_nilpotent_span_commutator_matrix():
    # the 4-dim span of the subregular nilpotent shadow in sl3
    span = [e(3, 0, 1), np.diag([1, 1, -2]).astype(np.int64), e(3, 0, 2), e(3, 2, 1)]
    cm = span_commutator_matrix(span, 5)
    assert cm.coeffs[0].tolist() == [[0] * 4] * 4  # X-row of the top generator vanishes
    assert cm.coeffs[1, 2].tolist() == [0, 0, 3, 0]
    assert cm.coeffs[1, 3].tolist() == [0, 0, 0, -3 % 5]
    assert cm.coeffs[2, 3].tolist() == [1, 0, 0, 0]
    assert cm.unused_variables() == [1]
    evaluated = cm.evaluate(np.array([1, 0, 0, 0]), LocalRing(5, 1))
    assert rank_mod_p(evaluated, 5) == 2


def test_span_closure_rejected_with_pair():
    # e12, e21 bracket to the diagonal, which the span misses
    with pytest.raises(ValueError, match=r"\(0, 1\)"):
        span_commutator_matrix([e(2, 0, 1), e(2, 1, 0)], 5)


def test_trace_form_ad_invariance_exhaustive_sl2_f5():
    sl2 = lattice(2, "sl")
    p = 5
    lam = sl2.structure % p
    G = sl2.gram % p
    coords = np.array([[a, b, c] for a in range(p) for b in range(p) for c in range(p)])
    brackets = np.einsum("xi,yj,ijk->xyk", coords, coords, lam) % p  # [x, y]
    lhs = np.einsum("xyk,kl,zl->xyz", brackets, G, coords) % p  # tr([x,y] z)
    rhs = np.einsum("xk,kl,yzl->xyz", coords @ G % p, np.eye(3, dtype=np.int64), np.einsum("yi,zj,ijk->yzk", coords, coords, lam)) % p
    assert (lhs == rhs).all()


def test_jacobi_and_invariance_sampled_sl3_mod25():
    sl3 = lattice(3, "sl")
    rng = np.random.default_rng(9)
    m = 25
    for _ in range(300):
        x, y, z = (sl3.from_coords(rng.integers(0, m, size=8), m) for _ in range(3))
        jac = bracket(x, bracket(y, z, m), m) + bracket(y, bracket(z, x, m), m) + bracket(z, bracket(x, y, m), m)
        assert not (jac % m).any()
        lhs = int(np.trace(bracket(x, y, m) @ z)) % m
        rhs = int(np.trace(x @ bracket(y, z, m))) % m
        assert lhs == rhs


def test_commutator_matrix_rank_matches_ad_rank():
    # exhaustively on sl2(F_5), sampled on sl3(F_5)
    sl2 = lattice(2, "sl")
    ring = LocalRing(5, 1)
    cm2 = sl2.commutator_matrix()
    for idx in range(125):
        c = np.array([idx % 5, (idx // 5) % 5, idx // 25])
        x = sl2.from_coords(c, 5)
        w = sl2.dual_coordinates(x, ring)
        assert rank_mod_p(cm2.evaluate(w, ring), 5) == rank_mod_p(sl2.ad_matrix(x, ring), 5)
    sl3 = lattice(3, "sl")
    cm3 = sl3.commutator_matrix()
    rng = np.random.default_rng(12)
    for _ in range(120):
        c = rng.integers(0, 5, size=8)
        x = sl3.from_coords(c, 5)
        w = sl3.dual_coordinates(x, ring)
        assert rank_mod_p(cm3.evaluate(w, ring), 5) == rank_mod_p(sl3.ad_matrix(x, ring), 5)


def test_gram_determinant_units():
    sl3 = lattice(3, "sl")
    ring7 = LocalRing(7, 1)
    w = sl3.dual_coordinates(e(3, 0, 1), ring7)  # works when 3 is a unit
    assert w.any()
    with pytest.raises(ValueError):
        sl3.dual_coordinates(e(3, 0, 1), LocalRing(3, 1))


def test_descriptor_serializes():
    sl2 = lattice(2, "sl")
    payload = sl2.to_json()
    assert payload["n"] == 2 and payload["kind"] == "sl"
    assert payload["gram"] == [[0, 0, 1], [0, 2, 0], [1, 0, 0]]
    assert payload["basis"][0] == [[0, 1], [0, 0]]
    assert payload["structure"][0][1] == [-2, 0, 0]


def test_rescaled_form_gives_same_profiles():
    from shadow_orbits.matrices import antisymmetric_profile

    sl2 = lattice(2, "sl")
    scaled = sl2.with_gram_scaled(3)
    ring = LocalRing(5, 2)
    cm = sl2.commutator_matrix()
    rng = np.random.default_rng(21)
    for _ in range(40):
        x = sl2.from_coords(rng.integers(0, 25, size=3), 25)
        p1 = antisymmetric_profile(cm.evaluate(sl2.dual_coordinates(x, ring), ring), ring)
        p2 = antisymmetric_profile(cm.evaluate(scaled.dual_coordinates(x, ring), ring), ring)
        assert p1.pairs == p2.pairs


def test_rescaled_form_gives_same_shadow_dimensions():
    # downstream outputs only see the form through ranks of evaluated
    # commutator matrices, so any unit rescaling leaves them untouched
    from shadow_orbits.orbits import lie_shadow

    sl2 = lattice(2, "sl")
    scaled = sl2.with_gram_scaled(4)
    ring = LocalRing(5, 2)
    rng = np.random.default_rng(17)
    for _ in range(30):
        a = sl2.from_coords(rng.integers(0, 25, size=3), 25)
        _, dim1 = lie_shadow(a, sl2, ring, check_profile=True)
        _, dim2 = lie_shadow(a, scaled, ring, check_profile=True)
        assert dim1 == dim2


def test_rescaled_form_gives_same_ranks():
    # any unit rescaling of the bilinear form leaves every rank/profile alike
    sl2 = lattice(2, "sl")
    scaled = sl2.with_gram_scaled(2)
    ring = LocalRing(5, 1)
    cm = sl2.commutator_matrix()
    for idx in range(1, 125):
        c = np.array([idx % 5, (idx // 5) % 5, idx // 25])
        x = sl2.from_coords(c, 5)
        r1 = rank_mod_p(cm.evaluate(sl2.dual_coordinates(x, ring), ring), 5)
        r2 = rank_mod_p(cm.evaluate(scaled.dual_coordinates(x, ring), ring), 5)
        assert r1 == r2
