import numpy as np
import pytest

from shadow_orbits.groups import InfeasibleError, centralizer_subgroup_level1, special_linear_order
from shadow_orbits.lattices import lattice
from shadow_orbits.orbits import (
    Subgroup,
    adjoint_partition,
    classify_shadow_sl3,
    coadjoint_census,
    count_lifts_by_shadow,
    group_shadow,
    group_shadow_recursive,
    group_shadow_solve_level2,
    lambda_and_z,
    lie_shadow,
    lie_shadow_matrices,
    orbits_above,
    shadow_preserving_lift,
    shadow_report,
    subgroup_signature,
    subgroup_span_sl_basis,
)
from shadow_orbits.rings import LocalRing

from conftest import e

sl2 = lattice(2, "sl")
sl3 = lattice(3, "sl")


def test_lie_shadow_examples():
    ring = LocalRing(5, 1)
    _, dim0 = lie_shadow(np.zeros((3, 3), dtype=np.int64), sl3, ring)
    assert dim0 == 8
    basis, dim = lie_shadow(e(3, 0, 1), sl3, ring, check_profile=True)
    assert dim == 4
    expected_span = [e(3, 0, 1), np.diag([1, 1, -2]) % 5, e(3, 0, 2), e(3, 2, 1)]
    mats = lie_shadow_matrices(e(3, 0, 1), sl3, ring)
    from shadow_orbits.matrices import echelon_basis_mod_p

    want = {tuple(int(x) for x in b) for b in echelon_basis_mod_p([m.reshape(-1) for m in expected_span], 5)}
    got = {tuple(int(x) for x in m.reshape(-1)) for m in mats}
    assert want == got
    _, dim_l = lie_shadow(np.diag([1, 1, -2]), sl3, ring, check_profile=True)
    assert dim_l == 4


def test_group_shadow_examples():
    ring = LocalRing(5, 1)
    sub, prov = group_shadow(np.zeros((2, 2), dtype=np.int64), sl2, ring)
    assert prov == "oracle" and sub.order == special_linear_order(2, ring) == 120
    sub_l, _ = group_shadow(np.diag([1, 1, -2]), sl3, ring)
    assert sub_l.order == 480
    sub_e, _ = group_shadow(e(2, 0, 1), sl2, ring)
    assert sub_e.order == 10
    # full sl3 shadow of zero is everything; its order comes from the formula
    assert special_linear_order(3, ring) == 372000


def test_classification_examples():
    assert classify_shadow_sl3(np.diag([1, 1, -2]), 5) == "L"
    assert classify_shadow_sl3(e(3, 0, 1), 5) == "J"
    assert classify_shadow_sl3(np.diag([1, 2, -3]), 7) == "R"
    assert classify_shadow_sl3(np.zeros((3, 3), dtype=np.int64), 5) == "SL"
    with pytest.raises(ValueError):
        classify_shadow_sl3(np.zeros((3, 3), dtype=np.int64), 3)


def test_shadow_preserving_lift_examples():
    ring = LocalRing(5, 1)
    z = shadow_preserving_lift(np.zeros((2, 2), dtype=np.int64), sl2, ring)
    assert not z.any()
    lift = shadow_preserving_lift(e(2, 0, 1), sl2, ring)
    assert (lift == e(2, 0, 1)).all()


def test_coadjoint_census_examples():
    ring = LocalRing(5, 1)
    # trivial group acting on a 2-dim span: q^2 singleton orbits
    trivial = Subgroup(np.eye(2, dtype=np.int64)[None], 5)
    span = lie_shadow_matrices((e(2, 0, 0) - e(2, 1, 1)) % 5, sl2, ring)
    census = coadjoint_census(trivial, span)
    assert census.orbit_count == 5 and all(size == 1 for _, size, _, _ in census.orbits)
    # a regular element's abelian shadow fixes every functional on its span
    sub, _ = group_shadow((e(2, 0, 0) - e(2, 1, 1)) % 5, sl2, ring)
    census = coadjoint_census(sub, span)
    assert census.orbit_count == 5
    assert census.fixed_dim == 1
    # subregular nilpotent shadow in sl3: q fixed functionals, q^4 - q moving
    J = Subgroup(centralizer_subgroup_level1(e(3, 0, 1), 5), 5)
    censusJ = coadjoint_census(J, lie_shadow_matrices(e(3, 0, 1), sl3, ring))
    fixed = sum(size for _, size, _, _ in censusJ.orbits if size == 1)
    assert fixed >= 5 and censusJ.fixed_dim == 1
    lam = censusJ.lambda_by_signature()
    assert sum(v for sig, v in lam.items() if sig[0] == J.order) == 5
    assert sum(v for sig, v in lam.items() if sig[0] != J.order) == 620


def test_lambda_tables_match_closed_forms():
    for q, expected in ((5, 620), (7, 7 * (7**3 - 1))):
        ring = LocalRing(q, 1)
        J = Subgroup(centralizer_subgroup_level1(e(3, 0, 1), q), q)
        table, z, hist = lambda_and_z(J, lie_shadow_matrices(e(3, 0, 1), sl3, ring))
        assert z == 1
        assert hist == {4: q, 2: q**4 - q}
        assert sum(v for sig, v in table.items() if sig[1] == 2) == expected
        L = Subgroup(centralizer_subgroup_level1(np.diag([1, 1, -2]) % q, q), q)
        tableL, zL, _ = lambda_and_z(L, lie_shadow_matrices(np.diag([1, 1, -2]) % q, sl3, ring))
        assert zL == 1
        assert sum(v for sig, v in tableL.items() if sig[1] == 2) == expected


def test_orbits_above_examples():
    ring = LocalRing(5, 1)
    part1 = adjoint_partition(2, ring)
    rows0 = orbits_above(np.zeros((2, 2), dtype=np.int64), sl2, ring)
    assert len(rows0) == len(part1.orbits)
    h = (e(2, 0, 0) - e(2, 1, 1)) % 5
    assert len(orbits_above(h, sl2, ring)) == 5
    rows = orbits_above(e(2, 0, 1), sl2, ring)
    sub, _ = group_shadow(e(2, 0, 1), sl2, ring)
    census = coadjoint_census(sub, lie_shadow_matrices(e(2, 0, 1), sl2, ring))
    assert len(rows) == census.orbit_count
    for row in rows:
        assert row["size"] * row["stabilizer_order"] == special_linear_order(2, LocalRing(5, 2))


def test_count_lifts_examples():
    ring = LocalRing(5, 1)
    res0 = count_lifts_by_shadow(np.zeros((2, 2), dtype=np.int64), sl2, ring)
    assert res0["applicable"] and res0["match"]
    full_sig = next(sig for sig in res0["formula"] if sig[0] == 120)
    assert res0["direct"][full_sig] == 1  # only the zero lift keeps the full shadow
    h = (e(2, 0, 0) - e(2, 1, 1)) % 5
    res = count_lifts_by_shadow(h, sl2, ring)
    assert res["match"] and sum(res["direct"].values()) == 125
    assert list(res["direct"].values()) == [125]  # every lift of a regular is regular
    res_e = count_lifts_by_shadow(e(2, 0, 1), sl2, ring)
    assert res_e["match"]


def test_count_lifts_sl3_sampled():
    ring = LocalRing(5, 1)
    res = count_lifts_by_shadow(e(3, 0, 1), sl3, ring, mode="sampled", sample=18, seed=1)
    assert res["applicable"]
    regular_total = sum(v for sig, v in res["formula"].items() if sig[1] == 2)
    assert regular_total == 5**4 * 620  # q^(d - d_S) * Lambda(J, R)
    self_total = sum(v for sig, v in res["formula"].items() if sig[0] == 500)
    assert self_total == 5**4 * 5
    assert sum(res["sampled"].values()) == 18


def test_strategies_agree():
    ring2 = LocalRing(5, 2)
    rng = np.random.default_rng(6)
    for _ in range(12):
        a = sl2.from_coords(rng.integers(0, 25, size=3), 25)
        oracle, _ = group_shadow(a, sl2, ring2)
        solved = group_shadow_solve_level2(a, sl2, ring2)
        assert solved == oracle
        recursive, ok = group_shadow_recursive(a, sl2, ring2)
        assert ok and recursive == oracle
    # sl3 level 2: the lift-solve strategy against the recursive walk
    ring3 = LocalRing(5, 2)
    for _ in range(3):
        a = sl3.from_coords(rng.integers(0, 25, size=8), 25)
        if not (a % 5).any():
            continue
        solved = group_shadow_solve_level2(a, sl3, ring3)
        rec, ok = group_shadow_recursive(a, sl3, ring3)
        assert ok and rec == solved


def test_group_shadow_of_zero_at_level2():
    ring2 = LocalRing(5, 2)
    sub, _ = group_shadow(np.zeros((2, 2), dtype=np.int64), sl2, ring2)
    assert sub.order == 120  # the full residue group, at every level


def test_signature_classes_are_conjugacy_classes():
    # stricter oracle behind the signature operationalization: shadows of the
    # level-2 orbits with equal signatures are actually GL_2(F_5)-conjugate
    from shadow_orbits.orbits import subgroups_conjugate_gl

    part = adjoint_partition(2, LocalRing(5, 2))
    by_sig = {}
    for oid in range(len(part.orbits)):
        by_sig.setdefault(part.orbit_signature(oid), []).append(part.orbit_shadow(oid))
    assert len(by_sig) >= 4
    for sig, subs in by_sig.items():
        first = subs[0]
        for other in subs[1:3]:
            assert subgroups_conjugate_gl(first, other)
    # different signatures never admit a conjugation
    sigs = sorted(by_sig)
    assert not subgroups_conjugate_gl(by_sig[sigs[0]][0], by_sig[sigs[-1]][0])


def test_signature_and_span():
    sub, _ = group_shadow(e(2, 0, 1), sl2, LocalRing(5, 1))
    order, d_span, z, orders = subgroup_signature(sub)
    assert order == 10 and d_span == 1 and z == 1
    assert dict(orders)[1] == 1  # exactly one identity
    span = subgroup_span_sl_basis(sub)
    assert len(span) == 1


def test_shadow_label_and_report():
    rep = shadow_report(np.asarray(e(3, 0, 1)), 3, 5, 1)
    assert rep["label"] == "J" and rep["shadowOrder"] == 500
    assert rep["d_S"] == 4 and rep["z_S"] == 1 and rep["level"] == 1
    rep_l = shadow_report(np.diag([1, 1, -2]), 3, 5, 1)
    assert rep_l["label"] == "L" and rep_l["shadowOrder"] == 480
    rep_r = shadow_report(np.diag([0, 1, 4]), 3, 5, 1)
    assert rep_r["label"] == "R"
    rep2 = shadow_report(np.asarray(e(2, 0, 1)), 2, 5, 2, strategy="recursive")
    assert rep2["provenance"] == "recursive"


def test_infeasible_paths():
    with pytest.raises(InfeasibleError):
        adjoint_partition(3, LocalRing(5, 2))
    with pytest.raises(InfeasibleError):
        group_shadow(5 * np.asarray(e(3, 0, 1)) % 125, sl3, LocalRing(5, 3))
