import pytest

from shadow_orbits.verifiers import (
    verify_exponential_suite,
    verify_lift_theorems,
    verify_shadow_lemmas,
)


def test_exp_suite_gl2():
    rep = verify_exponential_suite("gl2", 5, 2)
    assert rep["passed"] and rep["mode"] == "exhaustive"
    assert rep["instances"] == 5**4
    assert rep["checked"]["additivity_pairs_per_element"] == 25 * 25


def test_exp_suite_gl3_sampled():
    rep = verify_exponential_suite("gl3", 5, 2, samples=1000, seed=11)
    assert rep["passed"] and rep["mode"] == "sampled"
    assert rep["instances"] >= 1000


def test_exp_suite_sl2_small_with_kernel_check():
    rep = verify_exponential_suite("sl2", 3, 2)
    assert rep["passed"]
    assert rep["stabilizer_kernel"]["passed"]
    assert rep["stabilizer_kernel"]["instances"] > 0


def test_exp_suite_rejects():
    with pytest.raises(ValueError):
        verify_exponential_suite("so7", 5, 2)


def test_lift_theorems_small_grids():
    rep = verify_lift_theorems(3, 1)
    assert rep["passed"]
    assert rep["instances"] + rep["without_shadow_preserving_lift"] == 27
    rep = verify_lift_theorems(5, 1, targets=("thmA",))
    assert rep["passed"] and rep["targets"] == ["thmA"]


def test_lift_theorems_report_shape():
    rep = verify_lift_theorems(3, 2)
    assert rep["passed"]
    assert rep["elements"] == 729
    assert rep["distinct_shadow_subgroups"] >= 3


def test_shadow_lemmas_sl2():
    rep = verify_shadow_lemmas("sl2", 5, 1)
    assert rep["passed"] and rep["instances"] == 125


def test_shadow_lemmas_sl2_level2_exhaustive():
    rep = verify_shadow_lemmas("sl2", 5, 2)
    assert rep["passed"] and rep["instances"] == 15625


def test_shadow_lemmas_sl3_levels():
    rep = verify_shadow_lemmas("sl3", 5, 1, samples=20, seed=2)
    assert rep["passed"]
    rep2 = verify_shadow_lemmas("sl3", 5, 2, samples=4, seed=2)
    assert rep2["passed"]


def test_span_lemma_really_fails_at_p3():
    # at p = 3 the subgroup span can be strictly smaller than the Lie
    # shadow (the regular semisimple centralizer is just the center), so
    # the span identification is only claimed away from p = 3
    rep = verify_shadow_lemmas("sl2", 3, 1)
    assert not rep["passed"]
    assert any(f["check"] == "additive-span" for f in rep["failures"])
