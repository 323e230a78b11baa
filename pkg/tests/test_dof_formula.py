import pytest
from hypothesis import given, settings, strategies as st

from doflab import (CaseLabel, CsitProfile, RelabelRequired, ValidationError, classify_case,
                    closed_form_d2, dof_user1_given_user2_max, dof_user2_given_user1_max, minplus,
                    sweep_beta, term_a, term_b, term_c)
from doflab.dof_formula import default_beta_grid

TOL = 1e-12

configs = st.tuples(*[st.integers(1, 6)] * 4)
betas = st.floats(0, 1)


def d2(cfg, b12=0.0, b21=0.0, b11=0.0, b22=0.0):
    return dof_user2_given_user1_max(cfg, CsitProfile(b12, b21, b11, b22)).d2


def test_minplus():
    assert minplus(2, 1.0, 1.5) == 1.0
    assert minplus(-1, 2) == 0
    assert minplus(0, 5) == 0
    with pytest.raises(ValueError):
        minplus()


@pytest.mark.parametrize("cfg,expected", [((1, 4, 1, 3), 2), ((3, 4, 1, 3), 2), ((4, 4, 1, 3), 3)])
def test_term_a(cfg, expected):
    assert term_a(cfg) == expected


def test_term_b():
    assert term_b((1, 4, 1, 3), 0.5, 0) == pytest.approx(1.0, abs=TOL)
    assert term_b((4, 4, 1, 3), 5 / 6, 0.5) == pytest.approx(2.5, abs=TOL)
    for b in (0, 0.3, 1):
        assert term_b((3, 4, 1, 3), b, b) == pytest.approx(2.0, abs=TOL)


def test_term_c():
    assert term_c((3, 4, 1, 3), 2 / 3) == pytest.approx(2.0, abs=TOL)
    assert term_c((1, 4, 2, 3), 0.5) == pytest.approx(2.0, abs=TOL)
    # no null space at receiver 1: only the first term survives
    assert term_c((1, 2, 3, 3), 1.0) == 2
    assert term_c((2, 3, 3, 3), 1.0) == 1


def test_user2_corner_examples():
    assert d2((1, 4, 1, 3), 0.5) == pytest.approx(1.0, abs=TOL)
    assert d2((2, 4, 1, 3), 0.75) == pytest.approx(1.75, abs=TOL)
    assert d2((4, 4, 1, 3), 5 / 6, 0.5) == pytest.approx(2.5, abs=TOL)


def test_user1_corner_examples():
    assert dof_user1_given_user2_max((4, 4, 3, 1), CsitProfile(beta12=0.5, beta21=5 / 6)).d2 == \
        pytest.approx(2.5, abs=TOL)
    assert dof_user1_given_user2_max((4, 1, 3, 1), CsitProfile(beta21=0.5)).d2 == pytest.approx(1.0)
    assert dof_user1_given_user2_max((2, 2, 2, 2), CsitProfile(0.4, 0.9)).d2 == 0


def test_breakdown_reports_all_terms():
    tb = dof_user2_given_user1_max((1, 4, 1, 3), CsitProfile(0.5))
    assert (tb.a, tb.b, tb.d2) == (2, 1.0, 1.0)
    assert "b" in tb.binding
    assert not tb.formula_as_stated
    assert dof_user2_given_user1_max((1, 4, 3, 1)).formula_as_stated


@pytest.mark.parametrize("cfg,case", [
    ((1, 4, 2, 3), CaseLabel.CASE2),
    ((3, 4, 1, 3), CaseLabel.CASE3),
    ((4, 4, 1, 3), CaseLabel.CASE4),
    ((1, 3, 2, 3), CaseLabel.CASE1),
    ((2, 2, 2, 3), CaseLabel.CASE1_TRIVIAL),
    ((1, 4, 1, 3), CaseLabel.CASE3),
])
def test_classify(cfg, case):
    assert classify_case(cfg) == case


def test_classify_needs_ordered_receivers():
    with pytest.raises(RelabelRequired):
        classify_case((1, 4, 3, 1))


def test_closed_form_examples():
    assert closed_form_d2(CaseLabel.CASE2, (1, 4, 2, 3), CsitProfile(0.5)) == pytest.approx(2.0)
    assert closed_form_d2(CaseLabel.CASE3, (2, 4, 1, 3), CsitProfile(0.25)) == pytest.approx(0.75)
    assert closed_form_d2(CaseLabel.CASE4, (4, 4, 1, 3), CsitProfile(1, 1)) == pytest.approx(3.0)
    with pytest.raises(ValidationError):
        closed_form_d2(CaseLabel.CASE1, (4, 4, 1, 3), CsitProfile(1, 1))


def test_sweeps():
    got = [v for _, v in sweep_beta((3, 4, 1, 3), 12, [0, 1 / 3, 2 / 3, 1])]
    assert got == pytest.approx([0, 1, 2, 2], abs=TOL)
    got = [v for _, v in sweep_beta((1, 3, 2, 3), 12, [0, 0.5, 1])]
    assert got == pytest.approx([1, 1.5, 2], abs=TOL)
    a, b = sweep_beta((2, 4, 1, 3), 12, [0.4, 0.4])
    assert a == b
    with pytest.raises(ValidationError):
        sweep_beta((2, 4, 1, 3), 12, [1.2])


def test_default_grid():
    g = default_beta_grid()
    assert len(g) == 101 and g[0] == 0 and g[-1] == 1 and g[50] == 0.5


@given(configs, betas, betas, betas, betas)
def test_independent_of_direct_link_csit(cfg, b12, b21, b11, b22):
    assert d2(cfg, b12, b21, b11, b22) == d2(cfg, b12, b21)


@given(configs, betas, betas, betas)
def test_no_cross_null_space_means_no_csit_dependence(cfg, b, x, y):
    m1, m2, n1, n2 = cfg
    if m2 <= n1:
        assert d2(cfg, x, b) == pytest.approx(d2(cfg, y, b), abs=TOL)
    if m1 <= n2:
        assert d2(cfg, b, x) == pytest.approx(d2(cfg, b, y), abs=TOL)


@given(configs, betas, betas, betas)
def test_monotone_in_each_beta(cfg, b, lo, hi):
    lo, hi = sorted((lo, hi))
    assert d2(cfg, lo, b) <= d2(cfg, hi, b) + TOL
    assert d2(cfg, b, lo) <= d2(cfg, b, hi) + TOL


@given(configs)
def test_extremes(cfg):
    assert d2(cfg, 1, 1) == pytest.approx(term_a(cfg), abs=TOL)
    tb = dof_user2_given_user1_max(cfg, CsitProfile())
    assert tb.d2 == minplus(term_a(cfg), term_b(cfg, 0, 0), term_c(cfg, 0))


@given(configs, betas, betas)
def test_minplus_clause(cfg, b12, b21):
    tb = dof_user2_given_user1_max(cfg, CsitProfile(b12, b21))
    if min(tb.a, tb.b, tb.c) < 0:
        assert tb.d2 == 0
    else:
        assert tb.d2 == min(tb.a, tb.b, tb.c)
    assert tb.d2 <= min(cfg[1], cfg[3]) + TOL


@settings(max_examples=300)
@given(configs.filter(lambda c: c[2] <= c[3]), betas, betas)
def test_closed_form_matches_theorem(cfg, b12, b21):
    csit = CsitProfile(b12, b21)
    assert closed_form_d2(classify_case(cfg), cfg, csit) == pytest.approx(d2(cfg, b12, b21), abs=TOL)
