import numpy as np
import pytest
from hypothesis import given, strategies as st

from twistorkit.bundles import EmbeddingError, LineBundleSection, random_real_section
from twistorkit.quotients import (
    QuotientError,
    QuotientScenario,
    admissibility_check,
    check_action_constraints,
    deformation_space_dim,
    quotient_dimension,
    splitting_admissibility,
)


def scenario(r, sections, **kw):
    return QuotientScenario(n=3, lie_g=(0, 0, 0), lie_h=(-r,), embedding=tuple(sections), **kw)


def generic(r, seed):
    rng = np.random.default_rng(seed)
    return [random_real_section(r, rng) for _ in range(3)]


# --- action constraints --------------------------------------------------------------


def test_o_minus_two_hamiltonian_feasible():
    assert check_action_constraints(QuotientScenario(1, (-2,))).feasible


def test_degree_one_not_hamiltonian():
    rep = check_action_constraints(QuotientScenario(1, (1, 0, -2)))
    assert rep.locally_free_feasible and not rep.feasible


def test_degree_two_not_locally_free():
    rep = check_action_constraints(QuotientScenario(1, (2,), hamiltonian=False))
    assert not rep.feasible


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5))
def test_hamiltonian_implies_locally_free(degrees):
    rep = check_action_constraints(QuotientScenario(2, tuple(degrees)))
    assert not rep.hamiltonian_feasible or rep.locally_free_feasible


# --- admissibility ------------------------------------------------------------------


def test_generic_o_minus_two_admissible():
    rep = admissibility_check(scenario(2, generic(2, 0)))
    assert rep.numeric_condition and rep.degree_sum == rep.codimension == 2
    assert rep.quotient_splitting == (1, 1)
    assert rep.verdict == "admissible"


def test_generic_o_minus_four_inadmissible():
    rep = admissibility_check(scenario(4, generic(4, 0)))
    assert rep.quotient_splitting == (2, 2)
    assert rep.necessary_failed
    assert rep.verdict == "inadmissible"


def test_common_zero_propagates():
    s = [LineBundleSection(2, c) for c in ((1, 0, 0), (0, 1, 0), (0, 1, 0))]
    with pytest.raises(EmbeddingError, match="embedding degenerates"):
        admissibility_check(scenario(2, s))


def test_invariant_moment_is_recorded_as_assumption():
    rep = admissibility_check(scenario(2, generic(2, 1)))
    assert any("asserted" in a for a in rep.assumptions)
    rep = admissibility_check(scenario(2, generic(2, 1), invariant_moment=False))
    assert rep.assumptions == []


@given(st.sampled_from([2, 4, 6]), st.integers(0, 2**32 - 1))
def test_admissibility_branches_consistent(r, seed):
    rep = admissibility_check(scenario(r, generic(r, seed)))
    if rep.sufficient:
        assert not rep.necessary_failed
    # degree additivity in 0 -> O(-r) -> O^3 -> Q -> 0
    assert sum(rep.quotient_splitting) == 0 - (-r)


def test_embedding_degree_must_match():
    with pytest.raises(ValueError):
        scenario(4, generic(2, 0))


def test_admissibility_needs_trivial_group():
    s = QuotientScenario(3, (0, 0, -1), (-2,), tuple(generic(2, 0)))
    with pytest.raises(ValueError, match="trivial"):
        admissibility_check(s)


def test_scenario_from_json():
    s = QuotientScenario.from_json({
        "n": 3, "lieG": [0, 0, 0], "lieH": [-2],
        "embedding": [sec.to_json() for sec in generic(2, 4)],
    })
    assert admissibility_check(s).verdict == "admissible"


def test_splitting_admissibility_bookkeeping():
    assert splitting_admissibility(2, [-2], [1, 1, 0])["consistent"] is False
    ok = splitting_admissibility(2, [-1], [1, 1, 0])
    assert ok["quotient_rank"] == 2 and ok["quotient_degree"] == 3
    good = splitting_admissibility(2, [-1], [1, 0, 0])
    assert good["consistent"]


# --- dimensions ---------------------------------------------------------------------


@pytest.mark.parametrize("n, m, expected", [(3, 1, 8), (5, 0, 20), (2, 2, 0)])
def test_quotient_dimension(n, m, expected):
    assert quotient_dimension(n, m) == expected


def test_quotient_dimension_negative_rejected():
    with pytest.raises(QuotientError, match="negative dimension"):
        quotient_dimension(1, 2)


@pytest.mark.parametrize("degrees, expected", [((-2,), 1), ((-2, -2), 2), ((-1,), 0)])
def test_deformation_space_dim(degrees, expected):
    assert deformation_space_dim(degrees).dim == expected


@pytest.mark.parametrize("k", range(2, 7))
def test_deformation_dim_counts_constraints(k):
    assert deformation_space_dim((-2 * k + 2,)).dim == 2 * k - 3


def test_odd_degree_flagged_and_nonnegative_rejected():
    assert deformation_space_dim((-3,)).parity_sensitive
    with pytest.raises(QuotientError):
        deformation_space_dim((0, -2))
