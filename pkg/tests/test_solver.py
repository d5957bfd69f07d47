import math
import random
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

from loggas import (
    ChargeVector,
    SolverOptions,
    SubsetMask,
    TwoComponentSpec,
    brute_force_oracle,
    critical_interval,
    from_charges,
    from_matrix,
    from_two_component,
    limit_support,
    max_nest,
    solve_both,
    solve_t_minus,
    solve_t_plus,
    subset_constraint,
    subset_sum,
)
from loggas.errors import FamilyTooLarge, InstanceTooLarge, NotCritical

from conftest import exact_coupling_matrices, random_exact_matrix, random_float_matrix


def masks(*index_sets):
    return {SubsetMask.from_indices(s).bits for s in index_sets}


def bits(family):
    return {s.bits for s in family}


# ---------------------------------------------------------------------------
# subset_sum / subset_constraint
# ---------------------------------------------------------------------------

def test_subset_sum_mixed_charges_full_set():
    c = from_charges(ChargeVector((1, 1, -1, -1)))
    assert subset_sum(c, SubsetMask.from_indices((0, 1, 2, 3))) == -2  # 1+1-4


def test_subset_sum_pair_is_single_entry():
    c = from_matrix([[0, 5, -3], [5, 0, 2], [-3, 2, 0]])
    assert subset_sum(c, SubsetMask.from_indices((0, 2))) == -3


def test_subset_sum_example_7_2_triple():
    c = from_charges(ChargeVector((10, 10, 1)))
    assert subset_sum(c, SubsetMask.from_indices((0, 1, 2))) == 120


def test_subset_constraint_n2():
    c = from_matrix([[0, 1], [1, 0]])
    con = subset_constraint(c, SubsetMask.from_indices((0, 1)))
    assert con.kind == "lower" and con.bound == -1 and con.b_s == 0


def test_subset_constraint_zero_sum_unconstrained():
    c = from_matrix([[0, 1, -1], [1, 0, 0], [-1, 0, 0]])
    con = subset_constraint(c, SubsetMask.from_indices((0, 1, 2)))
    assert con.kind == "none" and con.bound is None


def test_subset_constraint_triple_positive():
    c = from_matrix([[0, 2, 1], [2, 0, 3], [1, 3, 0]])
    con = subset_constraint(c, SubsetMask.from_indices((0, 1, 2)))
    assert con.kind == "lower"
    assert con.bound == Fraction(-2, 6)  # -2/(c12+c23+c13)


# ---------------------------------------------------------------------------
# solve_t_plus / solve_t_minus, paper examples
# ---------------------------------------------------------------------------

def test_t_plus_mixed_charges():
    c = from_charges(ChargeVector((1, 1, -1, -1)))
    result = solve_t_plus(c)
    assert result.t_value == 1
    assert result.attained
    assert bits(result.optimizers) == masks((0, 2), (0, 3), (1, 2), (1, 3))


def test_t_plus_n2_positive_coupling():
    result = solve_t_plus(from_matrix([[0, 1], [1, 0]]))
    assert result.t_value == -1
    assert not result.attained  # every subset sum positive: beta+ infinite


def test_t_plus_zero_matrix():
    c = from_matrix([[0, 0, 0], [0, 0, 0], [0, 0, 0]])
    result = solve_t_plus(c)
    assert result.t_value == 0
    assert not result.attained
    assert result.optimizers == ()  # zero-sum subsets never enter the family


def test_t_minus_example_7_2():
    result = solve_t_minus(from_charges(ChargeVector((10, 10, 1))))
    assert result.t_value == -100
    assert bits(result.optimizers) == masks((0, 1))


def test_t_minus_equal_charges_full_collapse():
    n = 4
    k = ChargeVector((math.sqrt(2.0 / (n - 1)),) * n)
    result = solve_t_minus(from_charges(k))
    assert abs(result.t_value - (-n / (n - 1))) < 1e-12
    assert bits(result.optimizers) == masks(tuple(range(n)))


def test_negation_swaps_roles():
    rng = random.Random(7)
    for _ in range(10):
        c = random_exact_matrix(rng, 5)
        neg = c.negated()
        assert solve_t_minus(neg).t_value == -solve_t_plus(c).t_value
        assert bits(solve_t_minus(neg).optimizers) == bits(solve_t_plus(c).optimizers)


def test_instance_too_large():
    c = from_matrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    with pytest.raises(InstanceTooLarge):
        solve_t_plus(c, SolverOptions(max_n=2))


# ---------------------------------------------------------------------------
# critical_interval
# ---------------------------------------------------------------------------

def test_interval_n2():
    report = critical_interval(from_matrix([[0, 1], [1, 0]]))
    assert report.beta_minus == -1
    assert report.beta_plus == math.inf
    assert report.kappa_minus == 1 and report.kappa_plus == 0


def test_interval_two_component_2211():
    report = critical_interval(from_two_component(TwoComponentSpec(2, 2, Fraction(1), Fraction(1))))
    assert report.beta_plus == 1
    assert report.kappa_plus == 2
    assert len(report.max_nests_plus) == 2
    nest_sets = {tuple(sorted(s.bits for s in k.members)) for k in report.max_nests_plus}
    assert nest_sets == {
        tuple(sorted(masks((0, 2), (1, 3)))),
        tuple(sorted(masks((0, 3), (1, 2)))),
    }
    assert set(report.support_plus.rendered) == {"p1=p3, p2=p4", "p1=p4, p2=p3"}


def test_interval_example_7_2():
    report = critical_interval(from_charges(ChargeVector((10, 10, 1))))
    assert report.beta_minus == Fraction(-1, 100)
    assert report.kappa_minus == 1
    assert report.support_minus.rendered == ("p1=p2",)


def test_interval_degenerate_zero_matrix():
    report = critical_interval(from_matrix([[0, 0], [0, 0]]))
    assert report.degenerate
    assert report.beta_minus == -math.inf and report.beta_plus == math.inf
    assert report.kappa_plus == report.kappa_minus == 0
    assert report.support_plus.rendered == ()


def test_interval_always_contains_zero():
    rng = random.Random(3)
    for _ in range(20):
        c = random_exact_matrix(rng, 6)
        report = critical_interval(c)
        assert report.beta_minus < 0 < report.beta_plus


# ---------------------------------------------------------------------------
# Oracle equivalence and properties
# ---------------------------------------------------------------------------

def test_oracle_equivalence_exact_random():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(3, 9)
        c = random_exact_matrix(rng, n)
        plus, minus = solve_both(c)
        oracle = brute_force_oracle(c)
        assert plus.t_value == oracle.t_plus
        assert minus.t_value == oracle.t_minus
        assert bits(plus.optimizers) == bits(oracle.g_plus)
        assert bits(minus.optimizers) == bits(oracle.g_minus)


def test_oracle_equivalence_float_random():
    rng = random.Random(13)
    for _ in range(30):
        n = rng.randint(3, 9)
        c = random_float_matrix(rng, n)
        plus, minus = solve_both(c)
        oracle = brute_force_oracle(c)
        assert abs(plus.t_value - oracle.t_plus) <= 1e-9 * max(1.0, abs(oracle.t_plus))
        assert bits(plus.optimizers) == bits(oracle.g_plus)
        assert bits(minus.optimizers) == bits(oracle.g_minus)


def test_oracle_n2_single_subset():
    oracle = brute_force_oracle(from_matrix([[0, 3], [3, 0]]))
    assert oracle.t_plus == -3 and oracle.t_minus == -3


def test_oracle_size_cap():
    rng = random.Random(1)
    with pytest.raises(InstanceTooLarge):
        brute_force_oracle(random_float_matrix(rng, 17))


def test_oracle_example_3_2_candidates():
    rng = random.Random(17)
    for _ in range(10):
        c12, c23, c13 = (Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(3))
        c = from_matrix([[0, c12, c13], [c12, 0, c23], [c13, c23, 0]])
        report = critical_interval(c)
        expected = max(
            Fraction(-2) / (c12 + c23 + c13),
            Fraction(-1) / c12,
            Fraction(-1) / c23,
            Fraction(-1) / c13,
        )
        assert report.beta_minus == expected


@given(exact_coupling_matrices(max_n=5), st.integers(1, 6))
def test_scaling_covariance(c, t):
    plus, minus = solve_both(c)
    scaled_plus, scaled_minus = solve_both(c.scaled(Fraction(t)))
    assert scaled_plus.t_value == t * plus.t_value
    assert scaled_minus.t_value == t * minus.t_value
    assert bits(scaled_plus.optimizers) == bits(plus.optimizers)
    assert bits(scaled_minus.optimizers) == bits(minus.optimizers)


@given(exact_coupling_matrices(max_n=5))
def test_negation_duality(c):
    plus, minus = solve_both(c)
    neg_plus, neg_minus = solve_both(c.negated())
    assert neg_plus.t_value == -minus.t_value
    assert bits(neg_plus.optimizers) == bits(minus.optimizers)
    assert bits(neg_minus.optimizers) == bits(plus.optimizers)


@given(exact_coupling_matrices(min_n=3, max_n=6), st.randoms(use_true_random=False))
def test_permutation_equivariance(c, pyrandom):
    perm = list(range(c.n))
    pyrandom.shuffle(perm)
    plus, minus = solve_both(c)
    p_plus, p_minus = solve_both(c.permuted(perm))
    assert p_plus.t_value == plus.t_value and p_minus.t_value == minus.t_value
    # new index i holds old particle perm[i]: old set S maps to perm^-1(S)
    inverse = {old: new for new, old in enumerate(perm)}

    def mapped(family):
        return {
            SubsetMask.from_indices(tuple(inverse[i] for i in s.indices())).bits
            for s in family
        }

    assert bits(p_plus.optimizers) == mapped(plus.optimizers)
    assert bits(p_minus.optimizers) == mapped(minus.optimizers)


def test_interval_membership_exhaustive():
    rng = random.Random(23)
    sizes = [rng.randint(3, 9) for _ in range(8)] + [11, 12]
    for n in sizes:
        c = random_exact_matrix(rng, n)
        report = critical_interval(c)
        lo, hi = float(report.beta_minus), float(report.beta_plus)
        span_lo = lo if math.isfinite(lo) else -2.0
        span_hi = hi if math.isfinite(hi) else 2.0
        betas = [span_lo + (span_hi - span_lo) * (j + 1) / 11.0 for j in range(10)]

        pairs = []  # (a_S, |S|-1) for every subset, computed once
        for mask in range(1 << n):
            if mask.bit_count() < 2:
                continue
            s = SubsetMask(mask)
            pairs.append((float(subset_sum(c, s)), s.size - 1))

        def satisfied(beta):
            return all(beta * a + m > 0 for a, m in pairs)

        for beta in betas:
            assert satisfied(beta)
        if math.isfinite(lo):
            assert not satisfied(lo - 1e-6)
        if math.isfinite(hi):
            assert not satisfied(hi + 1e-6)


def test_partition_count_independence():
    rng = random.Random(29)
    for _ in range(10):
        c = random_exact_matrix(rng, 6)
        base = critical_interval(c, SolverOptions(partitions=1))
        for parts in (2, 3, 8):
            other = critical_interval(c, SolverOptions(partitions=parts))
            assert other.t_plus == base.t_plus
            assert other.t_minus == base.t_minus
            assert bits(other.g_plus) == bits(base.g_plus)
            assert bits(other.g_minus) == bits(base.g_minus)


# ---------------------------------------------------------------------------
# max_nest / limit_support
# ---------------------------------------------------------------------------

def test_max_nest_disjoint_pair():
    family = [SubsetMask.from_indices((0, 1)), SubsetMask.from_indices((2, 3))]
    search = max_nest(family)
    assert search.kappa == 2
    assert len(search.nests) == 1


def test_max_nest_overlapping():
    family = [SubsetMask.from_indices((0, 1)), SubsetMask.from_indices((0, 2))]
    search = max_nest(family)
    assert search.kappa == 1
    assert len(search.nests) == 2


def test_max_nest_two_component_family():
    report = critical_interval(from_two_component(TwoComponentSpec(2, 2, 1, 1)))
    search = max_nest(report.g_plus)
    assert search.kappa == 2
    assert len(search.nests) == 2
    assert not search.truncated


def test_max_nest_chain_and_cap():
    family = [
        SubsetMask.from_indices((0, 1)),
        SubsetMask.from_indices((0, 1, 2)),
        SubsetMask.from_indices((0, 1, 2, 3)),
        SubsetMask.from_indices((2, 3)),
    ]
    search = max_nest(family)
    assert search.kappa == 3  # {01} < {012} < {0123}; {23} conflicts with {012}
    with pytest.raises(FamilyTooLarge):
        max_nest(family, family_cap=2)


def test_max_nest_truncation_flag():
    # 6x6 pairing family: 6! = 720 maximum nests, far above a cap of 10
    pairs = [SubsetMask.from_indices((i, 6 + j)) for i in range(6) for j in range(6)]
    search = max_nest(pairs, nest_cap=10)
    assert search.kappa == 6
    assert search.truncated
    assert len(search.nests) == 10


def test_kappa_bounded_by_n_minus_1():
    rng = random.Random(31)
    for _ in range(20):
        n = rng.randint(3, 8)
        c = random_exact_matrix(rng, n)
        report = critical_interval(c)
        assert report.kappa_plus <= n - 1
        assert report.kappa_minus <= n - 1
        for nest in report.max_nests_plus:
            assert len(nest.members) == report.kappa_plus
        for nest in report.max_nests_minus:
            assert len(nest.members) == report.kappa_minus


def test_limit_support_not_critical():
    plus = solve_t_plus(from_matrix([[0, 1], [1, 0]]))
    with pytest.raises(NotCritical):
        limit_support(plus, ())


def test_limit_support_total_collapse_rendering():
    k = ChargeVector((1, 1, 1, 1))
    report = critical_interval(from_charges(k))
    assert report.support_minus.rendered == ("p1=p2=p3=p4",)


def test_subset_mask_requires_two_members():
    with pytest.raises(ValueError):
        SubsetMask(1)
    with pytest.raises(ValueError):
        SubsetMask(0)
