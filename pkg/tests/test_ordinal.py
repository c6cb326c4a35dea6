import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mumall.ordinal import (
    OMEGA, ONE, ZERO, Ordinal, OrdinalDomainError, OrdinalError, OrdinalOverflowError, add, alpha_omega_pow,
    compare, degree, format_ordinal, fundamental, get_depth_limit, iter_natural_product, lowest_degree, mul, nat,
    natural_product, natural_sum, omega_pow, parse_ordinal, set_depth_limit,
)
from oracles import naive_compare, ord_tree, small_trees, tree_to_ordinal
from strategies import ordinals

P = parse_ordinal


@pytest.mark.parametrize("a,b,expected", [
    ("0", "0", 0),
    ("2", "w", -1),
    ("w*2+1", "w^2", -1),
    ("w^w", "w^3*7", 1),
])
def test_compare_examples(a, b, expected):
    assert compare(P(a), P(b)) == expected


def test_classical_arithmetic():
    assert add(ONE, OMEGA) == OMEGA
    assert add(OMEGA, ONE) == P("w+1")
    assert mul(OMEGA, nat(2)) == P("w*2")
    assert mul(nat(2), OMEGA) == OMEGA
    assert omega_pow(P("w+1")) == P("w^(w+1)")
    assert len(omega_pow(P("w+1")).terms) == 1


def test_natural_operations_examples():
    a = P("w^2*3+w+4")
    assert natural_sum(a, ZERO) == a
    assert natural_sum(P("w+1"), OMEGA) == P("w*2+1")
    assert natural_sum(P("w^2"), P("w*3")) == P("w^2+w*3")
    assert natural_sum(P("w*3"), P("w^2")) == P("w^2+w*3")
    assert natural_product(a, ONE) == a
    assert natural_product(OMEGA, nat(2)) == P("w*2")
    assert natural_product(P("w+1"), P("w+1")) == P("w^2+w*2+1")


def test_iterated_natural_product():
    assert iter_natural_product(P("w^3"), ZERO) == ONE
    assert iter_natural_product(nat(5), nat(3)) == nat(125)
    assert iter_natural_product(P("w^w"), OMEGA) == P("w^(w^2)")
    assert iter_natural_product(nat(2), OMEGA) == OMEGA
    assert iter_natural_product(ONE, P("w^w")) == ONE
    with pytest.raises(OrdinalDomainError):
        iter_natural_product(ZERO, OMEGA)


@given(ordinals(2), st.integers(0, 4))
@settings(max_examples=200, deadline=None)
def test_iterated_product_finite_exponent_is_repeated_product(a, n):
    expected = ONE
    for _ in range(n):
        expected = natural_product(expected, a)
    assert iter_natural_product(a, nat(n)) == expected


@given(st.integers(0, 2), st.integers(1, 3), st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_iterated_product_limit_is_supremum(c, k, n):
    # for a = w^(w^c) the limit value bounds every finite stage and is approached from below
    a = omega_pow(omega_pow(nat(c)))
    lam = mul(OMEGA, nat(k))
    top = iter_natural_product(a, lam)
    below = iter_natural_product(a, add(mul(OMEGA, nat(k - 1)), nat(n)))
    assert compare(below, top) < 0


def test_degrees():
    assert degree(nat(5)) == ZERO
    assert degree(P("w^2*3+w")) == nat(2)
    assert lowest_degree(P("w^2*3+w")) == ONE
    assert lowest_degree(P("w^w")) == OMEGA
    with pytest.raises(OrdinalDomainError):
        degree(ZERO)
    with pytest.raises(OrdinalDomainError):
        lowest_degree(ZERO)


def test_alpha_omega_pow():
    assert alpha_omega_pow(OMEGA) == P("w^w")
    assert alpha_omega_pow(P("w*2")) == P("w^w")
    # (w^2)^w = sup w^(2n) = w^w, since 2*w = w
    assert alpha_omega_pow(P("w^2")) == P("w^w")
    assert alpha_omega_pow(P("w^w")) == P("w^(w^2)")
    with pytest.raises(OrdinalDomainError):
        alpha_omega_pow(nat(7))


@pytest.mark.parametrize("text", ["0", "7", "w", "w+1", "w*2+3", "w^2*3+w+1", "w^(w+1)+w^w*2", "w^w^w"])
def test_parse_format_round_trip(text):
    a = P(text)
    assert P(format_ordinal(a)) == a


@pytest.mark.parametrize("bad", ["1+w", "w+w", "w*0", "", "x", "w^", "w*2*3"])
def test_parse_rejects_non_canonical(bad):
    with pytest.raises(OrdinalError):
        P(bad)


def test_constructor_validates_terms():
    with pytest.raises(OrdinalDomainError):
        Ordinal(((ONE, 1), (nat(2), 1)))
    with pytest.raises(OrdinalDomainError):
        Ordinal(((ONE, 0),))


def test_depth_cap():
    old = get_depth_limit()
    try:
        set_depth_limit(3)
        with pytest.raises(OrdinalOverflowError):
            omega_pow(omega_pow(omega_pow(OMEGA)))
    finally:
        set_depth_limit(old)


def test_fundamental_sequence_converges_from_below():
    for text in ["w", "w^2", "w^w", "w*3", "w^(w+1)"]:
        lam = P(text)
        seq = [fundamental(lam, n) for n in range(5)]
        assert all(compare(x, lam) < 0 for x in seq)
        assert all(compare(x, y) < 0 for x, y in zip(seq, seq[1:]))


@given(ordinals(), ordinals(), ordinals())
@settings(max_examples=300, deadline=None)
def test_natural_operations_algebra(a, b, c):
    assert natural_sum(a, b) == natural_sum(b, a)
    assert natural_product(a, b) == natural_product(b, a)
    assert natural_sum(natural_sum(a, b), c) == natural_sum(a, natural_sum(b, c))
    assert natural_product(natural_product(a, b), c) == natural_product(a, natural_product(b, c))
    assert natural_product(a, natural_sum(b, c)) == natural_sum(natural_product(a, b), natural_product(a, c))


@given(ordinals(), ordinals(), ordinals())
@settings(max_examples=300, deadline=None)
def test_natural_operations_strictly_monotone(a, b, c):
    if compare(a, b) < 0:
        assert compare(natural_sum(a, c), natural_sum(b, c)) < 0
        if c != ZERO:
            assert compare(natural_product(a, c), natural_product(b, c)) < 0


@given(ordinals(), ordinals(), ordinals(2))
@settings(max_examples=300, deadline=None)
def test_closure_below_omega_power(a, b, g):
    bound = omega_pow(g)
    if compare(a, bound) < 0 and compare(b, bound) < 0:
        assert compare(natural_sum(a, b), bound) < 0


@given(ordinals(), ordinals())
@settings(max_examples=300, deadline=None)
def test_compare_is_a_total_order_matching_oracle(a, b):
    c = compare(a, b)
    assert c == -compare(b, a)
    assert c == naive_compare(ord_tree(a), ord_tree(b))
    assert (c == 0) == (a == b)


@given(ordinals(), ordinals())
@settings(max_examples=200, deadline=None)
def test_classical_addition_absorbs_and_dominates(a, b):
    s = add(a, b)
    assert compare(s, b) >= 0 and compare(s, a) >= 0
    assert compare(s, natural_sum(a, b)) <= 0


def test_compare_oracle_exhaustive_small():
    trees = small_trees(2, 2, 2)
    ords = [tree_to_ordinal(t) for t in trees]
    for x, tx in zip(ords, trees):
        for y, ty in zip(ords, trees):
            assert compare(x, y) == naive_compare(tx, ty)


@given(ordinals(), ordinals(), ordinals())
@settings(max_examples=300, deadline=None)
def test_natural_sum_continuous_at_lowest_degree(d1, d2, beta):
    # with 0 < ld(d1) <= ld(d2), d1 # d2 is the supremum of d # d2 over d < d1
    if d1 == ZERO or d2 == ZERO or lowest_degree(d1) == ZERO:
        return
    if compare(lowest_degree(d1), lowest_degree(d2)) > 0:
        return
    target = natural_sum(d1, d2)
    approx = [natural_sum(fundamental(d1, n), d2) for n in range(12)]
    assert all(compare(x, target) < 0 for x in approx)
    if compare(beta, target) < 0:
        assert any(compare(beta, x) < 0 for x in approx)
