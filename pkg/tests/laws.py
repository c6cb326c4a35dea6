"""The rank laws, phrased as predicates over one instance each."""

from __future__ import annotations

import random

from mumall.ordinal import ONE, Ordinal, add, compare, iter_natural_product, nat, natural_product
from mumall.rank import Valuation, overlay, rank_sequent, rank_val, scale
from mumall.search import rule_instances
from mumall.syntax import Fix, Formula, fix, substitute
from strategies import random_formula, random_ordinal

VARS = ("x", "y")


def random_positive(rng: random.Random) -> Ordinal:
    # ordinals >= 1, mostly small
    o = random_ordinal(rng, depth=2, max_terms=2, max_coeff=3)
    return o if o != nat(0) else ONE


def random_valuation(rng: random.Random) -> Valuation:
    return Valuation({x: random_positive(rng) for x in VARS})


def monotone(a: Formula, s: Valuation, bump: Valuation) -> bool:
    """rank is monotone in the valuation and at least 1 on valuations >= 1."""
    big = Valuation({x: add(s(x), bump(x)) for x in VARS})
    lo, hi = rank_val(a, s), rank_val(a, big)
    return compare(lo, hi) <= 0 and compare(lo, ONE) >= 0


def substitution(a: Formula, b: Formula, s: Valuation) -> bool:
    lhs = rank_val(substitute(a, "x", b), s)
    rhs = rank_val(a, overlay(s, Valuation({"x": rank_val(b, s)})))
    return lhs == rhs


def scaling(a: Formula, g: Ordinal, s: Valuation, s2: Valuation) -> bool:
    lhs = rank_val(a, overlay(s, scale(g, s2)))
    rhs = natural_product(g, rank_val(a, overlay(s, s2)))
    return compare(lhs, rhs) <= 0


def fixed_point(kind: str, body: Formula, beta: int) -> bool:
    """rk(eta^b y.C) <= (rk(C) + 1)^(#b), with the free y of C valued at 1."""
    f = fix(kind, "y", beta, body)
    assert isinstance(f, Fix)
    base = add(rank_val(body, Valuation(default=1)), ONE)
    return compare(rank_val(f, Valuation(default=1)), iter_natural_product(base, nat(beta))) <= 0


def rank_decreases(seq) -> list:
    """Rule instances over ``seq`` whose premises fail to have smaller rank."""
    r = rank_sequent(seq)
    bad = []
    for ins in rule_instances(seq):
        for prem in ins.premises:
            if compare(rank_sequent(prem), r) >= 0:
                bad.append((ins, prem))
    return bad


def instance(rng: random.Random, law: str):
    a = random_formula(rng, rng.randint(0, 6), free=VARS, max_ann=3)
    if law == "monotone":
        return (a, random_valuation(rng), Valuation({x: random_ordinal(rng, 1, 2, 3) for x in VARS}))
    if law == "substitution":
        b = random_formula(rng, rng.randint(0, 3), free=VARS, max_ann=3)
        return (a, b, random_valuation(rng))
    if law == "scaling":
        g = random_positive(rng)
        # s2 covers the variables whose values get scaled, s the rest
        s = Valuation({"y": random_positive(rng)})
        s2 = Valuation({"x": random_positive(rng)})
        return (a, g, s, s2)
    if law == "fixed_point":
        body = random_formula(rng, rng.randint(0, 5), free=("y",), max_ann=2)
        return (rng.choice(("mu", "nu")), body, rng.randint(0, 6))
    raise ValueError(law)


LAWS = {"monotone": monotone, "substitution": substitution, "scaling": scaling, "fixed_point": fixed_point}
