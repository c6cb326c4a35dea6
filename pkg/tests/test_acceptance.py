"""The ten acceptance criteria, one test each.

Every test prints a single ``[ACCEPT n] PASS|FAIL ...`` line (shown even
under output capture) and then asserts.  Running this file directly with
``python tests/test_acceptance.py`` prints the same lines without pytest.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from functools import lru_cache

import pytest

from mumall.encode import comp_provability_matches_reachability, machine_suite
from mumall.kernel import (
    additive_units_proof, check_focus_proof, check_proof, erase_focus, eta_expand_identity, has_cut,
    monotonicity_proof, same_multiset,
)
from mumall.ordinal import ZERO, compare, nat, natural_product, natural_sum, omega_pow, parse_ordinal
from mumall.rank import Valuation, rank_upper_bound, rank_val, rho_formula
from mumall.search import closure_fixpoint, decide, focused_decide, premise_closure
from mumall.syntax import MU, NU, Sequent, instantiate, negate, parse_formula, size, var
from mumall.transform import CutStats, eliminate_cuts, focus
from corpus import cut_corpus
from laws import LAWS, instance, rank_decreases
from oracles import naive_compare, naive_provable, small_trees, tree_to_ordinal
from strategies import random_formula, random_ordinal
from universe import formulas, sequents

_emit = print


def _report(n: int, title: str, ok: bool, detail: str, seconds: float, limit: float) -> None:
    ok = ok and seconds < limit
    _emit(f"[ACCEPT {n:2d}] {'PASS' if ok else 'FAIL'} {title}: {detail} ({seconds:.1f}s, limit {limit:.0f}s)")


@pytest.fixture(autouse=True)
def _visible(capsys):
    global _emit

    def emit(line: str) -> None:
        with capsys.disabled():
            print("\n" + line)
    _emit = emit
    yield
    _emit = print


@lru_cache(maxsize=None)
def _universe() -> tuple[Sequent, ...]:
    # every sequent of rank <= 5 over p, q with annotations <= 2
    return tuple(sequents(5, 5, 5))


# 1 ---------------------------------------------------------------------------------------


def criterion_1():
    rng = random.Random(1)
    bad = 0
    triples = 10_000
    for _ in range(triples):
        a, b, c = (random_ordinal(rng, 3, 3, 4) for _ in range(3))
        checks = (
            natural_sum(a, b) == natural_sum(b, a),
            natural_product(a, b) == natural_product(b, a),
            natural_sum(natural_sum(a, b), c) == natural_sum(a, natural_sum(b, c)),
            natural_product(natural_product(a, b), c) == natural_product(a, natural_product(b, c)),
            natural_product(a, natural_sum(b, c)) == natural_sum(natural_product(a, b), natural_product(a, c)),
        )
        bad += checks.count(False)
        if compare(a, b) < 0:
            bad += compare(natural_sum(a, c), natural_sum(b, c)) >= 0
            if c != ZERO:
                bad += compare(natural_product(a, c), natural_product(b, c)) >= 0
        g = random_ordinal(rng, 2, 2, 3)
        bound = omega_pow(g)
        if compare(a, bound) < 0 and compare(b, bound) < 0:
            bad += compare(natural_sum(a, b), bound) >= 0
    trees = small_trees(2, 2, 2)
    ords = [tree_to_ordinal(t) for t in trees]
    pairs = 0
    for (x, tx), (y, ty) in itertools.product(zip(ords, trees), repeat=2):
        bad += compare(x, y) != naive_compare(tx, ty)
        pairs += 1
    return bad == 0, f"{triples} random triples, {pairs} oracle pairs, {bad} violations"


def test_criterion_1_ordinal_algebra():
    _run(1, *TITLES[1])


# 2 ---------------------------------------------------------------------------------------


def criterion_2():
    rng = random.Random(2)
    counts = {}
    for law, fn in sorted(LAWS.items()):
        counts[law] = sum(not fn(*instance(rng, law)) for _ in range(10_000))
    total = sum(counts.values())
    return total == 0, "10000 instances each, violations " + ", ".join(f"{k}={v}" for k, v in counts.items())


def test_criterion_2_rank_laws():
    _run(2, *TITLES[2])


# 3 ---------------------------------------------------------------------------------------


def criterion_3():
    rng = random.Random(3)
    bad = instances = 0
    for _ in range(10_000):
        seq = [random_formula(rng, rng.randint(0, 5), max_ann=3) for _ in range(rng.randint(1, 3))]
        bad += len(rank_decreases(seq))
        instances += 1
    return bad == 0, f"{instances} sequents, {bad} rule instances without a rank drop"


def test_criterion_3_rank_decrease():
    _run(3, *TITLES[3])


# 4 ---------------------------------------------------------------------------------------


def criterion_4():
    bad = 0
    for k in range(9):
        for g in range(6):
            r = rank_val(rho_formula(1, k), Valuation({"x1": g}, default=1))
            bad += compare(r, nat(g * k)) < 0
    limit = parse_ordinal("w^w^w")
    ubs = []
    for n in range(5):
        ub = rank_upper_bound(rho_formula(n, parse_ordinal("w")))
        ubs.append(str(ub))
        bad += compare(ub, limit) >= 0
    return bad == 0, f"54 lower-bound cases, upper bounds {', '.join(ubs)}, {bad} violations"


def test_criterion_4_rho_growth():
    _run(4, *TITLES[4])


# 5 and 6 -----------------------------------------------------------------------------------


def criterion_5():
    u = _universe()
    bad = sum(decide(s).provable is not naive_provable(s) for s in u)
    return bad == 0, f"{len(u)} sequents, {bad} disagreements with the naive oracle"


def test_criterion_5_search_vs_oracle():
    _run(5, *TITLES[5])


def criterion_6():
    u = _universe()
    disagree = broken = found = 0
    for s in u:
        r = decide(s)
        disagree += r.provable is not focused_decide(s).provable
        if r.provable:
            found += 1
            fp = focus(r.proof)
            broken += not (check_focus_proof(fp).valid and same_multiset(erase_focus(fp).conclusion, s))
    ok = disagree == 0 and broken == 0
    return ok, f"{len(u)} sequents, {disagree} plain/focused disagreements, {found} proofs focussed, {broken} broken"


def test_criterion_6_focussing():
    _run(6, *TITLES[6])


# 7 ---------------------------------------------------------------------------------------


def criterion_7():
    stats = CutStats()
    total = bad = 0
    for _, pf in cut_corpus(3):
        total += 1
        if not (has_cut(pf) and check_proof(pf).valid):
            bad += 1
            continue
        # a RankMeasureViolation propagates and fails the criterion
        out = eliminate_cuts(pf, stats)
        bad += not (check_proof(out, cut_free=True).valid and same_multiset(out.conclusion, pf.conclusion))
    ok = bad == 0 and total >= 200 and stats.rank_checks > 0
    return ok, f"{total} proofs with cuts, {bad} failures, {stats.reductions} reductions, {stats.rank_checks} rank checks"


def test_criterion_7_cut_elimination():
    _run(7, *TITLES[7])


# 8 ---------------------------------------------------------------------------------------


def criterion_8():
    seeds = list(sequents(4, 4, 3))
    seeds += [Sequent(parse_formula(t) for t in text) for text in (
        ("mu^2 x.(p * x) + 1", "nu^2 x.(~p | x) & bot"),
        ("mu^2 x.(x + 1)", "nu^2 x.(x & bot)"),
        ("nu^2 x. x & (q | x)", "mu^2 x. x + (~q * x)"),
    )]
    universe = premise_closure(seeds)
    fix, rounds = closure_fixpoint(universe)
    provable = {s for s in universe if decide(s).provable}
    diff = len(fix ^ provable)
    return diff == 0, f"{len(universe)} sequents, fixed point after {rounds} rounds, {diff} differences"


def test_criterion_8_closure_operator():
    _run(8, *TITLES[8])


# 9 ---------------------------------------------------------------------------------------


def criterion_9():
    cases = bad = 0
    for m in machine_suite():
        for n in itertools.product(range(4), repeat=m.counters):
            for k in range(9):
                r = comp_provability_matches_reachability(m, n, k)
                cases += 1
                bad += not r.agrees
    return bad == 0, f"{cases} machine/input/k cases, {bad} disagreements"


def test_criterion_9_minsky_differential():
    _run(9, *TITLES[9])


# 10 --------------------------------------------------------------------------------------


def _open(text: str):
    return instantiate(parse_formula(f"mu^0 x. ({text})").body, var("x"))


def criterion_10():
    bad = made = 0
    for b in range(6):
        made += 1
        bad += not check_proof(additive_units_proof(b)).valid
    for kind, body in ((MU, "x + 1"), (MU, "(p * x) + 1"), (NU, "x & bot"), (NU, "(q | x) & x"), (MU, "x")):
        for b in range(5):
            for g in range(b + 1):
                made += 1
                bad += not check_proof(monotonicity_proof(kind, _open(body), "x", g, b), cut_free=True).valid
    # every formula of size <= 5, then random ones of size 6 and 7
    rng = random.Random(10)
    sample = list(formulas(5, 99))
    target = len(sample) + 3000
    while len(sample) < target:
        a = random_formula(rng, rng.randint(3, 6), max_ann=2)
        if size(a) in (6, 7):
            sample.append(a)
    for a in sample:
        made += 1
        pf = eta_expand_identity(a)
        bad += not (check_proof(pf, cut_free=True).valid and same_multiset(pf.conclusion, (negate(a), a)))
    return bad == 0, f"{made} generated proofs, {bad} invalid"


def test_criterion_10_demo_gallery():
    _run(10, *TITLES[10])


# -------------------------------------------------------------------------------------------

TITLES = {
    1: ("ordinal algebra", criterion_1, 10), 2: ("rank laws", criterion_2, 60), 3: ("rank decrease", criterion_3, 60),
    4: ("R_n growth", criterion_4, 10), 5: ("search vs oracle", criterion_5, 600),
    6: ("focussing", criterion_6, 600), 7: ("cut elimination", criterion_7, 300),
    8: ("closure operator", criterion_8, 300), 9: ("Minsky differential", criterion_9, 900),
    10: ("demo gallery", criterion_10, 60),
}


def _run(n: int, title: str, fn, limit: float) -> None:
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as e:  # report, then fail
        ok, detail = False, f"raised {type(e).__name__}: {e}"
    dt = time.perf_counter() - t
    _report(n, title, ok, detail, dt, limit)
    assert ok, detail
    assert dt < limit, f"took {dt:.1f}s, limit {limit}s"


if __name__ == "__main__":
    failed = 0
    for n, (title, fn, limit) in TITLES.items():
        try:
            _run(n, title, fn, limit)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
