import json

import pytest

from mumall.encode import (
    ACC, KEY1, T_SYM, Configuration, Inc, Jzdec, MachineError, MinskyMachine, acc, accepts_within, aug,
    comp_formula, comp_provability_matches_reachability, counter, encode_instruction, encoded_sequent,
    goal_any_output, goal_zero_output, hat, in_E, is_locked, lock, machine_suite, pass_, reachable_configs,
    reachable_within, rewrites, step, tup, zero_check,
)
from mumall.ordinal import OMEGA, compare, nat
from mumall.rank import rank_sequent, rho_formula
from mumall.search import decide
from mumall.syntax import (
    BOT, MU, ONE, PAR, PLUS, TENSOR, TOP, WITH, Bin, Fix, atom, free_vars, natom, negate, par, plus, tensor, unfold,
    var,
)

SUITE = {m.name: m for m in machine_suite()}
SUCC = SUITE["successor"]


def test_step_semantics():
    m = SUITE["zero-test"]
    assert step(m, Configuration("s", (0,))) == {Configuration("f", (0,))}
    assert step(m, Configuration("s", (2,))) == {Configuration("s", (1,))}
    assert step(m, Configuration("f", (2,))) == set()
    assert step(SUCC, Configuration("s", (3,))) == {Configuration("f", (4,))}


def test_reachability():
    assert reachable_within(SUCC, Configuration("s", (3,)), Configuration("f", (4,)), 2)
    assert not reachable_within(SUCC, Configuration("s", (3,)), Configuration("f", (4,)), 1)
    assert reachable_configs(SUCC, Configuration("s", (0,)), 0) == set()
    assert reachable_configs(SUCC, Configuration("s", (0,)), 1) == {Configuration("s", (0,))}
    assert accepts_within(SUITE["zero-test"], (2,), 4)
    assert not accepts_within(SUITE["zero-test"], (2,), 3)
    for k in range(8):
        assert not accepts_within(SUITE["dead-state"], (0, 0), k)


def test_instruction_shapes():
    x = var("x")
    f = encode_instruction(Inc("s", 0, "f"), x)
    assert f == tensor(natom("s"), par(counter(0), atom("f"), x))
    g = encode_instruction(Jzdec("s", 0, "a", "b"), x, counters=2, z_bound=nat(3))
    assert isinstance(g, Bin) and g.op == TENSOR and g.left == natom("s")
    assert g.right.op == PLUS
    dec, zero = g.right.left, g.right.right
    assert dec == tensor(negate(counter(0)), par(atom("a"), x))
    assert zero.op == WITH and zero.left == zero_check(0, 2, nat(3))
    assert zero.right == par(atom("b"), x)


def test_zero_check_shape():
    z = zero_check(0, 3, nat(4))
    assert isinstance(z, Fix) and z.kind == MU and z.ann == nat(4)
    assert z.body.op == PLUS and z.body.left == acc()
    assert z.body.right.left == plus(negate(counter(1)), negate(counter(2)))


def test_tup_and_symbols():
    assert tup((2, 0, 1)) == [counter(0), counter(0), counter(2)]
    assert acc() == par(natom("acc"), ACC)
    assert pass_() == tensor(natom("acc"), ACC)


def test_comp_formula():
    c = comp_formula([SUCC], nat(3))
    assert isinstance(c, Fix) and c.ann == nat(3) and c.kind == MU
    other = MinskyMachine(1, ("s", "g"), "s", "g", (), "clash")
    with pytest.raises(MachineError):
        comp_formula([SUCC, other], nat(2))
    seq = encoded_sequent(SUCC, (1,), nat(2), goal_any_output())
    assert seq[0] == goal_any_output() and seq[-1] == comp_formula([SUCC], nat(2))
    assert atom("s") in seq and seq.count(counter(0)) == 1


def test_locking():
    g = goal_any_output()
    assert is_locked({"t"}, g)
    assert is_locked({"t", "key1"}, g)
    assert not is_locked({"key1"}, g)
    assert not is_locked({"t"}, tensor(natom("t"), TOP))
    assert lock(ONE) == plus(pass_(), tensor(negate(KEY1), ONE))
    assert is_locked({"key1"}, lock(par(ONE, BOT)))


def test_aug_and_hat():
    ind = ONE
    r = rho_formula(1, nat(2))
    a = aug(r, ind)
    assert is_locked({"key1"}, a)
    h = hat(r, ind)
    assert not free_vars(h)
    inner = h.right.right
    assert isinstance(inner, Fix) and inner.kind == MU and inner.body.op == PAR and inner.body.left == ind
    with pytest.raises(MachineError):
        aug(tensor(ONE, ONE), ind)
    with pytest.raises(MachineError):
        aug(r, var("z"))


def test_rewrites():
    r = rho_formula(1, nat(2))
    assert rewrites(r) == {unfold(r, nat(0)), unfold(r, nat(1))}
    assert rewrites(par(ONE, BOT)) == {ONE, BOT}
    assert rewrites(ONE) == set()
    lim = rho_formula(1, OMEGA)
    assert rewrites(lim) == set()
    assert rewrites(lim, (nat(3),)) == {unfold(lim, nat(3))}


def test_in_E():
    r = rho_formula(2, nat(2))
    assert in_E(r, 2, nat(2))
    for s in rewrites(r):
        assert in_E(s, 2, nat(2))
    assert in_E(var("x1"), 1, nat(2))
    assert not in_E(ONE, 3, nat(2))
    assert in_E(unfold(rho_formula(1, OMEGA), nat(1)), 1, OMEGA)


def test_goal_acceptance():
    assert decide([goal_any_output(), counter(0), counter(0), T_SYM]).provable
    assert decide([goal_zero_output(), T_SYM]).provable
    assert not decide([goal_zero_output(), counter(0), T_SYM]).provable


def test_rank_grows_with_k():
    ranks = [rank_sequent(encoded_sequent(SUCC, (1,), nat(k), goal_any_output(), nat(5))) for k in range(5)]
    assert all(compare(a, b) < 0 for a, b in zip(ranks, ranks[1:]))


@pytest.mark.parametrize("name", sorted(SUITE))
def test_differential_small(name):
    m = SUITE[name]
    for n in ((0,) * m.counters, (1,) + (0,) * (m.counters - 1)):
        for k in range(5):
            r = comp_provability_matches_reachability(m, n, k)
            assert r.agrees, r.as_dict()
            assert r.predicted == r.reachable  # the any-output goal accepts every output


def test_successor_examples():
    assert not comp_provability_matches_reachability(SUCC, (1,), 1).provable
    r = comp_provability_matches_reachability(SUCC, (1,), 3)
    assert r.provable and r.reachable
    z = comp_provability_matches_reachability(SUCC, (1,), 3, goal_zero_output())
    # the run ends in f(2), and the zero-output goal refuses a non-empty output
    assert z.reachable and not z.predicted and z.provable is False and z.agrees


def test_zero_output_goal():
    m = SUITE["zero-test"]
    for n in range(3):
        for k in range(n + 3):
            r = comp_provability_matches_reachability(m, (n,), k, goal_zero_output())
            assert r.agrees
            assert r.predicted == (k >= n + 2)


def test_dead_state_unprovable():
    m = SUITE["dead-state"]
    for k in range(5):
        r = comp_provability_matches_reachability(m, (0, 0), k)
        assert r.provable is False and r.agrees


def test_unlocked_goal_rejected():
    with pytest.raises(MachineError):
        comp_provability_matches_reachability(SUCC, (0,), 2, tensor(natom("t"), TOP))


def test_json_loader():
    d = {"name": "tiny", "counters": 1, "states": ["s", "f"], "start": "s", "accept": "f",
         "instructions": [{"op": "inc", "p": "s", "i": 0, "q": "f"}]}
    m = MinskyMachine.from_json(json.dumps(d))
    assert m == SUCC.__class__(1, ("s", "f"), "s", "f", (Inc("s", 0, "f"),), "tiny")
    assert MinskyMachine.from_dict(m.to_dict()) == m
    with pytest.raises(MachineError):
        MinskyMachine.from_json("{")
    with pytest.raises(MachineError):
        MinskyMachine.from_json(json.dumps({**d, "instructions": [{"op": "jump"}]}))


@pytest.mark.parametrize("kwargs", [
    dict(states=("s",), start="s", accept="f"),
    dict(states=("s", "t"), start="s", accept="t"),
    dict(states=("s", "c1"), start="s", accept="c1"),
    dict(states=("s", "f"), start="s", accept="f", instructions=(Inc("s", 3, "f"),)),
    dict(states=("s", "f"), start="s", accept="f", instructions=(Inc("s", 0, "g"),)),
    dict(states=("s", "f"), start="s", accept="f", counters=0),
])
def test_machine_validation(kwargs):
    args = dict(counters=1, instructions=())
    args.update(kwargs)
    with pytest.raises(MachineError):
        MinskyMachine(**args)


def test_config_arity():
    with pytest.raises(MachineError):
        SUCC.initial((1, 2))
    assert str(SUCC.initial((3,))) == "s(3)"
