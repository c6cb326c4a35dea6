"""Counter machines and their encoding into formulas.

Symbols: each machine state is a propositional symbol, counter ``i`` is
``c<i>``, and ``acc``, ``key1``, ``key2`` and ``t`` are reserved.  A
configuration ``p(k0, k1, ...)`` is represented by the multiset
``p, c0^k0, c1^k1, ...``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .ordinal import OMEGA, Ordinal, as_ordinal, compare, nat
from .search import SearchLimits, Status, decide, focused_decide
from .syntax import (
    MU, PAR, PLUS, TENSOR, TOP, ZERO,
    Ann, Atom, Bin, BVar, Fix, Formula, Unit, Var, annotations, atom, big, fix, free_vars,
    ONE, natom, negate, par, plus, size, substitute, tensor, unfold, var, with_,
)
from .rank import rho_formula

RESERVED = frozenset({"acc", "key1", "key2", "t"})


class MachineError(ValueError):
    pass


@dataclass(frozen=True)
class Inc:
    p: str
    i: int
    q: str


@dataclass(frozen=True)
class Jzdec:
    p: str
    i: int
    q: str
    r: str


Instruction = Union[Inc, Jzdec]


@dataclass(frozen=True)
class Configuration:
    state: str
    counters: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.state}({', '.join(map(str, self.counters))})"


Config = Configuration


@dataclass(frozen=True)
class MinskyMachine:
    counters: int
    states: tuple[str, ...]
    start: str
    accept: str
    instructions: tuple[Instruction, ...]
    name: str = ""

    def __post_init__(self):
        states = set(self.states)
        if self.start not in states or self.accept not in states:
            raise MachineError("start and accept must be states")
        if self.counters < 1:
            raise MachineError("a machine needs at least one counter")
        for s in states:
            if s in RESERVED or (s.startswith("c") and s[1:].isdigit()):
                raise MachineError(f"state name {s!r} clashes with a reserved symbol")
            atom(s)  # validates the name
        for ins in self.instructions:
            used = (ins.p, ins.q) + ((ins.r,) if isinstance(ins, Jzdec) else ())
            if not set(used) <= states:
                raise MachineError(f"instruction {ins} uses an unknown state")
            if not 0 <= ins.i < self.counters:
                raise MachineError(f"instruction {ins} uses counter {ins.i} of {self.counters}")

    def config(self, state: str, counters: Sequence[int]) -> Configuration:
        counters = tuple(counters)
        if len(counters) != self.counters:
            raise MachineError(f"expected {self.counters} counters, got {len(counters)}")
        return Configuration(state, counters)

    def initial(self, counters: Sequence[int]) -> Configuration:
        return self.config(self.start, counters)

    # -- JSON -------------------------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "MinskyMachine":
        ins: list[Instruction] = []
        for x in d.get("instructions", []):
            op = x.get("op", "").lower()
            if op == "inc":
                ins.append(Inc(x["p"], int(x["i"]), x["q"]))
            elif op == "jzdec":
                ins.append(Jzdec(x["p"], int(x["i"]), x["q"], x["r"]))
            else:
                raise MachineError(f"unknown instruction {x!r}")
        return cls(int(d["counters"]), tuple(d["states"]), d["start"], d["accept"], tuple(ins), d.get("name", ""))

    @classmethod
    def from_json(cls, text: str) -> "MinskyMachine":
        try:
            return cls.from_dict(json.loads(text))
        except (KeyError, TypeError, json.JSONDecodeError) as e:
            raise MachineError(f"bad machine description: {e}") from None

    def to_dict(self) -> dict:
        ins = []
        for x in self.instructions:
            if isinstance(x, Inc):
                ins.append({"op": "inc", "p": x.p, "i": x.i, "q": x.q})
            else:
                ins.append({"op": "jzdec", "p": x.p, "i": x.i, "q": x.q, "r": x.r})
        out = {"counters": self.counters, "states": list(self.states), "start": self.start,
               "accept": self.accept, "instructions": ins}
        if self.name:
            out["name"] = self.name
        return out


# -- semantics ----------------------------------------------------------------------------


def step(m: MinskyMachine, c: Configuration) -> set[Configuration]:
    out = set()
    for ins in m.instructions:
        if ins.p != c.state:
            continue
        k = list(c.counters)
        if isinstance(ins, Inc):
            k[ins.i] += 1
            out.add(Configuration(ins.q, tuple(k)))
        elif k[ins.i] > 0:
            k[ins.i] -= 1
            out.add(Configuration(ins.q, tuple(k)))
        else:
            out.add(Configuration(ins.r, tuple(k)))
    return out


def reachable_configs(m: MinskyMachine, c0: Configuration, k: int) -> set[Configuration]:
    """Configurations reachable from ``c0`` in fewer than ``k`` steps."""
    if k <= 0:
        return set()
    seen = {c0}
    frontier = {c0}
    for _ in range(k - 1):
        frontier = {d for c in frontier for d in step(m, c)} - seen
        if not frontier:
            break
        seen |= frontier
    return seen


def reachable_within(m: MinskyMachine, c0: Configuration, c1: Configuration, k: int) -> bool:
    """Whether ``c1`` is reachable from ``c0`` in fewer than ``k`` steps."""
    return c1 in reachable_configs(m, c0, k)


def accepts_within(m: MinskyMachine, counters: Sequence[int], k: int) -> bool:
    return any(c.state == m.accept for c in reachable_configs(m, m.initial(counters), k))


# -- formulas ------------------------------------------------------------------------------

ACC = atom("acc")
KEY1 = atom("key1")
KEY2 = atom("key2")
T_SYM = atom("t")


def counter(i: int) -> Atom:
    return atom(f"c{i}")


def acc() -> Formula:
    """``~acc | acc``."""
    return par(negate(ACC), ACC)


def pass_() -> Formula:
    """``~acc * acc``."""
    return tensor(negate(ACC), ACC)


def tup(v: Sequence[int]) -> list[Formula]:
    return [counter(i) for i, n in enumerate(v) for _ in range(n)]


def zero_check(i: int, counters: int, bound: Ann = OMEGA) -> Formula:
    """``mu y. (Acc + ((~c_j + ...) * y))`` over every counter ``j != i``."""
    others = big(PLUS, [negate(counter(j)) for j in range(counters) if j != i], ZERO)
    return fix(MU, "y", bound, plus(acc(), tensor(others, var("y"))))


def encode_instruction(ins: Instruction, x: Formula, counters: int | None = None,
                       z_bound: Ann = OMEGA) -> Formula:
    p = natom(ins.p)
    if isinstance(ins, Inc):
        return tensor(p, par(counter(ins.i), atom(ins.q), x))
    n = counters if counters is not None else ins.i + 1
    ci = counter(ins.i)
    dec = tensor(negate(ci), par(atom(ins.q), x))
    zero = with_(zero_check(ins.i, n, z_bound), par(atom(ins.r), x))
    return tensor(p, plus(dec, zero))


def comp_formula(machines: Sequence[MinskyMachine], b: Ann, t: Atom = T_SYM,
                 z_bound: Ann = OMEGA) -> Formula:
    """``Comp_b``: ``mu^b x. [T + the encoded instructions of every machine]``."""
    seen: set[str] = set()
    for m in machines:
        if seen & set(m.states):
            raise MachineError("machines must have disjoint state sets")
        seen |= set(m.states)
    if t.name in seen:
        raise MachineError("the output symbol clashes with a state")
    n = max(m.counters for m in machines)
    terminal = big(PLUS, [tensor(natom(m.accept), t) for m in machines], ZERO)
    x = var("x")
    body = [terminal] + [encode_instruction(ins, x, n, z_bound) for m in machines for ins in m.instructions]
    return fix(MU, "x", b, big(PLUS, body, ZERO))


def encoded_sequent(m: MinskyMachine, counters: Sequence[int], k: Ann, goal: Formula,
                    z_bound: Ann = OMEGA, extra: Sequence[MinskyMachine] = ()) -> list[Formula]:
    """``G, tup(n), s, Comp_k`` for machine ``m`` started on ``counters``."""
    return [goal, *tup(counters), atom(m.start), comp_formula([m, *extra], k, z_bound=z_bound)]


# -- locking and the constructors on R_n -----------------------------------------------


def _disjuncts(a: Formula) -> list[Formula]:
    if isinstance(a, Bin) and a.op == PLUS:
        return _disjuncts(a.left) + _disjuncts(a.right)
    return [a]


def is_locked(keys: Iterable[str | Atom], a: Formula) -> bool:
    """Whether ``a`` is ``(~p1 * A1) + ... + (~pm * Am) + Pass`` with every ``pi`` a key."""
    names = {k.name if isinstance(k, Atom) else k for k in keys}
    ds = _disjuncts(a)
    has_pass = False
    for d in ds:
        if d == pass_():
            has_pass = True
            continue
        if not (isinstance(d, Bin) and d.op == TENSOR and isinstance(d.left, Atom) and d.left.negated
                and d.left.name in names):
            return False
    return has_pass


def lock(a: Formula) -> Formula:
    return plus(pass_(), tensor(negate(KEY1), a))


def aug(a: Formula, ind: Formula) -> Formula:
    """Defined on formulas built from ``|``, ``mu`` and leaves."""
    if isinstance(a, (Var, BVar, Atom, Unit)):
        return lock(a)
    if isinstance(a, Bin) and a.op == PAR:
        return lock(par(ind, aug(a.left, ind), aug(a.right, ind)))
    if isinstance(a, Fix) and a.kind == MU:
        if free_vars(ind):
            raise MachineError("the Ind placeholder must be closed")
        return lock(Fix(MU, a.ann, par(ind, aug(a.body, ind)), a.hint))
    raise MachineError(f"aug is undefined on {a}")


def hat(a: Formula, ind: Formula) -> Formula:
    out = aug(a, ind)
    for x in sorted(free_vars(out)):
        out = substitute(out, x, ind)
    return out


def rewrites(a: Formula, probe: Iterable[Ordinal] = ()) -> set[Formula]:
    """One-step successors: ``mu^b x.A ~> A(mu^g x.A)`` for ``g < b``, ``A1 | A2 ~> Ai``."""
    out: set[Formula] = set()
    if isinstance(a, Fix) and a.kind == MU:
        b = a.ann
        if isinstance(b, Ordinal) and b.nat is not None:
            gs = [nat(g) for g in range(b.nat)]
        else:
            gs = [g for g in probe if compare(g, b) < 0]
        out.update(unfold(a, g) for g in gs)
    elif isinstance(a, Bin) and a.op == PAR:
        out.update((a.left, a.right))
    return out


def in_E(a: Formula, n_max: int, ann: Ann = OMEGA, probe: Iterable[Ordinal] = ()) -> bool:
    """Whether ``R_n ~>* a`` for some ``n <= n_max`` (annotation ``ann`` on every binder).

    For limit annotations the unfolding ordinals tried are those below the
    binder that occur in ``a``, the naturals up to the largest natural in
    ``a`` plus one, and ``probe``.
    """
    ann = as_ordinal(ann) if isinstance(ann, (int, str)) else ann
    finite = [x.nat for x in annotations(a) if isinstance(x, Ordinal) and x.nat is not None]
    cands = set(probe) | {x for x in annotations(a) if isinstance(x, Ordinal)}
    cands |= {nat(g) for g in range(max(finite, default=0) + 2)}
    target_size = size(a)
    seen: set[Formula] = set()
    todo = [rho_formula(n, ann) for n in range(n_max + 1)]
    while todo:
        f = todo.pop()
        if f == a:
            return True
        if f in seen:
            continue
        seen.add(f)
        for g in rewrites(f, cands):
            if g not in seen and _reachable_size(g, target_size):
                todo.append(g)
    return False


def _reachable_size(f: Formula, target: int) -> bool:
    # a leaf has no successors, so it only helps if it is the target itself
    return not (isinstance(f, (Var, Atom)) and size(f) < target)


# -- differential check ---------------------------------------------------------------------


def goal_any_output() -> Formula:
    """``Pass + (~t * T)``: accept whatever the counters hold at the end."""
    return plus(pass_(), tensor(negate(T_SYM), TOP))


def goal_zero_output() -> Formula:
    """``Pass + (~t * 1)``: accept only with every counter empty."""
    return plus(pass_(), tensor(negate(T_SYM), ONE))


@dataclass
class Report:
    machine: str
    inputs: tuple[int, ...]
    k: int
    provable: bool | None
    reachable: bool
    predicted: bool
    status: Status
    nodes: int
    plain_nodes: int | None = None

    @property
    def agrees(self) -> bool:
        return self.status is not Status.RESOURCE and self.provable == self.predicted

    def as_dict(self) -> dict:
        return {
            "machine": self.machine, "inputs": list(self.inputs), "k": self.k,
            "provable": self.provable, "reachable": self.reachable, "predicted": self.predicted,
            "agrees": self.agrees, "status": self.status.value, "nodes": self.nodes,
            "plain_nodes": self.plain_nodes,
        }


def _goal_accepts(goal: Formula, output: Sequence[int]) -> bool:
    seq = [goal, *tup(output), T_SYM]
    return decide(seq).provable


def comp_provability_matches_reachability(m: MinskyMachine, n: Sequence[int], k: int,
                                          goal: Formula | None = None, *, limits: SearchLimits | None = None,
                                          plain: bool = False, z_bound: Ann | None = None) -> Report:
    """Search for a proof of ``G, tup(n), s, Comp_k`` and compare with simulation.

    ``predicted`` holds when some accepting configuration reachable in fewer
    than ``k`` steps has an output that ``G`` accepts, i.e. ``G, tup(out), t``
    is provable.  For the default goal that is plain reachability.
    """
    goal = goal if goal is not None else goal_any_output()
    if not is_locked({"t", "key1"}, goal):
        raise MachineError("the goal formula must be {t, key1}-locked")
    n = tuple(n)
    if z_bound is None:
        z_bound = nat(sum(n) + k + m.counters + 1)
    seq = encoded_sequent(m, n, nat(k), goal, z_bound)
    res = focused_decide(seq, limits)
    plain_nodes = None
    if plain:
        plain_nodes = decide(seq, limits).nodes
    accepting = [c for c in reachable_configs(m, m.initial(n), k) if c.state == m.accept]
    reachable = bool(accepting)
    predicted = any(_goal_accepts(goal, c.counters) for c in accepting)
    provable = None if res.status is Status.RESOURCE else res.provable
    return Report(m.name, n, k, provable, reachable, predicted, res.status, res.nodes, plain_nodes)


# -- a small machine suite --------------------------------------------------------------------


def machine_suite() -> list[MinskyMachine]:
    return [
        MinskyMachine(1, ("s", "f"), "s", "f", (Inc("s", 0, "f"),), "successor"),
        MinskyMachine(2, ("s", "m", "f"), "s", "f", (Inc("s", 1, "m"), Jzdec("m", 1, "f", "f")), "identity"),
        MinskyMachine(1, ("s", "a", "f"), "s", "f", (Inc("s", 0, "a"), Inc("a", 0, "f")), "add-two"),
        MinskyMachine(1, ("s", "f"), "s", "f", (Jzdec("s", 0, "s", "f"),), "zero-test"),
        MinskyMachine(2, ("s", "d", "f"), "s", "f", (Inc("s", 0, "d"), Jzdec("d", 1, "s", "s")), "dead-state"),
    ]
