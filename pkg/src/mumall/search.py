"""Cut-free proof search, plain and focussed.

With finite annotations every rule premise has a strictly smaller
sequent rank, so exhaustive backtracking terminates and a failure is a
definitive answer.  Limit ``mu`` annotations are handled by trying the
ordinals in ``SearchLimits.gamma_probe``; limit ``nu`` annotations are
only handled when the premise family is uniform (``T`` in the sequent
or a body that ignores its variable).  Either case makes failures
non-definitive.
"""

from __future__ import annotations

import enum
import itertools
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .kernel.focus import FocusProof
from .kernel.proof import Proof, Schematic
from .ordinal import Ordinal, compare, nat
from .rank import ExactModeUnsupported, rank_sequent
from .syntax import (
    BOT, MU, NU, ONE, PAR, PLUS, TENSOR, TOP, WITH, ZERO,
    Atom, Bin, Fix, Formula, Sequent, Unit, is_positive, negate, subformulas, unfold,
)


class Status(enum.Enum):
    PROVABLE = "provable"
    UNPROVABLE = "unprovable"
    RESOURCE = "resource"


@dataclass(frozen=True)
class SearchLimits:
    max_nodes: int = 2_000_000
    max_rank: Ordinal | None = None
    gamma_probe: tuple[Ordinal, ...] = ()

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")


@dataclass
class SearchResult:
    status: Status
    proof: Proof | FocusProof | None = None
    nodes: int = 0
    definitive: bool = True
    max_depth: int = 0

    @property
    def provable(self) -> bool:
        return self.status is Status.PROVABLE

    def __bool__(self) -> bool:
        return self.provable


class _Budget(Exception):
    pass


class RankIncrease(AssertionError):
    """A premise failed to have a smaller rank than its conclusion."""


# -- formula summaries used for pruning --------------------------------------------


@lru_cache(maxsize=1 << 16)
def _summary(f: Formula) -> tuple[frozenset, bool]:
    """(literals occurring in ``f``, whether ``f`` contains T or a nu)."""
    lits = set()
    absorb = False
    for g in subformulas(f):
        if isinstance(g, Atom):
            lits.add(g)
        elif g == TOP or (isinstance(g, Fix) and g.kind == NU):
            absorb = True
    return frozenset(lits), absorb


def hopeless(seq: Sequence[Formula]) -> bool:
    """A cheap sufficient test for cut-free unprovability.

    A top-level literal can only disappear through an identity with its
    dual, and a top-level ``0`` never does, unless some ``T`` or ``nu``
    can absorb it.
    """
    if not seq:
        return True
    sums = [_summary(f) for f in seq]
    if any(a for _, a in sums):
        return False
    if len(seq) == 1:
        f = seq[0]
        return f == ZERO or isinstance(f, Atom)
    for i, f in enumerate(seq):
        if f == ZERO:
            return True
        if isinstance(f, Atom):
            d = negate(f)
            if not any(d in sums[k][0] for k in range(len(seq)) if k != i):
                return True
    return False


# -- rule instances -------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    rule: str
    principal: int
    premises: tuple[Sequent, ...]
    side: int | None = None
    gamma: Ordinal | None = None
    split: tuple[tuple[int, ...], tuple[int, ...]] | None = None


def _splits(seq: Sequent, j: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    ctx = [i for i in range(len(seq)) if i != j]
    groups: list[list[int]] = []
    for i in ctx:
        if groups and seq[groups[-1][0]] == seq[i]:
            groups[-1].append(i)
        else:
            groups.append([i])
    for counts in itertools.product(*(range(len(g) + 1) for g in groups)):
        left = tuple(i for g, c in zip(groups, counts) for i in g[:c])
        right = tuple(i for g, c in zip(groups, counts) for i in g[c:])
        yield tuple(sorted(left)), tuple(sorted(right))


def _limit_gammas(b, probe: Iterable[Ordinal]) -> list[Ordinal]:
    if not isinstance(b, Ordinal):
        raise ExactModeUnsupported(f"symbolic annotation {b}")
    if b.nat is not None:
        return [nat(g) for g in range(b.nat)]
    return sorted({g for g in probe if compare(g, b) < 0}, key=lambda g: g)


def instances_at(seq: Sequent, j: int, probe: Iterable[Ordinal] = ()) -> Iterator[Instance]:
    """Every cut-free rule instance with principal occurrence ``j``.

    Limit ``nu`` annotations yield nothing (their premise family is infinite).
    """
    f = seq[j]
    rest = seq.remove_at(j)
    if isinstance(f, Atom):
        if len(seq) == 2 and seq[1 - j] == negate(f):
            yield Instance("id", j, ())
        return
    if isinstance(f, Unit):
        if f == ONE and len(seq) == 1:
            yield Instance("one", j, ())
        elif f == BOT:
            yield Instance("bot", j, (rest,))
        elif f == TOP:
            yield Instance("top", j, ())
        return
    if isinstance(f, Bin):
        if f.op == PAR:
            yield Instance("par", j, (rest.add(f.left, f.right),))
        elif f.op == WITH:
            yield Instance("with", j, (rest.add(f.left), rest.add(f.right)))
        elif f.op == PLUS:
            yield Instance("plus", j, (rest.add(f.left),), side=0)
            yield Instance("plus", j, (rest.add(f.right),), side=1)
        else:
            for left, right in _splits(seq, j):
                yield Instance(
                    "tensor", j,
                    (Sequent([seq[i] for i in left] + [f.left]), Sequent([seq[i] for i in right] + [f.right])),
                    split=(left, right),
                )
        return
    if isinstance(f, Fix):
        if f.kind == MU:
            for g in _limit_gammas(f.ann, probe):
                yield Instance("mu", j, (rest.add(unfold(f, g)),), gamma=g)
        else:
            b = f.ann
            if isinstance(b, Ordinal) and b.nat is not None:
                yield Instance("nu", j, tuple(rest.add(unfold(f, nat(g))) for g in range(b.nat)))
        return
    raise TypeError(f"cannot search with open formula {f}")


def rule_instances(seq: Iterable[Formula], probe: Iterable[Ordinal] = ()) -> Iterator[Instance]:
    """All cut-free rule instances concluding ``seq`` (one per distinct principal formula)."""
    seq = seq if isinstance(seq, Sequent) else Sequent(seq)
    seen = set()
    for j, f in enumerate(seq):
        if f in seen:
            continue
        seen.add(f)
        yield from instances_at(seq, j, probe)


def one_step_closure(s: set[Sequent], universe: Iterable[Sequent]) -> set[Sequent]:
    """Sequents of ``universe`` concluding some rule instance whose premises all lie in ``s``."""
    out = set()
    for g in universe:
        g = g if isinstance(g, Sequent) else Sequent(g)
        if any(all(p in s for p in ins.premises) for ins in rule_instances(g)):
            out.add(g)
    return out


def closure_fixpoint(universe: Iterable[Sequent]) -> tuple[set[Sequent], int]:
    """Iterate ``S -> S | D(S)`` from the empty set; returns (fixed point, rounds)."""
    universe = [g if isinstance(g, Sequent) else Sequent(g) for g in universe]
    s: set[Sequent] = set()
    rounds = 0
    while True:
        nxt = s | one_step_closure(s, universe)
        if nxt == s:
            return s, rounds
        s = nxt
        rounds += 1


def premise_closure(seeds: Iterable[Iterable[Formula]], limit: int = 100_000) -> set[Sequent]:
    """All sequents reachable from ``seeds`` by taking rule premises."""
    todo = [s if isinstance(s, Sequent) else Sequent(s) for s in seeds]
    seen: set[Sequent] = set()
    while todo:
        g = todo.pop()
        if g in seen:
            continue
        seen.add(g)
        if len(seen) > limit:
            raise ValueError("premise closure exceeds the limit")
        for ins in rule_instances(g):
            todo.extend(p for p in ins.premises if p not in seen)
    return seen


# -- plain search ---------------------------------------------------------------------

_ASYNC = ("bot", "par", "with", "nu")


def _is_async(f: Formula) -> bool:
    return f == BOT or f == TOP or (isinstance(f, Bin) and f.op in (PAR, WITH)) or (
        isinstance(f, Fix) and f.kind == NU
    )


def _finitely_annotated(seq: Sequence[Formula]) -> bool:
    from .syntax import annotations
    return all(isinstance(a, Ordinal) and a.nat is not None for f in seq for a in annotations(f))


class _Engine:
    def __init__(self, limits: SearchLimits, check_ranks: bool, prune: bool):
        self.limits = limits
        self.check_ranks = check_ranks
        self.prune = prune
        self.nodes = 0
        self.incomplete = 0
        self.max_depth = 0

    def tick(self, depth: int) -> None:
        self.nodes += 1
        if depth > self.max_depth:
            self.max_depth = depth
        if self.nodes > self.limits.max_nodes:
            raise _Budget

    def rank_check(self, concl: Sequence[Formula], premises: Sequence[Sequence[Formula]]) -> None:
        if not self.check_ranks:
            return
        try:
            r = rank_sequent(concl)
            for p in premises:
                if compare(rank_sequent(p), r) >= 0:
                    raise RankIncrease(f"premise {Sequent(p)} does not decrease the rank of {Sequent(concl)}")
        except ExactModeUnsupported:
            pass


class _Plain(_Engine):
    def __init__(self, *a):
        super().__init__(*a)
        self.memo: dict[Sequent, Proof | None] = {}

    def prove(self, seq: Sequent, depth: int) -> Proof | None:
        if seq in self.memo:
            return self.memo[seq]
        before = self.incomplete
        out = self._prove(seq, depth)
        if out is not None or self.incomplete == before:
            self.memo[seq] = out
        return out

    def _node(self, seq: Sequent, ins: Instance, kids) -> Proof:
        return Proof(seq, ins.rule, tuple(kids), principal=ins.principal, side=ins.side,
                     gamma=ins.gamma, split=ins.split)

    def _all(self, seq: Sequent, ins: Instance, depth: int) -> Proof | None:
        self.rank_check(seq, ins.premises)
        kids = []
        for p in ins.premises:
            k = self.prove(p, depth + 1)
            if k is None:
                return None
            kids.append(k)
        return self._node(seq, ins, kids)

    def _prove(self, seq: Sequent, depth: int) -> Proof | None:
        self.tick(depth)
        for j, f in enumerate(seq):
            if f == TOP:
                return Proof(seq, "top", principal=j)
        if self.prune and hopeless(seq):
            return None
        for j, f in enumerate(seq):
            if not _is_async(f):
                continue
            if isinstance(f, Fix) and not (isinstance(f.ann, Ordinal) and f.ann.nat is not None):
                return self._limit_nu(seq, j, depth)
            ins = next(instances_at(seq, j))
            return self._all(seq, ins, depth)
        seen = set()
        order = sorted(range(len(seq)), key=lambda i: _cost(seq[i]))
        for j in order:
            f = seq[j]
            if f in seen:
                continue
            seen.add(f)
            cands = instances_at(seq, j, self.limits.gamma_probe)
            if isinstance(f, Fix) and f.ann.nat is None:
                self.incomplete += 1
            if isinstance(f, Bin) and f.op == TENSOR:
                cands = sorted(cands, key=_split_order(f))
            for ins in cands:
                if self.prune and any(hopeless(p) for p in ins.premises):
                    continue
                out = self._all(seq, ins, depth)
                if out is not None:
                    return out
        return None

    def _limit_nu(self, seq: Sequent, j: int, depth: int) -> Proof | None:
        f = seq[j]
        if f.body.loose == 0:
            # The premise does not depend on the chosen ordinal.
            rest = seq.remove_at(j)
            prem = rest.add(f.body)
            k = self.prove(prem, depth + 1)
            if k is None:
                return None
            v = "g"
            return Proof(seq, "nu", principal=j, schematic=Schematic(v, f.ann, k))
        self.incomplete += 1
        return None


def _cost(f: Formula) -> tuple:
    # cheaper principal formulas first; literals and units are not principal here
    from .syntax import size
    return (0 if isinstance(f, Bin) and f.op == PLUS else 1, size(f))


def _split_order(f: Bin):
    from .syntax import size
    small_left = size(f.left) <= size(f.right)

    def key(ins: Instance):
        left, right = ins.split
        return len(left) if small_left else len(right)

    return key


def _run(engine_cls, seq: Iterable[Formula], limits: SearchLimits | None, check_ranks: bool, prune: bool,
         start) -> SearchResult:
    limits = limits or SearchLimits()
    seq = seq if isinstance(seq, Sequent) else Sequent(seq)
    if limits.max_rank is not None:
        try:
            if compare(rank_sequent(seq), limits.max_rank) > 0:
                return SearchResult(Status.RESOURCE, definitive=False)
        except ExactModeUnsupported:
            pass
    eng = engine_cls(limits, check_ranks, prune)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 100_000))
    try:
        proof = start(eng, seq)
    except _Budget:
        return SearchResult(Status.RESOURCE, nodes=eng.nodes, definitive=False, max_depth=eng.max_depth)
    finally:
        sys.setrecursionlimit(old)
    definitive = eng.incomplete == 0
    if proof is not None:
        return SearchResult(Status.PROVABLE, proof, eng.nodes, True, eng.max_depth)
    return SearchResult(Status.UNPROVABLE, None, eng.nodes, definitive, eng.max_depth)


def decide(seq: Iterable[Formula], limits: SearchLimits | None = None, *, check_ranks: bool = False,
           prune: bool = True) -> SearchResult:
    """Cut-free provability by exhaustive backtracking search."""
    return _run(_Plain, seq, limits, check_ranks, prune, lambda e, s: e.prove(s, 0))


# -- focussed search ---------------------------------------------------------------------


def _fp(ctx, rule, premises=(), **kw) -> FocusProof:
    return FocusProof(tuple(ctx), rule, tuple(premises), **kw)


class _Focused(_Engine):
    def __init__(self, *a):
        super().__init__(*a)
        self.up_memo: dict[Sequent, FocusProof | None] = {}
        self.down_memo: dict[tuple[Sequent, Formula], FocusProof | None] = {}

    def _memo(self, table, key, fn):
        if key in table:
            return table[key]
        before = self.incomplete
        out = fn()
        if out is not None or self.incomplete == before:
            table[key] = out
        return out

    # Gamma ⇑ Theta
    def up(self, ctx: Sequent, zone: tuple[Formula, ...], depth: int) -> FocusProof | None:
        if not zone:
            return self._memo(self.up_memo, ctx, lambda: self.decide_phase(ctx, depth))
        self.tick(depth)
        a, rest = zone[-1], zone[:-1]
        if self.check_ranks:
            self.rank_check(tuple(ctx) + zone, [])
        if isinstance(a, Atom) or is_positive(a):
            k = self.up(ctx.add(a), rest, depth + 1)
            return None if k is None else _fp(ctx, "store", (k,), zone=zone)
        if a == TOP:
            return _fp(ctx, "top", zone=zone)
        if a == BOT:
            k = self.up(ctx, rest, depth + 1)
            return None if k is None else _fp(ctx, "bot", (k,), zone=zone)
        if isinstance(a, Bin) and a.op == PAR:
            k = self.up(ctx, rest + (a.left, a.right), depth + 1)
            return None if k is None else _fp(ctx, "par", (k,), zone=zone)
        if isinstance(a, Bin) and a.op == WITH:
            kids = []
            for b in (a.left, a.right):
                k = self.up(ctx, rest + (b,), depth + 1)
                if k is None:
                    return None
                kids.append(k)
            return _fp(ctx, "with", kids, zone=zone)
        if isinstance(a, Fix) and a.kind == NU:
            b = a.ann
            if not (isinstance(b, Ordinal) and b.nat is not None):
                self.incomplete += 1  # focussed proofs have no schematic premises
                return None
            kids = []
            for g in range(b.nat):
                k = self.up(ctx, rest + (unfold(a, nat(g)),), depth + 1)
                if k is None:
                    return None
                kids.append(k)
            return _fp(ctx, "nu", kids, zone=zone)
        raise TypeError(f"cannot search with {a}")

    def decide_phase(self, ctx: Sequent, depth: int) -> FocusProof | None:
        self.tick(depth)
        if self.prune and hopeless(ctx):
            return None
        seen = set()
        order = sorted(range(len(ctx)), key=lambda i: _cost(ctx[i]))
        for j in order:
            a = ctx[j]
            if a in seen:
                continue
            seen.add(a)
            rest = ctx.remove_at(j)
            if isinstance(a, Atom):
                if a.negated or len(rest) != 1 or rest[0] != negate(a):
                    continue
            elif not is_positive(a):
                continue
            k = self.down(rest, a, depth + 1)
            if k is not None:
                return _fp(ctx, "decide", (k,), zone=(), principal=j)
        return None

    # Gamma ⇓ F
    def down(self, ctx: Sequent, f: Formula, depth: int) -> FocusProof | None:
        return self._memo(self.down_memo, (ctx, f), lambda: self._down(ctx, f, depth))

    def _down(self, ctx: Sequent, f: Formula, depth: int) -> FocusProof | None:
        self.tick(depth)
        if isinstance(f, Atom):
            if len(ctx) == 1 and ctx[0] == negate(f):
                return _fp(ctx, "id", focus=f)
            if not f.negated:
                return None
            k = self.up(ctx, (f,), depth + 1)
            return None if k is None else _fp(ctx, "release", (k,), focus=f)
        if not is_positive(f):
            k = self.up(ctx, (f,), depth + 1)
            return None if k is None else _fp(ctx, "release", (k,), focus=f)
        if self.prune and hopeless(tuple(ctx) + (f,)):
            return None
        if f == ONE:
            return _fp(ctx, "one", focus=f) if not ctx else None
        if f == ZERO:
            return None
        if isinstance(f, Bin) and f.op == PLUS:
            for side, b in enumerate((f.left, f.right)):
                k = self.down(ctx, b, depth + 1)
                if k is not None:
                    return _fp(ctx, "plus", (k,), focus=f, side=side)
            return None
        if isinstance(f, Fix):
            if f.ann.nat is None:
                self.incomplete += 1
            for g in _limit_gammas(f.ann, self.limits.gamma_probe):
                k = self.down(ctx, unfold(f, g), depth + 1)
                if k is not None:
                    return _fp(ctx, "mu", (k,), focus=f, gamma=g)
            return None
        # tensor
        cands = []
        for left, right in _splits_ctx(ctx):
            lseq = Sequent([ctx[i] for i in left])
            rseq = Sequent([ctx[i] for i in right])
            if not _down_possible(lseq, f.left) or not _down_possible(rseq, f.right):
                continue
            if self.prune and (hopeless(tuple(lseq) + (f.left,)) or hopeless(tuple(rseq) + (f.right,))):
                continue
            cands.append((left, lseq, rseq))
        small_left = _fsize(f.left) <= _fsize(f.right)
        cands.sort(key=lambda c: len(c[1]) if small_left else len(c[2]))
        for left, lseq, rseq in cands:
            k1 = self.down(lseq, f.left, depth + 1)
            if k1 is None:
                continue
            k2 = self.down(rseq, f.right, depth + 1)
            if k2 is None:
                continue
            return _fp(ctx, "tensor", (k1, k2), focus=f, split=left)
        return None


def _fsize(f: Formula) -> int:
    from .syntax import size
    return size(f)


def _down_possible(ctx: Sequent, f: Formula) -> bool:
    if isinstance(f, Atom) and not f.negated:
        return len(ctx) == 1 and ctx[0] == negate(f)
    if f == ONE:
        return not ctx
    return f != ZERO


def _splits_ctx(ctx: Sequent) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    groups: list[list[int]] = []
    for i in range(len(ctx)):
        if groups and ctx[groups[-1][0]] == ctx[i]:
            groups[-1].append(i)
        else:
            groups.append([i])
    for counts in itertools.product(*(range(len(g) + 1) for g in groups)):
        left = tuple(sorted(i for g, c in zip(groups, counts) for i in g[:c]))
        right = tuple(sorted(i for g, c in zip(groups, counts) for i in g[c:]))
        yield left, right


def focused_decide(seq: Iterable[Formula], limits: SearchLimits | None = None, *, check_ranks: bool = False,
                   prune: bool = True) -> SearchResult:
    """Search for a focussed proof of ``· ⇑ seq``."""
    def start(e: _Focused, s: Sequent):
        return e.up(Sequent(()), tuple(s), 0)
    return _run(_Focused, seq, limits, check_ranks, prune, start)
