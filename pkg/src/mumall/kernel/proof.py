"""Proof trees for the one-sided sequent calculus.

A :class:`Proof` node stores its conclusion as an ordered tuple, but
all checks treat it as a multiset.  ``principal`` is the index of the
formula the rule acts on; ``split`` (tensor and cut) lists, for each
premise, the conclusion indices of the context formulas sent there.

A nu node either has explicit premises (one per ``g < b``, ``b``
finite) or a single :class:`Schematic` premise: a template proof in
which the ordinal variable ``var`` stands for an arbitrary ``g < b``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Sequence

from ..ordinal import Ordinal, OrdVar, compare, nat
from ..syntax import (
    BOT, MU, NU, PAR, PLUS, TENSOR, TOP, WITH,
    Ann, Atom, Bin, Fix, Formula, negate, subst_ordvar, unfold,
)

RULES = ("id", "one", "bot", "top", "tensor", "par", "plus", "with", "cut", "mu", "nu")


class ProofError(ValueError):
    pass


class Unsupported(ProofError):
    """The requested construction needs something outside the supported fragment."""


@dataclass(frozen=True, eq=False)
class Schematic:
    var: str
    bound: Ann
    body: "Proof"
    constraints: tuple[tuple[Ann, Ann], ...] = ()


@dataclass(frozen=True, eq=False)
class Proof:
    conclusion: tuple[Formula, ...]
    rule: str
    premises: tuple["Proof", ...] = ()
    principal: int | None = None
    side: int | None = None
    gamma: Ann | None = None
    split: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    cut: Formula | None = None
    schematic: Schematic | None = field(default=None)

    def children(self) -> tuple["Proof", ...]:
        if self.schematic is not None:
            return (self.schematic.body,)
        return self.premises

    def nodes(self) -> Iterator["Proof"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children()))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def height(self) -> int:
        kids = self.children()
        return 1 + max((k.height() for k in kids), default=0)

    def __repr__(self) -> str:
        from ..syntax import format_sequent
        return f"Proof({self.rule}: {format_sequent(self.conclusion)})"


def has_cut(p: Proof) -> bool:
    return any(n.rule == "cut" for n in p.nodes())


def same_multiset(a: Sequence[Formula], b: Sequence[Formula]) -> bool:
    return len(a) == len(b) and Counter(a) == Counter(b)


# -- ordinal constraints ----------------------------------------------------


class OrdContext:
    """Strict inequalities between ordinal expressions, closed transitively.

    Concrete ordinals are compared directly; ``lt`` searches for a chain
    of facts and constant comparisons containing at least one strict step.
    """

    def __init__(self, facts: tuple[tuple[Ann, Ann], ...] = ()):
        self.facts = tuple(facts)

    def extend(self, *facts: tuple[Ann, Ann]) -> "OrdContext":
        return OrdContext(self.facts + tuple(facts))

    def variables(self) -> set[str]:
        return {x.name for f in self.facts for x in f if isinstance(x, OrdVar)}

    def lt(self, a: Ann, b: Ann) -> bool:
        if isinstance(a, Ordinal) and isinstance(b, Ordinal):
            return compare(a, b) < 0
        return self._reach(a, b, strict=True)

    def le(self, a: Ann, b: Ann) -> bool:
        if a == b:
            return True
        return self.lt(a, b)

    def _reach(self, a: Ann, b: Ann, strict: bool) -> bool:
        consts = {x for f in self.facts for x in f if isinstance(x, Ordinal)}
        for x in (a, b):
            if isinstance(x, Ordinal):
                consts.add(x)
        seen = set()
        todo = [(a, False)]
        while todo:
            node, s = todo.pop()
            if node == b and (s or not strict):
                return True
            if (node, s) in seen:
                continue
            seen.add((node, s))
            for x, y in self.facts:
                if x == node:
                    todo.append((y, True))
            if isinstance(node, Ordinal):
                for c in consts:
                    r = compare(node, c)
                    if r < 0:
                        todo.append((c, True))
        return False


# -- local rule semantics ----------------------------------------------------


class Reject(Exception):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


_SHAPE = {
    "bot": lambda f: f == BOT,
    "top": lambda f: f == TOP,
    "par": lambda f: isinstance(f, Bin) and f.op == PAR,
    "with": lambda f: isinstance(f, Bin) and f.op == WITH,
    "plus": lambda f: isinstance(f, Bin) and f.op == PLUS,
    "tensor": lambda f: isinstance(f, Bin) and f.op == TENSOR,
    "mu": lambda f: isinstance(f, Fix) and f.kind == MU,
    "nu": lambda f: isinstance(f, Fix) and f.kind == NU,
}


def candidates(p: Proof) -> list[int]:
    """Indices that could be principal for the node's rule."""
    c = p.conclusion
    if p.rule == "cut":
        return [-1]  # a cut has no principal formula in its conclusion
    if p.rule in ("id", "one"):
        return [0] if c else []
    test = _SHAPE.get(p.rule)
    if test is None:
        return []
    return [i for i, f in enumerate(c) if test(f)]


def premise_shapes(p: Proof, j: int) -> list[tuple[list[int], list[Formula]]]:
    """For principal ``j``: per premise, (context indices, auxiliary formulas).

    Raises :class:`Reject` when the parameters cannot describe any instance.
    """
    c = p.conclusion
    r = p.rule
    ctx = [i for i in range(len(c)) if i != j]
    if r in ("id", "one", "top"):
        return []
    if r == "cut":
        if p.cut is None:
            raise Reject("bad-conclusion", "cut without a cut formula")
        allidx = list(range(len(c)))
        s = p.split if p.split is not None else _infer_split(p, None, p.cut, negate(p.cut), allidx)
        _check_partition(s, allidx)
        return [(list(s[0]), [p.cut]), (list(s[1]), [negate(p.cut)])]
    if not 0 <= j < len(c):
        raise Reject("bad-conclusion", f"principal index {j} out of range")
    f = c[j]
    if r == "bot":
        return [(ctx, [])]
    if r == "par":
        return [(ctx, [f.left, f.right])]
    if r == "with":
        return [(ctx, [f.left]), (ctx, [f.right])]
    if r == "plus":
        if p.side not in (0, 1):
            raise Reject("bad-side", f"side {p.side!r}")
        return [(ctx, [f.left if p.side == 0 else f.right])]
    if r == "tensor":
        s = p.split if p.split is not None else _infer_split(p, j, f.left, f.right, ctx)
        _check_partition(s, ctx)
        return [(list(s[0]), [f.left]), (list(s[1]), [f.right])]
    if r == "mu":
        if p.gamma is None:
            raise Reject("annotation-violation", "mu step without gamma")
        return [(ctx, [unfold(f, p.gamma)])]
    if r == "nu":
        if p.schematic is not None:
            return [(ctx, [unfold(f, OrdVar(p.schematic.var))])]
        b = f.ann
        if not isinstance(b, Ordinal) or b.nat is None:
            raise Reject("wrong-premise-count", f"nu^{b} needs a schematic premise")
        return [(ctx, [unfold(f, nat(g))]) for g in range(b.nat)]
    raise Reject("unknown-rule", r)


def _check_partition(s, idx: list[int]) -> None:
    if s is None or len(s) != 2:
        raise Reject("bad-split", "split must have two parts")
    flat = list(s[0]) + list(s[1])
    if sorted(flat) != sorted(idx) or len(set(flat)) != len(flat):
        raise Reject("bad-split", f"split {s} does not partition {idx}")


def _infer_split(p: Proof, j, a: Formula, b: Formula, idx: list[int]):
    if len(p.premises) != 2:
        raise Reject("wrong-premise-count", f"{p.rule} needs 2 premises")
    m0 = Counter(p.premises[0].conclusion)
    m1 = Counter(p.premises[1].conclusion)
    if m0[a] < 1 or m1[b] < 1:
        raise Reject("bad-split", "premises lack the auxiliary formulas")
    m0[a] -= 1
    m1[b] -= 1
    s0, s1 = [], []
    for i in idx:
        f = p.conclusion[i]
        if m0[f] > 0:
            m0[f] -= 1
            s0.append(i)
        else:
            s1.append(i)
    return (tuple(s0), tuple(s1))


def principal_of(p: Proof) -> int:
    """The principal index, inferring it (first workable candidate) if unset."""
    if p.principal is not None:
        return p.principal
    for j in candidates(p):
        try:
            shapes = premise_shapes(p, j)
        except Reject:
            continue
        kids = p.children()
        if len(kids) == len(shapes) and all(
            same_multiset(k.conclusion, [p.conclusion[i] for i in ctx] + aux)
            for k, (ctx, aux) in zip(kids, shapes)
        ):
            return j
    raise ProofError(f"cannot determine the principal formula of {p!r}")


def complete(p: Proof) -> Proof:
    """Fill in missing principal indices and splits throughout the tree."""
    kids = tuple(complete(k) for k in p.premises)
    sch = p.schematic
    if sch is not None:
        sch = replace(sch, body=complete(sch.body))
    q = replace(p, premises=kids, schematic=sch)
    try:
        j = principal_of(q)
    except ProofError:
        return q
    q = replace(q, principal=j)
    if q.rule in ("tensor", "cut") and q.split is None:
        try:
            shapes = premise_shapes(q, j)
            q = replace(q, split=(tuple(shapes[0][0]), tuple(shapes[1][0])))
        except Reject:
            pass
    return q


def links(p: Proof) -> list[dict[int, int]]:
    """Per child: map from conclusion index to premise index, for context formulas."""
    j = principal_of(p)
    out = []
    for kid, (ctx, _aux) in zip(p.children(), premise_shapes(p, j)):
        used: set[int] = set()
        m: dict[int, int] = {}
        pc = kid.conclusion
        for i in ctx:
            f = p.conclusion[i]
            for q, g in enumerate(pc):
                if q not in used and g == f:
                    used.add(q)
                    m[i] = q
                    break
            else:
                raise ProofError(f"premise of {p!r} lacks context formula {f}")
        out.append(m)
    return out


# -- builders ------------------------------------------------------------------


def node(rule: str, conclusion: Sequence[Formula], premises: Sequence[Proof] = (), **kw) -> Proof:
    """Build a node, inferring ``principal`` and ``split`` when omitted."""
    p = Proof(tuple(conclusion), rule, tuple(premises), **kw)
    if p.principal is None:
        p = replace(p, principal=principal_of(p))
    if p.rule in ("tensor", "cut") and p.split is None:
        shapes = premise_shapes(p, p.principal)
        p = replace(p, split=(tuple(shapes[0][0]), tuple(shapes[1][0])))
    return p


def id_proof(a: Formula, b: Formula) -> Proof:
    return Proof((a, b), "id", principal=0)


def cut_node(left: Proof, right: Proof, a: Formula) -> Proof:
    """Cut ``left`` (proving Sigma, a) against ``right`` (proving Pi, ~a)."""
    na = negate(a)
    lc = list(left.conclusion)
    lc.pop(lc.index(a))
    rc = list(right.conclusion)
    rc.pop(rc.index(na))
    n0 = len(lc)
    return Proof(
        tuple(lc + rc), "cut", (left, right), principal=-1,
        split=(tuple(range(n0)), tuple(range(n0, n0 + len(rc)))), cut=a,
    )


# -- ancestor replacement -------------------------------------------------------

Repair = Callable[[Proof, int], Proof]


def replace_occurrence(p: Proof, k: int, cedent: Sequence[Formula], repair: Repair) -> Proof:
    """Replace the occurrence ``k`` of the conclusion and all its direct ancestors.

    The result proves ``conclusion - k + cedent``.  Wherever the occurrence
    is principal, ``repair(node, index)`` must return a proof of that
    node's conclusion with the index removed and ``cedent`` added.
    """
    cedent = tuple(cedent)
    if p.rule in ("id", "one"):
        return repair(p, k)
    j = principal_of(p)
    if j == k:
        return repair(p, k)
    lk = links(p)
    kids = p.children()
    new_kids = []
    for kid, m in zip(kids, lk):
        if k in m:
            new_kids.append(replace_occurrence(kid, m[k], cedent, repair))
        else:
            new_kids.append(kid)
    c = p.conclusion
    n = len(c)
    new_idx = tuple(range(n - 1, n - 1 + len(cedent)))

    def r(i: int) -> int:
        return i if i < k else i - 1

    split = p.split
    if p.rule in ("tensor", "cut"):
        if split is None:
            shapes = premise_shapes(p, j)
            split = (tuple(shapes[0][0]), tuple(shapes[1][0]))
        split = tuple(
            tuple(r(i) for i in part if i != k) + (new_idx if k in part else ())
            for part in split
        )
    kw = dict(conclusion=c[:k] + c[k + 1:] + cedent, principal=r(j), split=split)
    if p.schematic is not None:
        return replace(p, schematic=replace(p.schematic, body=new_kids[0]), **kw)
    return replace(p, premises=tuple(new_kids), **kw)


def find(conclusion: Sequence[Formula], f: Formula) -> int:
    for i, g in enumerate(conclusion):
        if g == f:
            return i
    raise ProofError(f"{f} does not occur in the conclusion")


# -- schematic instantiation ----------------------------------------------------


def _subst_ann(a, name: str, value: Ann):
    if isinstance(a, OrdVar) and a.name == name:
        return value
    return a


def subst_proof(p: Proof, name: str, value: Ann) -> Proof:
    """Replace the ordinal variable ``name`` by ``value`` throughout a proof."""
    sch = p.schematic
    if sch is not None:
        if sch.var == name:
            raise ProofError(f"ordinal variable {name} is rebound")
        sch = Schematic(
            sch.var, _subst_ann(sch.bound, name, value), subst_proof(sch.body, name, value),
            tuple((_subst_ann(a, name, value), _subst_ann(b, name, value)) for a, b in sch.constraints),
        )
    return replace(
        p,
        conclusion=tuple(subst_ordvar(f, name, value) for f in p.conclusion),
        premises=tuple(subst_proof(k, name, value) for k in p.premises),
        gamma=_subst_ann(p.gamma, name, value) if p.gamma is not None else None,
        cut=subst_ordvar(p.cut, name, value) if p.cut is not None else None,
        schematic=sch,
    )


def instantiate_schematic(p: Proof, value: Ann) -> Proof:
    """The premise of a schematic nu node for a concrete ``value < bound``."""
    if p.schematic is None:
        raise ProofError("not a schematic node")
    return subst_proof(p.schematic.body, p.schematic.var, value)


def nu_premise(p: Proof, g: Ordinal) -> Proof:
    """Premise ``g`` of a nu node, explicit or schematic."""
    if p.schematic is not None:
        return instantiate_schematic(p, g)
    if g.nat is None or g.nat >= len(p.premises):
        raise ProofError(f"nu node has no premise {g}")
    return p.premises[g.nat]


def is_atom_pair(a: Formula, b: Formula) -> bool:
    return isinstance(a, Atom) and b == negate(a)
