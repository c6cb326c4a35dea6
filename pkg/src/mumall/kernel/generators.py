"""Constructions of standard derivations.

All of them go through :func:`bridge`, which proves ``~L, R`` for two
closed formulas of the same shape that differ only at fixed-point
annotations (``mu`` may grow, ``nu`` may shrink from ``L`` to ``R``) or
at positions covered by hypotheses.  Identity is ``bridge(A, A)``.

Fixed points with finite annotations get explicit premise families.
Other annotations get a schematic nu premise.  When the template would
have to contain another schematic node over the variable it introduces,
the construction needs transfinite induction and :class:`Unsupported`
is raised instead.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

from ..ordinal import Ordinal, OrdVar, compare, nat
from ..syntax import (
    BOT, MU, NU, ONE, PAR, PLUS, TENSOR, TOP, ZERO,
    Ann, Atom, Bin, BVar, Fix, Formula, Unit, fix, free_vars, negate, ordvars, substitute, unfold,
)
from .proof import OrdContext, Proof, ProofError, Schematic, Unsupported, id_proof

Hyps = Mapping[tuple[Formula, Formula], Proof]


def _finite(a: Ann) -> int | None:
    return a.nat if isinstance(a, Ordinal) else None


class _Builder:
    def __init__(self, hyps: Hyps, taken: set[str]):
        self.hyps = dict(hyps)
        self.taken = set(taken)
        self.names = (f"d{i}" for i in itertools.count())

    def fresh(self) -> str:
        for n in self.names:
            if n not in self.taken:
                self.taken.add(n)
                return n
        raise AssertionError

    def bridge(self, L: Formula, R: Formula, ctx: OrdContext, symbolic: bool) -> Proof:
        hit = self.hyps.get((L, R))
        if hit is not None:
            return hit
        nL = negate(L)
        concl = (nL, R)
        if isinstance(L, Atom) and L == R:
            return id_proof(nL, R)
        if isinstance(L, Unit) and L == R:
            if L == ONE:
                return Proof(concl, "bot", (Proof((ONE,), "one", principal=0),), principal=0)
            if L == BOT:
                return Proof(concl, "bot", (Proof((ONE,), "one", principal=0),), principal=1)
            return Proof(concl, "top", principal=0 if L == ZERO else 1)
        if isinstance(L, Bin) and isinstance(R, Bin) and L.op == R.op:
            return self._bin(L, R, ctx, symbolic)
        if isinstance(L, Fix) and isinstance(R, Fix) and L.kind == R.kind:
            return self._fix(L, R, ctx, symbolic)
        raise ProofError(f"no bridge between {L} and {R}")

    def _bin(self, L: Bin, R: Bin, ctx, sym) -> Proof:
        nL = negate(L)
        nl1, nl2 = negate(L.left), negate(L.right)
        concl = (nL, R)
        if L.op == TENSOR:
            p1 = self.bridge(L.left, R.left, ctx, sym)
            p2 = self.bridge(L.right, R.right, ctx, sym)
            t = Proof((nl1, nl2, R), "tensor", (p1, p2), principal=2, split=((0,), (1,)))
            return Proof(concl, "par", (t,), principal=0)
        if L.op == PAR:
            p1 = self.bridge(L.left, R.left, ctx, sym)
            p2 = self.bridge(L.right, R.right, ctx, sym)
            t = Proof((nL, R.left, R.right), "tensor", (p1, p2), principal=0, split=((1,), (2,)))
            return Proof(concl, "par", (t,), principal=1)
        if L.op == PLUS:
            kids = []
            for i, (a, b) in enumerate(((L.left, R.left), (L.right, R.right))):
                q = self.bridge(a, b, ctx, sym)
                kids.append(Proof((negate(a), R), "plus", (q,), principal=1, side=i))
            return Proof(concl, "with", tuple(kids), principal=0)
        kids = []
        for i, (a, b) in enumerate(((L.left, R.left), (L.right, R.right))):
            q = self.bridge(a, b, ctx, sym)
            kids.append(Proof((nL, b), "plus", (q,), principal=0, side=i))
        return Proof(concl, "with", tuple(kids), principal=1)

    def _fix(self, L: Fix, R: Fix, ctx: OrdContext, sym: bool) -> Proof:
        # mu: nu-step on ~L (bound L.ann), then mu-step on R; nu: the mirror image.
        if L.kind == MU:
            nu_idx, bound, other = 0, L.ann, R.ann
        else:
            nu_idx, bound, other = 1, R.ann, L.ann
        nL = negate(L)
        concl = (nL, R)

        def step(g: Ann, c: OrdContext, s: bool) -> Proof:
            if not c.lt(g, other):
                raise Unsupported(f"cannot show {g} < {other}")
            lu, ru = unfold(L, g), unfold(R, g)
            inner = self.bridge(lu, ru, c, s)
            if L.kind == MU:
                mid = (negate(lu), R)
                return Proof(mid, "mu", (inner,), principal=1, gamma=g)
            mid = (nL, ru)
            return Proof(mid, "mu", (inner,), principal=0, gamma=g)

        n = _finite(bound)
        if n is not None:
            kids = tuple(step(nat(g), ctx, sym) for g in range(n))
            return Proof(concl, "nu", kids, principal=nu_idx)
        recursive = L.body.loose > 0 or R.body.loose > 0
        if sym and recursive and not isinstance(bound, Ordinal):
            raise Unsupported(
                f"{L} needs induction over a symbolic bound; no finite schematic proof exists"
            )
        v = self.fresh()
        inner_ctx = ctx.extend((OrdVar(v), bound))
        body = step(OrdVar(v), inner_ctx, True)
        return Proof(concl, "nu", principal=nu_idx, schematic=Schematic(v, bound, body))


def _taken(*fs: Formula) -> set[str]:
    out: set[str] = set()
    for f in fs:
        out |= ordvars(f)
    return out


def bridge(L: Formula, R: Formula, hyps: Hyps | None = None, context: OrdContext | None = None) -> Proof:
    """Proof of ``~L, R`` (conclusion in that order)."""
    b = _Builder(hyps or {}, _taken(L, R) | (context.variables() if context else set()))
    return b.bridge(L, R, context or OrdContext(), False)


def eta_expand_identity(a: Formula) -> Proof:
    """Cut-free proof of ``~a, a`` using only atomic identities."""
    if free_vars(a):
        raise ProofError(f"identity needs a closed formula, {a} is open")
    return bridge(a, a)


def functoriality(ax: Formula, x: str, premise: Proof, b: Formula | None = None,
                  b2: Formula | None = None) -> Proof:
    """From a proof of ``~B, B'`` build a proof of ``~A(B), A(B')``.

    ``ax`` has the free variable ``x`` as its hole.  ``B`` and ``B'`` are
    read off the premise (``~B`` first) unless given.
    """
    if b is None or b2 is None:
        if len(premise.conclusion) != 2:
            raise ProofError("premise must prove a two-formula sequent")
        b, b2 = negate(premise.conclusion[0]), premise.conclusion[1]
    lhs, rhs = substitute(ax, x, b), substitute(ax, x, b2)
    if free_vars(lhs) or free_vars(rhs):
        raise ProofError("formula context has free variables besides the hole")
    return bridge(lhs, rhs, {(b, b2): premise})


def monotonicity_proof(kind: str, body: Formula, x: str, g: Ann, b: Ann) -> Proof:
    """``mu^g x.A => mu^b x.A`` or ``nu^b x.A => nu^g x.A`` for ``g <= b``.

    The conclusion is the one-sided form, negated antecedent first.
    """
    if isinstance(g, int):
        g = nat(g)
    if isinstance(b, int):
        b = nat(b)
    if isinstance(g, Ordinal) and isinstance(b, Ordinal) and compare(g, b) > 0:
        raise ProofError(f"monotonicity needs {g} <= {b}")
    small, big = fix(kind, x, g, body), fix(kind, x, b, body)
    if kind == MU:
        return bridge(small, big)
    return bridge(big, small)


NU_X = "x"


def additive_units_proof(b: Ann, context: Sequence[Formula] = (ZERO,)) -> Proof:
    """Proof of ``context, nu^b x.x``.

    With the default context this is ``T => nu^b x.x``.  Finite ``b``
    recurses down to ``nu^0``.  Other bounds need ``T`` in the context.
    """
    if isinstance(b, int):
        b = nat(b)
    ctx = tuple(context)

    def f(a: Ann) -> Formula:
        return Fix(NU, a, BVar(0), NU_X)

    n = _finite(b)
    if n is not None:
        kids = tuple(additive_units_proof(nat(g), ctx) for g in range(n))
        return Proof(ctx + (f(b),), "nu", kids, principal=len(ctx))
    if TOP not in ctx:
        raise Unsupported(f"nu^{b} x.x with a limit bound needs T in the context")
    v = "d0"
    while any(v in ordvars(a) for a in ctx):
        v += "'"
    body = Proof(ctx + (f(OrdVar(v)),), "top", principal=ctx.index(TOP))
    return Proof(ctx + (f(b),), "nu", principal=len(ctx), schematic=Schematic(v, b, body))
