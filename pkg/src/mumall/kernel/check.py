"""Proof checking for the plain calculus, with optional cut restrictions."""

from __future__ import annotations

from dataclasses import dataclass

from ..ordinal import Ordinal, OrdVar, compare
from ..rank import ExactModeUnsupported, rank
from ..syntax import ONE, Atom, negate, ordvars
from .proof import (
    OrdContext, Proof, Reject, candidates, premise_shapes, same_multiset,
)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    path: tuple = ()
    reason: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.valid

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        where = "/".join(map(str, self.path)) or "root"
        return f"invalid at {where}: {self.reason}" + (f" ({self.detail})" if self.detail else "")


VALID = Verdict(True)


class _Fail(Exception):
    def __init__(self, path: tuple, reason: str, detail: str):
        self.path = path
        self.reason = reason
        self.detail = detail


def check_proof(p: Proof, *, cut_free: bool = False, cut_bound: Ordinal | None = None,
                context: OrdContext | None = None) -> Verdict:
    """Check every node of ``p``.

    ``cut_free`` rejects any cut; ``cut_bound`` rejects cuts whose formula
    has rank at least the bound.  ``context`` supplies facts about free
    ordinal variables.
    """
    try:
        _check(p, (), context or OrdContext(), cut_free, cut_bound)
    except _Fail as e:
        return Verdict(False, e.path, e.reason, e.detail)
    return VALID


def _check(p: Proof, path: tuple, ctx: OrdContext, cut_free: bool, cut_bound) -> None:
    try:
        _local(p, ctx, cut_free, cut_bound)
    except Reject as r:
        raise _Fail(path, r.reason, r.detail) from None
    if p.schematic is not None:
        s = p.schematic
        inner = ctx.extend((OrdVar(s.var), s.bound), *s.constraints)
        _check(s.body, path + (0,), inner, cut_free, cut_bound)
        return
    for i, k in enumerate(p.premises):
        _check(k, path + (i,), ctx, cut_free, cut_bound)


def _local(p: Proof, ctx: OrdContext, cut_free: bool, cut_bound) -> None:
    c = p.conclusion
    r = p.rule
    if r == "id":
        if len(c) != 2 or not isinstance(c[0], Atom) or c[1] != negate(c[0]):
            raise Reject("bad-conclusion", "id concludes exactly p, ~p")
        _arity(p, 0)
        return
    if r == "one":
        if tuple(c) != (ONE,):
            raise Reject("bad-conclusion", "the 1 rule concludes exactly 1")
        _arity(p, 0)
        return
    if r == "cut":
        if cut_free:
            raise Reject("cut-in-cut-free", "cut node in a cut-free proof")
        if p.cut is None:
            raise Reject("bad-conclusion", "cut without a cut formula")
        if cut_bound is not None:
            try:
                rk = rank(p.cut)
            except ExactModeUnsupported as e:
                raise Reject("rank-inexpressible", str(e)) from None
            if compare(rk, cut_bound) >= 0:
                raise Reject("cut-rank-exceeded", f"rank {rk} >= {cut_bound}")
    cands = candidates(p)
    if not cands:
        if r not in ("bot", "top", "par", "with", "plus", "tensor", "mu", "nu", "cut"):
            raise Reject("unknown-rule", repr(r))
        raise Reject("bad-conclusion", f"no formula fits rule {r}")
    if p.principal is not None:
        if p.principal not in cands:
            raise Reject("bad-conclusion", f"principal {p.principal} does not fit rule {r}")
        cands = [p.principal]
    first: Reject | None = None
    for j in cands:
        try:
            _instance(p, j, ctx)
            return
        except Reject as e:
            first = first or e
    raise first


def _arity(p: Proof, n: int) -> None:
    if p.schematic is not None or len(p.premises) != n:
        raise Reject("wrong-premise-count", f"{p.rule} takes {n} premises")


def _instance(p: Proof, j: int, ctx: OrdContext) -> None:
    r = p.rule
    if r == "top":
        _arity(p, 0)
        return
    if r == "nu" and p.schematic is not None:
        if p.premises:
            raise Reject("wrong-premise-count", "schematic nu node with explicit premises")
        f = p.conclusion[j]
        s = p.schematic
        if s.bound != f.ann:
            raise Reject("schematic-violation", f"bound {s.bound} differs from annotation {f.ann}")
        if s.var in ctx.variables() or any(s.var in ordvars(g) for g in p.conclusion):
            raise Reject("schematic-violation", f"ordinal variable {s.var} is not fresh")
        inner = ctx.extend((OrdVar(s.var), s.bound))
        for a, b in s.constraints:
            if not inner.lt(a, b):
                raise Reject("schematic-violation", f"constraint {a} < {b} is not entailed")
    if r == "mu":
        f = p.conclusion[j]
        if p.gamma is None or not ctx.lt(p.gamma, f.ann):
            raise Reject("annotation-violation", f"gamma {p.gamma} is not below {f.ann}")
    shapes = premise_shapes(p, j)
    kids = p.children()
    if len(kids) != len(shapes):
        raise Reject("wrong-premise-count", f"{r} needs {len(shapes)} premises, has {len(kids)}")
    for k, (idx, aux) in zip(kids, shapes):
        want = [p.conclusion[i] for i in idx] + aux
        if not same_multiset(k.conclusion, want):
            reason = "bad-split" if r in ("tensor", "cut") else "bad-conclusion"
            raise Reject(reason, "premise does not match the rule instance")
