"""Proof transformations: inversion, cut reduction, cut elimination, focussing.

All of them work by following the direct ancestors of one conclusion
occurrence up the tree (:func:`~mumall.kernel.proof.replace_occurrence`)
and repairing the nodes where that occurrence is principal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .kernel.focus import FocusProof, replace_context
from .kernel.proof import (
    Proof, ProofError, Unsupported, cut_node, find, instantiate_schematic, principal_of,
    replace_occurrence,
)
from .ordinal import Ordinal, compare, nat
from .rank import ExactModeUnsupported, rank
from .syntax import (
    BOT, NU, ONE, PAR, TOP, WITH,
    Atom, Bin, Fix, Formula, is_negative, is_positive, negate, unfold,
)

# -- inversion -----------------------------------------------------------------------


def _target_kind(f: Formula) -> str:
    if f == BOT:
        return "bot"
    if isinstance(f, Bin) and f.op in (PAR, WITH):
        return "par" if f.op == PAR else "with"
    if isinstance(f, Fix) and f.kind == NU:
        return "nu"
    raise ProofError(f"{f} has no invertible rule to undo")


def invert(p: Proof, k: int, *, side: int | None = None, gamma: Ordinal | None = None) -> Proof:
    """Undo the invertible rule on occurrence ``k`` of the conclusion.

    ``bot`` is deleted, ``A | B`` becomes ``A, B``, ``A0 & A1`` becomes
    ``A_side`` and ``nu^b x.A`` becomes ``A(nu^gamma x.A)``.
    """
    if not 0 <= k < len(p.conclusion):
        raise ProofError(f"occurrence {k} out of range")
    f = p.conclusion[k]
    kind = _target_kind(f)
    if kind == "bot":
        cedent: tuple[Formula, ...] = ()
    elif kind == "par":
        cedent = (f.left, f.right)
    elif kind == "with":
        if side not in (0, 1):
            raise ProofError("inverting a with needs side 0 or 1")
        cedent = (f.left if side == 0 else f.right,)
    else:
        if gamma is None:
            raise ProofError("inverting a nu needs gamma")
        if isinstance(gamma, int):
            gamma = nat(gamma)
        if isinstance(f.ann, Ordinal) and compare(gamma, f.ann) >= 0:
            raise ProofError(f"gamma {gamma} is not below {f.ann}")
        cedent = (unfold(f, gamma),)

    def repair(node: Proof, i: int) -> Proof:
        if node.rule != kind:
            raise ProofError(f"occurrence reaches a {node.rule} step")
        if kind in ("bot", "par"):
            return node.premises[0]
        if kind == "with":
            return node.premises[side]
        if node.schematic is not None:
            return instantiate_schematic(node, gamma)
        return node.premises[gamma.nat]

    return replace_occurrence(p, k, cedent, repair)


def invert_formula(p: Proof, f: Formula, **kw) -> Proof:
    return invert(p, find(p.conclusion, f), **kw)


# -- cut reduction --------------------------------------------------------------------


@dataclass
class CutStats:
    reductions: int = 0
    rank_checks: int = 0
    rounds: int = 0
    ranks: list = field(default_factory=list)


class RankMeasureViolation(AssertionError):
    pass


def _has_schematic(p: Proof) -> bool:
    return any(n.schematic is not None for n in p.nodes())


def _rank_or_none(f: Formula):
    try:
        return rank(f)
    except ExactModeUnsupported:
        return None


def reduce_cut(pi0: Proof, pi1: Proof, a: Formula, delta: Ordinal | None = None,
               stats: CutStats | None = None, recurse: bool = False) -> Proof:
    """Turn a cut of ``pi0 |- G, a`` against ``pi1 |- D, ~a`` into a proof of ``G, D``.

    The new cuts introduced are on immediate subformulas or unfoldings of
    the cut formula, so they have smaller rank.  With ``recurse`` these are
    reduced at once (both inputs must then be cut-free).
    """
    if _has_schematic(pi0) or _has_schematic(pi1):
        raise Unsupported("cut reduction inside a schematic region")
    if is_negative(a) and not isinstance(a, Atom) or (isinstance(a, Atom) and a.negated):
        pi0, pi1, a = pi1, pi0, negate(a)
    na = negate(a)
    if delta is None:
        delta = _rank_or_none(a)
    stats = stats if stats is not None else CutStats()
    stats.reductions += 1
    k0 = find(pi0.conclusion, a)
    k1 = find(pi1.conclusion, na)
    delta_ctx = tuple(pi1.conclusion[:k1] + pi1.conclusion[k1 + 1:])
    inv_cache: dict = {}

    def inv(**kw) -> Proof:
        key = tuple(sorted(kw.items(), key=lambda t: t[0]))
        if key not in inv_cache:
            inv_cache[key] = invert(pi1, k1, **kw)
        return inv_cache[key]

    def cut(left: Proof, right: Proof, b: Formula) -> Proof:
        if delta is not None:
            rb = _rank_or_none(b)
            stats.rank_checks += 1
            if rb is None or compare(rb, delta) >= 0:
                raise RankMeasureViolation(f"new cut on {b} has rank {rb}, not below {delta}")
        if recurse:
            return reduce_cut(left, right, b, None, stats, True)
        return cut_node(left, right, b)

    def repair(node: Proof, i: int) -> Proof:
        r = node.rule
        if r == "id":
            return pi1
        if r == "one":
            if node.conclusion[i] != ONE:
                raise ProofError("traced occurrence reaches a 1 step on another formula")
            return invert(pi1, k1)
        if r == "plus":
            prem = node.premises[0]
            b = a.left if node.side == 0 else a.right
            return cut(prem, inv(side=node.side), b)
        if r == "tensor":
            p_left, p_right = node.premises
            step = cut(p_left, invert(pi1, k1), a.left)
            return cut(p_right, step, a.right)
        if r == "mu":
            b = unfold(a, node.gamma)
            return cut(node.premises[0], inv(gamma=node.gamma), b)
        raise ProofError(f"unexpected origin {r} for {a}")

    return replace_occurrence(pi0, k0, delta_ctx, repair)


def _max_cut_rank(p: Proof):
    best = None
    for n in p.nodes():
        if n.rule == "cut":
            r = _rank_or_none(n.cut)
            if r is None:
                return "inexpressible"
            if best is None or compare(r, best) > 0:
                best = r
    return best


def eliminate_cuts(p: Proof, stats: CutStats | None = None) -> Proof:
    """A cut-free proof of the same sequent.

    Cuts of the largest rank ``d`` are reduced innermost first; each
    reduction only adds cuts of rank below ``d``.  The loop then continues
    with the new largest rank.
    """
    stats = stats if stats is not None else CutStats()
    while True:
        top = _max_cut_rank(p)
        if top is None:
            return p
        if top == "inexpressible":
            # no ordinal measure available: reduce innermost cuts recursively
            return _elim_recursive(p, stats)
        stats.rounds += 1
        stats.ranks.append(top)
        p = _elim_level(p, top, stats)


def _elim_level(p: Proof, d: Ordinal, stats: CutStats) -> Proof:
    kids = tuple(_elim_level(k, d, stats) for k in p.premises)
    if p.schematic is not None:
        body = _elim_level(p.schematic.body, d, stats)
        if body is not p.schematic.body:
            raise Unsupported("cut elimination inside a schematic region")
        return p
    if any(a is not b for a, b in zip(kids, p.premises)):
        p = replace(p, premises=kids)
    if p.rule == "cut" and rank(p.cut) == d:
        return reduce_cut(kids[0], kids[1], p.cut, d, stats)
    return p


def _elim_recursive(p: Proof, stats: CutStats) -> Proof:
    if p.schematic is not None:
        if any(n.rule == "cut" for n in p.nodes()):
            raise Unsupported("cut elimination inside a schematic region")
        return p
    kids = tuple(_elim_recursive(k, stats) for k in p.premises)
    if p.rule == "cut":
        return reduce_cut(kids[0], kids[1], p.cut, None, stats, recurse=True)
    if any(a is not b for a, b in zip(kids, p.premises)):
        return replace(p, premises=kids)
    return p


# -- focussing ---------------------------------------------------------------------------


def _fp(ctx, rule, premises=(), **kw) -> FocusProof:
    return FocusProof(tuple(ctx), rule, tuple(premises), **kw)


def _remove(seq: Sequence[Formula], f: Formula) -> tuple[Formula, ...]:
    s = list(seq)
    s.remove(f)
    return tuple(s)


def _compound_positive(f: Formula) -> bool:
    return is_positive(f) and not isinstance(f, Atom)


def focus(p: Proof) -> FocusProof:
    """A focussed proof of ``· ⇑ G`` from a cut-free proof of ``G``."""
    for n in p.nodes():
        if n.rule == "cut":
            raise ProofError("focus needs a cut-free proof")
        if n.schematic is not None:
            raise Unsupported("focussing a proof with a schematic premise")
    return _F(p, (), tuple(p.conclusion))


def _F(p: Proof, ctx: tuple[Formula, ...], zone: tuple[Formula, ...]) -> FocusProof:
    """Focussed proof of ``ctx ⇑ zone`` where ``p`` proves ``ctx, zone``."""
    if zone:
        a, rest = zone[-1], zone[:-1]
        if isinstance(a, Atom) or is_positive(a):
            return _fp(ctx, "store", (_F(p, ctx + (a,), rest),), zone=zone)
        if a == TOP:
            return _fp(ctx, "top", zone=zone)
        k = find(p.conclusion, a)
        if a == BOT:
            return _fp(ctx, "bot", (_F(invert(p, k), ctx, rest),), zone=zone)
        if isinstance(a, Bin) and a.op == PAR:
            return _fp(ctx, "par", (_F(invert(p, k), ctx, rest + (a.left, a.right)),), zone=zone)
        if isinstance(a, Bin) and a.op == WITH:
            kids = tuple(_F(invert(p, k, side=i), ctx, rest + (b,)) for i, b in enumerate((a.left, a.right)))
            return _fp(ctx, "with", kids, zone=zone)
        if isinstance(a, Fix) and a.kind == NU:
            if not (isinstance(a.ann, Ordinal) and a.ann.nat is not None):
                raise Unsupported(f"focussing needs finite annotations, found {a}")
            kids = tuple(_F(invert(p, k, gamma=nat(g)), ctx, rest + (unfold(a, nat(g)),))
                         for g in range(a.ann.nat))
            return _fp(ctx, "nu", kids, zone=zone)
        raise ProofError(f"unexpected zone formula {a}")
    return _sync(p, ctx)


def _decide(ctx: tuple[Formula, ...], a: Formula, below: FocusProof) -> FocusProof:
    return _fp(ctx, "decide", (below,), zone=(), principal=ctx.index(a))


def _sync(p: Proof, ctx: tuple[Formula, ...]) -> FocusProof:
    """All of ``ctx`` is positive or literal; follow the last rule of ``p``."""
    r = p.rule
    if r == "one":
        return _decide(ctx, ONE, _fp((), "one", focus=ONE))
    if r == "id":
        a, b = p.conclusion
        pos = a if not a.negated else b
        rest = _remove(ctx, pos)
        return _decide(ctx, pos, _fp(rest, "id", focus=pos))
    j = principal_of(p)
    f = p.conclusion[j]
    rest = _remove(ctx, f)
    if r in ("plus", "mu"):
        prem = p.premises[0]
        b = (f.left if p.side == 0 else f.right) if r == "plus" else unfold(f, p.gamma)
        kw = {"side": p.side} if r == "plus" else {"gamma": p.gamma}

        def wrap(below: FocusProof, c) -> FocusProof:
            return _decide(c, f, _fp(_remove(c, f), r, (below,), focus=f, **kw))

        if not _compound_positive(b):
            return wrap(_fp(rest, "release", (_F(prem, rest, (b,)),), focus=b), ctx)
        inner = _F(prem, rest + (b,), ())
        return replace_context(inner, _at(inner, b), (f,), lambda node, nc: _rewrap(node, nc, f, wrap))
    if r == "tensor":
        s0, s1 = p.split if p.split is not None else _split_of(p, j)
        g0 = tuple(p.conclusion[i] for i in s0)
        g1 = tuple(p.conclusion[i] for i in s1)
        return _tensor(f, g0, p.premises[0], g1, p.premises[1], ctx)
    raise ProofError(f"unexpected last rule {r} in the synchronous phase")


def _split_of(p: Proof, j: int):
    from .kernel.proof import premise_shapes
    s = premise_shapes(p, j)
    return tuple(s[0][0]), tuple(s[1][0])


def _at(node: FocusProof, f: Formula) -> int:
    # _F may permute the context it was given; equal occurrences are interchangeable
    return tuple(node.context).index(f)


def _decided_premise(node: FocusProof) -> FocusProof:
    if node.rule != "decide":
        raise ProofError("expected a decide step")
    return node.premises[0]


def _rewrap(node: FocusProof, new_ctx, f: Formula, wrap) -> FocusProof:
    # ``node`` decides on the traced occurrence; focus on ``f`` instead.
    return wrap(_decided_premise(node), tuple(new_ctx))


def _tensor(f: Bin, g0, p0: Proof, g1, p1: Proof, ctx) -> FocusProof:
    a, b = f.left, f.right

    def tensor_node(c, left_proof: FocusProof, right_proof: FocusProof) -> FocusProof:
        below_ctx = _remove(c, f)
        left_idx = _match(below_ctx, left_proof.context)
        t = _fp(below_ctx, "tensor", (left_proof, right_proof), focus=f, split=left_idx)
        return _decide(c, f, t)

    def released(p: Proof, g, x: Formula) -> FocusProof:
        return _fp(g, "release", (_F(p, g, (x,)),), focus=x)

    pos_a, pos_b = _compound_positive(a), _compound_positive(b)
    if not pos_a and not pos_b:
        return tensor_node(ctx, released(p0, g0, a), released(p1, g1, b))
    if pos_a and not pos_b:
        d1 = released(p1, g1, b)
        q0 = _F(p0, g0 + (a,), ())
        return replace_context(q0, _at(q0, a), (f,) + g1,
                               lambda node, nc: tensor_node(tuple(nc), _decided_premise(node), d1))
    if pos_b and not pos_a:
        d0 = released(p0, g0, a)
        q1 = _F(p1, g1 + (b,), ())
        return replace_context(q1, _at(q1, b), (f,) + g0,
                               lambda node, nc: tensor_node(tuple(nc), d0, _decided_premise(node)))
    q0 = _F(p0, g0 + (a,), ())
    q1 = _F(p1, g1 + (b,), ())

    def outer(node0: FocusProof, nc0) -> FocusProof:
        left = _decided_premise(node0)
        return replace_context(q1, _at(q1, b), (f,) + tuple(left.context),
                               lambda node1, nc1: tensor_node(tuple(nc1), left, _decided_premise(node1)))

    return replace_context(q0, _at(q0, a), (f,) + g1, outer)


def _match(ctx: Sequence[Formula], part: Sequence[Formula]) -> tuple[int, ...]:
    from collections import Counter
    m = Counter(part)
    out = []
    for i, g in enumerate(ctx):
        if m[g] > 0:
            m[g] -= 1
            out.append(i)
    if sum(m.values()):
        raise ProofError("tensor premise context is not part of the conclusion")
    return tuple(out)
