"""Focussed proofs.

A focussed sequent is either ``Gamma ⇓ F`` (``focus`` set) or
``Gamma ⇑ Theta`` (``zone`` set, an ordered tuple whose last element is
the active one).  Structural rules: ``store`` moves the active zone
formula into the context, ``decide`` focuses on a context formula,
``release`` turns a focus back into a one-element zone.

The atomic axiom closes ``p ⇓ ~p`` and also ``~p ⇓ p``; without the
second form the sequent ``p, ~p`` has no focussed proof at all, since
negative literals are never decided on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable, Iterator, Sequence

from ..ordinal import Ordinal, nat
from ..syntax import (
    BOT, MU, NU, ONE, PAR, PLUS, TENSOR, TOP, WITH,
    Atom, Bin, Fix, Formula, is_negative, is_positive, negate, unfold,
)
from .check import Verdict, VALID
from .proof import OrdContext, Proof, ProofError, Reject, same_multiset

FOCUS_RULES = ("id", "store", "decide", "release", "top", "bot", "par", "with", "nu",
               "one", "plus", "tensor", "mu")
_ALIASES = {"s": "store", "d": "decide", "r": "release"}


@dataclass(frozen=True, eq=False)
class FocusProof:
    context: tuple[Formula, ...]
    rule: str
    premises: tuple["FocusProof", ...] = ()
    focus: Formula | None = None
    zone: tuple[Formula, ...] | None = None
    principal: int | None = None  # decide: context index of the decided formula
    side: int | None = None
    gamma: Ordinal | None = None
    split: tuple[int, ...] | None = None  # tensor: context indices sent left

    @property
    def is_up(self) -> bool:
        return self.zone is not None

    def sequent(self) -> tuple[Formula, ...]:
        """The underlying one-sided sequent (context plus focus or zone)."""
        return self.context + ((self.focus,) if self.focus is not None else tuple(self.zone or ()))

    def nodes(self) -> Iterator["FocusProof"]:
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.premises))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def __repr__(self) -> str:
        from ..syntax import format_sequent
        arrow = f"⇑ {format_sequent(self.zone)}" if self.is_up else f"⇓ {self.focus}"
        return f"FocusProof({self.rule}: {format_sequent(self.context)} {arrow})"


def storable(a: Formula) -> bool:
    return isinstance(a, Atom) or is_positive(a)


def releasable(a: Formula, strict: bool = False) -> bool:
    if strict:
        return is_negative(a)
    return isinstance(a, Atom) or is_negative(a)


class _Fail(Exception):
    def __init__(self, path, reason, detail=""):
        self.path, self.reason, self.detail = path, reason, detail


def check_focus_proof(p: FocusProof, *, strict_release: bool = False, dual_id: bool = True) -> Verdict:
    """Check a focussed proof.

    ``strict_release`` allows release only for negative formulas;
    ``dual_id`` admits the ``~p ⇓ p`` form of the axiom.
    """
    try:
        _walk(p, (), strict_release, dual_id)
    except _Fail as e:
        return Verdict(False, e.path, e.reason, e.detail)
    return VALID


def _walk(p: FocusProof, path, strict, dual_id) -> None:
    try:
        _local(p, strict, dual_id)
    except Reject as r:
        raise _Fail(path, r.reason, r.detail) from None
    for i, k in enumerate(p.premises):
        _walk(k, path + (i,), strict, dual_id)


def _want(k: FocusProof, context: Sequence[Formula], *, focus=None, zone=None) -> None:
    if (focus is None) != (k.focus is None) or (zone is None) != (k.zone is None):
        raise Reject("bad-conclusion", "premise has the wrong phase")
    if focus is not None and k.focus != focus:
        raise Reject("bad-conclusion", f"premise focus {k.focus} should be {focus}")
    if zone is not None and tuple(k.zone) != tuple(zone):
        raise Reject("bad-conclusion", "premise zone does not match")
    if not same_multiset(k.context, context):
        raise Reject("bad-conclusion", "premise context does not match")


def _arity(p: FocusProof, n: int) -> None:
    if len(p.premises) != n:
        raise Reject("wrong-premise-count", f"{p.rule} takes {n} premises, has {len(p.premises)}")


def _local(p: FocusProof, strict: bool, dual_id: bool) -> None:
    r = _ALIASES.get(p.rule, p.rule)
    ctx = tuple(p.context)
    if (p.focus is None) == (p.zone is None):
        raise Reject("bad-conclusion", "exactly one of focus and zone must be given")
    if p.zone is not None:
        zone = tuple(p.zone)
        if r == "decide":
            if zone:
                raise Reject("bad-conclusion", "decide needs an empty zone")
            _arity(p, 1)
            k = p.premises[0]
            j = p.principal
            if j is None:
                j = next((i for i, f in enumerate(ctx) if f == k.focus), None)
            if j is None or not 0 <= j < len(ctx):
                raise Reject("bad-conclusion", "decided formula is not in the context")
            a = ctx[j]
            if not is_positive(a):
                raise Reject("polarity-violation", f"decide on non-positive {a}")
            _want(k, ctx[:j] + ctx[j + 1:], focus=a)
            return
        if not zone:
            raise Reject("bad-conclusion", f"{r} needs a nonempty zone")
        a, rest = zone[-1], zone[:-1]
        if r == "store":
            if not storable(a):
                raise Reject("polarity-violation", f"store of {a}, which is neither positive nor a literal")
            _arity(p, 1)
            _want(p.premises[0], ctx + (a,), zone=rest)
        elif r == "top":
            if a != TOP:
                raise Reject("bad-conclusion", "active formula is not T")
            _arity(p, 0)
        elif r == "bot":
            if a != BOT:
                raise Reject("bad-conclusion", "active formula is not bot")
            _arity(p, 1)
            _want(p.premises[0], ctx, zone=rest)
        elif r == "par":
            if not (isinstance(a, Bin) and a.op == PAR):
                raise Reject("bad-conclusion", "active formula is not a par")
            _arity(p, 1)
            _want(p.premises[0], ctx, zone=rest + (a.left, a.right))
        elif r == "with":
            if not (isinstance(a, Bin) and a.op == WITH):
                raise Reject("bad-conclusion", "active formula is not a with")
            _arity(p, 2)
            _want(p.premises[0], ctx, zone=rest + (a.left,))
            _want(p.premises[1], ctx, zone=rest + (a.right,))
        elif r == "nu":
            if not (isinstance(a, Fix) and a.kind == NU):
                raise Reject("bad-conclusion", "active formula is not a nu")
            if not isinstance(a.ann, Ordinal) or a.ann.nat is None:
                raise Reject("wrong-premise-count", "focussed nu needs a finite annotation")
            _arity(p, a.ann.nat)
            for g, k in enumerate(p.premises):
                _want(k, ctx, zone=rest + (unfold(a, nat(g)),))
        elif r in FOCUS_RULES:
            raise Reject("bad-conclusion", f"{r} does not apply to an up sequent")
        else:
            raise Reject("unknown-rule", repr(r))
        return
    f = p.focus
    if r == "id":
        _arity(p, 0)
        if not isinstance(f, Atom) or len(ctx) != 1 or ctx[0] != negate(f):
            raise Reject("bad-conclusion", "id needs context exactly the dual literal")
        if not f.negated and not dual_id:
            raise Reject("polarity-violation", "id with a positive focus")
    elif r == "release":
        if not releasable(f, strict):
            raise Reject("polarity-violation", f"release of {f}")
        _arity(p, 1)
        _want(p.premises[0], ctx, zone=(f,))
    elif r == "one":
        _arity(p, 0)
        if f != ONE or ctx:
            raise Reject("bad-conclusion", "1 needs focus 1 and an empty context")
    elif r == "plus":
        if not (isinstance(f, Bin) and f.op == PLUS) or p.side not in (0, 1):
            raise Reject("bad-conclusion", "plus needs a plus focus and a side")
        _arity(p, 1)
        _want(p.premises[0], ctx, focus=f.left if p.side == 0 else f.right)
    elif r == "mu":
        if not (isinstance(f, Fix) and f.kind == MU):
            raise Reject("bad-conclusion", "focus is not a mu")
        if p.gamma is None or not OrdContext().lt(p.gamma, f.ann):
            raise Reject("annotation-violation", f"gamma {p.gamma} is not below {f.ann}")
        _arity(p, 1)
        _want(p.premises[0], ctx, focus=unfold(f, p.gamma))
    elif r == "tensor":
        if not (isinstance(f, Bin) and f.op == TENSOR):
            raise Reject("bad-conclusion", "focus is not a tensor")
        _arity(p, 2)
        left = p.split
        if left is None:
            left = _infer_left(ctx, p.premises[0].context)
        if len(set(left)) != len(left) or not all(0 <= i < len(ctx) for i in left):
            raise Reject("bad-split", f"bad split {left}")
        rest = [i for i in range(len(ctx)) if i not in set(left)]
        try:
            _want(p.premises[0], [ctx[i] for i in left], focus=f.left)
            _want(p.premises[1], [ctx[i] for i in rest], focus=f.right)
        except Reject as e:
            raise Reject("bad-split", e.detail) from None
    elif r in FOCUS_RULES:
        raise Reject("bad-conclusion", f"{r} does not apply to a focussed sequent")
    else:
        raise Reject("unknown-rule", repr(r))


def _infer_left(ctx, left_ctx) -> tuple[int, ...]:
    m = Counter(left_ctx)
    out = []
    for i, f in enumerate(ctx):
        if m[f] > 0:
            m[f] -= 1
            out.append(i)
    return tuple(out)


def erase_focus(p: FocusProof) -> Proof:
    """Forget the focussing structure, giving a plain cut-free proof."""
    r = _ALIASES.get(p.rule, p.rule)
    if r in ("store", "decide", "release"):
        return erase_focus(p.premises[0])
    concl = p.sequent()
    last = len(concl) - 1
    kids = tuple(erase_focus(k) for k in p.premises)
    if r == "id":
        return Proof(concl, "id", principal=0)
    if r == "one":
        return Proof(concl, "one", principal=0)
    if r == "top":
        return Proof(concl, "top", principal=last)
    if r in ("bot", "par", "with", "nu"):
        return Proof(concl, r, kids, principal=last)
    if r == "plus":
        return Proof(concl, "plus", kids, principal=last, side=p.side)
    if r == "mu":
        return Proof(concl, "mu", kids, principal=last, gamma=p.gamma)
    if r == "tensor":
        left = p.split if p.split is not None else _infer_left(p.context, p.premises[0].context)
        right = tuple(i for i in range(len(p.context)) if i not in set(left))
        return Proof(concl, "tensor", kids, principal=last, split=(tuple(left), right))
    raise ProofError(f"cannot erase rule {p.rule!r}")


# -- context replacement ---------------------------------------------------------

FocusRepair = Callable[[FocusProof, tuple[Formula, ...]], FocusProof]


def replace_context(p: FocusProof, k: int, cedent: Sequence[Formula], repair: FocusRepair) -> FocusProof:
    """Replace context occurrence ``k`` and its ancestors by ``cedent``.

    At each decide step on the traced occurrence, ``repair(node, new_ctx)``
    must prove ``new_ctx ⇑ ·`` where ``new_ctx`` is the node's context
    with the occurrence removed and ``cedent`` added.
    """
    cedent = tuple(cedent)
    ctx = tuple(p.context)
    new_ctx = ctx[:k] + ctx[k + 1:] + cedent
    r = _ALIASES.get(p.rule, p.rule)
    if r == "decide":
        j = p.principal
        if j is None:
            j = next(i for i, f in enumerate(ctx) if f == p.premises[0].focus)
        if j == k:
            return repair(p, new_ctx)
    if r in ("id", "one"):
        raise ProofError(f"traced occurrence reaches a {r} axiom")

    def r_idx(i: int) -> int:
        return i if i < k else i - 1

    new_kids = []
    for kid in p.premises:
        m = _ctx_links(p, kid)
        if k in m:
            new_kids.append(replace_context(kid, m[k], cedent, repair))
        else:
            new_kids.append(kid)
    kw: dict = dict(context=new_ctx, premises=tuple(new_kids))
    if r == "decide":
        kw["principal"] = r_idx(j)
    if r == "tensor":
        left = p.split if p.split is not None else _infer_left(ctx, p.premises[0].context)
        base = len(ctx) - 1
        new_left = tuple(r_idx(i) for i in left if i != k)
        if k in left:
            new_left += tuple(range(base, base + len(cedent)))
        kw["split"] = new_left
    return replace(p, **kw)


def _ctx_links(p: FocusProof, kid: FocusProof) -> dict[int, int]:
    ctx = tuple(p.context)
    r = _ALIASES.get(p.rule, p.rule)
    idx = list(range(len(ctx)))
    if r == "decide":
        j = p.principal
        if j is None:
            j = next(i for i, f in enumerate(ctx) if f == kid.focus)
        idx.remove(j)
    elif r == "tensor":
        left = p.split if p.split is not None else _infer_left(ctx, p.premises[0].context)
        left = set(left)
        idx = [i for i in idx if (i in left) == (kid is p.premises[0])]
    used: set[int] = set()
    m: dict[int, int] = {}
    for i in idx:
        for q, g in enumerate(kid.context):
            if q not in used and g == ctx[i]:
                used.add(q)
                m[i] = q
                break
    return m
