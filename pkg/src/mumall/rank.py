"""Formula ranks.

``rank_val(A, s)`` computes the ordinal rank of ``A`` under a valuation
``s`` of its free variables.  Literals and units have rank 1, binary
connectives add ``1 # left # right`` (natural sum) and a fixed point
``eta^b x. B`` takes the maximum over ``g < b`` of the body rank with ``x``
valued at the rank of ``eta^g x. B``, plus one.  ``eta^0`` has rank 1.

Exact evaluation needs finite annotations; for limit annotations use
:func:`rank_upper_bound`.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping

from . import ordinal
from .ordinal import ONE, ZERO, Ordinal, natural_product, natural_sum
from .syntax import Atom, Bin, BVar, Fix, Formula, Unit, Var, fix, var, par, MU


class ExactModeUnsupported(ValueError):
    """The formula has an annotation that is not a finite ordinal."""


class UnboundVariable(KeyError):
    pass


class Valuation:
    """A partial map from variable names to ordinals, with an optional default."""

    __slots__ = ("mapping", "default")

    def __init__(self, mapping: Mapping[str, Ordinal | int] | None = None, default: Ordinal | int | None = None):
        self.mapping = {k: ordinal.as_ordinal(v) for k, v in (mapping or {}).items()}
        self.default = None if default is None else ordinal.as_ordinal(default)

    def __call__(self, name: str) -> Ordinal:
        v = self.mapping.get(name)
        if v is not None:
            return v
        if self.default is None:
            raise UnboundVariable(name)
        return self.default

    def __contains__(self, name: str) -> bool:
        return name in self.mapping or self.default is not None

    def __repr__(self) -> str:
        body = ", ".join(f"{k}->{v}" for k, v in sorted(self.mapping.items()))
        return f"Valuation({{{body}}}, default={self.default})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Valuation) and (self.mapping, self.default) == (other.mapping, other.default)

    def __hash__(self) -> int:
        return hash((frozenset(self.mapping.items()), self.default))

    def dominates(self, other: "Valuation", names: Iterable[str]) -> bool:
        """Pointwise ``self >= other`` on the given variables."""
        return all(self(x) >= other(x) for x in names)


UNIT = Valuation(default=ONE)


def overlay(s1: Valuation, s2: Valuation) -> Valuation:
    """``s1, s2``: ``s2`` wins wherever it is defined."""
    out = Valuation()
    out.mapping = {**s1.mapping, **s2.mapping}
    if s2.default is not None:
        out.mapping = dict(s2.mapping)
        out.default = s2.default
    else:
        out.default = s1.default
    return out


def scale(g: Ordinal | int, s: Valuation) -> Valuation:
    """Pointwise natural product ``g # s``."""
    g = ordinal.as_ordinal(g)
    out = Valuation()
    out.mapping = {k: natural_product(g, v) for k, v in s.mapping.items()}
    out.default = None if s.default is None else natural_product(g, s.default)
    return out


def _finite_ann(f: Fix) -> int:
    a = f.ann
    if not isinstance(a, Ordinal) or a.nat is None:
        raise ExactModeUnsupported(f"annotation {a} is not a finite ordinal")
    return a.nat


def rank_val(a: Formula, s: Valuation = UNIT) -> Ordinal:
    memo: dict = {}
    return _rv(a, s, (), memo)


def _rv(a: Formula, s: Valuation, env: tuple, memo: dict) -> Ordinal:
    if isinstance(a, (Atom, Unit)):
        return ONE
    if isinstance(a, Var):
        return s(a.name)
    if isinstance(a, BVar):
        return env[a.index]
    key = (a, env[: a.loose])
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(a, Bin):
        out = natural_sum(ONE, natural_sum(_rv(a.left, s, env, memo), _rv(a.right, s, env, memo)))
    elif isinstance(a, Fix):
        n = _finite_ann(a)
        out = ONE
        best = None
        for _ in range(n):
            o = ordinal.add(_rv(a.body, s, (out,) + env, memo), ONE)
            if best is None or o > best:
                best = o
            out = best
    else:
        raise TypeError(a)
    memo[key] = out
    return out


@lru_cache(maxsize=1 << 16)
def _rank_closed(a: Formula) -> Ordinal:
    return rank_val(a, UNIT)


def rank(a: Formula) -> Ordinal:
    """``rank_val(a, 1)``."""
    return _rank_closed(a)


def rank_sequent(formulas: Iterable[Formula]) -> Ordinal:
    out = ZERO
    for f in formulas:
        out = natural_sum(out, rank(f))
    return out


def rank_upper_bound(a: Formula) -> Ordinal:
    """An upper bound on ``rank(a)`` valid for any annotations.

    Fixed points are bounded by ``(ub(body) + 1)`` iterated ``ann`` times
    under the natural product.
    """
    if isinstance(a, (Atom, Unit, Var, BVar)):
        return ONE
    if isinstance(a, Bin):
        return natural_sum(ONE, natural_sum(rank_upper_bound(a.left), rank_upper_bound(a.right)))
    if isinstance(a, Fix):
        if not isinstance(a.ann, Ordinal):
            raise ExactModeUnsupported(f"symbolic annotation {a.ann}")
        return ordinal.iter_natural_product(ordinal.add(rank_upper_bound(a.body), ONE), a.ann)
    raise TypeError(a)


def rho_formula(n: int, a: Ordinal | int) -> Formula:
    """``R_0 = x0`` and ``R_{k+1} = mu^a x_k. (x_{k+1} | R_k)``."""
    out: Formula = var("x0")
    for k in range(n):
        out = fix(MU, f"x{k}", a, par(var(f"x{k + 1}"), out))
    return out
