"""Ordinals below epsilon-zero in Cantor normal form.

An ordinal is stored as a descending tuple of ``(exponent, coefficient)``
pairs where each exponent is itself an :class:`Ordinal`.  Values are
immutable and hash structurally, so they can be used as dictionary keys.

Besides the classical (non-commutative) operations this module provides
the natural (Hessenberg) sum and product, the iterated natural product,
and a small text syntax (``w^2*3+w+1``).
"""

from __future__ import annotations

import re
from typing import Iterable, Union

__all__ = [
    "Ordinal",
    "OrdVar",
    "OrdinalError",
    "OrdinalOverflowError",
    "OrdinalDomainError",
    "ZERO",
    "ONE",
    "OMEGA",
    "nat",
    "as_ordinal",
    "compare",
    "add",
    "mul",
    "omega_pow",
    "natural_sum",
    "natural_product",
    "natural_sum_all",
    "iter_natural_product",
    "degree",
    "lowest_degree",
    "alpha_omega_pow",
    "fundamental",
    "parse_ordinal",
    "format_ordinal",
    "set_depth_limit",
    "get_depth_limit",
]


class OrdinalError(ArithmeticError):
    pass


class OrdinalOverflowError(OrdinalError):
    """Raised when a result would exceed the configured nesting depth."""


class OrdinalDomainError(OrdinalError, ValueError):
    pass


_depth_limit = 24


def set_depth_limit(n: int) -> None:
    """Set the maximum exponent nesting depth (a stand-in for the epsilon-zero cap)."""
    global _depth_limit
    if n < 1:
        raise ValueError("depth limit must be positive")
    _depth_limit = n


def get_depth_limit() -> int:
    return _depth_limit


class Ordinal:
    __slots__ = ("terms", "depth", "nat", "_hash")

    terms: tuple[tuple["Ordinal", int], ...]
    depth: int
    nat: int | None  # the value when finite, else None

    def __init__(self, terms: tuple = (), _trusted: bool = False):
        if not _trusted:
            terms = tuple(terms)
            for i, (e, c) in enumerate(terms):
                if not isinstance(e, Ordinal) or not isinstance(c, int) or c < 1:
                    raise OrdinalDomainError(f"bad Cantor normal form term {e!r}*{c!r}")
                if i and compare(terms[i - 1][0], e) <= 0:
                    raise OrdinalDomainError("exponents must be strictly descending")
        self.terms = terms
        if not terms:
            self.depth = 0
            self.nat = 0
        else:
            self.depth = max(e.depth for e, _ in terms) + 1
            if self.depth > _depth_limit:
                raise OrdinalOverflowError(f"ordinal nesting depth exceeds {_depth_limit}")
            e0 = terms[0][0]
            self.nat = terms[0][1] if e0.nat == 0 else None
        self._hash = hash(terms)

    # -- basic protocol -------------------------------------------------

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if isinstance(other, Ordinal):
            return self._hash == other._hash and self.terms == other.terms
        if isinstance(other, int) and not isinstance(other, bool):
            return self.nat == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        return compare(self, _coerce(other)) < 0

    def __le__(self, other) -> bool:
        return compare(self, _coerce(other)) <= 0

    def __gt__(self, other) -> bool:
        return compare(self, _coerce(other)) > 0

    def __ge__(self, other) -> bool:
        return compare(self, _coerce(other)) >= 0

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({self})"

    def __str__(self) -> str:
        return format_ordinal(self)

    # -- structure ------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.nat is not None

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].nat != 0

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].nat == 0

    def predecessor(self) -> "Ordinal":
        if not self.is_successor:
            raise OrdinalDomainError(f"{self} has no predecessor")
        head, (e, c) = self.terms[:-1], self.terms[-1]
        return _make(head + (((e, c - 1),) if c > 1 else ()))

    def split_finite(self) -> tuple["Ordinal", int]:
        """Return ``(lam, n)`` with ``self == lam + n`` and ``lam`` zero or a limit."""
        if self.is_successor:
            return _make(self.terms[:-1]), self.terms[-1][1]
        return self, 0


OrdExpr = Union[Ordinal, "OrdVar"]


class OrdVar:
    """A symbolic ordinal variable, used in schematic proof templates."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name) or name == "w":
            raise ValueError(f"bad ordinal variable name {name!r}")
        self.name = name

    def __eq__(self, other) -> bool:
        return isinstance(other, OrdVar) and other.name == self.name

    def __hash__(self) -> int:
        return hash(("OrdVar", self.name))

    def __repr__(self) -> str:
        return f"OrdVar({self.name!r})"

    def __str__(self) -> str:
        return self.name


_small: list[Ordinal] = []


def nat(n: int) -> Ordinal:
    if n < 0:
        raise OrdinalDomainError("negative ordinal")
    if n < len(_small):
        return _small[n]
    return Ordinal(((ZERO, n),), _trusted=True)


ZERO = Ordinal((), _trusted=True)
_small.append(ZERO)
for _i in range(1, 257):
    _small.append(Ordinal(((ZERO, _i),), _trusted=True))
ONE = _small[1]
OMEGA = Ordinal(((ONE, 1),), _trusted=True)


def _coerce(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return nat(x)
    raise TypeError(f"not an ordinal: {x!r}")


def as_ordinal(x: Union[Ordinal, int, str]) -> Ordinal:
    """Coerce an int, ordinal or ordinal text into an :class:`Ordinal`."""
    if isinstance(x, str):
        return parse_ordinal(x)
    return _coerce(x)


def _make(terms: tuple) -> Ordinal:
    if len(terms) == 1 and terms[0][0].nat == 0 and terms[0][1] < len(_small):
        return _small[terms[0][1]]
    return Ordinal(terms, _trusted=True)


# -- order ------------------------------------------------------------------


def compare(a: Ordinal, b: Ordinal) -> int:
    """Three-way comparison: -1, 0 or 1."""
    if a is b:
        return 0
    if a.nat is not None and b.nat is not None:
        return (a.nat > b.nat) - (a.nat < b.nat)
    for (e1, c1), (e2, c2) in zip(a.terms, b.terms):
        r = compare(e1, e2)
        if r:
            return r
        if c1 != c2:
            return 1 if c1 > c2 else -1
    return (len(a.terms) > len(b.terms)) - (len(a.terms) < len(b.terms))


def _max(a: Ordinal, b: Ordinal) -> Ordinal:
    return a if compare(a, b) >= 0 else b


# -- classical arithmetic ------------------------------------------------------


def omega_pow(b: Ordinal | int, coeff: int = 1) -> Ordinal:
    """Return ``w^b * coeff``."""
    b = _coerce(b)
    if coeff < 1:
        raise OrdinalDomainError("coefficient must be positive")
    return _make(((b, coeff),))


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    if not a.terms:
        return b
    if a.nat is not None and b.nat is not None:
        return nat(a.nat + b.nat)
    e, c = b.terms[0]
    kept = []
    for x, k in a.terms:
        r = compare(x, e)
        if r > 0:
            kept.append((x, k))
        else:
            if r == 0:
                c += k
            break
    return _make(tuple(kept) + ((e, c),) + b.terms[1:])


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if not a.terms or not b.terms:
        return ZERO
    if a.nat is not None and b.nat is not None:
        return nat(a.nat * b.nat)
    e1, k1 = a.terms[0]
    out = ZERO
    for f, c in b.terms:
        if f.nat == 0:
            piece = _make(((e1, k1 * c),) + a.terms[1:])
        else:
            piece = _make(((add(e1, f), c),))
        out = add(out, piece)
    return out


# -- natural operations --------------------------------------------------------


def natural_sum(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    if not a.terms:
        return b
    if a.nat is not None and b.nat is not None:
        return nat(a.nat + b.nat)
    out = []
    i = j = 0
    ta, tb = a.terms, b.terms
    while i < len(ta) and j < len(tb):
        r = compare(ta[i][0], tb[j][0])
        if r > 0:
            out.append(ta[i])
            i += 1
        elif r < 0:
            out.append(tb[j])
            j += 1
        else:
            out.append((ta[i][0], ta[i][1] + tb[j][1]))
            i += 1
            j += 1
    out.extend(ta[i:])
    out.extend(tb[j:])
    return _make(tuple(out))


def natural_product(a: Ordinal, b: Ordinal) -> Ordinal:
    if not a.terms or not b.terms:
        return ZERO
    if a.nat is not None and b.nat is not None:
        return nat(a.nat * b.nat)
    acc: dict[Ordinal, int] = {}
    for e, c in a.terms:
        for f, d in b.terms:
            x = natural_sum(e, f)
            acc[x] = acc.get(x, 0) + c * d
    exps = sorted(acc, reverse=True)
    return _make(tuple((x, acc[x]) for x in exps))


def degree(a: Ordinal) -> Ordinal:
    if not a.terms:
        raise OrdinalDomainError("degree of zero")
    return a.terms[0][0]


def lowest_degree(a: Ordinal) -> Ordinal:
    if not a.terms:
        raise OrdinalDomainError("lowest degree of zero")
    return a.terms[-1][0]


def alpha_omega_pow(a: Ordinal) -> Ordinal:
    """``a^w`` for ``a >= w``, which equals ``w^(deg(a)*w)``."""
    if a.nat is not None:
        raise OrdinalDomainError("alpha_omega_pow needs an infinite argument")
    return omega_pow(mul(degree(a), OMEGA))


def _div_omega(lam: Ordinal) -> Ordinal:
    # lam is a limit (all exponents >= 1); return the unique x with w*x == lam.
    out = []
    for e, c in lam.terms:
        out.append((nat(e.nat - 1) if e.nat is not None else e, c))
    return _make(tuple(out))


def _iter_finite(a: Ordinal, n: int) -> Ordinal:
    out = ONE
    base = a
    while n:
        if n & 1:
            out = natural_product(out, base)
        n >>= 1
        if n:
            base = natural_product(base, base)
    return out


def iter_natural_product(a: Ordinal, b: Ordinal) -> Ordinal:
    """The iterated natural product ``a^(#b)``.

    Successor steps multiply by ``a`` and limit steps take suprema.  For a
    limit part ``lam`` of ``b`` the value is computed in closed form:
    ``w^(w^e * lam)`` when ``a`` is infinite with ``deg(deg(a)) = e``, and
    ``w^(lam / w)`` when ``a`` is finite and at least 2.
    """
    a, b = _coerce(a), _coerce(b)
    lam, n = b.split_finite()
    if not lam.terms:
        return _iter_finite(a, n)
    if not a.terms:
        raise OrdinalDomainError("0 raised to a limit iterated product")
    if a.nat == 1:
        return ONE
    if a.nat is not None:
        head = omega_pow(_div_omega(lam))
    else:
        head = omega_pow(mul(omega_pow(degree(degree(a))), lam))
    return natural_product(head, _iter_finite(a, n))


def fundamental(lam: Ordinal, n: int) -> Ordinal:
    """The n-th element of the standard fundamental sequence of a limit."""
    if not lam.is_limit:
        raise OrdinalDomainError(f"{lam} is not a limit")
    e, c = lam.terms[-1]
    prefix = _make(lam.terms[:-1] + (((e, c - 1),) if c > 1 else ()))
    if e.is_successor:
        step = mul(omega_pow(e.predecessor()), nat(n)) if n else ZERO
        return add(prefix, step)
    return add(prefix, omega_pow(fundamental(e, n)))


# -- text ---------------------------------------------------------------------


def format_ordinal(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if e.nat == 0:
            parts.append(str(c))
            continue
        if e.nat == 1:
            base = "w"
        elif e.nat is not None or e == OMEGA:
            base = f"w^{e}"
        else:
            base = f"w^({e})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(w)(?![A-Za-z0-9_'])|([\^*+()]))")


class _OrdParser:
    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def peek(self) -> str | None:
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            return None
        return m.group(1) or m.group(2) or m.group(3)

    def take(self) -> str:
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            raise OrdinalDomainError(f"unexpected end of ordinal at {self.pos} in {self.text!r}")
        self.pos = m.end()
        return m.group(1) or m.group(2) or m.group(3)

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise OrdinalDomainError(f"expected {tok!r} but found {got!r} in ordinal {self.text!r}")

    def atom(self) -> Ordinal:
        tok = self.take()
        if tok.isdigit():
            return nat(int(tok))
        if tok == "w":
            if self.peek() == "^":
                self.take()
                return omega_pow(self.atom())
            return OMEGA
        if tok == "(":
            v = self.expr()
            self.expect(")")
            return v
        raise OrdinalDomainError(f"unexpected {tok!r} in ordinal {self.text!r}")

    def term(self) -> tuple[Ordinal, int]:
        tok = self.peek()
        if tok is not None and tok.isdigit():
            v = int(self.take())
            if v == 0:
                return ZERO, 0
            return ZERO, v
        if tok != "w":
            raise OrdinalDomainError(f"expected an ordinal term at {self.pos} in {self.text!r}")
        self.take()
        e = ONE
        if self.peek() == "^":
            self.take()
            e = self.atom()
        c = 1
        if self.peek() == "*":
            self.take()
            tok = self.take()
            if not tok.isdigit() or int(tok) < 1:
                raise OrdinalDomainError(f"bad coefficient {tok!r} in ordinal {self.text!r}")
            c = int(tok)
        return e, c

    def expr(self) -> Ordinal:
        terms = [self.term()]
        while self.peek() == "+":
            self.take()
            terms.append(self.term())
        if len(terms) == 1 and terms[0][1] == 0:
            return ZERO
        if any(c == 0 for _, c in terms):
            raise OrdinalDomainError(f"zero term in non-canonical ordinal {self.text!r}")
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if compare(e1, e2) <= 0:
                raise OrdinalDomainError(f"non-canonical ordinal {self.text!r}: exponents must strictly descend")
        return _make(tuple(terms))


def parse_ordinal(text: str) -> Ordinal:
    """Parse the canonical ordinal syntax, e.g. ``w^2*3+w+1`` or ``w^(w+1)``."""
    p = _OrdParser(text)
    v = p.expr()
    if p.text[p.pos:].strip():
        raise OrdinalDomainError(f"trailing input at {p.pos} in ordinal {text!r}")
    return v


def natural_sum_all(xs: Iterable[Ordinal]) -> Ordinal:
    out = ZERO
    for x in xs:
        out = natural_sum(out, x)
    return out
