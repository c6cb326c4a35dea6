"""Formulas and sequents.

Formulas use a nameless representation: a bound variable is a ``BVar``
holding the number of binders between it and its binder, while free
variables are ``Var`` nodes carrying a name.  Binders remember a name
hint that is only used for printing.

Text syntax::

    A ::= p | ~p | $x | 1 | 0 | bot | T
        | A * A | A | A | A + A | A & A        (tensor, par, plus, with)
        | mu^b x. A | nu^b x. A | mu x. A | ( A )

Binary operators are right associative; ``*`` binds tightest, then
``&``, ``|`` and ``+``.  A sequent is a comma separated list, optionally
two-sided: ``A, B => C`` stands for ``~A, ~B, C``.
"""

from __future__ import annotations

import enum
import re
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Union

from . import ordinal
from .ordinal import OMEGA, Ordinal, OrdVar

Ann = Union[Ordinal, OrdVar]

TENSOR, PAR, PLUS, WITH = "*", "|", "+", "&"
MU, NU = "mu", "nu"
_DUAL_OP = {TENSOR: PAR, PAR: TENSOR, PLUS: WITH, WITH: PLUS}
_PREC = {PLUS: 1, PAR: 2, WITH: 3, TENSOR: 4}
_RESERVED = {"mu", "nu", "T", "top", "bot"}


class ParseError(ValueError):
    """Malformed formula or sequent text."""

    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} (at offset {pos})")
        self.pos = pos



class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


def _ann_key(a: Ann) -> str:
    return str(a) if isinstance(a, Ordinal) else "?" + a.name


class Formula:
    """Base class; subclasses are immutable and compare structurally."""

    __slots__ = ("key", "_hash", "loose")

    def _init(self, key: str, loose: int) -> None:
        self.key = key
        self._hash = hash(key)
        self.loose = loose  # 1 + highest dangling bound-variable index, 0 if none

    def __eq__(self, other) -> bool:
        return self is other or (
            isinstance(other, Formula) and self._hash == other._hash and self.key == other.key
        )

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return format_formula(self)

    def __repr__(self) -> str:
        return f"<{format_formula(self)}>"

    def __invert__(self) -> "Formula":
        return negate(self)


class Atom(Formula):
    __slots__ = ("name", "negated")

    def __init__(self, name: str, negated: bool = False):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name) or name in _RESERVED:
            raise ParseError(f"bad propositional symbol {name!r}")
        self.name = name
        self.negated = negated
        self._init(("~" if negated else "") + name, 0)


class Unit(Formula):
    __slots__ = ("kind",)

    def __init__(self, kind: str):
        assert kind in ("1", "bot", "0", "T")
        self.kind = kind
        self._init(kind, 0)


class Var(Formula):
    """A free (named) variable."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._init("$" + name, 0)


class BVar(Formula):
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._init(f"#{index}", index + 1)


class Bin(Formula):
    __slots__ = ("op", "left", "right")

    def __init__(self, op: str, left: Formula, right: Formula):
        self.op = op
        self.left = left
        self.right = right
        self._init(f"({op}{left.key} {right.key})", max(left.loose, right.loose))


class Fix(Formula):
    __slots__ = ("kind", "ann", "body", "hint")

    def __init__(self, kind: str, ann: Ann, body: Formula, hint: str = "x"):
        assert kind in (MU, NU)
        if isinstance(ann, int):
            ann = ordinal.nat(ann)
        self.kind = kind
        self.ann = ann
        self.body = body
        self.hint = hint
        self._init(f"[{kind[0]}{_ann_key(ann)} {body.key}]", max(body.loose - 1, 0))


ONE = Unit("1")
BOT = Unit("bot")
ZERO = Unit("0")
TOP = Unit("T")
_DUAL_UNIT = {"1": BOT, "bot": ONE, "0": TOP, "T": ZERO}


# -- constructors ----------------------------------------------------------


def atom(name: str) -> Atom:
    return Atom(name)


def natom(name: str) -> Atom:
    return Atom(name, True)


def var(name: str) -> Var:
    return Var(name)


def tensor(a: Formula, b: Formula, *more: Formula) -> Formula:
    return _chain(TENSOR, (a, b) + more)


def par(a: Formula, b: Formula, *more: Formula) -> Formula:
    return _chain(PAR, (a, b) + more)


def plus(a: Formula, b: Formula, *more: Formula) -> Formula:
    return _chain(PLUS, (a, b) + more)


def with_(a: Formula, b: Formula, *more: Formula) -> Formula:
    return _chain(WITH, (a, b) + more)


def big(op: str, items: Iterable[Formula], empty: Formula) -> Formula:
    """Right-nested n-ary connective; ``empty`` is returned for no items."""
    items = tuple(items)
    return _chain(op, items) if items else empty


def _chain(op: str, items: tuple) -> Formula:
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Bin(op, f, out)
    return out


def _ann(a) -> Ann:
    if isinstance(a, (Ordinal, OrdVar)):
        return a
    if isinstance(a, str):
        return ordinal.parse_ordinal(a)
    return ordinal.nat(a)


def mu(x: str, ann, body: Formula) -> Fix:
    """``mu^ann x. body`` where ``body`` mentions ``x`` as ``Var(x)``."""
    return Fix(MU, _ann(ann), abstract(body, x), x)


def nu(x: str, ann, body: Formula) -> Fix:
    return Fix(NU, _ann(ann), abstract(body, x), x)


def fix(kind: str, x: str, ann, body: Formula) -> Fix:
    return Fix(kind, _ann(ann), abstract(body, x), x)


# -- nameless plumbing -------------------------------------------------------


def _shift(a: Formula, d: int, cutoff: int = 0) -> Formula:
    if a.loose <= cutoff or d == 0:
        return a
    if isinstance(a, BVar):
        return BVar(a.index + d) if a.index >= cutoff else a
    if isinstance(a, Bin):
        return Bin(a.op, _shift(a.left, d, cutoff), _shift(a.right, d, cutoff))
    if isinstance(a, Fix):
        return Fix(a.kind, a.ann, _shift(a.body, d, cutoff + 1), a.hint)
    return a


def _open(a: Formula, depth: int, repl: Formula) -> Formula:
    # Replace index ``depth`` by ``repl``; indices above it drop by one.
    if a.loose <= depth:
        return a
    if isinstance(a, BVar):
        if a.index == depth:
            return _shift(repl, depth)
        return BVar(a.index - 1)
    if isinstance(a, Bin):
        return Bin(a.op, _open(a.left, depth, repl), _open(a.right, depth, repl))
    if isinstance(a, Fix):
        return Fix(a.kind, a.ann, _open(a.body, depth + 1, repl), a.hint)
    return a


def instantiate(body: Formula, repl: Formula) -> Formula:
    """Substitute ``repl`` for the outermost bound variable of a binder body."""
    return _open(body, 0, repl)


@lru_cache(maxsize=1 << 16)
def unfold(f: Fix, gamma: Ann) -> Formula:
    """``A(eta^gamma x. A)`` for ``f = eta^beta x. A``."""
    return instantiate(f.body, Fix(f.kind, gamma, f.body, f.hint))


def abstract(a: Formula, name: str, depth: int = 0) -> Formula:
    """Turn free occurrences of ``Var(name)`` into bound index ``depth``."""
    if isinstance(a, Var):
        return BVar(depth) if a.name == name else a
    if isinstance(a, Bin):
        left, right = abstract(a.left, name, depth), abstract(a.right, name, depth)
        if left is a.left and right is a.right:
            return a
        return Bin(a.op, left, right)
    if isinstance(a, Fix):
        body = abstract(a.body, name, depth + 1)
        return a if body is a.body else Fix(a.kind, a.ann, body, a.hint)
    return a


def substitute(a: Formula, name: str, b: Formula) -> Formula:
    """Capture-free substitution of ``b`` for the free variable ``name``."""

    def go(f: Formula, depth: int) -> Formula:
        if isinstance(f, Var):
            return _shift(b, depth) if f.name == name else f
        if isinstance(f, Bin):
            left, right = go(f.left, depth), go(f.right, depth)
            return f if (left is f.left and right is f.right) else Bin(f.op, left, right)
        if isinstance(f, Fix):
            body = go(f.body, depth + 1)
            return f if body is f.body else Fix(f.kind, f.ann, body, f.hint)
        return f

    return go(a, 0)


@lru_cache(maxsize=1 << 16)
def negate(a: Formula) -> Formula:
    if isinstance(a, Atom):
        return Atom(a.name, not a.negated)
    if isinstance(a, Unit):
        return _DUAL_UNIT[a.kind]
    if isinstance(a, (Var, BVar)):
        return a
    if isinstance(a, Bin):
        return Bin(_DUAL_OP[a.op], negate(a.left), negate(a.right))
    if isinstance(a, Fix):
        return Fix(NU if a.kind == MU else MU, a.ann, negate(a.body), a.hint)
    raise TypeError(a)


# -- queries -----------------------------------------------------------------


def free_vars(a: Formula) -> frozenset[str]:
    if isinstance(a, Var):
        return frozenset((a.name,))
    if isinstance(a, Bin):
        return free_vars(a.left) | free_vars(a.right)
    if isinstance(a, Fix):
        return free_vars(a.body)
    return frozenset()


def polarity(a: Formula) -> Polarity:
    if isinstance(a, Atom):
        return Polarity.NEGATIVE if a.negated else Polarity.POSITIVE
    if isinstance(a, Unit):
        return Polarity.POSITIVE if a.kind in ("1", "0") else Polarity.NEGATIVE
    if isinstance(a, Bin):
        return Polarity.POSITIVE if a.op in (TENSOR, PLUS) else Polarity.NEGATIVE
    if isinstance(a, Fix):
        return Polarity.POSITIVE if a.kind == MU else Polarity.NEGATIVE
    raise ValueError(f"a variable has no polarity: {a}")


def is_positive(a: Formula) -> bool:
    return polarity(a) is Polarity.POSITIVE


def is_negative(a: Formula) -> bool:
    return polarity(a) is Polarity.NEGATIVE


def is_literal(a: Formula) -> bool:
    return isinstance(a, Atom)


def is_closed(a: Formula) -> bool:
    return a.loose == 0 and not free_vars(a)


def size(a: Formula) -> int:
    if isinstance(a, Bin):
        return 1 + size(a.left) + size(a.right)
    if isinstance(a, Fix):
        return 1 + size(a.body)
    return 1


def subformulas(a: Formula) -> Iterator[Formula]:
    yield a
    if isinstance(a, Bin):
        yield from subformulas(a.left)
        yield from subformulas(a.right)
    elif isinstance(a, Fix):
        yield from subformulas(a.body)


def annotations(a: Formula) -> Iterator[Ann]:
    for f in subformulas(a):
        if isinstance(f, Fix):
            yield f.ann


def finitely_annotated(a: Formula) -> bool:
    return all(isinstance(x, Ordinal) and x.nat is not None for x in annotations(a))


def map_annotations(a: Formula, fn: Callable[[Ann], Ann]) -> Formula:
    if isinstance(a, Bin):
        return Bin(a.op, map_annotations(a.left, fn), map_annotations(a.right, fn))
    if isinstance(a, Fix):
        return Fix(a.kind, fn(a.ann), map_annotations(a.body, fn), a.hint)
    return a


def subst_ordvar(a: Formula, name: str, value: Ann) -> Formula:
    """Replace the ordinal variable ``name`` by ``value`` in every annotation."""
    return map_annotations(a, lambda x: value if isinstance(x, OrdVar) and x.name == name else x)


def ordvars(a: Formula) -> set[str]:
    return {x.name for x in annotations(a) if isinstance(x, OrdVar)}


# -- sequents ------------------------------------------------------------------


class Sequent(tuple):
    """A multiset of formulas kept sorted so that equal multisets are equal tuples."""

    __slots__ = ()

    def __new__(cls, formulas: Iterable[Formula] = ()):
        return super().__new__(cls, sorted(formulas, key=_key))

    @classmethod
    def _raw(cls, items) -> "Sequent":
        return tuple.__new__(cls, items)

    def remove(self, f: Formula) -> "Sequent":
        i = self.index(f)
        return Sequent._raw(self[:i] + self[i + 1:])

    def remove_at(self, i: int) -> "Sequent":
        return Sequent._raw(self[:i] + self[i + 1:])

    def add(self, *fs: Formula) -> "Sequent":
        return Sequent(tuple(self) + fs)

    def __str__(self) -> str:
        return format_sequent(self)

    def __repr__(self) -> str:
        return f"Sequent({format_sequent(self)!r})"


def _key(f: Formula) -> str:
    return f.key


# -- printing ------------------------------------------------------------------


def format_ann(a: Ann) -> str:
    if isinstance(a, OrdVar):
        return a.name
    s = str(a)
    return s if (a.nat is not None or a == OMEGA) else f"({s})"


def _atom_names(a: Formula) -> set[str]:
    return {f.name for f in subformulas(a) if isinstance(f, Atom)}


def format_formula(a: Formula) -> str:
    return _fmt(a, [])


def _fresh(hint: str, taken: set[str]) -> str:
    base = hint if (hint and hint not in _RESERVED and hint != "w") else "x"
    if base not in taken:
        return base
    stem = base.rstrip("0123456789'") or "x"
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def _fmt(a: Formula, names: list[str]) -> str:
    if isinstance(a, Atom):
        return ("~" if a.negated else "") + a.name
    if isinstance(a, Unit):
        return a.kind
    if isinstance(a, Var):
        return "$" + a.name
    if isinstance(a, BVar):
        if a.index >= len(names):
            return f"#{a.index}"
        return names[-1 - a.index]
    if isinstance(a, Bin):
        p = _PREC[a.op]
        left = _fmt(a.left, names)
        if isinstance(a.left, Fix) or (isinstance(a.left, Bin) and _PREC[a.left.op] <= p):
            left = f"({left})"
        right = _fmt(a.right, names)
        if isinstance(a.right, Fix) or (isinstance(a.right, Bin) and _PREC[a.right.op] < p):
            right = f"({right})"
        return f"{left} {a.op} {right}"
    if isinstance(a, Fix):
        name = _fresh(a.hint, set(names) | _atom_names(a.body))
        return f"{a.kind}^{format_ann(a.ann)} {name}. {_fmt(a.body, names + [name])}"
    raise TypeError(a)


def format_sequent(seq: Iterable[Formula]) -> str:
    return ", ".join(format_formula(f) for f in seq)


# -- parsing -------------------------------------------------------------------

_TOK = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<sym>=>|_\|_|[()*|+&~^.,$])|(?P<id>[A-Za-z_][A-Za-z0-9_']*))"
)


class _Parser:
    def __init__(self, text: str, alpha: Ordinal | None):
        self.text = text
        self.pos = 0
        self.alpha = alpha
        self.scope: list[str] = []

    def _match(self):
        m = _TOK.match(self.text, self.pos)
        if m is None:
            if self.text[self.pos:].strip():
                raise ParseError(f"unexpected character {self.text[self.pos:].strip()[0]!r}", self.pos)
            return None
        return m

    def peek(self) -> str | None:
        m = self._match()
        return None if m is None else m.group(m.lastgroup)

    def take(self) -> str:
        m = self._match()
        if m is None:
            raise ParseError("unexpected end of input", self.pos)
        self.pos = m.end()
        return m.group(m.lastgroup)

    def expect(self, tok: str) -> None:
        start = self.pos
        got = self.take()
        if got != tok:
            raise ParseError(f"expected {tok!r}, found {got!r}", start)

    def at_end(self) -> bool:
        return self._match() is None

    # formula := binary chain
    def formula(self, minprec: int = 1) -> Formula:
        left = self.unary()
        while True:
            op = self.peek()
            if op not in _PREC or _PREC[op] < minprec:
                return left
            self.take()
            right = self.formula(_PREC[op])
            left = Bin(op, left, right)

    def unary(self) -> Formula:
        start = self.pos
        tok = self.take()
        if tok == "~":
            return negate(self.unary())
        if tok == "(":
            f = self.formula()
            self.expect(")")
            return f
        if tok == "1":
            return ONE
        if tok == "0":
            return ZERO
        if tok in ("T", "top"):
            return TOP
        if tok in ("bot", "_|_"):
            return BOT
        if tok == "$":
            s = self.pos
            name = self.take()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
                raise ParseError(f"bad variable name {name!r}", s)
            return Var(name)
        if tok in (MU, NU):
            return self.binder(tok, start)
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
            if tok in self.scope:
                return BVar(self.scope[::-1].index(tok))
            return Atom(tok)
        raise ParseError(f"unexpected {tok!r}", start)

    def annotation(self) -> Ann:
        start = self.pos
        m = self._match()
        if m is not None and m.lastgroup == "id" and m.group("id") != "w":
            self.pos = m.end()
            return OrdVar(m.group("id"))
        p = ordinal._OrdParser(self.text, self.pos)
        try:
            value = p.atom()
        except ordinal.OrdinalDomainError as e:
            raise ParseError(f"bad annotation: {e}", start) from None
        self.pos = p.pos
        if self.alpha is not None and value > self.alpha:
            raise ParseError(f"annotation {value} exceeds the closure ordinal {self.alpha}", start)
        return value

    def binder(self, kind: str, start: int) -> Formula:
        if self.peek() == "^":
            self.take()
            ann = self.annotation()
        else:
            if self.alpha is None:
                raise ParseError("unannotated fixed point but no closure ordinal configured", start)
            ann = self.alpha
        s = self.pos
        name = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name) or name in _RESERVED:
            raise ParseError(f"bad binder name {name!r}", s)
        self.expect(".")
        self.scope.append(name)
        body = self.formula()
        self.scope.pop()
        return Fix(kind, ann, body, name)


def parse_formula(text: str, alpha: Ordinal | None = OMEGA) -> Formula:
    p = _Parser(text, alpha)
    f = p.formula()
    if not p.at_end():
        raise ParseError(f"trailing input {p.peek()!r}", p.pos)
    return f


def parse_sequent(text: str, alpha: Ordinal | None = OMEGA) -> Sequent:
    """Parse ``A, B`` or the two-sided ``A, B => C, D`` (meaning ``~A, ~B, C, D``)."""
    return Sequent(parse_sequent_list(text, alpha))


def parse_sequent_list(text: str, alpha: Ordinal | None = OMEGA) -> list[Formula]:
    """Like :func:`parse_sequent` but keeps the written order."""
    p = _Parser(text, alpha)
    left: list[Formula] = []
    right: list[Formula] = []
    cur = right
    two_sided = False

    def items(into: list[Formula]) -> None:
        nxt = p.peek()
        if nxt is None or nxt == "=>":
            return
        into.append(p.formula())
        while p.peek() == ",":
            p.take()
            into.append(p.formula())

    items(cur)
    if p.peek() == "=>":
        p.take()
        two_sided = True
        left, right = cur, []
        items(right)
    if not p.at_end():
        raise ParseError(f"unexpected {p.peek()!r}", p.pos)
    if two_sided:
        return [negate(f) for f in left] + right
    return right


def parse(text: str, alpha: Ordinal | None = OMEGA) -> Union[Formula, Sequent]:
    """Parse a formula, or a sequent if the text contains ``,`` or ``=>`` at top level."""
    p = _Parser(text, alpha)
    depth = 0
    while True:
        m = p._match()
        if m is None:
            break
        tok = m.group(m.lastgroup)
        p.pos = m.end()
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth -= 1
        elif tok in (",", "=>") and depth == 0:
            return parse_sequent(text, alpha)
    return parse_formula(text, alpha)
