"""Independent reference implementations used to cross-check the library.

These deliberately avoid the library's search, rank and ordinal
comparison code: they are slow, direct transcriptions of the rules.
"""

from __future__ import annotations

import itertools

from mumall.ordinal import Ordinal
from mumall.syntax import (
    BOT, MU, ONE, PAR, PLUS, TENSOR, TOP, WITH, Atom, Bin, Fix, negate, unfold,
)


# -- ordinals ------------------------------------------------------------------------


def ord_tree(a: Ordinal):
    """Nested tuples ((exponent_tree, coeff), ...) in descending order."""
    return tuple((ord_tree(e), c) for e, c in a.terms)


def naive_compare(x, y) -> int:
    """Compare CNF trees term by term, recursing into exponents."""
    for (ex, cx), (ey, cy) in zip(x, y):
        c = naive_compare(ex, ey)
        if c:
            return c
        if cx != cy:
            return -1 if cx < cy else 1
    if len(x) != len(y):
        return -1 if len(x) < len(y) else 1
    return 0


def small_trees(depth: int, coeff: int, terms: int) -> list:
    """All canonical CNF trees within the given bounds."""
    if depth == 0:
        # only finite ordinals 0..coeff
        return [()] + [(((), c),) for c in range(1, coeff + 1)]
    exps = small_trees(depth - 1, coeff, terms)
    exps = sorted(set(exps), key=_sort_key, reverse=True)
    out = [()]
    for n in range(1, terms + 1):
        for combo in itertools.combinations(exps, n):
            for cs in itertools.product(range(1, coeff + 1), repeat=n):
                out.append(tuple(zip(combo, cs)))
    return out


def _sort_key(t):
    # a total order key consistent with naive_compare for sorting exponents
    import functools
    return functools.cmp_to_key(naive_compare)(t)


def tree_to_ordinal(t) -> Ordinal:
    from mumall.ordinal import Ordinal as O
    return O(tuple((tree_to_ordinal(e), c) for e, c in t))


# -- cut-free provability ------------------------------------------------------------


def naive_provable(seq) -> bool:
    """Try every rule on every occurrence, every split by position, no memo."""
    seq = list(seq)
    for i, f in enumerate(seq):
        rest = seq[:i] + seq[i + 1:]
        if isinstance(f, Atom):
            if len(seq) == 2 and rest[0] == negate(f):
                return True
        elif f == ONE:
            if not rest:
                return True
        elif f == TOP:
            return True
        elif f == BOT:
            if naive_provable(rest):
                return True
        elif isinstance(f, Bin):
            if f.op == PAR and naive_provable(rest + [f.left, f.right]):
                return True
            if f.op == WITH and naive_provable(rest + [f.left]) and naive_provable(rest + [f.right]):
                return True
            if f.op == PLUS and (naive_provable(rest + [f.left]) or naive_provable(rest + [f.right])):
                return True
            if f.op == TENSOR:
                for mask in range(1 << len(rest)):
                    left = [g for k, g in enumerate(rest) if mask >> k & 1]
                    right = [g for k, g in enumerate(rest) if not mask >> k & 1]
                    if naive_provable(left + [f.left]) and naive_provable(right + [f.right]):
                        return True
        elif isinstance(f, Fix):
            n = f.ann.nat
            if f.kind == MU:
                if any(naive_provable(rest + [unfold(f, g)]) for g in range(n)):
                    return True
            elif all(naive_provable(rest + [unfold(f, g)]) for g in range(n)):
                return True
    return False
