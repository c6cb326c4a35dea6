"""Finite formula and sequent universes for exhaustive tests."""

from __future__ import annotations

from functools import lru_cache

from mumall.ordinal import nat
from mumall.rank import rank
from mumall.syntax import (
    BOT, MU, NU, ONE, PAR, PLUS, TENSOR, TOP, WITH, ZERO,
    Bin, BVar, Fix, Sequent, atom, natom,
)

LEAVES = (atom("p"), natom("p"), atom("q"), natom("q"), ONE, BOT, ZERO, TOP)
OPS = (TENSOR, PAR, PLUS, WITH)


@lru_cache(maxsize=None)
def _shapes(size: int, bound: bool) -> tuple:
    # formulas of exactly ``size`` nodes; ``bound`` allows the variable of one enclosing binder
    out = []
    if size == 1:
        out.extend(LEAVES)
        if bound:
            out.append(BVar(0))
        # eta^0 binders are all equivalent to 0 / T; keep one representative of each
        out.append(Fix(MU, nat(0), BVar(0)))
        out.append(Fix(NU, nat(0), BVar(0)))
        return tuple(out)
    for left in range(1, size - 1):
        for a in _shapes(left, bound):
            for b in _shapes(size - 1 - left, bound):
                for op in OPS:
                    out.append(Bin(op, a, b))
    if not bound:
        for body in _shapes(size - 1, True):
            if body.loose == 0 and size - 1 > 1:
                continue  # binder that ignores its variable
            for kind in (MU, NU):
                for n in (1, 2):
                    out.append(Fix(kind, nat(n), body))
    return tuple(out)


def formulas(max_size: int, max_rank: int) -> list:
    out = []
    for s in range(1, max_size + 1):
        out.extend(f for f in _shapes(s, False) if int(str(rank(f))) <= max_rank)
    return sorted(set(out), key=lambda f: f.key)


def sequents(max_size: int, max_rank: int, max_len: int) -> list[Sequent]:
    fs = formulas(max_size, max_rank)
    ranks = [int(str(rank(f))) for f in fs]
    out = []

    def rec(start: int, budget: int, acc: list) -> None:
        if acc:
            out.append(Sequent(acc))
        if len(acc) == max_len:
            return
        for i in range(start, len(fs)):
            if ranks[i] <= budget:
                acc.append(fs[i])
                rec(i, budget - ranks[i], acc)
                acc.pop()

    rec(0, max_rank, [])
    return out
