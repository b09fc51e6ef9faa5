"""Seeded random rational draws for the property suites.

Numerators and denominators are drawn from [-40, 40] without zero.  Parameter
families are generic: no two values x, y of the union (Bethe parameters and
inhomogeneities) satisfy x = y or x = q^{+-2} y, so no f or g meets a pole or
a zero.
"""
from __future__ import annotations

import random
from typing import Sequence

from .chain import ChainConfig
from .field import QQ, QParam

BOUND = 40


def draw_rational(rng: random.Random, bound: int = BOUND):
    while True:
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if a and b:
            return QQ(a) / b


def draw_q(rng: random.Random) -> QParam:
    while True:
        q = draw_rational(rng)
        if q * q != 1:
            return QParam.of(q)


def _clashes(x, y, q: QParam) -> bool:
    q2 = q.q * q.q
    return x == y or x == q2 * y or y == q2 * x


def draw_generic(rng: random.Random, q: QParam, count: int, avoid: Sequence = ()) -> list:
    """``count`` fresh values, generic among themselves and against ``avoid``."""
    taken = list(avoid)
    out = []
    while len(out) < count:
        x = draw_rational(rng)
        if any(_clashes(x, y, q) for y in taken):
            continue
        taken.append(x)
        out.append(x)
    return out


def draw_sets(rng: random.Random, q: QParam, r: Sequence[int], avoid: Sequence = ()) -> tuple:
    flat = draw_generic(rng, q, sum(r), avoid)
    out, pos = [], 0
    for k in r:
        out.append(tuple(flat[pos:pos + k]))
        pos += k
    return tuple(out)


def flat(sets) -> list:
    return [x for c in sets for x in c]


def draw_chain(rng: random.Random, m: int, L: int, q: QParam | None = None, twist: bool = True) -> ChainConfig:
    q = q or draw_q(rng)
    xi = draw_generic(rng, q, L)
    kappa = [draw_rational(rng) for _ in range(m)] if twist else [QQ(1)] * m
    return ChainConfig(m, L, q, tuple(xi), tuple(kappa))


__all__ = ["BOUND", "draw_rational", "draw_q", "draw_generic", "draw_sets", "flat", "draw_chain"]
