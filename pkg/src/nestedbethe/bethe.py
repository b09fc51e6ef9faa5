"""Bethe vectors and dual Bethe vectors built by the nested recursions.

Both families are constructed on a concrete monodromy.  The first recursion
removes one parameter from the lowest nonempty color and descends in rank
through the lower-right corner embedding (operators T_ij with i, j >= level);
the second removes one parameter from the highest nonempty color and descends
through the upper-left embedding.  Dual vectors are stored as the coefficient
vectors of bras.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from .chain import ChainConfig, Monodromy
from .combinatorics import enum_all_bipartitions, enum_recursion_partitions
from .field import QParam, f, g_l, g_r, pairwise_distinct, prod_f
from .states import State


@dataclass(frozen=True)
class BetheParams:
    sets: tuple  # tuple of per-color tuples

    @classmethod
    def of(cls, sets: Sequence[Sequence], field=None) -> "BetheParams":
        conv = field if field is not None else (lambda x: x)
        return cls(tuple(tuple(conv(x) for x in color) for color in sets))

    @classmethod
    def from_dict(cls, data: dict, field, key: str = "t") -> "BetheParams":
        if key not in data:
            raise ValueError(f"parameter file lacks {key!r}")
        return cls.of(data[key], field)

    @classmethod
    def load(cls, path, field, key: str = "t") -> "BetheParams":
        return cls.from_dict(json.loads(Path(path).read_text()), field, key)

    def to_list(self, field) -> list:
        return [[field.serialize(x) for x in color] for color in self.sets]

    @property
    def N(self) -> int:
        return len(self.sets)

    @property
    def r(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.sets)

    def flat(self) -> tuple:
        return tuple(x for c in self.sets for x in c)

    def __getitem__(self, k: int) -> tuple:
        """Color k, 1-based; colors outside 1..N are empty."""
        return self.sets[k - 1] if 1 <= k <= len(self.sets) else ()

    def validate(self, mono: Union[ChainConfig, Monodromy]):
        m = mono.m
        if self.N != m - 1:
            raise ValueError(f"rank {m} needs {m - 1} colors, got {self.N}")
        if not pairwise_distinct(self.flat()):
            raise ValueError("Bethe parameters must be pairwise distinct (also across colors)")
        xi = set(_mono(mono).xi)
        if any(x in xi for x in self.flat()):
            raise ValueError("Bethe parameters must avoid the inhomogeneities")
        return self


def _mono(obj) -> Monodromy:
    return obj.monodromy if isinstance(obj, ChainConfig) else obj


def _params(t, field=None) -> BetheParams:
    return t if isinstance(t, BetheParams) else BetheParams.of(t, field)


def _replace(sets: tuple, changes: dict) -> tuple:
    return tuple(changes.get(k + 1, c) for k, c in enumerate(sets))


def _drop(color: tuple, i: int) -> tuple:
    return color[:i] + color[i + 1:]


# ---------------------------------------------------------------------------
# recursions


class _Builder:
    """Shared state of one construction: monodromy, memo and scalars."""

    def __init__(self, mono: Monodromy, side: str):
        self.mono = mono
        self.q: QParam = mono.q
        self.one = mono.field.one
        self.side = side
        self.memo: dict = {}

    def vacuum(self) -> State:
        return self.mono.vacuum()

    def op(self, i: int, j: int, z, vec: State) -> State:
        if self.side == "ket":
            return self.mono.apply(i, j, z, vec)
        return self.mono.apply_bra(i, j, z, vec)

    def lower(self, a: int, sets: tuple) -> State:
        """Main recursion at embedding level a (colors a..N active)."""
        key = ("lower", a, sets)
        if key in self.memo:
            return self.memo[key]
        N = len(sets)
        q = self.q
        if a > N:
            out = self.vacuum()
        elif not sets[a - 1]:
            out = self.lower(a + 1, sets)
        else:
            color = lambda k: sets[k - 1] if 1 <= k <= N else ()
            z, rest = sets[a - 1][0], sets[a - 1][1:]
            glr = g_l if self.side == "ket" else g_r
            out = State(self.mono.m, self.mono.L)
            choices = [len(color(nu)) for nu in range(a + 1, N + 1)]
            for chain in enum_recursion_partitions(choices):
                j = a + 1 + chain.depth
                xs = {a: z}
                changes = {a: rest}
                coef = self.one
                for d, pick in enumerate(chain.picks):
                    nu = a + 1 + d
                    x = color(nu)[pick]
                    xs[nu] = x
                    changes[nu] = _drop(color(nu), pick)
                    coef *= self.mono.alpha(nu, x) * glr(q, x, xs[nu - 1]) * prod_f(q, changes[nu], (x,))
                for nu in range(a, j):
                    coef /= prod_f(q, color(nu + 1), (xs[nu],))
                sub = self.lower(a, _replace(sets, changes))
                if sub.is_zero():
                    continue
                if self.side == "ket":
                    vec = self.op(a, j, z, sub)
                else:
                    vec = self.op(j, a, z, sub)
                out = out + vec * (coef / self.mono.lam(a + 1, z))
        self.memo[key] = out
        return out

    def upper(self, b: int, sets: tuple) -> State:
        """Second recursion with colors 1..b active (upper-left embedding)."""
        key = ("upper", b, sets)
        if key in self.memo:
            return self.memo[key]
        q = self.q
        if b == 0:
            out = self.vacuum()
        elif not sets[b - 1]:
            out = self.upper(b - 1, sets)
        else:
            color = lambda k: sets[k - 1] if k >= 1 else ()
            z, rest = sets[b - 1][0], sets[b - 1][1:]
            glr = g_r if self.side == "ket" else g_l
            out = State(self.mono.m, self.mono.L)
            choices = [len(color(nu)) for nu in range(b - 1, 0, -1)]
            for chain in enum_recursion_partitions(choices):
                j = b - chain.depth
                xs = {b: z}
                changes = {b: rest}
                coef = self.one
                for d, pick in enumerate(chain.picks):
                    nu = b - 1 - d
                    x = color(nu)[pick]
                    xs[nu] = x
                    changes[nu] = _drop(color(nu), pick)
                    coef *= glr(q, xs[nu + 1], x) * prod_f(q, (x,), changes[nu])
                for nu in range(j, b + 1):
                    coef /= prod_f(q, (xs[nu],), color(nu - 1))
                sub = self.upper(b, _replace(sets, changes))
                if sub.is_zero():
                    continue
                if self.side == "ket":
                    vec = self.op(j, b + 1, z, sub)
                else:
                    vec = self.op(b + 1, j, z, sub)
                out = out + vec * (coef / self.mono.lam(b + 1, z))
        self.memo[key] = out
        return out


def _prepare(mono, t) -> tuple[Monodromy, tuple]:
    mono = _mono(mono)
    params = _params(t, mono.field).validate(mono)
    return mono, params.sets


def build_bethe(mono, t) -> State:
    """Bethe vector B(t) via the recursion on the first color."""
    mono, sets = _prepare(mono, t)
    return _Builder(mono, "ket").lower(1, sets)


def build_bethe_alt(mono, t) -> State:
    """Bethe vector B(t) via the recursion on the last color."""
    mono, sets = _prepare(mono, t)
    return _Builder(mono, "ket").upper(len(sets), sets)


def build_dual(mono, s) -> State:
    """Dual Bethe vector C(s), coefficients of the bra, via the first color."""
    mono, sets = _prepare(mono, s)
    return _Builder(mono, "bra").lower(1, sets)


def build_dual_alt(mono, s) -> State:
    mono, sets = _prepare(mono, s)
    return _Builder(mono, "bra").upper(len(sets), sets)


def expected_coloring(t) -> tuple[int, ...]:
    return _params(t).r


def is_content_homogeneous(vec: State, t) -> bool:
    return vec.colorings() <= {expected_coloring(t)}


# ---------------------------------------------------------------------------
# golden one-site vectors


def one_site_bethe(m: int, q: QParam, xi, t: Sequence) -> State:
    """Closed form of the single-site vector with colors 1..k-1 filled by single t's.

    ``t`` lists t^1, ..., t^{k-1}; the result is proportional to e_k.
    """
    one = q.field.one
    k = len(t) + 1
    if k == 1:
        return State.vacuum(m, 1, one)
    coef = g_l(q, t[0], xi)
    for nu in range(1, len(t)):
        coef *= g_l(q, t[nu], t[nu - 1]) / f(q, t[nu], t[nu - 1])
    return State(m, 1, {k - 1: coef})


# ---------------------------------------------------------------------------
# composite models


def _split_sets(sets: tuple, parts: tuple) -> tuple[tuple, tuple]:
    first = tuple(tuple(c[i] for i in p.part_I) for c, p in zip(sets, parts))
    second = tuple(tuple(c[i] for i in p.part_II) for c, p in zip(sets, parts))
    return first, second


def coproduct_expansion(mono1, mono2, t) -> State:
    """Right side of the ket coproduct formula, for T = T2 T1 with T1 on the leading sites."""
    mono1, mono2 = _mono(mono1), _mono(mono2)
    sets = _params(t, mono1.field).sets
    q = mono1.q
    N = len(sets)
    out = State(mono1.m, mono1.L + mono2.L)
    for parts in enum_all_bipartitions([len(c) for c in sets]):
        ti, tii = _split_sets(sets, parts)
        coef = mono1.field.one
        for nu in range(N):
            for x in ti[nu]:
                coef *= mono2.alpha(nu + 1, x)
            coef *= prod_f(q, tii[nu], ti[nu])
        for nu in range(N - 1):
            coef /= prod_f(q, tii[nu + 1], ti[nu])
        b1 = build_bethe(mono1, BetheParams(ti))
        b2 = build_bethe(mono2, BetheParams(tii))
        out = out + b1.kron(b2) * coef
    return out


def dual_coproduct_expansion(mono1, mono2, s) -> State:
    """Right side of the dual coproduct formula; the bra of part 1 sits on the leading sites."""
    mono1, mono2 = _mono(mono1), _mono(mono2)
    sets = _params(s, mono1.field).sets
    q = mono1.q
    N = len(sets)
    out = State(mono1.m, mono1.L + mono2.L)
    for parts in enum_all_bipartitions([len(c) for c in sets]):
        si, sii = _split_sets(sets, parts)
        coef = mono1.field.one
        for nu in range(N):
            for x in sii[nu]:
                coef *= mono1.alpha(nu + 1, x)
            coef *= prod_f(q, si[nu], sii[nu])
        for nu in range(N - 1):
            coef /= prod_f(q, si[nu + 1], sii[nu])
        c1 = build_dual(mono1, BetheParams(si))
        c2 = build_dual(mono2, BetheParams(sii))
        out = out + c1.kron(c2) * coef
    return out


def coproduct_check(mono1, mono2, t) -> dict[str, bool]:
    """Ket and dual coproduct identities on the composite model T2 T1."""
    total = Monodromy.compose(_mono(mono2), _mono(mono1))
    ket = build_bethe(total, t) == coproduct_expansion(mono1, mono2, t)
    bra = build_dual(total, t) == dual_coproduct_expansion(mono1, mono2, t)
    return {"ket": ket, "dual": bra}


__all__ = [
    "BetheParams", "build_bethe", "build_bethe_alt", "build_dual", "build_dual_alt",
    "expected_coloring", "is_content_homogeneous", "one_site_bethe",
    "coproduct_expansion", "dual_coproduct_expansion", "coproduct_check",
]
