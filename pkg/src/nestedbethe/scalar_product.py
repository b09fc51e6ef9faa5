"""Scalar products: direct contraction, the sum formula over partitions, and HC residues."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .bethe import _mono, _params, build_bethe, build_dual
from .combinatorics import enum_sum_partitions
from .field import PoleError, prod_f
from .highest import HCEngine, engine_for


def brute_force_sp(mono, s, t):
    """C(s) B(t) by contracting the two constructed vectors."""
    mono = _mono(mono)
    s, t = _params(s, mono.field), _params(t, mono.field)
    if s.r != t.r:
        return mono.field.zero
    return build_dual(mono, s).dot(build_bethe(mono, t))


@dataclass(frozen=True)
class SumFormulaTerm:
    s_I: tuple
    s_II: tuple
    t_I: tuple
    t_II: tuple
    weight: object
    alpha_factor: object

    @property
    def value(self):
        return self.weight * self.alpha_factor


def _split(sets, parts):
    first = tuple(tuple(c[i] for i in p.part_I) for c, p in zip(sets, parts))
    second = tuple(tuple(c[i] for i in p.part_II) for c, p in zip(sets, parts))
    return first, second


def sum_formula_terms(mono, s, t, engine: HCEngine | None = None):
    """Lazy stream of the partition terms of the sum formula."""
    mono = _mono(mono)
    s, t = _params(s, mono.field).sets, _params(t, mono.field).sets
    q = mono.q
    engine = engine or engine_for(q)
    N = len(s)
    for joint in enum_sum_partitions([len(c) for c in s]):
        s_I, s_II = _split(s, [sp for sp, _ in joint])
        t_I, t_II = _split(t, [tp for _, tp in joint])
        w = engine.Z(s_I, t_I) * engine.Zbar(s_II, t_II)
        for k in range(N):
            w *= prod_f(q, s_II[k], s_I[k]) * prod_f(q, t_I[k], t_II[k])
        for j in range(N - 1):
            w /= prod_f(q, s_II[j + 1], s_I[j]) * prod_f(q, t_I[j + 1], t_II[j])
        a = mono.field.one
        for k in range(N):
            for x in s_I[k]:
                a *= mono.alpha(k + 1, x)
            for x in t_II[k]:
                a *= mono.alpha(k + 1, x)
        yield SumFormulaTerm(s_I, s_II, t_I, t_II, w, a)


def sum_formula_sp(mono, s, t, engine: HCEngine | None = None):
    mono = _mono(mono)
    sp, tp = _params(s, mono.field), _params(t, mono.field)
    if sp.r != tp.r:
        return mono.field.zero
    total = mono.field.zero
    for term in sum_formula_terms(mono, sp, tp, engine):
        total += term.value
    return total


# ---------------------------------------------------------------------------
# residues by rational reconstruction


class ReconstructionError(RuntimeError):
    pass


def _thiele(xs, ys):
    """Coefficients of the Thiele continued fraction through (xs, ys).

    Returns None when a reciprocal difference vanishes at an unlucky node.
    A trailing run of equal differences means the fraction already closed.
    """
    n = len(xs)
    phi = list(ys)
    coefs = [phi[0]]
    for k in range(1, n):
        pivot = phi[k - 1]
        row = list(phi)
        closed = True
        for i in range(k, n):
            diff = phi[i] - pivot
            if diff == 0:
                row[i] = None
                continue
            closed = False
            row[i] = (xs[i] - xs[k - 1]) / diff
        if closed:
            return coefs
        if any(row[i] is None for i in range(k, n)):
            return None
        phi = row
        coefs.append(phi[k])
    return coefs


def _thiele_eval(coefs, xs, x):
    val = coefs[-1]
    for k in range(len(coefs) - 2, -1, -1):
        if val == 0:
            raise ZeroDivisionError("continued fraction hits a pole")
        val = coefs[k] + (x - xs[k]) / val
    return val


def reconstruct_at(func, target, field, rng: random.Random, max_points: int = 40, checks: int = 3):
    """Value at ``target`` of the rational function sampled by ``func``.

    Samples at seeded random rationals, skips points where ``func`` has a
    pole, grows the node count until the interpolant also matches ``checks``
    fresh points, and evaluates it at ``target``.
    """

    def draw():
        while True:
            x = field(rng.randint(-400, 400)) / rng.randint(1, 97)
            if x == target:
                continue
            try:
                return x, func(x)
            except (PoleError, ZeroDivisionError):
                continue

    pts = [draw() for _ in range(2)]
    rounds = 0
    while len(pts) <= max_points and rounds < 4 * max_points:
        rounds += 1
        xs = [p[0] for p in pts]
        coefs = _thiele(xs, [p[1] for p in pts])
        if coefs is not None:
            extra = [draw() for _ in range(checks)]
            try:
                ok = all(_thiele_eval(coefs, xs, x) == y for x, y in extra)
            except ZeroDivisionError:
                ok = False
            if ok:
                try:
                    return _thiele_eval(coefs, xs, target)
                except ZeroDivisionError:
                    pass
            pts.extend(extra[:1])
        else:
            # an unlucky node: resample the whole set
            pts = [draw() for _ in pts]
    raise ReconstructionError("rational reconstruction did not stabilize")


def residue_formula(q, s, t, mu: int, j: int, engine: HCEngine | None = None):
    """Predicted residue of Z(s|t) in s^mu_j at t^mu_j (1-based mu and j)."""
    engine = engine or engine_for(q)
    N = len(s)
    S = lambda k: s[k - 1] if 1 <= k <= N else ()
    T = lambda k: t[k - 1] if 1 <= k <= N else ()
    tj = T(mu)[j - 1]
    t_rest = T(mu)[:j - 1] + T(mu)[j:]
    s_rest = S(mu)[:j - 1] + S(mu)[j:]
    red_s = tuple(s_rest if k == mu else S(k) for k in range(1, N + 1))
    red_t = tuple(t_rest if k == mu else T(k) for k in range(1, N + 1))
    val = -tj * q.delta
    val *= prod_f(q, t_rest, (tj,)) * prod_f(q, (tj,), s_rest) * engine.Z(red_s, red_t)
    val /= prod_f(q, T(mu + 1), (tj,)) * prod_f(q, (tj,), S(mu - 1))
    return val


def reconstructed_residue(q, s, t, mu: int, j: int, seed: int = 0, engine: HCEngine | None = None):
    """Residue of Z in s^mu_j at t^mu_j from exact reconstruction of (x - t) Z(x)."""
    engine = engine or engine_for(q)
    field = q.field
    tj = t[mu - 1][j - 1]

    def h(x):
        ss = tuple(
            tuple(x if (k == mu - 1 and i == j - 1) else v for i, v in enumerate(c)) for k, c in enumerate(s)
        )
        return (x - tj) * engine.Z(ss, t)

    return reconstruct_at(h, tj, field, random.Random(seed))


def hc_residue_check(q, s, t, mu: int, j: int, seed: int = 0) -> tuple[bool, object, object]:
    engine = engine_for(q)
    s = tuple(tuple(c) for c in s)
    t = tuple(tuple(c) for c in t)
    got = reconstructed_residue(q, s, t, mu, j, seed, engine)
    want = residue_formula(q, s, t, mu, j, engine)
    return got == want, got, want


__all__ = [
    "brute_force_sp", "SumFormulaTerm", "sum_formula_terms", "sum_formula_sp",
    "ReconstructionError", "reconstruct_at", "residue_formula", "reconstructed_residue",
    "hc_residue_check",
]
