"""On-shell Bethe vectors: Bethe equations, Newton solver, Gaudin matrix, norm and Korepin criteria.

The Bethe equations are written as Phi^mu_j = 1.  Roots are found by damped
Newton iteration in double precision from many random starts and then
polished at the working precision of the complex backend.  The Gaudin matrix
has an explicit block form; its definition as a logarithmic Jacobian of Phi
is implemented separately and serves as a cross-check.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

from .bethe import _mono, build_bethe
from .chain import ChainConfig, Monodromy, transfer_matrix
from .field import ComplexField, PoleError, QParam, det, minor, prod_f, solve
from .scalar_product import brute_force_sp


# ---------------------------------------------------------------------------
# Bethe equations


def _color(sets, k):
    return sets[k - 1] if 1 <= k <= len(sets) else ()


def phi(mono, t, nu: int, j: int):
    """Phi^nu_j; its value is 1 at a solution of the Bethe equations (j is 1-based)."""
    mono = _mono(mono)
    q = mono.q
    x = t[nu - 1][j - 1]
    rest = tuple(t[nu - 1][:j - 1]) + tuple(t[nu - 1][j:])
    val = mono.alpha(nu, x) * prod_f(q, rest, (x,)) / prod_f(q, (x,), rest)
    return val * prod_f(q, (x,), _color(t, nu - 1)) / prod_f(q, _color(t, nu + 1), (x,))


def _slots(r: Sequence[int]) -> list[tuple[int, int]]:
    return [(mu, j) for mu in range(1, len(r) + 1) for j in range(r[mu - 1])]


class _Arith:
    """The elementary functions and their log-derivatives over plain numbers."""

    def __init__(self, q, qi):
        self.q, self.qi = q, qi

    def f(self, x, y):
        return (self.q * x - self.qi * y) / (x - y)

    def dx(self, x, y):  # d/dx log f(x, y)
        return self.q / (self.q * x - self.qi * y) - 1 / (x - y)

    def dy(self, x, y):  # d/dy log f(x, y)
        return -self.qi / (self.q * x - self.qi * y) + 1 / (x - y)


def _phis(ar: _Arith, sets, alpha: Callable, one=1):
    out = []
    for mu, j in _slots([len(c) for c in sets]):
        x = sets[mu - 1][j]
        val = alpha(mu, x)
        for p, y in enumerate(sets[mu - 1]):
            if p != j:
                val = val * ar.f(y, x) / ar.f(x, y)
        for y in _color(sets, mu - 1):
            val = val * ar.f(x, y)
        for y in _color(sets, mu + 1):
            val = val / ar.f(y, x)
        out.append(val)
    return out


def _log_jacobian(ar: _Arith, sets, dlog_alpha: Callable, zero=0):
    """D[(mu,j)][(nu,k)] = d log Phi^mu_j / d t^nu_k, analytically."""
    slots = _slots([len(c) for c in sets])
    index = {s: n for n, s in enumerate(slots)}
    n = len(slots)
    D = [[zero] * n for _ in range(n)]
    for (mu, j), row in index.items():
        tm = sets[mu - 1]
        x = tm[j]
        diag = dlog_alpha(mu, x)
        for p, y in enumerate(tm):
            if p == j:
                continue
            diag += ar.dy(y, x) - ar.dx(x, y)
            D[row][index[(mu, p)]] = ar.dx(y, x) - ar.dy(x, y)
        for k, y in enumerate(_color(sets, mu - 1)):
            diag += ar.dx(x, y)
            D[row][index[(mu - 1, k)]] = ar.dy(x, y)
        for k, y in enumerate(_color(sets, mu + 1)):
            diag -= ar.dy(y, x)
            D[row][index[(mu + 1, k)]] = -ar.dx(y, x)
        D[row][row] = diag
    return D


# ---------------------------------------------------------------------------
# Newton solver


@dataclass
class BetheRoots:
    params: tuple  # per-color tuples of field elements
    residuals: list
    field: object = dc_field(repr=False)

    @property
    def max_residual(self):
        return max((abs(r) for r in self.residuals), default=0)

    def to_list(self) -> list:
        return [[self.field.serialize(x) for x in c] for c in self.params]


@dataclass
class SolverReport:
    roots: list
    failures: dict  # reason -> count

    @property
    def ok(self) -> bool:
        return bool(self.roots)


def _float_model(mono: Monodromy):
    q = complex(mono.q.q)
    ar = _Arith(q, 1 / q)
    xi = [complex(x) for x in mono.xi]
    kap = []
    for i in range(1, mono.m + 1):
        # constant part of lambda_i: the product of the twists
        c = 1
        for fac in mono.factors:
            if fac[0] == "twist":
                c *= complex(fac[1][i - 1])
        kap.append(c)

    def alpha(mu, z):
        val = kap[mu - 1] / kap[mu]
        if mu == 1:
            for x in xi:
                val *= ar.f(z, x)
        return val

    def dlog_alpha(mu, z):
        if mu != 1:
            return 0j
        return sum(ar.dx(z, x) for x in xi)

    return ar, alpha, dlog_alpha


def _mp_model(mono: Monodromy):
    ar = _Arith(mono.q.q, mono.q.q_inv)
    return ar, mono.alpha, mono.dlog_alpha


def _unflatten(vals, r):
    out, pos = [], 0
    for k in r:
        out.append(tuple(vals[pos:pos + k]))
        pos += k
    return tuple(out)


def _newton_float(mono, r, start, max_iter=200, tol=1e-12):
    """Damped Newton on log Phi = 0, which tames the poles of Phi at the xi."""
    ar, alpha, dla = _float_model(mono)
    x = np.array(start, dtype=complex)

    def resid(vals):
        phis = np.array(_phis(ar, _unflatten(list(vals), r), alpha))
        return np.log(phis)

    with np.errstate(all="ignore"):
        try:
            F = resid(x)
        except ZeroDivisionError:
            return None
        for _ in range(max_iter):
            nrm = np.max(np.abs(F))
            if not np.isfinite(nrm):
                return None
            if nrm < tol:
                return list(x)
            try:
                D = np.array(_log_jacobian(ar, _unflatten(list(x), r), dla, 0j), dtype=complex)
                step = np.linalg.solve(D, -F)
            except (ZeroDivisionError, np.linalg.LinAlgError):
                return None
            lam = 1.0
            while lam > 1e-6:
                trial = x + lam * step
                try:
                    Ft = resid(trial)
                    if np.all(np.isfinite(Ft)) and np.max(np.abs(Ft)) < nrm:
                        break
                except ZeroDivisionError:
                    pass
                lam /= 2
            else:
                return None
            x, F = trial, Ft
    return None


def _polish(mono, r, start, iters=60):
    """Full-step Newton at the backend precision until the step stalls."""
    ar, alpha, dla = _mp_model(mono)
    fld = mono.field
    x = [fld(complex(v)) for v in start]
    eps = fld.ctx.mpf(2) ** (-fld.precision_bits + 16)
    for _ in range(iters):
        sets = _unflatten(x, r)
        F = [p - 1 for p in _phis(ar, sets, alpha)]
        D = _log_jacobian(ar, sets, dla, fld.zero)
        J = [[(F[a] + 1) * D[a][b] for b in range(len(x))] for a in range(len(x))]
        step = solve(J, [-v for v in F], fld)
        x = [a + b for a, b in zip(x, step)]
        if max(abs(s) for s in step) <= eps * max(1, max(abs(v) for v in x)):
            break
    return _unflatten(x, r)


def _canonical(sets):
    return tuple(tuple(sorted(c, key=lambda z: (float(z.real), float(z.imag)))) for c in sets)


def _multiset_distance(a, b) -> float:
    worst = 0.0
    for ca, cb in zip(a, b):
        best = min(max((abs(x - y) for x, y in zip(ca, perm)), default=0) for perm in permutations(cb))
        worst = max(worst, float(best))
    return worst


def _draw_start(rng: random.Random, scale: float, xi: list) -> complex:
    """Half the starts are uniform in a box, half sit close to an inhomogeneity.

    Roots often hide in the narrow neighbourhood of a pole of alpha, which a
    uniform box samples poorly.
    """
    if rng.random() < 0.5:
        return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))
    x = rng.choice(xi)
    rad = 0.2 * abs(x) * rng.random() ** 2
    return x + rad * complex(rng.gauss(0, 1), rng.gauss(0, 1))


def solve_bethe(cfg, r: Sequence[int], seeds: int = 200, tol: float = 1e-25, seed: int = 0,
                separation: float = 1e-8, dedup: float = 1e-20) -> SolverReport:
    """Solutions of the Bethe equations found from ``seeds`` random starts."""
    mono = _mono(cfg)
    if not isinstance(mono.field, ComplexField):
        raise TypeError("solve_bethe needs the mp-complex backend")
    r = tuple(r)
    rng = random.Random(seed)
    xi = [complex(x) for x in mono.xi]
    scale = 2 * max(abs(x) for x in xi) + 2
    roots: list[BetheRoots] = []
    fails: dict[str, int] = {}

    def fail(reason):
        fails[reason] = fails.get(reason, 0) + 1

    for _ in range(seeds):
        start = [_draw_start(rng, scale, xi) for _ in range(sum(r))]
        sol = _newton_float(mono, r, start)
        if sol is None:
            fail("no convergence")
            continue
        try:
            sets = _canonical(_polish(mono, r, sol))
        except (ZeroDivisionError, PoleError):
            fail("singular polish")
            continue
        flat = [x for c in sets for x in c]
        if any(abs(a - b) < separation for i, a in enumerate(flat) for b in flat[:i]):
            fail("coincident roots")
            continue
        if any(abs(a - x) < separation for a in flat for x in mono.xi):
            fail("root at an inhomogeneity")
            continue
        if any(abs(a) < separation or abs(a) > 1 / separation for a in flat):
            fail("root at zero or infinity")
            continue
        try:
            res = [p - 1 for p in _phis(_mp_model(mono)[0], sets, mono.alpha)]
        except ZeroDivisionError:
            fail("singular residual")
            continue
        if max(abs(v) for v in res) >= tol:
            fail("residual above tolerance")
            continue
        if any(_multiset_distance(sets, known.params) < dedup for known in roots):
            continue
        roots.append(BetheRoots(sets, res, mono.field))
    roots.sort(key=lambda b: tuple((float(z.real), float(z.imag)) for c in b.params for z in c))
    return SolverReport(roots, dict(sorted(fails.items())))


def analytic_root_one_site(cfg: ChainConfig):
    """The single root for m=2, L=1, r=1: xi (c/q - 1)/(c q - 1) with c = kappa_1/kappa_2."""
    if cfg.m != 2 or cfg.L != 1:
        raise ValueError("closed form only for m=2, L=1")
    q = cfg.q.q
    c = cfg.kappa[0] / cfg.kappa[1]
    return cfg.xi[0] * (c / q - 1) / (c * q - 1)


# ---------------------------------------------------------------------------
# eigenvectors


@dataclass
class EigenReport:
    eigenvalues: list
    residuals: list
    precision_drift: list
    tol: float

    @property
    def ok(self) -> bool:
        return all(r < self.tol for r in self.residuals) and all(d < self.tol for d in self.precision_drift)


def _rayleigh(mono, v, u):
    w = transfer_matrix(mono, u) @ v
    lam = v.vdot(w) / v.vdot(v)
    diff = w - v * lam
    return lam, float(diff.norm() / v.norm())


def eigenvector_check(cfg: ChainConfig, roots, u_samples: Sequence, tol: float = 1e-30,
                      recheck_bits: int | None = None) -> EigenReport:
    """B(roots) is an eigenvector of the transfer matrix at every sampled u."""
    fld = cfg.field
    params = roots.params if isinstance(roots, BetheRoots) else roots
    v = build_bethe(cfg, params)
    if v.is_zero():
        raise ValueError("Bethe vector vanishes at these roots")
    lams, res = [], []
    for u in u_samples:
        lam, rr = _rayleigh(cfg.monodromy, v, fld(u))
        lams.append(lam)
        res.append(rr)
    drift = []
    if recheck_bits:
        hi = ComplexField(recheck_bits)
        cfg_hi = cfg.with_field(hi)
        r = [len(c) for c in params]
        flat = [x for c in params for x in c]
        params_hi = _canonical(_polish(cfg_hi.monodromy, r, [complex(x) for x in flat]))
        params_hi = _match_order(params, params_hi)
        v_hi = build_bethe(cfg_hi, params_hi)
        for u, lam in zip(u_samples, lams):
            lam_hi, _ = _rayleigh(cfg_hi.monodromy, v_hi, hi(u))
            drift.append(float(abs(lam_hi - lam) / max(1, abs(lam_hi))))
    return EigenReport(lams, res, drift, tol)


def _match_order(ref, other):
    out = []
    for ca, cb in zip(ref, other):
        best = min(permutations(cb), key=lambda perm: max((abs(x - y) for x, y in zip(ca, perm)), default=0))
        out.append(tuple(best))
    return tuple(out)


# ---------------------------------------------------------------------------
# Gaudin matrix


def K(q: QParam, x, y):
    a, b = q.q, q.q_inv
    return (a + b) * (a - b) ** 2 * x * y / ((a * x - b * y) * (b * x - a * y))


def J(q: QParam, x, y):
    a, b = q.q, q.q_inv
    if x == y:
        raise PoleError("J has a pole at x = y")
    return (a - b) ** 2 * x * y / ((a * x - b * y) * (x - y))


def x_from_alpha(mono, t) -> tuple:
    """X^mu_j = -(q - 1/q) z d/dz log alpha_mu(z) at z = t^mu_j."""
    mono = _mono(mono)
    d = mono.q.delta
    return tuple(tuple(-d * x * mono.dlog_alpha(mu, x) for x in c) for mu, c in enumerate(t, start=1))


def gaudin_matrix(q: QParam, t, X) -> list[list]:
    """Explicit block form; rows and columns ordered by color, then index."""
    r = [len(c) for c in t]
    slots = _slots(r)
    index = {s: n for n, s in enumerate(slots)}
    zero = q.field.zero
    G = [[zero] * len(slots) for _ in slots]
    for (mu, j), row in index.items():
        x = t[mu - 1][j]
        diag = X[mu - 1][j]
        for y in t[mu - 1]:
            diag -= K(q, x, y)
        for y in _color(t, mu - 1):
            diag += J(q, x, y)
        for y in _color(t, mu + 1):
            diag += J(q, y, x)
        for k, y in enumerate(t[mu - 1]):
            G[row][index[(mu, k)]] += K(q, x, y)
        G[row][row] += diag
        for k, y in enumerate(_color(t, mu - 1)):
            G[row][index[(mu - 1, k)]] = -J(q, x, y)
        for k, y in enumerate(_color(t, mu + 1)):
            G[row][index[(mu + 1, k)]] = -J(q, y, x)
    return G


def gaudin_from_definition(mono, t) -> list[list]:
    """-(q - 1/q) t^nu_k d log Phi^mu_j / d t^nu_k from the analytic Jacobian."""
    mono = _mono(mono)
    ar, _, dla = _mp_model(mono)
    D = _log_jacobian(ar, t, dla, mono.field.zero)
    flat = [x for c in t for x in c]
    d = mono.q.delta
    return [[-d * flat[b] * D[a][b] for b in range(len(flat))] for a in range(len(flat))]


def norm_prefactor(q: QParam, t):
    out = q.field.one
    for k in range(1, len(t) + 1):
        out /= prod_f(q, _color(t, k + 1), _color(t, k))
        c = t[k - 1]
        for p, x in enumerate(c):
            for s, y in enumerate(c):
                if p != s:
                    out *= prod_f(q, (x,), (y,))
    return out


def gaudin_norm(mono, t):
    mono = _mono(mono)
    G = gaudin_matrix(mono.q, t, x_from_alpha(mono, t))
    return norm_prefactor(mono.q, t) * det(G, mono.field)


@dataclass
class NormReport:
    roots: list
    residuals: list
    norm_lhs: object
    norm_rhs: object
    rel_err: object
    tol: float
    field: object = dc_field(repr=False)

    @property
    def ok(self) -> bool:
        return self.rel_err < self.tol

    def to_json(self) -> dict:
        ser = self.field.serialize
        return {
            "roots": self.roots,
            "residuals": [ser(r) for r in self.residuals],
            "norm_lhs": ser(self.norm_lhs),
            "norm_rhs": ser(self.norm_rhs),
            "rel_err": self.field.ctx.nstr(self.rel_err, 5),
        }


def norm_check(cfg: ChainConfig, roots, tol: float = 1e-25) -> NormReport:
    """C(t) B(t) by contraction against the Gaudin determinant formula."""
    params = roots.params if isinstance(roots, BetheRoots) else roots
    residuals = roots.residuals if isinstance(roots, BetheRoots) else []
    lhs = brute_force_sp(cfg, params, params)
    rhs = gaudin_norm(cfg, params)
    rel = abs(lhs - rhs) / abs(lhs)
    roots_ser = [[cfg.field.serialize(x) for x in c] for c in params]
    return NormReport(roots_ser, residuals, lhs, rhs, rel, tol, cfg.field)


# ---------------------------------------------------------------------------
# Korepin criteria


def korepin_F(q: QParam, t, X):
    return det(gaudin_matrix(q, t, X), q.field)


def _with(X, mu, j, value):
    return tuple(tuple(value if (k == mu - 1 and i == j) else v for i, v in enumerate(c)) for k, c in enumerate(X))


def _swap(seq, mu, j, k):
    c = list(seq[mu - 1])
    c[j], c[k] = c[k], c[j]
    return tuple(tuple(c) if i == mu - 1 else x for i, x in enumerate(seq))


def modified_X(q: QParam, t, X, mu: int, j: int):
    """Reduced system after removing slot (mu, j), with shifted X."""
    x = t[mu - 1][j]
    new_t, new_X = [], []
    for nu, (tc, Xc) in enumerate(zip(t, X), start=1):
        ts, Xs = [], []
        for k, (y, Xv) in enumerate(zip(tc, Xc)):
            if nu == mu and k == j:
                continue
            if nu == mu:
                Xv = Xv - K(q, x, y)
            elif nu == mu + 1:
                Xv = Xv + J(q, y, x)
            elif nu == mu - 1:
                Xv = Xv + J(q, x, y)
            ts.append(y)
            Xs.append(Xv)
        new_t.append(tuple(ts))
        new_X.append(tuple(Xs))
    return tuple(new_t), tuple(new_X)


def korepin_suite(q: QParam, t, X) -> dict[str, bool]:
    """Criteria (i)-(v) for F = det G with free X, exactly."""
    fld = q.field
    t = tuple(tuple(c) for c in t)
    X = tuple(tuple(c) for c in X)
    F = korepin_F(q, t, X)
    slots = _slots([len(c) for c in t])
    out = {}
    sym = True
    for mu, c in enumerate(t, start=1):
        for j in range(len(c)):
            for k in range(j):
                if korepin_F(q, _swap(t, mu, j, k), _swap(X, mu, j, k)) != F:
                    sym = False
    out["i_symmetric"] = sym
    lin = True
    deriv = True
    for mu, j in slots:
        vals = [korepin_F(q, t, _with(X, mu, j, fld(a))) for a in (0, 1, 2)]
        if vals[0] - 2 * vals[1] + vals[2] != 0:
            lin = False
        coef = vals[1] - vals[0]
        row = slots.index((mu, j))
        cof = det(minor(gaudin_matrix(q, t, X), row, row), fld)
        red_t, red_X = modified_X(q, t, X, mu, j)
        if not (coef == cof == korepin_F(q, red_t, red_X)):
            deriv = False
    out["ii_linear"] = lin
    if len(slots) == 1:
        mu, j = slots[0]
        out["iii_single"] = F == X[mu - 1][j]
    out["iv_derivative"] = deriv
    zeros = tuple(tuple(fld.zero for _ in c) for c in X)
    out["v_vanishing"] = korepin_F(q, t, zeros) == 0
    return out


__all__ = [
    "phi", "BetheRoots", "SolverReport", "solve_bethe", "analytic_root_one_site",
    "EigenReport", "eigenvector_check", "K", "J", "x_from_alpha", "gaudin_matrix",
    "gaudin_from_definition", "norm_prefactor", "gaudin_norm", "NormReport", "norm_check",
    "korepin_F", "modified_X", "korepin_suite",
]
