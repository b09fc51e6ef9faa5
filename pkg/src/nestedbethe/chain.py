"""Inhomogeneous twisted fundamental chain: R-matrix, monodromy, vacuum data, RTT.

A monodromy is stored as the ordered list of its auxiliary-space factors,
T(u) = F_1(u) F_2(u) ... F_n(u), each factor being either a constant diagonal
twist or an R-matrix R_{0k}(u, xi_k) acting on one site.  A chain built from
a config is [twist, R_{0L}, ..., R_{01}]; composite models are obtained by
concatenating factor lists, which keeps T = T2 T1 exact even when both parts
carry their own twist.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .field import QQ, PoleError, QParam, f, g_l, g_r, pairwise_distinct
from .states import LinOp, State, coloring

TWIST = "twist"
SITE = "site"


# ---------------------------------------------------------------------------
# config


@dataclass(frozen=True)
class ChainConfig:
    m: int
    L: int
    q: QParam
    xi: tuple
    kappa: tuple

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("rank m must be at least 2")
        if self.L < 1:
            raise ValueError("chain needs at least one site")
        if len(self.xi) != self.L:
            raise ValueError(f"expected {self.L} inhomogeneities, got {len(self.xi)}")
        if not pairwise_distinct(self.xi):
            raise ValueError("inhomogeneities must be pairwise distinct")
        if len(self.kappa) != self.m:
            raise ValueError(f"expected {self.m} twist entries, got {len(self.kappa)}")
        if any(k == 0 for k in self.kappa):
            raise ValueError("twist entries must be nonzero")

    @property
    def field(self):
        return self.q.field

    @classmethod
    def build(cls, m, L, q, xi, kappa=None, field=QQ) -> "ChainConfig":
        kappa = [1] * m if kappa is None else kappa
        return cls(m, L, QParam.of(q, field), tuple(field(x) for x in xi), tuple(field(k) for k in kappa))

    @classmethod
    def from_dict(cls, data: dict, field=QQ) -> "ChainConfig":
        missing = {"m", "L", "q", "xi"} - data.keys()
        if missing:
            raise ValueError(f"config lacks {sorted(missing)}")
        return cls.build(int(data["m"]), int(data["L"]), data["q"], data["xi"], data.get("kappa"), field)

    @classmethod
    def load(cls, path, field=QQ) -> "ChainConfig":
        return cls.from_dict(json.loads(Path(path).read_text()), field)

    def to_dict(self) -> dict:
        ser = self.field.serialize
        return {
            "m": self.m,
            "L": self.L,
            "q": ser(self.q.q),
            "xi": [ser(x) for x in self.xi],
            "kappa": [ser(k) for k in self.kappa],
        }

    @property
    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def with_field(self, field) -> "ChainConfig":
        """Same model over another backend (exact values are carried over)."""
        return ChainConfig(self.m, self.L, QParam.of(field(self.q.q), field),
                           tuple(field(x) for x in self.xi), tuple(field(k) for k in self.kappa))

    @cached_property
    def monodromy(self) -> "Monodromy":
        return Monodromy.from_config(self)


# ---------------------------------------------------------------------------
# monodromy


@dataclass(frozen=True)
class Monodromy:
    m: int
    L: int
    q: QParam
    factors: tuple  # ((TWIST, kappa) | (SITE, site, xi)), leftmost first

    @classmethod
    def from_config(cls, cfg: ChainConfig) -> "Monodromy":
        sites = tuple((SITE, k + 1, cfg.xi[k]) for k in reversed(range(cfg.L)))
        return cls(cfg.m, cfg.L, cfg.q, ((TWIST, cfg.kappa),) + sites)

    @staticmethod
    def compose(outer: "Monodromy", inner: "Monodromy") -> "Monodromy":
        """T = outer * inner, with inner on the leading sites."""
        if outer.m != inner.m or outer.q != inner.q:
            raise ValueError("composite parts must share m and q")
        shifted = tuple(
            (SITE, fac[1] + inner.L, fac[2]) if fac[0] == SITE else fac for fac in outer.factors
        )
        return Monodromy(inner.m, inner.L + outer.L, inner.q, shifted + inner.factors)

    @property
    def field(self):
        return self.q.field

    @property
    def dim(self) -> int:
        return self.m ** self.L

    @property
    def xi(self) -> tuple:
        return tuple(fac[2] for fac in self.factors if fac[0] == SITE)

    def check_off_poles(self, u):
        for x in self.xi:
            if u == x:
                raise PoleError(f"spectral parameter {u} hits an inhomogeneity")

    # vacuum data

    def lam(self, i: int, u):
        """Vacuum eigenvalue lambda_i(u), as a product over factors."""
        out = self.field.one
        for fac in self.factors:
            if fac[0] == TWIST:
                out *= fac[1][i - 1]
            elif i == 1:
                out *= f(self.q, u, fac[2])
        return out

    def alpha(self, i: int, u):
        return self.lam(i, u) / self.lam(i + 1, u)

    def dlog_alpha(self, i: int, u):
        """d/du log alpha_i(u); only color 1 depends on u."""
        if i != 1:
            return self.field.zero
        q, qi = self.q.q, self.q.q_inv
        out = self.field.zero
        for x in self.xi:
            out += q / (q * u - qi * x) - 1 / (u - x)
        return out

    # application

    def _site_coefs(self, u, xi):
        return f(self.q, u, xi), g_l(self.q, u, xi), g_r(self.q, u, xi)

    def _step_ket(self, fac, u, cur: dict) -> dict:
        if fac[0] == TWIST:
            return {a: {k: fac[1][a - 1] * v for k, v in vec.items()} for a, vec in cur.items()}
        _, site, xi = fac
        fv, gl, gr = self._site_coefs(u, xi)
        m = self.m
        stride = m ** (self.L - site)
        new: dict[int, dict] = {}
        for b, vec in cur.items():
            for idx, val in vec.items():
                c = (idx // stride) % m + 1
                # diagonal block M^{bb}
                out = new.setdefault(b, {})
                x = fv * val if c == b else val
                out[idx] = out[idx] + x if idx in out else x
                if c != b:
                    # block M^{cb} = coef * E_{bc} sends letter c to b
                    out = new.setdefault(c, {})
                    k = idx + (b - c) * stride
                    x = (gl if c < b else gr) * val
                    out[k] = out[k] + x if k in out else x
        return new

    def _step_bra(self, fac, u, cur: dict) -> dict:
        if fac[0] == TWIST:
            return {b: {k: fac[1][b - 1] * v for k, v in vec.items()} for b, vec in cur.items()}
        _, site, xi = fac
        fv, gl, gr = self._site_coefs(u, xi)
        m = self.m
        stride = m ** (self.L - site)
        new: dict[int, dict] = {}
        for a, vec in cur.items():
            for idx, val in vec.items():
                c = (idx // stride) % m + 1
                out = new.setdefault(a, {})
                x = fv * val if c == a else val
                out[idx] = out[idx] + x if idx in out else x
                if c != a:
                    # <w| M^{ac}: transpose of E_{ca} sends letter c to a
                    out = new.setdefault(c, {})
                    k = idx + (a - c) * stride
                    x = (gl if a < c else gr) * val
                    out[k] = out[k] + x if k in out else x
        return new

    def column(self, j: int, u, vec: State) -> dict[int, State]:
        """{i: T_ij(u) vec} for every row i."""
        self.check_off_poles(u)
        cur = {j: dict(vec.data)}
        for fac in reversed(self.factors):
            cur = self._step_ket(fac, u, cur)
        return {i: State(self.m, self.L, cur.get(i, {})) for i in range(1, self.m + 1)}

    def row(self, i: int, u, vec: State) -> dict[int, State]:
        """{j: <vec| T_ij(u)} for every column j."""
        self.check_off_poles(u)
        cur = {i: dict(vec.data)}
        for fac in self.factors:
            cur = self._step_bra(fac, u, cur)
        return {j: State(self.m, self.L, cur.get(j, {})) for j in range(1, self.m + 1)}

    def apply(self, i: int, j: int, u, vec: State) -> State:
        return self.column(j, u, vec)[i]

    def apply_bra(self, i: int, j: int, u, vec: State) -> State:
        return self.row(i, u, vec)[j]

    def entries(self, u) -> dict[tuple[int, int], LinOp]:
        """All T_ij(u) as sparse matrices."""
        one = self.field.one
        cols: dict[tuple[int, int], dict[int, State]] = {}
        for c in range(self.dim):
            e = State(self.m, self.L, {c: one})
            for j in range(1, self.m + 1):
                for i, vec in self.column(j, u, e).items():
                    cols.setdefault((i, j), {})[c] = vec
        return {ij: LinOp.from_columns(self.dim, cols.get(ij, {}))
                for ij in ((i, j) for i in range(1, self.m + 1) for j in range(1, self.m + 1))}

    def entry(self, i: int, j: int, u) -> LinOp:
        one = self.field.one
        cols = {c: self.apply(i, j, u, State(self.m, self.L, {c: one})) for c in range(self.dim)}
        return LinOp.from_columns(self.dim, cols)

    def vacuum(self) -> State:
        return State.vacuum(self.m, self.L, self.field.one)


def monodromy_entry(cfg: ChainConfig, i: int, j: int, u) -> LinOp:
    return cfg.monodromy.entry(i, j, u)


def vacuum_lambda(cfg: ChainConfig, i: int, u):
    """Closed form: kappa_1 prod_k f(u, xi_k) for i = 1, kappa_i otherwise."""
    cfg.monodromy.check_off_poles(u)
    if i == 1:
        out = cfg.kappa[0]
        for x in cfg.xi:
            out *= f(cfg.q, u, x)
        return out
    return cfg.kappa[i - 1]


def alpha(cfg: ChainConfig, i: int, u):
    return vacuum_lambda(cfg, i, u) / vacuum_lambda(cfg, i + 1, u)


def transfer_matrix(cfg_or_mono, u) -> LinOp:
    mono = cfg_or_mono.monodromy if isinstance(cfg_or_mono, ChainConfig) else cfg_or_mono
    one = mono.field.one
    cols = {}
    for c in range(mono.dim):
        e = State(mono.m, mono.L, {c: one})
        acc = State(mono.m, mono.L)
        for j in range(1, mono.m + 1):
            acc = acc + mono.apply(j, j, u, e)
        cols[c] = acc
    return LinOp.from_columns(mono.dim, cols)


# ---------------------------------------------------------------------------
# R-matrix and exchange relations


def r_entry(q: QParam, u, v, row: tuple[int, int], col: tuple[int, int]):
    """R_{(i,k),(a,b)}(u, v) in the basis e_i (x) e_k."""
    (i, k), (a, b) = row, col
    if (a, b) == (i, k):
        return f(q, u, v) if i == k else q.field.one
    if (a, b) == (k, i):
        return g_l(q, u, v) if i < k else g_r(q, u, v)
    return q.field.zero


def r_matrix(q: QParam, u, v, m: int) -> LinOp:
    """R(u, v) on C^m (x) C^m; row/column index (i-1)*m + (k-1)."""
    rows = {}
    for i in range(1, m + 1):
        for k in range(1, m + 1):
            r = (i - 1) * m + (k - 1)
            rows[r] = {r: r_entry(q, u, v, (i, k), (i, k))}
            if i != k:
                rows[r][(k - 1) * m + (i - 1)] = r_entry(q, u, v, (i, k), (k, i))
    return LinOp(m * m, rows)


def _embed_pair(op: LinOp, m: int, x: int, y: int) -> LinOp:
    """Lift a two-factor operator to act on factors x, y (0-based) of (C^m)^{(x)3}."""
    rows: dict[int, dict] = {}
    for idx in range(m ** 3):
        d = [idx // (m * m), (idx // m) % m, idx % m]
        r = d[x] * m + d[y]
        for c, v in op.rows.get(r, {}).items():
            e = list(d)
            e[x], e[y] = divmod(c, m)
            rows.setdefault(idx, {})[e[0] * m * m + e[1] * m + e[2]] = v
    return LinOp(m ** 3, rows)


def yang_baxter_check(q: QParam, u, v, w, m: int) -> bool:
    R12 = _embed_pair(r_matrix(q, u, v, m), m, 0, 1)
    R13 = _embed_pair(r_matrix(q, u, w, m), m, 0, 2)
    R23 = _embed_pair(r_matrix(q, v, w, m), m, 1, 2)
    return R12 @ R13 @ R23 == R23 @ R13 @ R12


def rtt_residual(cfg_or_mono, u, v) -> list:
    """Entries ((i,k),(j,l)) where R T1(u) T2(v) and T2(v) T1(u) R differ."""
    mono = cfg_or_mono.monodromy if isinstance(cfg_or_mono, ChainConfig) else cfg_or_mono
    if u == v:
        raise PoleError("RTT check needs u != v")
    q, m = mono.q, mono.m
    Tu, Tv = mono.entries(u), mono.entries(v)
    cache: dict = {}

    def prod(x, y, kx, ky):
        key = (kx, x, ky, y)
        if key not in cache:
            A = Tu[x] if kx == "u" else Tv[x]
            B = Tu[y] if ky == "u" else Tv[y]
            cache[key] = A @ B
        return cache[key]

    bad = []
    idx = [(i, k) for i in range(1, m + 1) for k in range(1, m + 1)]
    for (i, k) in idx:
        for (j, l) in idx:
            lhs = LinOp(mono.dim)
            for (a, b) in {(i, k), (k, i)}:
                c = r_entry(q, u, v, (i, k), (a, b))
                if c != 0:
                    lhs = lhs + c * prod((a, j), (b, l), "u", "v")
            rhs = LinOp(mono.dim)
            for (a, b) in {(j, l), (l, j)}:
                c = r_entry(q, u, v, (a, b), (j, l))
                if c != 0:
                    rhs = rhs + c * prod((k, b), (i, a), "v", "u")
            if lhs != rhs:
                bad.append(((i, k), (j, l)))
    return bad


def rtt_check(cfg_or_mono, u, v) -> bool:
    return not rtt_residual(cfg_or_mono, u, v)


# ---------------------------------------------------------------------------
# vacuum and grading checks


def vacuum_checks(cfg_or_mono, u) -> dict[str, bool]:
    """Pseudovacuum relations for kets and bras, and the closed-form lambda."""
    mono = cfg_or_mono.monodromy if isinstance(cfg_or_mono, ChainConfig) else cfg_or_mono
    vac = mono.vacuum()
    m = mono.m
    ket_ok = lam_ok = bra_ok = True
    for j in range(1, m + 1):
        col = mono.column(j, u, vac)
        for i in range(1, m + 1):
            if i > j and not col[i].is_zero():
                ket_ok = False
            if i == j and col[i] != vac * mono.lam(i, u):
                lam_ok = False
    for i in range(1, m + 1):
        row = mono.row(i, u, vac)
        for j in range(1, m + 1):
            if i < j and not row[j].is_zero():
                bra_ok = False
            if i == j and row[j] != vac * mono.lam(i, u):
                lam_ok = False
    if isinstance(cfg_or_mono, ChainConfig):
        lam_ok = lam_ok and all(vacuum_lambda(cfg_or_mono, i, u) == mono.lam(i, u) for i in range(1, m + 1))
    return {"ket_annihilation": ket_ok, "bra_annihilation": bra_ok, "lambda": lam_ok}


def preserves_coloring(op: LinOp, m: int, L: int) -> bool:
    return all(coloring(r, m, L) == coloring(c, m, L) for r, c, _ in op.entries())


def commutator(A: LinOp, B: LinOp) -> LinOp:
    return A @ B - B @ A


__all__ = [
    "ChainConfig", "Monodromy", "monodromy_entry", "vacuum_lambda", "alpha",
    "transfer_matrix", "r_entry", "r_matrix", "yang_baxter_check", "rtt_residual",
    "rtt_check", "vacuum_checks", "preserves_coloring", "commutator",
]
