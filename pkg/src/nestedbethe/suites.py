"""Verification suites: seeded cases, each tied to one identity, and JSON reports.

Every case draws its randomness from its own generator seeded by
(seed, suite, case name), so results do not depend on the order in which
cases run or on how they are spread over worker processes.
"""
from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import partial
from itertools import product
from typing import Callable

from .bethe import (build_bethe, build_bethe_alt, build_dual, build_dual_alt,
                    coproduct_check, is_content_homogeneous, one_site_bethe)
from .chain import (ChainConfig, commutator, preserves_coloring, rtt_residual, transfer_matrix,
                    vacuum_checks, yang_baxter_check)
from .field import QQ, ComplexField
from .highest import HCEngine, invert, reverse_colors
from .onshell import (analytic_root_one_site, eigenvector_check, gaudin_from_definition,
                      gaudin_matrix, korepin_suite, norm_check, solve_bethe, x_from_alpha)
from .sampling import draw_chain, draw_generic, draw_q, draw_rational, draw_sets, flat
from .scalar_product import brute_force_sp, hc_residue_check, sum_formula_sp

SUITES = ("rtt", "yangbaxter", "bv", "coproduct", "sp", "hc", "residues", "onshell", "korepin")
EXACT = "exact-pass"
FAIL = "fail"


def tol_pass(tol) -> str:
    return f"pass({tol:g})"


@dataclass(frozen=True)
class Case:
    suite: str
    name: str
    identity: str
    run: Callable  # (rng) -> (status, digest, witness)


@dataclass
class CaseResult:
    suite: str
    name: str
    identity: str
    status: str
    digest: str
    witness: dict
    runtime_ms: float | None = None

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def to_json(self, timings: bool) -> dict:
        out = {"name": self.name, "identity": self.identity, "model_digest": self.digest,
               "status": self.status, "witness": self.witness}
        if timings:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_json(self, timings: bool = False) -> dict:
        by_suite: dict[str, list] = {}
        for c in sorted(self.cases, key=lambda c: (c.suite, c.name)):
            by_suite.setdefault(c.suite, []).append(c.to_json(timings))
        return {
            "suite": self.suite,
            "seed": self.seed,
            "status": "pass" if self.ok else "fail",
            "counts": {"total": len(self.cases), "failed": sum(not c.passed for c in self.cases)},
            "suites": by_suite,
        }

    def dumps(self, timings: bool = False) -> str:
        return json.dumps(self.to_json(timings), indent=2, sort_keys=True) + "\n"


def digest(*parts) -> str:
    blob = json.dumps([str(p) for p in parts], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _exact(ok: bool) -> str:
    return EXACT if ok else FAIL


def _case_rng(seed: int, suite: str, name: str) -> random.Random:
    return random.Random(f"{seed}:{suite}:{name}")


# ---------------------------------------------------------------------------
# case bodies (module level so that worker processes can pickle them)


def _yang_baxter(rng, m, draws):
    q = draw_q(rng)
    fails = 0
    for _ in range(draws):
        u, v, w = draw_generic(rng, q, 3)
        fails += not yang_baxter_check(q, u, v, w, m)
    return _exact(fails == 0), digest(m, q.q), {"draws": draws, "failures": fails}


def _rtt(rng, m, L, draws, cfg=None):
    cfg = cfg or draw_chain(rng, m, L)
    bad = 0
    for _ in range(draws):
        u, v = draw_generic(rng, cfg.q, 2, cfg.xi)
        bad += len(rtt_residual(cfg, u, v))
    return _exact(bad == 0), cfg.digest, {"draws": draws, "mismatched_entries": bad}


def _transfer(rng, m, L, cfg=None):
    cfg = cfg or draw_chain(rng, m, L)
    u, v = draw_generic(rng, cfg.q, 2, cfg.xi)
    Tu, Tv = transfer_matrix(cfg, u), transfer_matrix(cfg, v)
    commute = commutator(Tu, Tv).is_zero()
    graded = preserves_coloring(Tu, m, cfg.L)
    vac = vacuum_checks(cfg, u)
    ok = commute and graded and all(vac.values())
    return _exact(ok), cfg.digest, {"commute": commute, "coloring": graded, **vac}


def _golden(rng, m):
    q = draw_q(rng)
    xi = draw_rational(rng)
    cfg = ChainConfig(m, 1, q, (xi,), tuple(QQ(1) for _ in range(m)))
    ts = draw_generic(rng, q, m - 1, (xi,))
    bad = []
    for k in range(1, m + 1):
        sets = tuple((ts[i],) if i < k - 1 else () for i in range(m - 1))
        if build_bethe(cfg, sets) != one_site_bethe(m, q, xi, ts[:k - 1]):
            bad.append(k)
    return _exact(not bad), cfg.digest, {"vectors": m, "mismatched": bad}


def _dual_golden(rng):
    cfg = draw_chain(rng, 2, 2)
    (s,), = draw_sets(rng, cfg.q, (1,), cfg.xi)
    mono = cfg.monodromy
    want = mono.apply_bra(2, 1, s, mono.vacuum()) * (1 / mono.lam(2, s))
    return _exact(build_dual(cfg, ((s,),)) == want), cfg.digest, {}


def _recursions(rng, m, L, r, cfg=None):
    cfg = cfg or draw_chain(rng, m, L)
    t = draw_sets(rng, cfg.q, r, cfg.xi)
    b, b2 = build_bethe(cfg, t), build_bethe_alt(cfg, t)
    c, c2 = build_dual(cfg, t), build_dual_alt(cfg, t)
    perm = tuple(tuple(reversed(x)) for x in t)
    sym = build_bethe(cfg, perm) == b and build_dual(cfg, perm) == c
    homog = is_content_homogeneous(b, t) and is_content_homogeneous(c, t)
    w = {"ket": b == b2, "dual": c == c2, "symmetric": sym, "homogeneous": homog,
         "support": len(b.data)}
    return _exact(all(v for k, v in w.items() if k != "support")), cfg.digest, w


def _coproduct(rng, m, L1, L2, r):
    q = draw_q(rng)
    xi = draw_generic(rng, q, L1 + L2)
    k1 = [draw_rational(rng) for _ in range(m)]
    k2 = [draw_rational(rng) for _ in range(m)]
    c1 = ChainConfig(m, L1, q, tuple(xi[:L1]), tuple(k1))
    c2 = ChainConfig(m, L2, q, tuple(xi[L1:]), tuple(k2))
    t = draw_sets(rng, q, r, xi)
    res = coproduct_check(c1, c2, t)
    return _exact(all(res.values())), digest(c1.digest, c2.digest), res


def _sum_formula(rng, m, L, r, models, cfg=None):
    seen = set()
    results = []
    for _ in range(models):
        model = cfg or draw_chain(rng, m, L)
        s = draw_sets(rng, model.q, r, model.xi)
        t = draw_sets(rng, model.q, r, tuple(model.xi) + tuple(flat(s)))
        a = brute_force_sp(model, s, t)
        b = sum_formula_sp(model, s, t)
        results.append(a == b)
        seen.add(model.digest)
    return _exact(all(results)), digest(*sorted(seen)), {"models": len(seen), "agree": sum(results)}


def _mismatch(rng):
    cfg = draw_chain(rng, 3, 2)
    s = draw_sets(rng, cfg.q, (1, 1), cfg.xi)
    t = draw_sets(rng, cfg.q, (2, 1), tuple(cfg.xi) + tuple(flat(s)))
    v = brute_force_sp(cfg, s, t)
    return _exact(v == 0), cfg.digest, {"value": QQ.serialize(v)}


def _hc(rng, r, draws):
    fails = {"recursions": 0, "reversal": 0, "inversion": 0, "reversal_inversion": 0, "cache": 0}
    for _ in range(draws):
        q = draw_q(rng)
        s = draw_sets(rng, q, r)
        t = draw_sets(rng, q, r, flat(s))
        eng = HCEngine(q)
        z = eng.Z(s, t)
        fails["recursions"] += z != eng.Z_alt(s, t)
        fails["cache"] += z != HCEngine(q, use_cache=False).Z(s, t)
        rs, rt = reverse_colors(s), reverse_colors(t)
        fails["reversal"] += z != eng.Zbar(rs, rt, orientation="q_inv")
        fails["inversion"] += eng.Zbar(s, t) != eng.Z_alt(invert(t, QQ), invert(s, QQ), "q_inv")
        fails["reversal_inversion"] += z != eng.Z(invert(rt, QQ), invert(rs, QQ))
    return _exact(not any(fails.values())), digest(r, draws), {"draws": draws, "failures": fails}


def _residue(rng, r, mu, j):
    q = draw_q(rng)
    s = draw_sets(rng, q, r)
    t = draw_sets(rng, q, r, flat(s))
    ok, got, want = hc_residue_check(q, s, t, mu, j, seed=rng.randrange(2**31))
    return _exact(ok), digest(q.q, s, t), {"reconstructed": QQ.serialize(got), "formula": QQ.serialize(want)}


def _onshell(rng, m, L, r, bits, seeds, tol_eig=1e-30, tol_norm=1e-25, analytic=False):
    fld = ComplexField(bits)
    q = draw_q(rng)
    xi = draw_generic(rng, q, L)
    kappa = [QQ(1)] * m if analytic else [draw_rational(rng) for _ in range(m)]
    exact_cfg = ChainConfig(m, L, q, tuple(xi), tuple(kappa))
    cfg = exact_cfg.with_field(fld)
    report = solve_bethe(cfg, r, seeds=seeds, seed=rng.randrange(2**31))
    ctx = fld.ctx
    worst_eig = worst_norm = worst_gd = worst_fd = 0
    drift = 0.0
    us = [fld(x) for x in draw_generic(rng, q, 2, xi)]
    for root in report.roots:
        ev = eigenvector_check(cfg, root, us, tol_eig, recheck_bits=2 * bits)
        worst_eig = max([worst_eig] + ev.residuals)
        drift = max([drift] + ev.precision_drift)
        nc = norm_check(cfg, root, tol_norm)
        worst_norm = max(worst_norm, nc.rel_err)
        G = gaudin_matrix(cfg.q, root.params, x_from_alpha(cfg, root.params))
        Gd = gaudin_from_definition(cfg, root.params)
        scale = max(abs(x) for row in G for x in row)
        worst_gd = max([worst_gd] + [abs(a - b) / scale for ra, rb in zip(G, Gd) for a, b in zip(ra, rb)])
        worst_fd = max(worst_fd, _x_finite_difference_error(cfg, root.params))
    witness = {
        "roots": len(report.roots),
        "max_bethe_residual": ctx.nstr(max((rt.max_residual for rt in report.roots), default=0), 3),
        "max_eigen_residual": ctx.nstr(worst_eig, 3),
        "max_precision_drift": ctx.nstr(drift, 3),
        "max_norm_rel_err": ctx.nstr(worst_norm, 3),
        "gaudin_definition_gap": ctx.nstr(worst_gd, 3),
        "x_finite_difference_err": ctx.nstr(worst_fd, 3),
    }
    ok = (bool(report.roots) and worst_eig < tol_eig and drift < tol_eig and worst_norm < tol_norm
          and worst_gd < tol_norm and worst_fd < 1e-10)
    if analytic:
        a = analytic_root_one_site(cfg)
        gap = min(abs(rt.params[0][0] - a) for rt in report.roots) if report.roots else float("inf")
        witness["analytic_root_gap"] = ctx.nstr(gap, 3)
        ok = ok and len(report.roots) == 1 and gap < tol_eig
    return (tol_pass(tol_eig) if ok else FAIL), exact_cfg.digest, witness


def _x_finite_difference_error(cfg, params) -> float:
    """Closed-form X against a central difference of log alpha."""
    fld = cfg.field
    ctx = fld.ctx
    X = x_from_alpha(cfg, params)
    worst = 0
    h = ctx.mpf(2) ** (-fld.precision_bits // 4)
    for mu, c in enumerate(params, start=1):
        for j, z in enumerate(c):
            la = lambda w: ctx.log(cfg.monodromy.alpha(mu, w))
            d = (la(z + h) - la(z - h)) / (2 * h)
            fd = -cfg.q.delta * z * d
            worst = max(worst, abs(fd - X[mu - 1][j]) / max(1, abs(X[mu - 1][j])))
    return worst


def _korepin(rng, r, draws):
    fails = {}
    for _ in range(draws):
        q = draw_q(rng)
        t = draw_sets(rng, q, r)
        X = tuple(tuple(draw_rational(rng) for _ in c) for c in t)
        for k, v in korepin_suite(q, t, X).items():
            fails[k] = fails.get(k, 0) + (not v)
    return _exact(not any(fails.values())), digest(r, draws), {"draws": draws, "failures": fails}


# ---------------------------------------------------------------------------
# suite catalogue


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _rstr(r) -> str:
    return "-".join(map(str, r))


def build_cases(suite: str, scale: str = "full", cfg: ChainConfig | None = None, bits: int = 256) -> list[Case]:
    full = scale == "full"
    cases: list[Case] = []
    add = lambda name, ident, fn: cases.append(Case(suite, name, ident, fn))
    if suite == "yangbaxter":
        ms = (cfg.m,) if cfg else (2, 3, 4)
        for m in ms:
            add(f"m{m}", "yang-baxter", partial(_yang_baxter, m=m, draws=10 if full else 3))
    elif suite == "rtt":
        if cfg:
            add(f"m{cfg.m}L{cfg.L}-config", "rtt-relation", partial(_rtt, m=cfg.m, L=cfg.L, draws=10, cfg=cfg))
            add(f"m{cfg.m}L{cfg.L}-config-transfer", "transfer-commutation",
                partial(_transfer, m=cfg.m, L=cfg.L, cfg=cfg))
        else:
            for m, L in product((2, 3, 4), (1, 2, 3)):
                if not full and m * L > 6:
                    continue
                add(f"m{m}L{L}", "rtt-relation", partial(_rtt, m=m, L=L, draws=10 if full else 2))
                add(f"m{m}L{L}-transfer", "transfer-commutation", partial(_transfer, m=m, L=L))
    elif suite == "bv":
        for m in (2, 3, 4):
            add(f"golden-m{m}", "one-site-bethe-vectors", partial(_golden, m=m))
        add("dual-golden-m2", "dual-one-particle", _dual_golden)
        shapes = [(2, (2,)), (3, (1, 1)), (3, (2, 1)), (4, (1, 1, 1))]
        for (m, r), L in product(shapes, (1, 2)):
            if cfg and cfg.m != m:
                continue
            if cfg:
                L = cfg.L
            name = f"m{m}L{L}r{_rstr(r)}"
            if any(c.name == name for c in cases):
                continue
            add(name, "bethe-recursion-agreement", partial(_recursions, m=m, L=L, r=r, cfg=cfg))
    elif suite == "coproduct":
        shapes = [(2, (1,)), (2, (2,)), (3, (1, 0)), (3, (1, 1)), (3, (2, 1))]
        for (m, r), L1, L2 in product(shapes, (1, 2), (1, 2)):
            if not full and (L1, L2) != (1, 2):
                continue
            add(f"m{m}r{_rstr(r)}L{L1}+{L2}", "coproduct", partial(_coproduct, m=m, L1=L1, L2=L2, r=r))
    elif suite == "sp":
        shapes = [(2, (1,), (1, 2, 3)), (2, (2,), (1, 2, 3)), (2, (3,), (1, 2, 3)),
                  (3, (1, 1), (1, 2)), (3, (2, 1), (1, 2)), (3, (2, 2), (1, 2)), (4, (1, 1, 1), (1,))]
        for m, r, Ls in shapes:
            if cfg and cfg.m != m:
                continue
            for L in ((cfg.L,) if cfg else Ls):
                add(f"m{m}L{L}r{_rstr(r)}", "sum-formula",
                    partial(_sum_formula, m=m, L=L, r=r, models=5 if full else 2, cfg=cfg))
        add("mismatched-cardinalities", "scalar-product-grading", _mismatch)
    elif suite == "hc":
        draws = 20 if full else 3
        for N in range(1, 6 if full else 3):
            for total in range(N, (5 if full else 3) + 1):
                for r in _compositions(total, N):
                    add(f"r{_rstr(r)}", "hc-recursions-and-symmetries", partial(_hc, r=r, draws=draws))
    elif suite == "residues":
        for r, mu, j in [((1,), 1, 1), ((2,), 1, 1), ((2,), 1, 2), ((1, 1), 1, 1), ((1, 1), 2, 1),
                         ((2, 1), 1, 2), ((1, 2), 2, 2)]:
            add(f"r{_rstr(r)}-mu{mu}-j{j}", "hc-residue", partial(_residue, r=r, mu=mu, j=j))
    elif suite == "onshell":
        seeds = 200 if full else 60
        add("m2L1r1-analytic", "bethe-eigenvector-and-norm",
            partial(_onshell, m=2, L=1, r=(1,), bits=bits, seeds=seeds, analytic=True))
        shapes = [(2, 2, (1,)), (2, 2, (2,)), (2, 3, (1,)), (2, 3, (2,)), (3, 2, (1, 1))]
        if not full:
            shapes = shapes[:1] + shapes[-1:]
        for m, L, r in shapes:
            add(f"m{m}L{L}r{_rstr(r)}", "bethe-eigenvector-and-norm",
                partial(_onshell, m=m, L=L, r=r, bits=bits, seeds=seeds))
    elif suite == "korepin":
        top = 5 if full else 3
        for total in range(1, top + 1):
            for N in range(1, total + 1):
                for r in _compositions(total, N):
                    add(f"r{_rstr(r)}", "korepin-criteria", partial(_korepin, r=r, draws=2 if full else 1))
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return cases


def _run_case(case: Case, seed: int) -> CaseResult:
    rng = _case_rng(seed, case.suite, case.name)
    t0 = time.perf_counter()
    try:
        status, dig, witness = case.run(rng)
    except Exception as exc:  # a crash is a failed case, reported with its message
        status, dig, witness = FAIL, "", {"error": f"{type(exc).__name__}: {exc}"}
    ms = (time.perf_counter() - t0) * 1000
    return CaseResult(case.suite, case.name, case.identity, status, dig, witness, ms)


def run_suite(suite: str, seed: int = 0, scale: str = "full", cfg: ChainConfig | None = None,
              bits: int = 256, jobs: int = 1) -> SuiteReport:
    names = SUITES if suite == "all" else (suite,)
    cases = [c for name in names for c in build_cases(name, scale, cfg, bits)]
    report = SuiteReport(suite, seed)
    report.cases = run_cases(cases, seed, jobs)
    return report


def run_cases(cases: list[Case], seed: int = 0, jobs: int = 1) -> list[CaseResult]:
    """Run cases, serially or over worker processes, sorted by (suite, name)."""
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_case, cases, [seed] * len(cases)))
    else:
        results = [_run_case(c, seed) for c in cases]
    results.sort(key=lambda c: (c.suite, c.name))
    return results


__all__ = ["SUITES", "Case", "CaseResult", "SuiteReport", "build_cases", "run_cases", "run_suite", "digest"]
