import pytest

from nestedbethe.chain import ChainConfig
from nestedbethe.field import QQ, ComplexField, PoleError, QParam, det
from nestedbethe.onshell import (K, analytic_root_one_site, eigenvector_check, gaudin_from_definition,
                                 gaudin_matrix, gaudin_norm, korepin_F, korepin_suite, norm_check, phi,
                                 solve_bethe, x_from_alpha)
from nestedbethe.sampling import draw_q, draw_rational, draw_sets

F256 = ComplexField(256)


def _cfg(m, L, q, xi, kappa=None, field=F256):
    return ChainConfig.build(m, L, q, xi, kappa, field=field)


def test_phi_one_site_root():
    cfg = _cfg(2, 1, "3", ["2"], field=QQ)
    root = QQ(-2) / 3
    assert phi(cfg, [[root]], 1, 1) == 1
    assert phi(cfg, [[QQ(5)]], 1, 1) != 1


def test_solver_one_site_analytic():
    cfg = _cfg(2, 1, "3", ["2"])
    report = solve_bethe(cfg, (1,), seeds=20)
    assert len(report.roots) == 1
    got = report.roots[0].params[0][0]
    assert abs(got - F256(QQ(-2) / 3)) < 1e-30
    assert abs(analytic_root_one_site(cfg) - got) < 1e-30
    assert report.roots[0].max_residual < 1e-30


def test_analytic_root_with_twist():
    cfg = _cfg(2, 1, "3", ["2"], ["5", "2"])
    report = solve_bethe(cfg, (1,), seeds=20)
    assert len(report.roots) == 1
    assert abs(report.roots[0].params[0][0] - analytic_root_one_site(cfg)) < 1e-30


def test_solver_two_sites_quadratic():
    # f(t, x1) f(t, x2) = 1 reduces to t^2 = x1 x2 / q^2
    cfg = _cfg(2, 2, "3", ["1", "4"])
    report = solve_bethe(cfg, (1,), seeds=40)
    got = sorted(float(b.params[0][0].real) for b in report.roots)
    assert got == pytest.approx([-2 / 3, 2 / 3], abs=1e-14)


def test_no_admissible_pair_on_one_site():
    cfg = _cfg(2, 1, "3", ["2"])
    report = solve_bethe(cfg, (2,), seeds=20)
    assert report.roots == []
    assert sum(report.failures.values()) == 20


def test_solver_needs_complex_backend():
    with pytest.raises(TypeError):
        solve_bethe(_cfg(2, 1, "3", ["2"], field=QQ), (1,))


def test_eigenvector_and_negative_control():
    cfg = _cfg(2, 2, "5/2", ["1", "-3"], ["2", "7"])
    roots = solve_bethe(cfg, (1,), seeds=40).roots
    assert len(roots) == 2
    us = [F256("1/3"), F256("(2,1)")]
    for b in roots:
        rep = eigenvector_check(cfg, b, us, recheck_bits=512)
        assert rep.ok, rep
    off = ((roots[0].params[0][0] + F256("1/1000"),),)
    bad = eigenvector_check(cfg, off, us)
    assert min(bad.residuals) > 1e-8
    assert not bad.ok


def test_sample_at_inhomogeneity_is_a_pole():
    cfg = _cfg(2, 1, "3", ["2"])
    root = solve_bethe(cfg, (1,), seeds=10).roots[0]
    with pytest.raises(PoleError):
        eigenvector_check(cfg, root, [F256(2)])


def test_single_pair_gaudin_matrix(q3):
    X = QQ(11) / 7
    assert gaudin_matrix(q3, [[QQ(2)]], [[X]]) == [[X]]
    assert K(q3, QQ(2), QQ(2)) == -(q3.q + q3.q_inv)


def test_one_site_norm_is_x():
    cfg = _cfg(2, 1, "3", ["2"])
    root = solve_bethe(cfg, (1,), seeds=10).roots[0]
    X = x_from_alpha(cfg, root.params)[0][0]
    rep = norm_check(cfg, root)
    assert rep.ok
    assert abs(rep.norm_lhs - X) < 1e-60
    assert abs(gaudin_norm(cfg, root.params) - X) < 1e-60


@pytest.mark.parametrize("m,L,r", [(2, 3, (2,)), (3, 2, (1, 1))])
def test_norm_formula(m, L, r):
    kappa = ["2", "-3", "5"][:m]
    cfg = _cfg(m, L, "3/2", ["1", "-2", "5"][:L], kappa)
    roots = solve_bethe(cfg, r, seeds=150).roots
    assert roots
    for b in roots:
        rep = norm_check(cfg, b)
        assert rep.rel_err < 1e-25
        assert set(rep.to_json()) == {"roots", "residuals", "norm_lhs", "norm_rhs", "rel_err"}


def test_gaudin_matches_log_derivative_definition():
    cfg = _cfg(3, 2, "3/2", ["1", "-2"], ["2", "-3", "5"])
    b = solve_bethe(cfg, (1, 1), seeds=60).roots[0]
    G = gaudin_matrix(cfg.q, b.params, x_from_alpha(cfg, b.params))
    D = gaudin_from_definition(cfg, b.params)
    assert max(abs(x - y) for rg, rd in zip(G, D) for x, y in zip(rg, rd)) < 1e-60


def test_x_from_alpha_against_finite_difference():
    cfg = _cfg(2, 3, "3/2", ["1", "-2", "5"], ["2", "7"])
    ctx = F256.ctx
    z = F256("(1/3,1/5)")
    X = x_from_alpha(cfg, ((z,),))[0][0]
    h = ctx.mpf(2) ** -60
    la = lambda w: ctx.log(cfg.monodromy.alpha(1, w))
    fd = -cfg.q.delta * z * (la(z + h) - la(z - h)) / (2 * h)
    assert abs(fd - X) / abs(X) < 1e-10


def test_far_blocks_vanish(rng):
    q = draw_q(rng)
    t = draw_sets(rng, q, (1, 1, 1))
    X = tuple((draw_rational(rng),) for _ in range(3))
    G = gaudin_matrix(q, t, X)
    assert G[0][2] == 0 and G[2][0] == 0


def test_korepin_single_and_vanishing(q3):
    t = ((QQ(2),),)
    assert korepin_F(q3, t, ((QQ(5),),)) == 5
    t = ((QQ(2), QQ(7)), (QQ(-3),))
    zeros = ((QQ(0), QQ(0)), (QQ(0),))
    assert korepin_F(q3, t, zeros) == 0


def test_korepin_derivative_m2_r2(rng):
    q = QParam.of(QQ(4) / 3)
    t = ((QQ(2), QQ(-5)),)
    X = ((QQ(1) / 3, QQ(7)),)
    G = gaudin_matrix(q, t, X)
    shifted = ((X[0][1] - K(q, t[0][0], t[0][1]),),)
    assert det([[G[1][1]]]) == korepin_F(q, ((t[0][1],),), shifted)


@pytest.mark.parametrize("r", [(1,), (3,), (1, 1), (2, 1), (1, 2, 1), (2, 2, 1), (1, 1, 1, 1)])
def test_korepin_criteria(rng, r):
    q = draw_q(rng)
    t = draw_sets(rng, q, r)
    X = tuple(tuple(draw_rational(rng) for _ in c) for c in t)
    res = korepin_suite(q, t, X)
    assert all(res.values()), res
    assert ("iii_single" in res) == (sum(r) == 1)
