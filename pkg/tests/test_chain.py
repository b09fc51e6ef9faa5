import pytest

from nestedbethe.chain import (ChainConfig, Monodromy, commutator, r_entry, rtt_check, transfer_matrix,
                               vacuum_checks, vacuum_lambda, yang_baxter_check)
from nestedbethe.field import QQ, PoleError, f, g_l
from nestedbethe.sampling import draw_chain, draw_generic, draw_q
from nestedbethe.states import State


def test_r_matrix_entries(q3):
    u, v = QQ(5), QQ(2)
    assert r_entry(q3, u, v, (1, 1), (1, 1)) == f(q3, u, v)
    assert r_entry(q3, u, v, (1, 2), (2, 1)) == g_l(q3, u, v)
    assert r_entry(q3, u, v, (1, 2), (1, 2)) == 1
    assert r_entry(q3, u, v, (1, 2), (2, 2)) == 0


@pytest.mark.parametrize("m", [2, 3, 4])
def test_yang_baxter(rng, m):
    for _ in range(5):
        q = draw_q(rng)
        u, v, w = draw_generic(rng, q, 3)
        assert yang_baxter_check(q, u, v, w, m)


def test_one_site_raising_entries():
    cfg = ChainConfig.build(3, 1, 3, ["2"])
    u = QQ(7)
    for i in range(1, 4):
        for j in range(i + 1, 4):
            op = cfg.monodromy.entry(i, j, u)
            assert op.rows == {j - 1: {i - 1: g_l(cfg.q, u, QQ(2))}}


def test_vacuum_eigenvalues(rng):
    cfg = draw_chain(rng, 3, 2)
    u = draw_generic(rng, cfg.q, 1, cfg.xi)[0]
    assert all(vacuum_checks(cfg, u).values())
    assert vacuum_lambda(cfg, 2, u) == cfg.kappa[1]
    one = ChainConfig.build(2, 1, 3, ["1"], ["5", "2"])
    assert vacuum_lambda(one, 1, QQ(4)) == 5 * f(one.q, QQ(4), QQ(1))
    assert one.monodromy.alpha(1, QQ(4)) == QQ(5) / 2 * f(one.q, QQ(4), QQ(1))


def test_lower_entries_kill_vacuum(rng):
    cfg = draw_chain(rng, 3, 2)
    u = draw_generic(rng, cfg.q, 1, cfg.xi)[0]
    vac = cfg.monodromy.vacuum()
    for i in range(1, 4):
        for j in range(1, i):
            assert cfg.monodromy.apply(i, j, u, vac).is_zero()


def test_rtt_with_twist(rng):
    cfg = draw_chain(rng, 3, 2)
    assert any(k != 1 for k in cfg.kappa)
    for _ in range(3):
        u, v = draw_generic(rng, cfg.q, 2, cfg.xi)
        assert rtt_check(cfg, u, v)


def test_transfer_matrices_commute(rng):
    cfg = draw_chain(rng, 2, 3)
    u, v = draw_generic(rng, cfg.q, 2, cfg.xi)
    assert commutator(transfer_matrix(cfg, u), transfer_matrix(cfg, v)).is_zero()


def test_same_entry_commutes(rng):
    cfg = draw_chain(rng, 3, 2)
    u, v = draw_generic(rng, cfg.q, 2, cfg.xi)
    mono = cfg.monodromy
    assert commutator(mono.entry(1, 3, u), mono.entry(1, 3, v)).is_zero()


def test_pole_at_inhomogeneity():
    cfg = ChainConfig.build(2, 1, 3, ["1"])
    with pytest.raises(PoleError):
        cfg.monodromy.apply(1, 2, QQ(1), cfg.monodromy.vacuum())


def test_config_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        ChainConfig.build(2, 2, 3, ["1", "1"])
    with pytest.raises(ValueError):
        ChainConfig.build(2, 1, 3, ["1"], ["1", "0"])
    path = tmp_path / "c.json"
    path.write_text('{"m": 2, "L": 1, "q": "3", "xi": ["1/2"]}')
    cfg = ChainConfig.load(path)
    assert cfg.kappa == (1, 1)
    assert ChainConfig.from_dict(cfg.to_dict()) == cfg
    assert len(cfg.digest) == 12


def test_monodromy_composition_matches_longer_chain():
    c1 = ChainConfig.build(2, 1, 3, ["1"])
    c2 = ChainConfig.build(2, 1, 3, ["5"])
    both = ChainConfig.build(2, 2, 3, ["1", "5"])
    comp = Monodromy.compose(c2.monodromy, c1.monodromy)
    u = QQ(7)
    for i in (1, 2):
        for j in (1, 2):
            assert comp.entry(i, j, u) == both.monodromy.entry(i, j, u)


def test_vacuum_state():
    cfg = ChainConfig.build(3, 2, 3, ["1", "2"])
    assert cfg.monodromy.vacuum() == State.vacuum(3, 2, QQ(1))
