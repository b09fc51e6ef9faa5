import pytest

from nestedbethe.field import QQ, QParam, g_l
from nestedbethe.highest import HCEngine, hc_symmetry_check, hc_Z, hc_Z_alt, hc_Zbar, invert
from nestedbethe.sampling import draw_q, draw_sets, flat


def test_single_pair(q3):
    assert hc_Z(q3, [[QQ(1)]], [[QQ(2)]]) == QQ(16) / 3
    assert hc_Z(q3, [[QQ(1)]], [[QQ(2)]]) == g_l(q3, QQ(2), QQ(1))


def test_empty_sets(q3):
    assert hc_Z(q3, [], []) == 1
    assert hc_Z(q3, [[], []], [[], []]) == 1
    assert hc_Zbar(q3, [[]], [[]]) == 1


def test_single_pair_inversion_symmetry(rng):
    for _ in range(5):
        q = draw_q(rng)
        s, t = draw_sets(rng, q, (2,))[0]
        assert g_l(q, t, s) == g_l(q, 1 / s, 1 / t)


@pytest.mark.parametrize("r", [(1,), (3,), (1, 1), (2, 1), (1, 2), (2, 2), (1, 1, 1), (2, 1, 1), (1, 0, 1), (0, 2)])
def test_recursions_and_symmetries(rng, r):
    for _ in range(4):
        q = draw_q(rng)
        s = draw_sets(rng, q, r)
        t = draw_sets(rng, q, r, flat(s))
        assert hc_Z(q, s, t) == hc_Z_alt(q, s, t)
        assert all(hc_symmetry_check(q, s, t).values())


def test_within_color_symmetry(rng):
    q = draw_q(rng)
    s = draw_sets(rng, q, (2, 2))
    t = draw_sets(rng, q, (2, 2), flat(s))
    eng = HCEngine(q, use_cache=False)
    perm_s = (s[0][::-1], s[1])
    perm_t = (t[0], t[1][::-1])
    assert eng.Z(s, t) == eng.Z(perm_s, perm_t)


def test_cache_agrees_with_uncached(rng):
    q = draw_q(rng)
    s = draw_sets(rng, q, (2, 1, 1))
    t = draw_sets(rng, q, (2, 1, 1), flat(s))
    cached = HCEngine(q)
    first = cached.Z(s, t)
    assert first == HCEngine(q, use_cache=False).Z(s, t)
    assert cached.Z(s, t) == first
    assert cached.hits >= 1
    rows = cached.export()
    assert rows and all({"recursion", "level", "orientation", "s", "t", "Z"} <= row.keys() for row in rows)


def test_shape_mismatch(q3):
    with pytest.raises(ValueError):
        hc_Z(q3, [[QQ(1)]], [[QQ(2), QQ(3)]])


def test_invert_rejects_zero():
    with pytest.raises(ValueError):
        invert([[QQ(0)]], QQ)


def test_zbar_is_not_z(rng):
    q = QParam.of(QQ(5) / 3)
    s, t = [[QQ(2)]], [[QQ(7)]]
    assert hc_Zbar(q, s, t) != hc_Z(q, s, t)
