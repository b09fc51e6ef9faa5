from nestedbethe.field import QQ
from nestedbethe.states import LinOp, State, coloring, content, index_to_word, word_to_index


def test_word_index_roundtrip():
    for idx in range(27):
        assert word_to_index(index_to_word(idx, 3, 3), 3) == idx


def test_content_and_coloring():
    idx = word_to_index((1, 3, 2), 3)
    assert content(idx, 3, 3) == (1, 1, 1)
    assert coloring(idx, 3, 3) == (2, 1)


def test_state_algebra():
    a = State.basis(2, 2, (1, 2), QQ(1))
    b = State.basis(2, 2, (2, 1), QQ(3))
    s = a + b
    assert s.dot(s) == 10
    assert (s - b) == a
    assert (a * 0).is_zero()
    assert a.kron(State.vacuum(2, 1, QQ(1))) == State.basis(2, 3, (1, 2, 1), QQ(1))


def test_linop_products():
    A = LinOp(2, {0: {1: QQ(1)}})
    B = LinOp(2, {1: {0: QQ(2)}})
    assert (A @ B).rows == {0: {0: 2}}
    assert (A @ B - B @ A).rows == {0: {0: 2}, 1: {1: -2}}
    assert A.transpose().rows == {1: {0: 1}}
    v = State(2, 1, {1: QQ(5)})
    assert (A @ v).data == {0: 5}
