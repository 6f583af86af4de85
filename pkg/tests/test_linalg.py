import itertools
import math

from hypothesis import given, settings, strategies as st

from intruder.linalg import column_hermite, egcd, gf2_rank, gf2_solve, int_solve


def test_gf2_solve_examples():
    # a=1, b=2, c=4: a^b, b^c, target a^c
    assert gf2_solve([0b011, 0b110], 0b101) == 0b11
    assert gf2_solve([0b011, 0b110], 0b001) is None
    assert gf2_solve([], 0) == 0
    assert gf2_solve([0b1], 0) == 0


def test_gf2_rank():
    assert gf2_rank([0b011, 0b110, 0b101]) == 2
    assert gf2_rank([1, 2, 4, 8]) == 4
    assert gf2_rank([0, 0]) == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 63), max_size=7), st.integers(0, 63))
def test_gf2_solve_matches_enumeration(vectors, target):
    reachable = set()
    for mask in range(1 << len(vectors)):
        acc = 0
        for j, v in enumerate(vectors):
            if mask >> j & 1:
                acc ^= v
        reachable.add(acc)
    got = gf2_solve(vectors, target)
    assert (got is not None) == (target in reachable)
    if got is not None:
        acc = 0
        for j, v in enumerate(vectors):
            if got >> j & 1:
                acc ^= v
        assert acc == target


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_egcd(a, b):
    g, s, t = egcd(a, b)
    assert g == math.gcd(a, b)
    assert s * a + t * b == g


def test_int_solve_examples():
    # 2x = 3 has no integer solution, 2x + 3y = 1 does
    assert int_solve([[2]], [3]) is None
    x = int_solve([[2, 3]], [1])
    assert 2 * x[0] + 3 * x[1] == 1
    assert int_solve([[1, 1], [1, -1]], [1, 0]) is None
    assert int_solve([[1, 1], [1, -1]], [2, 0]) == [1, 1]
    assert int_solve([], []) == []


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([r[:j] + r[j + 1 :] for r in m[1:]]) for j in range(n))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=1, max_size=4)))
def test_column_hermite_is_unimodular(rows):
    ncols = len(rows[0])
    H, U, pivots = column_hermite(rows, ncols)
    assert _matmul(rows, U) == H
    assert abs(_det(U)) == 1
    for c, i in enumerate(pivots):
        assert H[i][c] > 0
        assert all(H[r][c] == 0 for r in range(i))
    for c in range(len(pivots), ncols):
        assert all(row[c] == 0 for row in H)


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda c: st.tuples(
            st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=1, max_size=3),
            st.lists(st.integers(-4, 4), min_size=3, max_size=3),
        )
    )
)
def test_int_solve_matches_bounded_search(data):
    rows, b = data
    b = b[: len(rows)]
    x = int_solve(rows, b)
    if x is not None:
        assert [sum(r[j] * x[j] for j in range(len(x))) for r in rows] == b
    else:
        for cand in itertools.product(range(-6, 7), repeat=len(rows[0])):
            assert [sum(r[j] * cand[j] for j in range(len(cand))) for r in rows] != b
