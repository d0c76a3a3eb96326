import itertools
import random
from fractions import Fraction

import pytest

from nondiv.errors import DependentVectors, ValidationError
from nondiv import ratlin as rl


def brute_same_row_span_z(a, b, coeff=4):
    """Oracle: every row of each matrix is an integer combination of the other's rows.

    Brute force over small coefficient boxes; only usable for tiny matrices.
    """
    def covered(rows, target):
        k = len(rows)
        for coeffs in itertools.product(range(-coeff, coeff + 1), repeat=k):
            v = [sum(c * r[j] for c, r in zip(coeffs, rows)) for j in range(len(target))]
            if tuple(v) == tuple(target):
                return True
        return False
    return all(covered(b, r) for r in a if any(r)) and all(covered(a, r) for r in b if any(r))


def test_hnf_example_2x2():
    h, u = rl.hnf([[2, 4], [1, 1]])
    assert h == ((1, 1), (0, 2))
    assert rl.mat_mul(u, [[2, 4], [1, 1]]) == h
    assert abs(rl.int_det(u)) == 1
    assert brute_same_row_span_z([[2, 4], [1, 1]], h)


def test_hnf_identity_and_zero():
    h, u = rl.hnf(rl.identity(3))
    assert h == rl.identity(3)
    z = ((0, 0), (0, 0))
    h, u = rl.hnf(z)
    assert h == z
    assert abs(rl.int_det(u)) == 1


def test_hnf_shape_conventions():
    rng = random.Random(11)
    for _ in range(200):
        rows = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(rng.randint(1, 4))]
        h, u = rl.hnf(rows)
        assert rl.mat_mul(u, rows) == h
        assert abs(rl.int_det(u)) == 1
        # echelon with positive pivots, reduced above, zero rows trailing
        seen_zero = False
        last_pivot = -1
        for r in h:
            nz = [j for j, x in enumerate(r) if x]
            if not nz:
                seen_zero = True
                continue
            assert not seen_zero
            p = nz[0]
            assert p > last_pivot
            last_pivot = p
            assert r[p] > 0
        pivots = [(i, next(j for j, x in enumerate(r) if x)) for i, r in enumerate(h) if any(r)]
        for i, p in pivots:
            for k in range(i):
                assert 0 <= h[k][p] < h[i][p]
        # idempotence
        h2, _ = rl.hnf(h)
        assert h2 == h


def test_saturate_examples():
    assert rl.saturate([[2, 0], [0, 2]]) == ((1, 0), (0, 1))
    assert rl.saturate([[1, 1, 0]]) == ((1, 1, 0),)
    assert rl.saturate([[2, 2, 0], [0, 0, 3]]) == ((1, 1, 0), (0, 0, 1))


def test_saturate_231_denominator_oracle():
    # each returned vector lies in the Q-span, is integral, and no vector of
    # the span with denominator up to the original index is missed
    sat = rl.saturate([[2, 2, 0], [0, 0, 3]])
    for den in range(1, 7):
        for a in range(-6, 7):
            for b in range(-6, 7):
                v = (Fraction(2 * a, den), Fraction(2 * a, den), Fraction(3 * b, den))
                if all(x.denominator == 1 for x in v):
                    vi = tuple(int(x) for x in v)
                    assert rl.span_contains(sat, vi)
                    # integral member of the span must be an integer combo of sat
                    rrefd, piv = rl._rref(list(sat) + [vi])
                    assert len(piv) == 2


def test_saturate_idempotent_and_span_preserving():
    rng = random.Random(7)
    for _ in range(150):
        rows = [[rng.randint(-6, 6) for _ in range(4)] for _ in range(rng.randint(1, 3))]
        s = rl.saturate(rows)
        assert rl.saturate(s) == s
        assert rl.rat_rank(s) == rl.rat_rank([r for r in rows if any(r)])
        for r in rows:
            assert rl.span_contains(s, r)


def test_gram_det_examples():
    assert rl.gram_det([[1, 0, 0], [0, 1, 0]]) == 1
    assert rl.gram_det([[1, 1, 0], [0, 1, 1]]) == 3
    assert rl.gram_det([[2, 0], [0, Fraction(1, 2)]]) == 1
    with pytest.raises(DependentVectors):
        rl.gram_det([[1, 2], [2, 4]])


def test_gram_det_reorder_sign_invariance():
    rng = random.Random(3)
    for _ in range(100):
        k = rng.randint(1, 3)
        vecs = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(4)]
                for _ in range(k)]
        try:
            g = rl.gram_det(vecs)
        except DependentVectors:
            continue
        perm = list(range(k))
        rng.shuffle(perm)
        flipped = [[-x for x in vecs[p]] if rng.random() < 0.5 else vecs[p] for p in perm]
        assert rl.gram_det(flipped) == g


def test_gram_det_cauchy_binet_oracle():
    rng = random.Random(5)
    for _ in range(100):
        k = rng.randint(1, 3)
        n = rng.randint(k, 4)
        vecs = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)]
                for _ in range(k)]
        minors = Fraction(0)
        for cols in itertools.combinations(range(n), k):
            sub = [[v[c] for c in cols] for v in vecs]
            minors += rl.rat_det(sub) ** 2
        try:
            g = rl.gram_det(vecs)
            assert g == minors
        except DependentVectors:
            assert minors == 0


def test_int_det_against_rat_det():
    rng = random.Random(13)
    for _ in range(200):
        n = rng.randint(1, 5)
        m = [[rng.randint(-7, 7) for _ in range(n)] for _ in range(n)]
        assert rl.int_det(m) == rl.rat_det(m)


def test_right_kernel_int():
    ker = rl.right_kernel_int([[1, 2, 3]])
    assert len(ker) == 2
    for v in ker:
        assert 1 * v[0] + 2 * v[1] + 3 * v[2] == 0
    rng = random.Random(17)
    for _ in range(100):
        rows = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(rng.randint(1, 3))]
        ker = rl.right_kernel_int(rows)
        assert len(ker) == 4 - rl.rat_rank(rows)
        for v in ker:
            for r in rows:
                assert sum(a * b for a, b in zip(r, v)) == 0
        # kernels are saturated
        if ker:
            assert rl.saturate(ker) == ker


def test_xgcd():
    rng = random.Random(19)
    for _ in range(300):
        a, b = rng.randint(-50, 50), rng.randint(-50, 50)
        g, x, y = rl.xgcd(a, b)
        assert g == a * x + b * y
        assert g >= 0
        if a or b:
            assert a % g == 0 and b % g == 0


def test_int_inverse_unimodular():
    rng = random.Random(23)
    for _ in range(50):
        n = rng.randint(2, 4)
        # build a unimodular matrix from elementary row additions
        m = [list(r) for r in rl.identity(n)]
        for _ in range(6):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j:
                c = rng.randint(-3, 3)
                m[i] = [x + c * y for x, y in zip(m[i], m[j])]
        inv = rl.int_inverse_unimodular(m)
        assert rl.mat_mul(m, inv) == rl.identity(n)


def test_rat_right_kernel():
    ker = rl.rat_right_kernel([[Fraction(1), Fraction(1), Fraction(0)]])
    assert len(ker) == 2
    for v in ker:
        assert v[0] + v[1] == 0 or (v[0] == -v[1])
        assert sum(a * b for a, b in zip((1, 1, 0), v)) == 0


def test_validation():
    with pytest.raises(ValidationError):
        rl.int_matrix([[1, 2], [3]])
    with pytest.raises(ValidationError):
        rl.int_matrix([[1, 2.5]])
    with pytest.raises(ValidationError):
        rl.rat_matrix([[0.5]])
    assert rl.rat_matrix([["1/2", 3]]) == ((Fraction(1, 2), Fraction(3)),)


def test_primitive_part_and_lcm():
    assert rl.primitive_part((4, 6, -2)) == (2, 3, -1)
    assert rl.primitive_part((0, 0)) == (0, 0)
    assert rl.lcm_upto(4) == 12
    assert rl.lcm_upto(5) == 60
