import itertools

import pytest
from hypothesis import given, settings, strategies as st

from almostflat.errors import NotSymmetricError, RankMismatchError
from almostflat.forms import (
    Hyperbolic,
    Other,
    SymForm,
    Zero,
    characteristic_polynomial,
    classify,
    equivalent_small,
    form_class_from_json,
    hyperbolic,
    is_even,
    is_unimodular,
    signature,
    torus_form_oracle,
)
from almostflat.linalg import IntMatrix, determinant

import oracles

H = SymForm.from_rows([[0, 1], [1, 0]])


def diag_form(*v):
    return SymForm(IntMatrix.diag(v))


@st.composite
def sym_forms(draw, max_n=5, lo=-6, hi=6):
    n = draw(st.integers(0, max_n))
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = draw(st.integers(lo, hi))
    return SymForm.from_rows(rows)


def scramble(f, seed, bound=2):
    u = IntMatrix.from_rows(oracles.random_unimodular(f.n, oracles.seeded(seed), bound))
    return f.change_basis(u), u


class TestConstruction:
    def test_hyperbolic(self):
        assert hyperbolic(1).q.to_rows() == [[0, 1], [1, 0]]
        assert hyperbolic(0).n == 0
        assert hyperbolic(2).q.to_rows() == [
            [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]

    def test_symmetry_required(self):
        with pytest.raises(NotSymmetricError):
            SymForm.from_rows([[0, 1], [2, 0]])

    def test_orthogonal_sum_and_eval(self):
        f = H + diag_form(3)
        assert f.n == 3
        assert f((1, 1, 1), (1, 1, 1)) == 5


class TestParity:
    def test_examples(self):
        assert is_even(H)
        assert not is_even(SymForm(IntMatrix.identity(2)))
        assert is_even(hyperbolic(0))

    @settings(max_examples=200, deadline=None)
    @given(sym_forms(), st.integers(0, 2**32))
    def test_diagonal_characterisation(self, f, seed):
        rnd = oracles.seeded(seed)
        vectors_even = all(f(a, a) % 2 == 0 for a in
                           ([rnd.randint(-5, 5) for _ in range(f.n)] for _ in range(100)))
        basis_even = all(f(e, e) % 2 == 0 for e in
                         ([int(i == j) for j in range(f.n)] for i in range(f.n)))
        assert is_even(f) == basis_even
        # random vectors may miss odd directions only if every one lands on an even value
        if is_even(f):
            assert vectors_even


class TestUnimodular:
    def test_examples(self):
        assert is_unimodular(H)
        assert not is_unimodular(diag_form(2))
        assert is_unimodular(hyperbolic(0))


class TestSignature:
    def test_examples(self):
        assert signature(H) == 0
        assert signature(SymForm(IntMatrix.identity(3))) == 3
        assert signature(diag_form(1, -1, -1)) == -1

    def test_degenerate(self):
        assert signature(diag_form(0, 2, -3, 0)) == 0
        assert signature(diag_form(0, 0)) == 0
        assert signature(SymForm.from_rows([[1, 1], [1, 1]])) == 1

    def test_e8(self):
        # Cartan matrix of E8 (positive definite, even, unimodular)
        e8 = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
        for i, j in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]:
            e8[i][j] = e8[j][i] = -1
        f = SymForm.from_rows(e8)
        assert signature(f) == 8
        assert classify(f) == Other(8, 8, True, 1)

    def test_charpoly(self):
        assert characteristic_polynomial(IntMatrix.from_rows([[0, 1], [1, 0]])) == [1, 0, -1]
        assert characteristic_polynomial(IntMatrix.diag([2, 3])) == [1, -5, 6]

    @settings(max_examples=150, deadline=None)
    @given(sym_forms(max_n=4), sym_forms(max_n=4))
    def test_additivity(self, f, g):
        assert signature(f + g) == signature(f) + signature(g)
        assert signature(-f) == -signature(f)

    @settings(max_examples=150, deadline=None)
    @given(sym_forms(max_n=5))
    def test_matches_sylvester_inertia(self, f):
        # independent oracle: congruence diagonalisation over Q
        from fractions import Fraction
        n = f.n
        m = [[Fraction(x) for x in row] for row in f.q.to_rows()]
        diag = []
        while m:
            k = len(m)
            piv = next((i for i in range(k) if m[i][i] != 0), None)
            if piv is None:
                pair = next(((i, j) for i in range(k) for j in range(k) if m[i][j] != 0), None)
                if pair is None:
                    break
                i, j = pair
                # e_i + e_j has nonzero norm 2 m_ij
                m[i] = [a + b for a, b in zip(m[i], m[j])]
                for r in m:
                    r[i] += r[j]
                continue
            m[0], m[piv] = m[piv], m[0]
            for r in m:
                r[0], r[piv] = r[piv], r[0]
            p = m[0][0]
            diag.append(p)
            m = [[m[i][j] - m[i][0] * m[0][j] / p for j in range(1, k)] for i in range(1, k)]
        expected = sum(1 for d in diag if d > 0) - sum(1 for d in diag if d < 0)
        assert signature(f) == expected
        assert n >= len(diag)


class TestClassify:
    def test_examples(self):
        assert classify(hyperbolic(0)) == Zero()
        assert classify(SymForm(IntMatrix.identity(2))) == Other(2, 2, False, 1)

    def test_scrambled_2h(self):
        f, u = scramble(hyperbolic(2), seed=7)
        assert classify(f) == Hyperbolic(2)
        assert equivalent_small(hyperbolic(2), f, 2) is not None

    def test_degenerate_is_other(self):
        assert classify(diag_form(0, 0)) == Other(2, 0, True, 0)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_roundtrip(self, n):
        expected = Zero() if n == 0 else Hyperbolic(n)
        assert classify(hyperbolic(n)) == expected

    @settings(max_examples=60, deadline=None)
    @given(sym_forms(max_n=4, lo=-3, hi=3), st.integers(0, 2**32))
    def test_basis_invariance(self, f, seed):
        g, _ = scramble(f, seed)
        assert classify(g) == classify(f)

    def test_json_roundtrip(self):
        for c in (Zero(), Hyperbolic(2), Other(3, 1, False, 2)):
            assert form_class_from_json(c.to_json()) == c
        assert str(Hyperbolic(1)) == "1H" and str(Zero()) == "0"

    def test_hyperbolic_needs_positive(self):
        with pytest.raises(ValueError):
            Hyperbolic(0)


class TestEquivalentSmall:
    def test_permutation(self):
        u = equivalent_small(H, H, 1)
        assert u is not None
        assert H.change_basis(u) == H
        # lexicographically first witness (columns scanned from -1 upward)
        assert u.to_rows() == [[-1, 0], [0, -1]]

    def test_reordered_basis(self):
        target = SymForm.from_rows([[0, 1], [1, 0]])
        u = equivalent_small(H, target, 1)
        assert H.change_basis(u) == target

    def test_parity_obstruction(self):
        assert equivalent_small(H, diag_form(1, -1), 3) is None

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatchError):
            equivalent_small(H, hyperbolic(2), 1)

    def test_scrambled_2h_bound_2(self):
        # backtracking oracle: the scrambling matrix itself is a witness within bound 2
        f, u = scramble(hyperbolic(2), seed=3)
        assert u.max_abs() <= 2
        assert hyperbolic(2).change_basis(u) == f
        w = equivalent_small(hyperbolic(2), f, 2)
        assert w is not None
        assert hyperbolic(2).change_basis(w) == f
        assert abs(determinant(w)) == 1

    def test_deterministic(self):
        f, _ = scramble(hyperbolic(2), seed=11)
        assert equivalent_small(hyperbolic(2), f, 2) == equivalent_small(hyperbolic(2), f, 2)

    @settings(max_examples=30, deadline=None)
    @given(sym_forms(max_n=3, lo=-2, hi=2), st.integers(0, 2**32))
    def test_witness_implies_same_class(self, f, seed):
        g, _ = scramble(f, seed, bound=1)
        w = equivalent_small(f, g, 1)
        assert w is not None
        assert classify(f) == classify(g)
        assert determinant(f.q) == determinant(g.q)


class TestTorusOracle:
    def test_rank(self):
        assert torus_form_oracle().n == 6

    def test_matrix(self):
        # basis 12,13,14,23,24,34: 12.34 = +1, 13.24 = -1, 14.23 = +1
        expected = [[0] * 6 for _ in range(6)]
        for i, j, s in [(0, 5, 1), (1, 4, -1), (2, 3, 1)]:
            expected[i][j] = expected[j][i] = s
        assert torus_form_oracle().q.to_rows() == expected

    def test_invariants(self):
        t = torus_form_oracle()
        assert is_even(t) and is_unimodular(t)
        assert signature(t) == 0
        assert classify(t) == Hyperbolic(3)

    def test_cup_product_is_wedge(self):
        # independent check via 4x4 determinants: (a^b) . (c^d) = det[a b c d]
        basis = list(itertools.combinations(range(4), 2))
        e = [[int(i == j) for j in range(4)] for i in range(4)]
        t = torus_form_oracle()
        for x, (a, b) in enumerate(basis):
            for y, (c, d) in enumerate(basis):
                assert t.q[x, y] == oracles.leibniz_det([e[a], e[b], e[c], e[d]])
