from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwishart.polynomials import (
    MomentPolynomial,
    TraceAtom,
    evaluate_atom,
    limit_large_n,
    poly_from_json,
    poly_to_json,
    rational_to_str,
)

P = MomentPolynomial
q = P.symbol("q")
lam = P.symbol("lambda")
N = P.symbol("N")


rationals = st.fractions(
    min_value=Fraction(-20), max_value=Fraction(20), max_denominator=6
)


@st.composite
def poly_st(draw):
    terms = draw(
        st.lists(
            st.tuples(
                rationals,
                st.integers(0, 3),
                st.integers(-2, 2),
                st.integers(0, 2),
            ),
            max_size=5,
        )
    )
    out = P.zero()
    for coeff, eq_, en, el in terms:
        out = out + P.monomial(coeff, {"q": eq_, "N": en, "lambda": el})
    return out


@st.composite
def rational_matrix_st(draw, n=3):
    return [
        [draw(st.fractions(min_value=Fraction(-3), max_value=Fraction(3), max_denominator=4)) for _ in range(n)]
        for _ in range(n)
    ]


class TestRing:
    def test_cancellation(self):
        p = 3 * q**2 + lam
        assert (p + (-1) * p).is_zero()

    def test_monomial_product(self):
        assert q * q == P.symbol("q", 2)

    def test_small_expansion(self):
        assert (1 + q) * (1 + q**2) == 1 + q + q**2 + q**3

    @given(poly_st(), poly_st(), poly_st())
    def test_ring_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a * b) * c == a * (b * c)

    @given(poly_st())
    def test_canonical_equality(self, a):
        rebuilt = P.zero()
        for mono, coeff in reversed(a.terms()):
            rebuilt = rebuilt + P({mono: coeff})
        assert rebuilt == a
        assert hash(rebuilt) == hash(a)

    def test_unknown_symbol_rejected(self):
        with pytest.raises(ValueError):
            P.symbol("x")


class TestSubstitution:
    def test_scalar(self):
        assert P.symbol("q", 2).substitute({"q": 1}) == P.constant(1)

    def test_symbol_to_poly(self):
        m = P.symbol("M")
        assert m.substitute({"M": lam * N}) == lam * N

    def test_atom_binding(self):
        atom = TraceAtom.make("shape", [(1, False), (1, False)])
        p = 2 * P.atom(atom)
        assert p.substitute({atom: 4}) == P.constant(8)

    def test_negative_power(self):
        p = P.monomial(3, {"N": -2})
        assert p.substitute({"N": 2}) == P.constant(Fraction(3, 4))

    @given(poly_st(), rationals, rationals)
    def test_substitute_commutes_with_evaluation(self, p, qv, lv):
        both = p.substitute({"q": qv, "lambda": lv})
        stepwise = p.substitute({"q": qv}).substitute({"lambda": lv})
        assert both == stepwise


class TestLimit:
    def test_drops_vanishing(self):
        assert limit_large_n(3 + 5 * P.symbol("N", -1)) == P.constant(3)

    def test_keeps_finite(self):
        p = lam**2 * q**4 + 2 * lam**3 * P.symbol("N", -1)
        assert limit_large_n(p) == lam**2 * q**4

    def test_rejects_divergence(self):
        with pytest.raises(ValueError):
            limit_large_n(N + 1)


class TestAtoms:
    def test_rotation_canonical(self):
        a = TraceAtom.make("scale", [(2, False), (1, False)])
        b = TraceAtom.make("scale", [(1, False), (2, False)])
        assert a == b

    def test_reversal_with_flip(self):
        # tr(B1 B2') and tr(B2 B1') agree for real matrices
        a = TraceAtom.make("shape", [(1, False), (2, True)])
        b = TraceAtom.make("shape", [(2, False), (1, True)])
        assert a == b

    def test_transpose_word_vs_plain(self):
        assert TraceAtom.make("shape", [(1, True), (1, True)]) == TraceAtom.make(
            "shape", [(1, False), (1, False)]
        )
        assert TraceAtom.make("shape", [(1, True), (1, False)]) != TraceAtom.make(
            "shape", [(1, False), (1, False)]
        )

    def test_canonicalization_idempotent(self):
        word = ((2, True), (1, False), (2, False))
        atom = TraceAtom.make("shape", word)
        assert TraceAtom.make("shape", atom.word) == atom

    def test_str(self):
        atom = TraceAtom.make("shape", [(2, False), (2, True)])
        assert str(atom) == "tr(B2 B2')"


class TestEvaluateAtom:
    def test_identity_word(self):
        atom = TraceAtom.make("shape", [(1, False)])
        assert evaluate_atom(atom, {1: [[1, 0], [0, 1]]}) == 2

    def test_gram_word(self):
        b = [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]]
        atom = TraceAtom.make("shape", [(1, False), (1, True)])
        assert evaluate_atom(atom, {1: b}) == 1 + 4 + 9 + 16

    @given(rational_matrix_st(), rational_matrix_st())
    def test_invariance_under_canonicalization_group(self, b1, b2):
        mats = {1: b1, 2: b2}
        word = ((1, False), (2, True), (1, False))
        base = evaluate_atom(TraceAtom.make("shape", word), mats)
        for i in range(3):
            rotated = word[i:] + word[:i]
            flipped = tuple((c, not t) for c, t in reversed(word))
            for w in (rotated, flipped):
                direct = _evaluate_raw(w, mats)
                assert direct == base

    def test_missing_color(self):
        atom = TraceAtom.make("scale", [(3, False)])
        with pytest.raises(ValueError):
            evaluate_atom(atom, {1: [[1]]})


def _evaluate_raw(word, mats):
    # direct product evaluation without canonicalization
    from qwishart.polynomials import _matmul, _matrix_rows, _trace, _transpose

    rows = None
    for color, transposed in word:
        m = _matrix_rows(mats[color])
        if transposed:
            m = _transpose(m)
        rows = m if rows is None else _matmul(rows, m)
    return _trace(rows)


class TestJson:
    def test_round_trip(self):
        atom = TraceAtom.make("shape", [(1, False), (1, True)])
        p = P.monomial(Fraction(3, 4), {"q": 2, "N": -1, atom: 1}) + lam
        assert poly_from_json(poly_to_json(p)) == p

    @given(poly_st())
    def test_round_trip_random(self, p):
        assert poly_from_json(poly_to_json(p)) == p

    def test_term_order_deterministic(self):
        p = N + q + lam
        coeffs = [term["powers"] for term in poly_to_json(p)["terms"]]
        assert coeffs == [{"q": 1}, {"lambda": 1}, {"N": 1}]

    def test_rational_strings(self):
        assert rational_to_str(Fraction(3)) == "3"
        assert rational_to_str(Fraction(-3, 4)) == "-3/4"
