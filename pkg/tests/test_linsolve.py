"""Exact rational-function field and linear algebra."""
from fractions import Fraction

from fraclie import Assumptions, Gamma, Rat, Sym, Var, ZERO, ONE, add, mul, \
    neg, pow_, simplify
from fraclie.linsolve import Elem, Field, nullspace, rref

F = Fraction
a = Sym("a")
n = Sym("n")


def field():
    asm = Assumptions("a")
    asm.declare_nonzero("n")
    return Field(asm)


class TestFieldArithmetic:
    def test_fraction_combination(self):
        fld = field()
        # 1/n + 1/(n+1) = (2n+1)/(n(n+1))
        e = fld.add(fld.elem(ONE, n), fld.elem(ONE, add(n, 1)))
        want = fld.elem(add(mul(2, n), 1), mul(n, add(n, 1)))
        assert fld.eq(e, want)

    def test_cancellation_of_expanded_numerator(self):
        fld = field()
        # (8a^2 - 8a) / (8a(a-1)) == 1
        num = add(mul(8, pow_(a, 2)), mul(-8, a))
        den = mul(8, a, add(a, Rat(-1)))
        e = fld.elem(num, den)
        assert fld.eq(e, fld.one)
        assert fld.to_expr(e) == ONE

    def test_polynomial_division_cancellation(self):
        fld = field()
        # n(4a - 3n + 3an) / (4a - 3n + 3an) == n, numerator expanded
        base = add(mul(4, a), mul(-3, n), mul(3, a, n))
        num = simplify(mul(n, base))
        from fraclie.expr import expand
        e = fld.elem(expand(num), base)
        assert fld.to_expr(e) == n

    def test_zero_and_sign(self):
        fld = field()
        x = fld.elem(add(a, neg(a)))
        assert x.is_zero()
        y = fld.elem(ONE, neg(n))
        # denominator sign normalized onto the numerator
        assert fld.eq(y, fld.elem(Rat(-1), n))

    def test_mul_div_round_trip(self):
        fld = field()
        p = fld.elem(add(a, 1), mul(3, n))
        q = fld.elem(add(mul(2, a), Rat(-3)), add(n, 1))
        r = fld.div(fld.mul(p, q), q)
        assert fld.eq(r, p)

    def test_gamma_atoms_ride_along(self):
        fld = field()
        g = fld.elem(Gamma(add(ONE, neg(a))))
        inv = fld.div(fld.one, g)
        assert fld.eq(fld.mul(g, inv), fld.one)
        assert fld.provably_nonzero(Gamma(add(ONE, neg(a))))

    def test_provably_nonzero(self):
        fld = field()
        assert fld.provably_nonzero(add(a, 1))                # in (1,2)
        assert fld.provably_nonzero(mul(n, add(a, Rat(-1))))  # n != 0, a-1 < 0
        assert fld.provably_nonzero(add(mul(8, pow_(a, 2)), mul(-8, a)))
        assert not fld.provably_nonzero(add(mul(2, a), Rat(-1)))  # 2a-1


class TestRref:
    def test_rational_matrix(self):
        fld = field()
        e = fld.elem
        rows = [[e(Rat(2)), e(Rat(4)), e(Rat(2))],
                [e(Rat(1)), e(Rat(3)), e(Rat(2))]]
        res = rref(rows, fld)
        assert res.pivots == [0, 1]
        got = [[fld.to_expr(x) for x in row] for row in res.rows]
        assert got == [[ONE, ZERO, simplify(Rat(-1))], [ZERO, ONE, ONE]]

    def test_symbolic_pivot_prefers_decidable(self):
        fld = field()
        e = fld.elem
        # first column: an undecidable entry and a rational one; the rational
        # row must be chosen so no pivot assumption is recorded
        rows = [[e(add(mul(2, a), Rat(-1))), e(ONE)],
                [e(Rat(3)), e(a)]]
        res = rref(rows, fld)
        assert res.assumptions == []

    def test_nullspace_known_kernel(self):
        fld = field()
        e = fld.elem
        # x1 + a x2 = 0 over columns (x1, x2): kernel spanned by (-a, 1)
        rows = [[e(ONE), e(a)]]
        basis, notes = nullspace(rows, 2, fld)
        assert len(basis) == 1
        v = [fld.to_expr(x) for x in basis[0]]
        assert v == [simplify(neg(a)), ONE]
        # the vector is in the kernel
        resid = fld.add(fld.mul(e(ONE), basis[0][0]),
                        fld.mul(e(a), basis[0][1]))
        assert resid.is_zero()

    def test_nullspace_dimension(self):
        fld = field()
        e = fld.elem
        rows = [[e(ONE), e(Rat(2)), e(ZERO)],
                [e(ZERO), e(ZERO), e(ONE)]]
        basis, _ = nullspace(rows, 3, fld)
        assert len(basis) == 1
