"""Closed-form Riemann-Liouville rules.

Identities in alpha are proven exactly by sampling at rational orders: after
substituting a rational alpha, every Gamma ratio collapses through the
recurrence to a rational multiple of a common Gamma value, so structural
equality decides the identity.  The coefficient of the single surviving
t-power is a rational function of alpha of low degree; agreement at more
sample points than the degree bound proves it identically.
"""
import math
from fractions import Fraction

import pytest

from fraclie import (Assumptions, ExponentForm, Fn, Gamma, Jet, NegativeIndex,
                     PowerSum, Rat, Sym, UndecidableExponent, Var, ZERO, ONE,
                     add, div, expand, gamma_simplify, gen_binomial,
                     leibniz_expand, mul, neg, pow_, rl_derivative,
                     rl_series_truncated, simplify)
from fraclie.expr import subs_params

F = Fraction
t = Var("t", -1)
x = Var("x", 0)
a = Sym("a")
ASM = Assumptions("a")
AF = ExponentForm.symbol("a")

ALPHA_SAMPLES = [F(1, 7), F(1, 5), F(2, 7), F(1, 3), F(2, 5), F(3, 7), F(1, 2),
                 F(4, 7), F(3, 5), F(2, 3), F(5, 7), F(3, 4), F(7, 9), F(5, 6),
                 F(9, 11)]


def assert_identity(lhs, rhs, samples=ALPHA_SAMPLES):
    """Exact proof by rational sampling: enough points for the degree bound."""
    diff = simplify(expand(lhs - rhs))
    for av in samples:
        got = gamma_simplify(expand(subs_params(diff, {"a": av})))
        assert got == ZERO, f"nonzero at alpha={av}: {got!r}"


class TestGenBinomial:
    def test_small(self):
        assert gen_binomial(a, 0) == ONE
        assert gen_binomial(a, 1) == a
        assert gen_binomial(F(1, 2), 2) == Rat(F(-1, 8))

    def test_negative_index(self):
        with pytest.raises(NegativeIndex):
            gen_binomial(a, -1)

    def test_matches_classical_at_integer_order(self):
        for m in range(5):
            for k in range(8):
                got = gen_binomial(F(m), k)
                assert got == Rat(F(math.comb(m, k))), (m, k)

    def test_agrees_with_gamma_formula(self):
        # C(a,k) = (-1)^(k-1) a Gamma(k-a) / (Gamma(1-a) Gamma(k+1)) where defined
        for k in range(1, 6):
            formula = mul(Rat(F((-1) ** (k - 1))), a,
                          Gamma(add(Rat(k), neg(a))),
                          pow_(Gamma(add(ONE, neg(a))), -1),
                          Rat(F(1, math.factorial(k))))
            assert_identity(gen_binomial(a, k), formula)


class TestPowerRule:
    def test_t_squared_half(self):
        got = rl_derivative(pow_(t, 2), F(1, 2), tvar=t).to_expr()
        want = gamma_simplify(mul(div(Gamma(Rat(3)), Gamma(Rat(F(5, 2)))),
                                  pow_(t, F(3, 2))))
        assert got == want

    def test_alpha_minus_one_maps_to_zero(self):
        ta1 = pow_(t, AF - ExponentForm.rational(1))
        assert rl_derivative(ta1, a, tvar=t, assumptions=ASM).to_expr() == ZERO

    def test_t_independent_function(self):
        f = Fn("f", (x,))
        got = rl_derivative(f, a, tvar=t, assumptions=ASM).to_expr()
        want = mul(f, pow_(t, -AF), pow_(Gamma(add(ONE, neg(a))), -1))
        assert got == simplify(want)

    def test_linearity_structural(self):
        c1, c2 = Sym("A"), Sym("B")
        f = add(mul(c1, pow_(t, 2)), mul(c2, pow_(t, F(1, 2))))
        both = rl_derivative(f, F(1, 4), tvar=t).to_expr()
        sep = add(mul(c1, rl_derivative(pow_(t, 2), F(1, 4), tvar=t).to_expr()),
                  mul(c2, rl_derivative(pow_(t, F(1, 2)), F(1, 4), tvar=t).to_expr()))
        assert simplify(expand(both - sep)) == ZERO

    def test_undecidable_exponent(self):
        g = Sym("gexp")
        with pytest.raises(UndecidableExponent):
            rl_derivative(pow_(t, ExponentForm.symbol("gexp")), a, tvar=t,
                          assumptions=ASM)

    def test_declared_assumption_unblocks(self):
        asm = Assumptions("a")
        gf = ExponentForm.symbol("gexp")
        asm.declare_form_positive(gf + ExponentForm.rational(1))
        out = rl_derivative(pow_(t, gf), a, tvar=t, assumptions=asm)
        assert len(out.terms) == 1

    def test_powersum_invariant_distinct_exponents(self):
        ps = PowerSum.from_expr(add(pow_(t, 2), mul(3, pow_(t, 2)), t), t)
        assert len(ps.terms) == 2


class TestLeibniz:
    def test_terminating_product_t2_t3(self):
        lhs = leibniz_expand(pow_(t, 2), pow_(t, 3), F(1, 2), 2, tvar=t)
        rhs = rl_derivative(pow_(t, 5), F(1, 2), tvar=t).to_expr()
        assert simplify(expand(lhs - rhs)) == ZERO

    def test_unit_left_factor(self):
        for K in (0, 1, 3):
            lhs = leibniz_expand(ONE, pow_(t, F(5, 2)), a, K, tvar=t,
                                 assumptions=ASM)
            rhs = rl_derivative(pow_(t, F(5, 2)), a, tvar=t,
                                assumptions=ASM).to_expr()
            assert simplify(expand(lhs - rhs)) == ZERO

    def test_t_times_one_identity(self):
        # C(a,0) t t^-a/Gamma(1-a) + C(a,1) t^(1-a)/Gamma(2-a) == Gamma(2)/Gamma(2-a) t^(1-a)
        lhs = leibniz_expand(t, ONE, a, 1, tvar=t, assumptions=ASM)
        rhs = rl_derivative(t, a, tvar=t, assumptions=ASM).to_expr()
        assert_identity(lhs, rhs)

    def test_termination_identities_all_pairs(self):
        # monomial pairs t^A t^B, A <= 4, B in {0,1,2,3, alpha+1}
        bs = [Rat(0), Rat(1), Rat(2), Rat(3), add(a, 1)]
        for A in range(5):
            for B in bs:
                u_part = pow_(t, A) if A else ONE
                bf = ExponentForm.rational(0)
                from fraclie.expr import to_eform
                bf = to_eform(B)
                v_part = pow_(t, bf) if not bf.is_zero() else ONE
                lhs = leibniz_expand(u_part, v_part, a, A, tvar=t, assumptions=ASM)
                rhs = rl_derivative(pow_(t, ExponentForm.rational(A) + bf), a,
                                    tvar=t, assumptions=ASM).to_expr()
                assert_identity(lhs, rhs)

    def test_negative_truncation(self):
        with pytest.raises(NegativeIndex):
            leibniz_expand(t, ONE, a, -1, tvar=t, assumptions=ASM)


class TestSeriesForm:
    def test_constant(self):
        got = rl_series_truncated(ONE, a, 0, tvar=t, assumptions=ASM)
        want = mul(pow_(t, -AF), pow_(Gamma(add(ONE, neg(a))), -1))
        assert got == simplify(want)

    def test_linear_matches_power_rule(self):
        got = rl_series_truncated(t, a, 3, tvar=t, assumptions=ASM)
        want = rl_derivative(t, a, tvar=t, assumptions=ASM).to_expr()
        assert_identity(got, want)

    def test_jet_template(self):
        u = Jet(0, (0,))
        got = rl_series_truncated(u, a, 1, tvar=t, assumptions=ASM)
        ut = Jet(0, (0,), t_order=1)
        want = add(
            mul(u, pow_(t, -AF), pow_(Gamma(add(ONE, neg(a))), -1)),
            mul(a, ut, pow_(t, ExponentForm.rational(1) - AF),
                pow_(Gamma(add(Rat(2), neg(a))), -1)))
        assert_identity(got, want)
