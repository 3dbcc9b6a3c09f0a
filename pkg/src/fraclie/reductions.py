"""Symmetry reductions and exact-solution verification.

Translations remove a space variable outright.  Scaling generators produce
similarity variables with exact exponents plus the parameters of the
generalized Erdelyi-Kober operator of the reduced form (recorded, not
symbolically verified).  Exact candidate solutions are verified against the
system with the closed-form power rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exponents import Assumptions, ExponentForm, UNIT_FORM
from .expr import (Add, Expr, Fn, Gamma, Jet, Mul, Pow, Var, ZERO,
                   ONE, _eform_mul, _eform_pow, _nadd, _nmul, _npow,
                   atoms, depends_on_jets, diff_wrt, expand,
                   partial_derivative,
                   render, simplify, substitute, to_eform)
from .fraccalc import PowerSum, rl_derivative
from .linsolve import Field
from .model import PDESystem, Signature, make_system
from .solver import Generator


class NotTranslation(Exception):
    pass


class NotScaling(Exception):
    pass


# ---------------------------------------------------------------------------
# Translation reductions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TranslationReduction:
    system: PDESystem
    removed: str
    similarity: tuple[str, ...]      # human-readable similarity variables


def _drop_axis(e: Expr, axis: int, new_sig: Signature) -> Expr:
    def walk(x: Expr) -> Expr:
        if isinstance(x, Jet):
            if axis < len(x.theta) and x.theta[axis] > 0:
                return ZERO
            theta = tuple(k for i, k in enumerate(x.theta) if i != axis)
            return Jet(x.dep, theta, x.t_order, x.frac)
        if isinstance(x, Var):
            if x.axis == axis and not x.is_time:
                raise NotTranslation(
                    f"the system depends explicitly on {x.name}")
            if not x.is_time and x.axis > axis:
                return Var(x.name, x.axis - 1)
            return x
        if isinstance(x, Mul):
            return _nmul([walk(f) for f in x.factors])
        if isinstance(x, Add):
            return _nadd([walk(t) for t in x.terms])
        if isinstance(x, Pow):
            return _npow(walk(x.base), x.exp)
        if isinstance(x, Gamma):
            return Gamma(walk(x.arg))
        if isinstance(x, Fn):
            return Fn(x.fname, tuple(walk(a) for a in x.args), x.deriv, x.frac)
        return x

    return simplify(walk(e))


def translation_reduction(sys: PDESystem, gen: Generator) -> TranslationReduction:
    """Reduce by a pure translation d/d(x_i): drop x_i and every jet
    differentiated in it."""
    axis: Optional[int] = None
    if gen.tau != ZERO or any(e != ZERO for e in gen.eta):
        raise NotTranslation("generator is not a pure space translation")
    for i, xi in enumerate(gen.xi):
        if xi == ONE:
            if axis is not None:
                raise NotTranslation("generator translates two variables")
            axis = i
        elif xi != ZERO:
            raise NotTranslation("generator is not a pure space translation")
    if axis is None:
        raise NotTranslation("generator is not a pure space translation")

    sig = sys.sig
    new_sig = Signature(alpha_name=sig.alpha_name,
                        space_names=tuple(n for i, n in enumerate(sig.space_names)
                                          if i != axis),
                        dep_names=sig.dep_names, params=sig.params,
                        fn_decls=sig.fn_decls, t_name=sig.t_name)
    rhs = [_drop_axis(sys.rhs(s), axis, new_sig) for s in range(sys.q)]
    reduced = make_system(new_sig, rhs, alpha=sys.alpha)
    similarity = [f"z1 = {sig.t_name}"]
    similarity += [f"z{i + 2} = {n}" for i, n in enumerate(new_sig.space_names)]
    similarity += [f"{d.upper()}(z) = {d}" for d in sig.dep_names]
    return TranslationReduction(reduced, sig.space_names[axis], tuple(similarity))


# ---------------------------------------------------------------------------
# Scaling reductions and Erdelyi-Kober metadata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EKReduction:
    """Similarity variables z_i = x_i t^(-A_i), transformed dependents
    U_s = u_s t^(-B_s), and the recorded Erdelyi-Kober parameters of the
    reduced form: prefactor t^(B_s - alpha) (P^{eps_s, alpha}_{delta} U_s)."""
    sig: Signature
    alpha: Expr
    z_exponents: tuple[ExponentForm, ...]       # A_i
    u_exponents: tuple[ExponentForm, ...]       # B_s
    ek_epsilon: tuple[ExponentForm, ...]        # 1 + B_s - alpha
    ek_delta: tuple[Optional[ExponentForm], ...]  # 1/A_i (None if A_i = 0)

    def describe(self) -> list[str]:
        sig = self.sig
        out = []
        for i, A in enumerate(self.z_exponents):
            out.append(f"z{i + 1} = {sig.space_names[i]}*{sig.t_name}^({(-A).render()})")
        for s, B in enumerate(self.u_exponents):
            out.append(f"U{s + 1} = {sig.dep_names[s]}*{sig.t_name}^({(-B).render()})")
        for s in range(len(self.u_exponents)):
            delta = ", ".join(d.render() if d is not None else "inf"
                              for d in self.ek_delta)
            pre = (self.u_exponents[s] - to_eform(self.alpha)).render()
            out.append(f"Dt^alpha {sig.dep_names[s]} = {sig.t_name}^({pre}) * "
                       f"(P[eps={self.ek_epsilon[s].render()}, alpha, "
                       f"delta=({delta})] U{s + 1})(z)")
        return out


def _linear_coefficient(e: Expr, atom: Expr) -> Expr:
    """c with e == c*atom exactly, else None."""
    c = diff_wrt(e, atom) if not isinstance(atom, Var) else None
    if isinstance(atom, Var):
        c = partial_derivative(e, atom)
    res = simplify(expand(e - _nmul([c, atom])))
    if res != ZERO:
        return None
    return simplify(c)


def scaling_similarity(gen: Generator, alpha: Expr,
                       assumptions: Optional[Assumptions] = None) -> EKReduction:
    sig = gen.sig
    t = sig.t
    chi1 = _linear_coefficient(gen.tau, t)
    if chi1 is None or chi1 == ZERO or depends_on_jets(chi1):
        raise NotScaling("tau must be a nonzero multiple of t")
    chi1_form = to_eform(chi1)
    if chi1_form is None or len(chi1_form.coeffs) != 1:
        raise NotScaling("the t-coefficient of tau must be a parameter monomial")
    inv_chi1 = _eform_pow(chi1_form, -1)

    a_forms = []
    for i in range(sig.p):
        ai = _linear_coefficient(gen.xi[i], sig.x(i))
        if ai is None:
            raise NotScaling(f"xi_{sig.space_names[i]} must be a multiple of "
                             f"{sig.space_names[i]}")
        fa = to_eform(ai)
        if fa is None:
            raise NotScaling("space scaling coefficients must be exponent-affine")
        a_forms.append(_eform_mul(fa, inv_chi1))
    b_forms = []
    for s in range(sig.q):
        bs = _linear_coefficient(gen.eta[s], sig.u(s))
        if bs is None or depends_on_jets(gen.eta[s] - _nmul([bs, sig.u(s)])):
            raise NotScaling("eta must be a multiple of the dependent")
        if simplify(expand(gen.eta[s] - _nmul([bs, sig.u(s)]))) != ZERO:
            raise NotScaling("eta must be exactly b_s * u_s")
        fb = to_eform(bs)
        if fb is None:
            raise NotScaling("dependent scaling coefficients must be exponent-affine")
        b_forms.append(_eform_mul(fb, inv_chi1))

    af = to_eform(alpha)
    eps = tuple(UNIT_FORM + B - af for B in b_forms)
    delta = tuple(None if A.is_zero() else _inv_form(A) for A in a_forms)
    return EKReduction(sig, alpha, tuple(a_forms), tuple(b_forms), eps, delta)


def _inv_form(A: ExponentForm) -> Optional[ExponentForm]:
    if len(A.coeffs) != 1:
        return None
    return _eform_pow(A, -1)


def similarity_invariance_residuals(gen: Generator, red: EKReduction) -> list[Expr]:
    """The generator must annihilate every similarity variable: X(z_i) = 0
    and X(u_s t^(-B_s)) = 0 by construction."""
    sig = gen.sig
    t = sig.t
    out = []

    def apply_x(expr: Expr) -> Expr:
        pieces = [_nmul([gen.tau, partial_derivative(expr, t)])]
        for i in range(sig.p):
            pieces.append(_nmul([gen.xi[i], partial_derivative(expr, sig.x(i))]))
        for s in range(sig.q):
            pieces.append(_nmul([gen.eta[s], diff_wrt(expr, sig.u(s))]))
        return simplify(expand(_nadd(pieces)))

    for i in range(sig.p):
        z = _nmul([sig.x(i), _npow(t, -red.z_exponents[i])])
        out.append(apply_x(z))
    for s in range(sig.q):
        U = _nmul([sig.u(s), _npow(t, -red.u_exponents[s])])
        out.append(apply_x(U))
    return out


# ---------------------------------------------------------------------------
# Exact-solution verification
# ---------------------------------------------------------------------------

def verify_exact_solution(sys: PDESystem, sol: list[Expr],
                          assumptions: Optional[Assumptions] = None) -> list[Expr]:
    """residual_s = Dt^alpha(sol_s) - (F_s + H_s) evaluated on the candidate;
    all-zero means verified.  Solutions must be power sums in t whose
    coefficients may involve x and opaque function atoms."""
    if len(sol) != sys.q:
        raise ValueError(f"expected {sys.q} solution components")
    asm = assumptions if assumptions is not None else sys.assumptions()
    fld = Field(asm)
    sig = sys.sig
    sol = [simplify(e) for e in sol]

    bindings: dict[Expr, Expr] = {}
    for s in range(sys.q):
        for eq in range(sys.q):
            for j in atoms(_nadd([sys.F[eq], sys.H[eq]]), Jet):
                if j.dep != s or j in bindings:
                    continue
                val = sol[s]
                for i, k in enumerate(j.theta):
                    for _ in range(k):
                        val = partial_derivative(val, sig.x(i))
                bindings[j] = val

    residuals = []
    for s in range(sys.q):
        ps = PowerSum.from_expr(sol[s], sig.t)
        lhs = rl_derivative(ps, sys.alpha, tvar=sig.t, assumptions=asm).to_expr()
        rhs = substitute(sys.rhs(s), bindings) if bindings else sys.rhs(s)
        residuals.append(fld.to_expr(fld.elem(lhs - rhs)))
    return residuals
