"""PDE system data model: signatures, the F/H split, term classification
and validation diagnostics."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exponents import Assumptions, ExponentForm
from .expr import (Add, Expr, Fn, Gamma, Jet, Mul, Pow, Rat, Sym, Var, ZERO,
                   ONE, _base_exp, _coeff_mono, _nadd, _nmul, add_terms,
                   atoms, depends_on_jets, expand, mul_factors, simplify)


@dataclass(frozen=True)
class ParamDecl:
    name: str
    kind: str = "free"            # free | nonzero | positive | interval
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None


@dataclass(frozen=True)
class Signature:
    """Variable names of a system; the bridge between index-based kernel
    objects and human-readable input/output."""
    alpha_name: str
    space_names: tuple[str, ...]
    dep_names: tuple[str, ...]
    params: tuple[ParamDecl, ...] = ()
    fn_decls: tuple[tuple[str, str], ...] = ()   # (fn name, dep argument name)
    t_name: str = "t"

    @property
    def p(self) -> int:
        return len(self.space_names)

    @property
    def q(self) -> int:
        return len(self.dep_names)

    @property
    def t(self) -> Var:
        return Var(self.t_name, -1)

    def x(self, i: int) -> Var:
        return Var(self.space_names[i], i)

    def space(self, name: str) -> Var:
        return Var(name, self.space_names.index(name))

    def u(self, s: int, theta: tuple[int, ...] = (), t_order: int = 0,
          frac: Optional[int] = None) -> Jet:
        theta = tuple(theta) + (0,) * (self.p - len(theta))
        return Jet(s, theta, t_order, frac)

    def dep(self, name: str) -> Jet:
        return self.u(self.dep_names.index(name))

    @property
    def alpha(self) -> Sym:
        return Sym(self.alpha_name)

    def assumptions(self) -> Assumptions:
        asm = Assumptions(self.alpha_name)
        for p in self.params:
            if p.kind == "nonzero":
                asm.declare_nonzero(p.name)
            elif p.kind == "positive":
                asm.declare_positive(p.name)
            elif p.kind == "interval":
                asm.declare_interval(p.name, p.lo, p.hi)
        return asm


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class PDESystem:
    """q equations Dt^alpha u_s = F_s + H_s over p space variables; every
    term of F_s involves u or its x-derivatives, H_s is a pure (t,x) source."""
    sig: Signature
    alpha: Expr
    F: tuple[Expr, ...]
    H: tuple[Expr, ...]
    k: int
    source: Optional[str] = None

    @property
    def p(self) -> int:
        return self.sig.p

    @property
    def q(self) -> int:
        return self.sig.q

    def rhs(self, s: int) -> Expr:
        return _nadd([self.F[s], self.H[s]])

    def assumptions(self) -> Assumptions:
        return self.sig.assumptions()


def split_rhs(rhs: Expr) -> tuple[Expr, Expr]:
    """The F/H split: terms containing u-dependence go to F, the rest to H."""
    rhs = expand(rhs)
    f_terms, h_terms = [], []
    for term in add_terms(rhs):
        if term == ZERO:
            continue
        (f_terms if depends_on_jets(term) else h_terms).append(term)
    return _nadd(f_terms), _nadd(h_terms)


def make_system(sig: Signature, rhs_list: list[Expr], alpha: Optional[Expr] = None,
                source: Optional[str] = None) -> PDESystem:
    if len(rhs_list) != sig.q:
        raise ValueError(f"expected {sig.q} equations, got {len(rhs_list)}")
    alpha = alpha if alpha is not None else sig.alpha
    F, H = [], []
    k = 0
    for rhs in rhs_list:
        fs, hs = split_rhs(simplify(rhs))
        F.append(fs)
        H.append(hs)
        for j in atoms(fs, Jet) + atoms(hs, Jet):
            k = max(k, sum(j.theta))
    return PDESystem(sig, alpha, tuple(F), tuple(H), k, source)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_system(sys: PDESystem) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    if isinstance(sys.alpha, Rat):
        if not (0 < sys.alpha.value < 1):
            out.append(Diagnostic("AlphaOutOfRange",
                                  f"fractional order {sys.alpha.value} is outside (0,1)"))
    for s in range(sys.q):
        for j in atoms(sys.F[s], Jet) + atoms(sys.H[s], Jet):
            if j.t_order > 0 or j.frac is not None:
                out.append(Diagnostic(
                    "TimeDerivativeOnRHS",
                    f"equation {sys.sig.dep_names[s]}: a t-derivative jet appears "
                    "on the right-hand side"))
        if depends_on_jets(sys.H[s]):
            out.append(Diagnostic("HContainsJets",
                                  f"equation {sys.sig.dep_names[s]}: source part depends on u"))
        for term in add_terms(sys.F[s]):
            if term != ZERO and not depends_on_jets(term):
                out.append(Diagnostic("FTermWithoutJets",
                                      f"equation {sys.sig.dep_names[s]}: F holds a pure source term"))
    for i, name in enumerate(sys.sig.space_names):
        coupled = any(j.theta[i] >= 1
                      for s in range(sys.q) for j in atoms(sys.F[s], Jet))
        if not coupled:
            out.append(Diagnostic("MissingSpaceCoupling",
                                  f"no equation differentiates any dependent in {name}"))
    return out


# ---------------------------------------------------------------------------
# Term classification (the I_s / J_s split)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JTerm:
    coeff: Expr       # free of all jets
    jet: Jet

    def term(self) -> Expr:
        return _nmul([self.coeff, self.jet])


@dataclass(frozen=True)
class TermClassification:
    """Per equation: all F-terms (I), the linear single-jet terms (J) with
    their coefficients, and the complement I \\ J."""
    i_terms: tuple[tuple[Expr, ...], ...]
    j_terms: tuple[tuple[JTerm, ...], ...]
    rest: tuple[tuple[Expr, ...], ...]

    def j_set(self, s: int) -> tuple[JTerm, ...]:
        return self.j_terms[s]

    def rest_sum(self, s: int) -> Expr:
        return _nadd(list(self.rest[s]))


def _linear_jet_split(term: Expr) -> Optional[JTerm]:
    """c * (single jet to the first power) with c jet-free, else None."""
    jet = None
    coeff_factors: list[Expr] = []
    for f in mul_factors(term):
        b, e = _base_exp(f)
        if isinstance(b, Jet):
            if jet is not None or e != ExponentForm.rational(1):
                return None
            jet = b
        elif depends_on_jets(b):
            return None
        else:
            coeff_factors.append(f)
    if jet is None:
        return None
    return JTerm(_nmul(coeff_factors) if coeff_factors else ONE, jet)


def classify_terms(sys: PDESystem) -> TermClassification:
    i_all, j_all, rest_all = [], [], []
    for s in range(sys.q):
        f = expand(sys.F[s])
        i_terms, j_terms, rest = [], [], []
        for term in add_terms(f):
            if term == ZERO:
                continue
            i_terms.append(term)
            jt = _linear_jet_split(term)
            if jt is not None:
                j_terms.append(jt)
            else:
                rest.append(term)
        i_all.append(tuple(i_terms))
        j_all.append(tuple(j_terms))
        rest_all.append(tuple(rest))
    return TermClassification(tuple(i_all), tuple(j_all), tuple(rest_all))


# ---------------------------------------------------------------------------
# DSL emission (inverse of the parser, used for round-trips and reports)
# ---------------------------------------------------------------------------

def emit_expr_dsl(e: Expr, sig: Signature) -> str:
    e = simplify(e)

    def jet_dsl(j: Jet) -> str:
        body = sig.dep_names[j.dep]
        if j.t_order or j.frac is not None:
            raise ValueError("t-derivative jets have no DSL form")
        for i in range(sig.p - 1, -1, -1):
            k = j.theta[i] if i < len(j.theta) else 0
            if k:
                op = f"D{sig.space_names[i]}"
                body = f"{op}^{k}({body})" if k > 1 else f"{op}({body})"
        return body

    def go(x: Expr, prec: int) -> str:
        if isinstance(x, Rat):
            if x.value.denominator == 1:
                s = str(x.value)
            else:
                s = f"{x.value.numerator}/{x.value.denominator}"
                if prec >= 2:
                    s = f"({s})"
            return f"({s})" if (x.value < 0 and prec >= 1) else s
        if isinstance(x, Sym):
            return x.name
        if isinstance(x, Var):
            return x.name
        if isinstance(x, Jet):
            return jet_dsl(x)
        if isinstance(x, Fn):
            if any(x.deriv) or x.frac:
                raise ValueError("derived unknown functions have no DSL form")
            inner = ", ".join(go(a, 0) for a in x.args)
            return f"{x.fname}({inner})"
        if isinstance(x, Gamma):
            return f"Gamma({go(x.arg, 0)})"
        if isinstance(x, Pow):
            b = go(x.base, 2)
            if isinstance(x.base, (Add, Mul, Pow)):
                b = f"({b})"
            from .expr import from_eform
            return f"{b}^({go(from_eform(x.exp), 0)})"
        if isinstance(x, Mul):
            factors = list(x.factors)
            sign = ""
            if isinstance(factors[0], Rat) and factors[0].value == -1 and len(factors) > 1:
                sign = "-"
                factors = factors[1:]
            s = sign + "*".join(go(f, 1) if not isinstance(f, Add) else f"({go(f, 0)})"
                                for f in factors)
            return f"({s})" if (sign and prec >= 1) else s
        if isinstance(x, Add):
            c0, m0 = _coeff_mono(x.terms[0])
            first = (_nmul([Rat(-c0)] + ([m0] if m0 is not None else []))
                     if c0 < 0 else x.terms[0])
            out = ("-" if c0 < 0 else "") + go(first, 1 if c0 < 0 else 0)
            for term in x.terms[1:]:
                c, mono = _coeff_mono(term)
                if c < 0:
                    out += " - " + go(_nmul([Rat(-c)] + ([mono] if mono is not None else [])), 1)
                else:
                    out += " + " + go(term, 1)
            return f"({out})" if prec >= 1 else out
        raise TypeError(f"not an expression: {x!r}")

    return go(e, 0)


def emit_dsl(sys: PDESystem) -> str:
    sig = sys.sig
    lines = []
    for p in sig.params:
        if p.kind == "free":
            lines.append(f"param {p.name};")
        elif p.kind == "interval":
            lines.append(f"param {p.name} in ({p.lo}, {p.hi});")
        else:
            lines.append(f"param {p.name} {p.kind};")
    if isinstance(sys.alpha, Rat):
        v = sys.alpha.value
        lines.append(f"alpha {v.numerator}/{v.denominator};")
    else:
        lines.append(f"alpha {sig.alpha_name};")
    if sig.space_names:
        lines.append("space " + ", ".join(sig.space_names) + ";")
    lines.append("dep " + ", ".join(sig.dep_names) + ";")
    for fname, arg in sig.fn_decls:
        lines.append(f"fn {fname}({arg});")
    for s in range(sys.q):
        rhs = emit_expr_dsl(sys.rhs(s), sig)
        lines.append(f"Dt^{sig.alpha_name}({sig.dep_names[s]}) = {rhs};")
    return "\n".join(lines) + "\n"
