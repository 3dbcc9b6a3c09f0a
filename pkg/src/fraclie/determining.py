"""Build and separate the two determining conditions.

Condition 1 is a linear fractional constraint on the inhomogeneous parts
h_s(t,x).  Condition 2 is jet-polynomial; separating it over jet monomials
(symbolic powers and opaque functional parameters are distinct monomial
classes) yields integer-order linear equations in the ansatz unknowns.
Genericity facts used to keep monomial classes apart are recorded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exponents import ExponentForm
from .expr import (Add, Expr, Fn, Gamma, Jet, Mul, NonPolynomial, Pow, Rat,
                   Sym, ZERO,
                   ONE, _base_exp, _coeff_mono, _nadd, _nmul, _npow, add_terms,
                   atoms, depends_on_jets, diff_wrt, expand, mul_factors, partial_derivative, render, simplify,
                   total_derivative)
from .model import PDESystem, TermClassification, classify_terms
from .prolong import AnsatzGenerator, eta_theta_of


class NonAffineSystem(Exception):
    pass


# ---------------------------------------------------------------------------
# The two conditions
# ---------------------------------------------------------------------------

def _d_theta_h(ans: AnsatzGenerator, dep: int, theta: tuple[int, ...]) -> Expr:
    h = ans.h(dep)
    out: Expr = h
    for i, k in enumerate(theta):
        v = ans.sig.x(i)
        for _ in range(k):
            out = total_derivative(out, v)
    return out


def invariance_condition(sys: PDESystem, ans: AnsatzGenerator,
                         classification: Optional[TermClassification] = None
                         ) -> list[Expr]:
    """Condition 2 per equation: jet-polynomial; its vanishing together with
    condition 1 characterizes invariance."""
    sig = sys.sig
    cl = classification if classification is not None else classify_terms(sys)
    xi = [ans.xi(i) for i in range(sig.p)]
    etas = [ans.eta(s) for s in range(sig.q)]
    out: list[Expr] = []
    for s in range(sig.q):
        pieces: list[Expr] = []
        for i in range(sig.q):
            pieces.append(_nmul([ans.deta_du(s, i), sys.F[i]]))
        pieces.append(_nmul([Rat(-1), sys.alpha, ans.tau_prime, sys.F[s]]))
        pieces.append(_nmul([Rat(-1), ans.tau,
                             partial_derivative(sys.F[s], sig.t)]))
        for i in range(sig.p):
            pieces.append(_nmul([Rat(-1), xi[i],
                                 partial_derivative(sys.F[s], sig.x(i))]))
        for jt in cl.j_set(s):
            ext = eta_theta_of(sig, etas[jt.jet.dep], xi, jt.jet.dep, jt.jet.theta)
            ext = ext - _d_theta_h(ans, jt.jet.dep, jt.jet.theta)
            pieces.append(_nmul([Rat(-1), ext, jt.coeff]))
        rest = cl.rest_sum(s)
        for jet in atoms(rest, Jet):
            coeff = diff_wrt(rest, jet)
            if coeff == ZERO:
                continue
            ext = eta_theta_of(sig, etas[jet.dep], xi, jet.dep, jet.theta)
            pieces.append(_nmul([Rat(-1), ext, coeff]))
        out.append(simplify(expand(_nadd(pieces))))
    return out


def h_condition(sys: PDESystem, ans: AnsatzGenerator,
                classification: Optional[TermClassification] = None
                ) -> list[Expr]:
    """Condition 1 per equation: a linear fractional constraint mentioning
    only h_s, the sources H_s and the coefficient functions."""
    sig = sys.sig
    cl = classification if classification is not None else classify_terms(sys)
    out: list[Expr] = []
    for s in range(sig.q):
        pieces: list[Expr] = [ans.h_frac(s)]
        for i in range(sig.q):
            pieces.append(_nmul([ans.deta_du(s, i), sys.H[i]]))
        pieces.append(_nmul([Rat(-1), sys.alpha, ans.tau_prime, sys.H[s]]))
        pieces.append(_nmul([Rat(-1), ans.tau,
                             partial_derivative(sys.H[s], sig.t)]))
        for i in range(sig.p):
            pieces.append(_nmul([Rat(-1), ans.xi(i),
                                 partial_derivative(sys.H[s], sig.x(i))]))
        for jt in cl.j_set(s):
            pieces.append(_nmul([Rat(-1), _d_theta_h(ans, jt.jet.dep, jt.jet.theta),
                                 jt.coeff]))
        out.append(simplify(expand(_nadd(pieces))))
    return out


# ---------------------------------------------------------------------------
# Separation over jet monomials
# ---------------------------------------------------------------------------

def _jet_dependent(e: Expr) -> bool:
    return depends_on_jets(e)


def split_jet_coefficient(term: Expr) -> tuple[Expr, Expr]:
    """(monomial, coefficient): jet-dependent factors, incl. opaque function
    applications of dependents, form the monomial.  Jets buried inside a
    Gamma application admit no separation."""
    mono: list[Expr] = []
    coeff: list[Expr] = []
    for f in mul_factors(term):
        b, _ = _base_exp(f)
        if isinstance(b, Gamma) and _jet_dependent(b):
            raise NonPolynomial(
                f"jet variable inside a Gamma application: {render(f)}")
        (mono if _jet_dependent(b) else coeff).append(f)
    return (_nmul(mono) if mono else ONE,
            _nmul(coeff) if coeff else ONE)


def separate(cond: Expr, sys: PDESystem) -> tuple[list[tuple[Expr, Expr]], list[str]]:
    """Separate a jet-polynomial condition into (monomial, coefficient)
    equations plus the genericity assumptions that keep distinct monomial
    classes apart."""
    cond = expand(cond)
    if cond == ZERO:
        return [], []
    groups: dict[tuple, list] = {}
    for term in add_terms(cond):
        mono, coeff = split_jet_coefficient(term)
        k = mono.key()
        if k in groups:
            groups[k][1] = _nadd([groups[k][1], coeff])
        else:
            groups[k] = [mono, coeff]
    fragments = [(m, simplify(c)) for m, c in (groups[k] for k in sorted(groups))]
    fragments = [(m, c) for m, c in fragments if c != ZERO]
    return fragments, _genericity(fragments, sys)


def _power_profile(mono: Expr) -> tuple[tuple, dict[int, ExponentForm]]:
    """Split a monomial into (non-power skeleton key, exponent per dep of
    theta=0 jets)."""
    skeleton = []
    powers: dict[int, ExponentForm] = {}
    for f in mul_factors(mono):
        b, e = _base_exp(f)
        if isinstance(b, Jet) and not any(b.theta) and b.t_order == 0 and b.frac is None:
            powers[b.dep] = powers.get(b.dep, ExponentForm()) + e
        else:
            skeleton.append(f.key())
    return tuple(sorted(skeleton)), powers


def _genericity(fragments: list[tuple[Expr, Expr]], sys: PDESystem) -> list[str]:
    asm = sys.assumptions()
    forms: dict[tuple, tuple[ExponentForm, str]] = {}
    profiles = [(_power_profile(m), m) for m, _ in fragments]
    for a in range(len(profiles)):
        for b in range(a + 1, len(profiles)):
            (ska, pa), ma = profiles[a]
            (skb, pb), mb = profiles[b]
            if ska != skb:
                continue
            for dep in set(pa) | set(pb):
                d = pa.get(dep, ExponentForm()) - pb.get(dep, ExponentForm())
                if d.is_zero() or d.is_rational():
                    continue
                if len(d.coeffs) == 1 and all(
                        asm.is_declared_nonzero(nm) for nm, _ in d.coeffs[0][0]):
                    continue
                if asm.sign(d) is None and asm.sign(-d) is None:
                    # canonical sign: first non-constant monomial positive
                    lead = next(c for m, c in d.coeffs if m != ())
                    if lead < 0:
                        d = -d
                    forms.setdefault(d.sort_key(), (
                        d, f"separates {render(ma, sys.sig)} from {render(mb, sys.sig)}"))
    notes = [f"{d.render()} != 0 ({why})" for d, why in
             (forms[k] for k in sorted(forms))]
    fn_names = sorted({f.fname for m, _ in fragments for f in atoms(m, Fn)})
    for name in fn_names:
        notes.append(f"{name} and its derivatives span coefficient classes "
                     f"independent of each other and of powers of the dependents")
    return sorted(notes)


# ---------------------------------------------------------------------------
# Equation normalization
# ---------------------------------------------------------------------------

def normalize_equation(e: Expr) -> Expr:
    """Scale by the rational content so coefficients are coprime integers and
    the leading term is positive; stable under per-equation rational scaling."""
    e = expand(e)
    if e == ZERO:
        return ZERO
    terms = add_terms(e)
    coeffs = [_coeff_mono(t)[0] for t in terms]
    num_gcd = 0
    den_lcm = 1
    for c in coeffs:
        num_gcd = math.gcd(num_gcd, abs(c.numerator))
        den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
    scale = Fraction(den_lcm, num_gcd) if num_gcd else Fraction(1)
    if coeffs[0] < 0:
        scale = -scale
    return expand(_nmul([Rat(scale), e]))


# ---------------------------------------------------------------------------
# The determining system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeterminingSystem:
    sys: PDESystem
    ans: AnsatzGenerator
    branch: str
    fragments: tuple[tuple[tuple[Expr, Expr], ...], ...]  # per equation s
    integer_eqs: tuple[Expr, ...]
    frac_eqs: tuple[Expr, ...]
    assumptions: tuple[str, ...]

    def reduced(self) -> list[Expr]:
        return reduce_for_presentation(self)


def unknown_atoms_of(e: Expr, ans: AnsatzGenerator) -> list[Expr]:
    names = set(ans.unknown_fn_names())
    out = [f for f in atoms(e, Fn) if f.fname in names]
    for s in atoms(e, Sym):
        if s.name in ("chi1", "chi2"):
            out.append(s)
    return out


def check_affine(e: Expr, ans: AnsatzGenerator) -> None:
    names = set(ans.unknown_fn_names())

    def unknown_degree(term: Expr) -> int:
        deg = 0
        for f in mul_factors(term):
            b, ex = _base_exp(f)
            is_unknown = (isinstance(b, Fn) and b.fname in names) or (
                isinstance(b, Sym) and b.name in ("chi1", "chi2"))
            if is_unknown:
                k = ex.as_integer()
                deg += abs(k) if k is not None else 2
        return deg

    for term in add_terms(expand(e)):
        if term == ZERO:
            continue
        d = unknown_degree(term)
        if d != 1:
            raise NonAffineSystem(
                f"term {render(term)} has unknown-degree {d}; the determining "
                "equations must be homogeneous linear in the ansatz unknowns")


def build_determining(sys: PDESystem, ans: Optional[AnsatzGenerator] = None
                      ) -> DeterminingSystem:
    if ans is None:
        ans = AnsatzGenerator(sys.sig, sys.alpha)
    cl = classify_terms(sys)
    cond2 = invariance_condition(sys, ans, cl)
    cond1 = h_condition(sys, ans, cl)

    fragments = []
    notes: set[str] = set()
    eqs: list[Expr] = []
    seen: set[tuple] = set()
    for s in range(sys.q):
        frags, fnotes = separate(cond2[s], sys)
        fragments.append(tuple(frags))
        notes.update(fnotes)
        for _, coeff in frags:
            check_affine(coeff, ans)
            norm = normalize_equation(coeff)
            if norm != ZERO and norm.key() not in seen:
                seen.add(norm.key())
                eqs.append(norm)
    eqs.sort(key=lambda e: e.key())
    return DeterminingSystem(sys, ans, ans.branch, tuple(fragments), tuple(eqs),
                             tuple(simplify(c) for c in cond1), tuple(sorted(notes)))


# ---------------------------------------------------------------------------
# Presentation-level reduction (zero propagation)
# ---------------------------------------------------------------------------

def _invertible_coefficient(e: Expr, sys: PDESystem) -> bool:
    """True for products of rationals, declared-nonzero parameters and Gamma
    atoms; conservative on anything else."""
    asm = sys.assumptions()
    for f in mul_factors(e):
        b, _ = _base_exp(f)
        if isinstance(b, Rat):
            continue
        if isinstance(b, Gamma):
            continue
        if isinstance(b, Sym) and asm.is_declared_nonzero(b.name):
            continue
        return False
    return True


def _zero_substitute(e: Expr, facts: list[Fn]) -> Expr:
    def killed(f: Fn) -> bool:
        for z in facts:
            if (f.fname == z.fname and f.frac == z.frac
                    and all(a >= b for a, b in zip(f.deriv, z.deriv))):
                return True
        return False

    def walk(x: Expr) -> Expr:
        if isinstance(x, Fn):
            return ZERO if killed(x) else x
        if isinstance(x, Mul):
            return _nmul([walk(f) for f in x.factors])
        if isinstance(x, Add):
            return _nadd([walk(t) for t in x.terms])
        if isinstance(x, Pow):
            return _npow(walk(x.base), x.exp)
        return x

    return simplify(walk(e))


def reduce_for_presentation(ds: DeterminingSystem) -> list[Expr]:
    """Propagate single-atom zero facts (with provably invertible
    coefficients) through the system; report facts plus surviving equations.
    Display-level only: the solver consumes the raw system."""
    eqs = list(ds.integer_eqs)
    facts: list[Fn] = []
    chi_facts: list[Sym] = []
    changed = True
    while changed:
        changed = False
        new_eqs = []
        for e in eqs:
            e = _zero_substitute(e, facts)
            if chi_facts:
                from .expr import substitute
                e = simplify(substitute(e, {c: ZERO for c in chi_facts}))
            if e == ZERO:
                changed = True
                continue
            un = unknown_atoms_of(e, ds.ans)
            distinct = {u.key() for u in un}
            if len(distinct) == 1:
                atom = un[0]
                coeff = simplify(expand(_nmul([e, _npow_inv(atom)])))
                if not depends_on_jets(coeff) and _invertible_coefficient(coeff, ds.sys):
                    if isinstance(atom, Fn):
                        facts.append(atom)
                    else:
                        chi_facts.append(atom)
                    changed = True
                    continue
            new_eqs.append(e)
        eqs = new_eqs

    out: list[Expr] = []
    kept_facts = _minimal_facts(facts)
    for f in kept_facts:
        out.append(f)
    for c in sorted({c.key(): c for c in chi_facts}.values(), key=lambda s: s.key()):
        out.append(c)
    seen = set()
    for e in eqs:
        n = normalize_equation(e)
        if n != ZERO and n.key() not in seen:
            seen.add(n.key())
            out.append(n)
    return out


def _npow_inv(atom: Expr) -> Expr:
    return _npow(atom, ExponentForm.rational(-1))


def _minimal_facts(facts: list[Fn]) -> list[Fn]:
    out: list[Fn] = []
    for f in sorted({f.key(): f for f in facts}.values(), key=lambda x: x.key()):
        if any(f.fname == g.fname and f.frac == g.frac
               and all(a >= b for a, b in zip(f.deriv, g.deriv)) and f != g
               for g in facts):
            continue
        out.append(f)
    return out
