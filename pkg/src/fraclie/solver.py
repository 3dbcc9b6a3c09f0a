"""Exact solver for the determining system.

Branches on the quadratic part of tau, t-splits mixed-coefficient equations,
instantiates unknown x-functions by total-degree polynomials and the
inhomogeneous parts h_s by a certified template library, reduces everything
to exact rational-function linear algebra, and emits a normalized basis with
machine-checked residual certificates.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product as iproduct
from typing import Optional, Sequence

from .exponents import Assumptions, ExponentForm
from .expr import (Add, Expr, Fn, Gamma, Jet, Mul, Pow, Rat, Sym, Var, ZERO,
                   ONE, _base_exp, _nadd, _nmul, _npow, add_terms, atoms,
                   depends_on_jets, diff_wrt, expand, gamma_simplify, mul_factors, partial_derivative, render,
                   simplify, substitute, to_eform, total_derivative)
from .fraccalc import PowerSum, rl_derivative
from .linsolve import Elem, Field, nullspace
from .model import PDESystem, Signature, classify_terms
from .prolong import (AnsatzGenerator, BRANCH_NONZERO, BRANCH_UNIFIED,
                      BRANCH_ZERO)
from .determining import (DeterminingSystem, build_determining, h_condition,
                          invariance_condition, separate)


class DegreeInsufficient(Exception):
    pass


class TemplateResidual(Exception):
    pass


class ShapeViolation(Exception):
    pass


class VerificationFailed(Exception):
    pass


class NonAffineRow(Exception):
    pass


# ---------------------------------------------------------------------------
# Concrete generators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """A concrete infinitesimal generator tau*d_t + xi_i*d_{x_i} + eta_s*d_{u_s}."""
    sig: Signature
    tau: Expr
    xi: tuple[Expr, ...]
    eta: tuple[Expr, ...]

    def components(self) -> list[tuple[str, Expr]]:
        out = [(self.sig.t_name, self.tau)]
        out += [(self.sig.space_names[i], self.xi[i]) for i in range(self.sig.p)]
        out += [(self.sig.dep_names[s], self.eta[s]) for s in range(self.sig.q)]
        return out

    def is_zero(self) -> bool:
        return (self.tau == ZERO and all(x == ZERO for x in self.xi)
                and all(e == ZERO for e in self.eta))

    def is_shift(self) -> bool:
        """Pure solution-shift: only eta components, independent of the u_j."""
        if self.tau != ZERO or any(x != ZERO for x in self.xi):
            return False
        return all(not depends_on_jets(e) for e in self.eta)

    def describe(self) -> str:
        parts = []
        for name, comp in self.components():
            if comp == ZERO:
                continue
            cs = render(comp, self.sig)
            if isinstance(comp, (Add,)) or (isinstance(comp, Mul) and len(comp.factors) > 1) \
               or cs.startswith("-"):
                cs = f"({cs})"
            parts.append(f"{cs}*d/d{name}")
        return " + ".join(parts) if parts else "0"


class ConcreteGenerator:
    """Duck-typed stand-in for AnsatzGenerator with concrete components, used
    to re-derive the two conditions independently for verification."""

    def __init__(self, gen: Generator, alpha: Expr,
                 assumptions: Optional[Assumptions] = None):
        self.gen = gen
        self.sig = gen.sig
        self.alpha = simplify(alpha)
        self.asm = assumptions if assumptions is not None else Assumptions()

    @property
    def tau(self) -> Expr:
        return self.gen.tau

    @property
    def tau_prime(self) -> Expr:
        return total_derivative(self.gen.tau, self.sig.t)

    def xi(self, i: int) -> Expr:
        return self.gen.xi[i]

    def eta(self, s: int) -> Expr:
        return self.gen.eta[s]

    def deta_du(self, s: int, i: int) -> Expr:
        return diff_wrt(self.gen.eta[s], self.sig.u(i))

    def h(self, s: int) -> Expr:
        e = self.gen.eta[s]
        pieces = [e]
        for j in range(self.sig.q):
            pieces.append(_nmul([Rat(-1), self.deta_du(s, j), self.sig.u(j)]))
        return simplify(_nadd(pieces))

    def h_frac(self, s: int) -> Expr:
        h = self.h(s)
        if h == ZERO:
            return ZERO
        ps = PowerSum.from_expr(h, self.sig.t)
        return rl_derivative(ps, self.alpha, tvar=self.sig.t,
                             assumptions=self.asm).to_expr()


def generator_shape(gen: Generator, alpha: Expr,
                    assumptions: Optional[Assumptions] = None
                    ) -> tuple[Expr, Expr]:
    """Validate the admitted structural form; returns (chi1, chi2).
    Raises ShapeViolation otherwise."""
    sig = gen.sig
    t, asm = sig.t, assumptions
    tau = expand(gen.tau)
    chi1, chi2 = ZERO, ZERO
    for term in add_terms(tau):
        if term == ZERO:
            continue
        rest = []
        texp = ExponentForm()
        for f in mul_factors(term):
            b, e = _base_exp(f)
            if isinstance(b, Var) and b == t:
                texp = texp + e
            else:
                rest.append(f)
        coeff = _nmul(rest) if rest else ONE
        if depends_on_jets(coeff) or any(isinstance(a, Var) for a in atoms(coeff, Var)):
            raise ShapeViolation("tau must be a polynomial in t with constant "
                                 "coefficients")
        if texp == ExponentForm.rational(1):
            chi1 = simplify(chi1 + coeff)
        elif texp == ExponentForm.rational(2):
            chi2 = simplify(chi2 + coeff)
        else:
            raise ShapeViolation("tau must have the form chi2*t^2 + chi1*t")
    for i in range(sig.p):
        xi = gen.xi[i]
        if depends_on_jets(xi) or any(v.is_time for v in atoms(xi, Var)):
            raise ShapeViolation(f"xi_{sig.space_names[i]} must depend on the "
                                 "space variables only")
    for s in range(sig.q):
        eta = gen.eta[s]
        for j in range(sig.q):
            d = diff_wrt(eta, sig.u(j))
            if depends_on_jets(d):
                raise ShapeViolation("eta must be linear in the dependents")
            dt = partial_derivative(d, t)
            if j != s:
                if dt != ZERO:
                    raise ShapeViolation(
                        "cross coefficients of eta must be x-functions only")
            else:
                expected = simplify(_nmul([_nadd([alpha, Rat(-1)]), chi2]))
                if simplify(expand(dt - expected)) != ZERO:
                    raise ShapeViolation(
                        "the t-slope of the u_s-coefficient of eta_s must equal "
                        "(alpha-1)*chi2")
                if partial_derivative(dt, t) != ZERO:
                    raise ShapeViolation("eta coefficient at most linear in t")
    return chi1, chi2


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    frac_residuals: tuple[Expr, ...]
    integer_residuals: tuple[tuple[tuple[Expr, Expr], ...], ...]

    def all_residuals(self) -> list[Expr]:
        out = list(self.frac_residuals)
        for eq in self.integer_residuals:
            out.extend(c for _, c in eq)
        return out


def verify_generator(sys: PDESystem, gen: Generator,
                     assumptions: Optional[Assumptions] = None
                     ) -> VerificationReport:
    """Re-derive both determining conditions with the concrete generator
    through the full prolongation route and report residuals; all-zero means
    verified.  Independent of the linear solve."""
    asm = assumptions if assumptions is not None else sys.assumptions()
    fld = Field(asm)
    generator_shape(gen, sys.alpha, asm)
    conc = ConcreteGenerator(gen, sys.alpha, asm)
    cl = classify_terms(sys)
    cond2 = invariance_condition(sys, conc, cl)
    cond1 = h_condition(sys, conc, cl)
    frac_res = tuple(fld.to_expr(fld.elem(c)) for c in cond1)
    int_res = []
    for s in range(sys.q):
        frags, _ = separate(gamma_simplify(expand(cond2[s]), asm), sys)
        kept = []
        for mono, coeff in frags:
            c = fld.elem(coeff)
            if not c.is_zero():
                kept.append((mono, fld.to_expr(c)))
        int_res.append(tuple(kept))
    ok = all(r == ZERO for r in frac_res) and all(not eq for eq in int_res)
    return VerificationReport(ok, frac_res, tuple(int_res))


# ---------------------------------------------------------------------------
# Instantiation by polynomials and h-templates
# ---------------------------------------------------------------------------

def default_h_templates(sys: PDESystem) -> list[Expr]:
    sig = sys.sig
    t = sig.t
    af = to_eform(sys.alpha)
    out: list[Expr] = [ONE, _npow(t, af - ExponentForm.rational(1))]
    for i in range(sig.p):
        out.append(_nmul([sig.x(i), _npow(t, -af)]))
        out.append(_nmul([sig.x(i), _npow(t, af - ExponentForm.rational(1))]))
    return out


@dataclass(frozen=True)
class SolverConfig:
    poly_degree: int = 3
    h_templates: Optional[tuple[Expr, ...]] = None
    branch: str = "both"            # both | zero | nonzero
    check_degree_stability: bool = True


def _graded_monomials(p: int, degree: int):
    out = []
    for total in range(degree + 1):
        for beta in iproduct(range(degree + 1), repeat=p):
            if sum(beta) == total:
                out.append(beta)
    return out


@dataclass
class _Instantiation:
    columns: list[str]
    col_index: dict[str, int]
    fn_values: dict[str, Expr]        # unknown fn name -> expr in coeff syms
    templates: list[Expr]
    rl_templates: list[Expr]


def _coeff_name(fn: str, tag: str) -> str:
    return f"c[{fn}.{tag}]"


def build_instantiation(ds: DeterminingSystem, cfg: SolverConfig,
                        assumptions: Assumptions) -> _Instantiation:
    sig = ds.sys.sig
    ans = ds.ans
    templates = list(cfg.h_templates) if cfg.h_templates is not None \
        else default_h_templates(ds.sys)
    rl_templates = []
    for T in templates:
        ps = PowerSum.from_expr(T, sig.t)
        rl_templates.append(rl_derivative(ps, ds.sys.alpha, tvar=sig.t,
                                          assumptions=assumptions).to_expr())

    columns: list[str] = ["chi1", "chi2"]
    fn_values: dict[str, Expr] = {}
    monos = _graded_monomials(sig.p, cfg.poly_degree)

    def poly_for(fname: str) -> Expr:
        terms = []
        for beta in monos:
            tag = "".join(str(b) for b in beta)
            cname = _coeff_name(fname, tag)
            columns.append(cname)
            factors: list[Expr] = [Sym(cname)]
            for i, b in enumerate(beta):
                if b:
                    factors.append(_npow(sig.x(i), ExponentForm.rational(b)))
            terms.append(_nmul(factors))
        return _nadd(terms)

    for i in range(sig.p):
        fn_values[ans.xi(i).fname] = poly_for(ans.xi(i).fname)
    for s in range(sig.q):
        fn_values[ans.g(s).fname] = poly_for(ans.g(s).fname)
    for s in range(sig.q):
        for i in range(sig.q):
            if i != s:
                name = ans.f(s, i).fname
                if name not in fn_values:
                    fn_values[name] = poly_for(name)
    for s in range(sig.q):
        name = ans.h(s).fname
        terms = []
        for j, T in enumerate(templates):
            cname = _coeff_name(name, f"T{j}")
            columns.append(cname)
            terms.append(_nmul([Sym(cname), T]))
        fn_values[name] = _nadd(terms)

    return _Instantiation(columns, {c: i for i, c in enumerate(columns)},
                          fn_values, templates, rl_templates)


def _instantiate_expr(e: Expr, inst: _Instantiation, sig: Signature) -> Expr:
    """Replace unknown-function atoms by their polynomial/template values,
    applying stored derivative multi-indices and the fractional marker."""
    def value_of(f: Fn) -> Expr:
        base = inst.fn_values[f.fname]
        if f.frac:
            out_terms = []
            for j, T in enumerate(inst.templates):
                cname = _coeff_name(f.fname, f"T{j}")
                out_terms.append(_nmul([Sym(cname), inst.rl_templates[j]]))
            out = _nadd(out_terms)
        else:
            out = base
        for slot, k in enumerate(f.deriv):
            v = f.args[slot]
            assert isinstance(v, Var)
            for _ in range(k):
                out = partial_derivative(out, v)
        return out

    def walk(x: Expr) -> Expr:
        if isinstance(x, Fn) and x.fname in inst.fn_values:
            return value_of(x)
        if isinstance(x, Mul):
            return _nmul([walk(f) for f in x.factors])
        if isinstance(x, Add):
            return _nadd([walk(t) for t in x.terms])
        if isinstance(x, Pow):
            return _npow(walk(x.base), x.exp)
        if isinstance(x, Gamma):
            return Gamma(walk(x.arg))
        return x

    return expand(walk(simplify(e)))


# ---------------------------------------------------------------------------
# Row extraction: split by (t-power, x-monomial, jet-monomial) classes
# ---------------------------------------------------------------------------

def equation_rows(e: Expr, inst: _Instantiation, sig: Signature, fld: Field
                  ) -> tuple[list[list[Elem]], list[str]]:
    e = fld.norm_expr(e)
    if e == ZERO:
        return [], []
    classes: dict[tuple, dict[int, Elem]] = {}
    class_forms: dict[tuple, ExponentForm] = {}
    for term in add_terms(e):
        texp = ExponentForm()
        struct: list[Expr] = []
        col: Optional[int] = None
        coeff: list[Expr] = []
        for f in mul_factors(term):
            b, ex = _base_exp(f)
            if isinstance(b, Var) and b.is_time:
                texp = texp + ex
            elif isinstance(b, (Var, Jet)):
                struct.append(f)
            elif isinstance(b, Fn) and depends_on_jets(b):
                struct.append(f)
            elif isinstance(b, Sym) and b.name in inst.col_index:
                if col is not None or ex != ExponentForm.rational(1):
                    raise NonAffineRow(f"term {render(term)} is not affine in "
                                       "the solver unknowns")
                col = inst.col_index[b.name]
            else:
                coeff.append(f)
        if col is None:
            raise NonAffineRow(f"term {render(term)} carries no solver unknown")
        key = (texp.sort_key(), tuple(sorted(s.key() for s in struct)))
        class_forms[key] = texp
        row = classes.setdefault(key, {})
        c = fld.elem(_nmul(coeff) if coeff else ONE)
        row[col] = fld.add(row.get(col, fld.zero), c)

    notes: list[str] = []
    forms = [class_forms[k] for k in sorted(class_forms)]
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            d = forms[i] - forms[j]
            if d.is_zero() or d.is_rational():
                continue
            if fld.asm.sign(d) is None and fld.asm.sign(-d) is None:
                lead = next(c for m, c in d.coeffs if m != ())
                if lead < 0:
                    d = -d
                notes.append(f"{d.render()} != 0 (separates t-power "
                             "classes during the solve)")

    rows = []
    ncols = len(inst.columns)
    for key in sorted(classes):
        rowmap = classes[key]
        row = [rowmap.get(c, fld.zero) for c in range(ncols)]
        if any(not e2.is_zero() for e2 in row):
            rows.append(row)
    return rows, sorted(set(notes))


# ---------------------------------------------------------------------------
# Branch solving
# ---------------------------------------------------------------------------

def _branch_gamma_subs(ds: DeterminingSystem, branch: str) -> dict:
    subs = {}
    for s in range(ds.sys.q):
        name = ds.ans.with_branch(BRANCH_UNIFIED).gamma(s)
        if not isinstance(name, Sym):
            continue
        if branch == BRANCH_ZERO:
            subs[name] = ZERO
        else:
            subs[name] = simplify((ds.sys.alpha - ONE) * Rat(Fraction(1, 2)))
    return subs


def _solve_branch(ds: DeterminingSystem, cfg: SolverConfig, branch: str,
                  inst: _Instantiation, fld: Field
                  ) -> tuple[list[list[Expr]], list[str]]:
    gsubs = _branch_gamma_subs(ds, branch)
    rows: list[list[Elem]] = []
    notes: list[str] = []
    eqs = list(ds.integer_eqs) + list(ds.frac_eqs)
    for eq in eqs:
        if gsubs:
            eq = substitute(eq, gsubs)
        body = _instantiate_expr(eq, inst, ds.sys.sig)
        try:
            r, n = equation_rows(body, inst, ds.sys.sig, fld)
        except NonAffineRow as exc:
            raise TemplateResidual(
                f"branch {branch}: a condition failed to reduce to linear rows "
                f"({exc})") from exc
        rows.extend(r)
        notes.extend(n)
    if branch == BRANCH_ZERO:
        row = [fld.zero] * len(inst.columns)
        row[inst.col_index["chi2"]] = fld.one
        rows.append(row)
    vecs, piv_notes = nullspace(rows, len(inst.columns), fld)
    notes.extend(piv_notes)
    out = [[fld.to_expr(e) for e in v] for v in vecs]
    return out, sorted(set(notes))


def _ratnorm_components(e: Expr, fld: Field) -> Expr:
    """Combine parameter-fraction coefficients per structural monomial."""
    e = expand(e)
    groups: dict[tuple, list] = {}
    for term in add_terms(e):
        if term == ZERO:
            continue
        struct: list[Expr] = []
        coeff: list[Expr] = []
        for f in mul_factors(term):
            b, _ = _base_exp(f)
            if isinstance(b, (Var, Jet)) or (isinstance(b, Fn) and depends_on_jets(b)):
                struct.append(f)
            else:
                coeff.append(f)
        mono = _nmul(struct) if struct else ONE
        k = mono.key()
        c = fld.elem(_nmul(coeff) if coeff else ONE)
        if k in groups:
            groups[k][1] = fld.add(groups[k][1], c)
        else:
            groups[k] = [mono, c]
    out = []
    for k in sorted(groups):
        mono, c = groups[k]
        if not c.is_zero():
            out.append(_nmul([fld.to_expr(c), mono]))
    return simplify(_nadd(out))


def _vector_to_generator(ds: DeterminingSystem, branch: str,
                         inst: _Instantiation, vec: list[Expr],
                         fld: Field) -> Generator:
    sig = ds.sys.sig
    values = {Sym(name): vec[i] for i, name in enumerate(inst.columns)}
    gsubs = _branch_gamma_subs(ds, branch)

    def val(e: Expr) -> Expr:
        return _ratnorm_components(substitute(substitute(e, gsubs), values), fld)

    ans = ds.ans
    tau = val(ans.tau)
    xi = tuple(val(_instantiate_expr(ans.xi(i), inst, sig)) for i in range(sig.p))
    eta = []
    for s in range(sig.q):
        eta.append(val(_instantiate_expr(ans.eta(s), inst, sig)))
    return Generator(sig, tau, xi, tuple(eta))


# ---------------------------------------------------------------------------
# Generator-space normalization
# ---------------------------------------------------------------------------

def _generator_vector_space(gens: Sequence[Generator], fld: Field):
    """Vectorize generators over the monomial basis of their components."""
    columns: dict[tuple, tuple[int, Expr]] = {}
    rows = []
    decomposed = []
    for g in gens:
        comps = [g.tau] + list(g.xi) + list(g.eta)
        entry: dict[tuple, Elem] = {}
        for ci, comp in enumerate(comps):
            comp = fld.norm_expr(comp)
            for term in add_terms(comp):
                if term == ZERO:
                    continue
                struct: list[Expr] = []
                coeff: list[Expr] = []
                for f in mul_factors(term):
                    b, _ = _base_exp(f)
                    if isinstance(b, (Var, Jet)) or (
                            isinstance(b, Fn) and depends_on_jets(b)):
                        struct.append(f)
                    else:
                        coeff.append(f)
                mono = _nmul(struct) if struct else ONE
                key = (ci, mono.key())
                columns.setdefault(key, (ci, mono))
                c = fld.elem(_nmul(coeff) if coeff else ONE)
                entry[key] = fld.add(entry.get(key, fld.zero), c)
        decomposed.append(entry)
    ordered = sorted(columns)
    for entry in decomposed:
        rows.append([entry.get(k, fld.zero) for k in ordered])
    return rows, ordered, columns


def _rebuild_generator(sig: Signature, ordered, columns, row, fld: Field
                       ) -> Generator:
    comps = [ZERO] * (1 + sig.p + sig.q)
    for k, e in zip(ordered, row):
        if e.is_zero():
            continue
        ci, mono = columns[k]
        comps[ci] = simplify(comps[ci] + _nmul([fld.to_expr(e), mono]))
    return Generator(sig, comps[0], tuple(comps[1:1 + sig.p]),
                     tuple(comps[1 + sig.p:]))


def normalize_generators(gens: Sequence[Generator], sig: Signature, fld: Field
                         ) -> list[Generator]:
    """RREF over the ordered component-monomial vector; deterministic,
    idempotent, removes linear dependencies."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    from .linsolve import rref
    rows, ordered, columns = _generator_vector_space(gens, fld)
    res = rref(rows, fld)
    return [_rebuild_generator(sig, ordered, columns, row, fld)
            for row in res.rows]


# ---------------------------------------------------------------------------
# The solve entry point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolutionBasis:
    sys: PDESystem
    generators: tuple[Generator, ...]          # point-symmetry basis
    shift_generators: tuple[Generator, ...]    # pure solution shifts
    assumptions: tuple[str, ...]
    branch_dims: tuple[tuple[str, int], ...]
    reports: tuple[VerificationReport, ...]
    shift_reports: tuple[VerificationReport, ...]

    @property
    def dimension(self) -> int:
        return len(self.generators)


def _solve_once(ds: DeterminingSystem, cfg: SolverConfig) -> tuple[
        list[Generator], list[str], list[tuple[str, int]]]:
    asm = ds.sys.assumptions()
    fld = Field(asm)
    inst = build_instantiation(ds, cfg, asm)
    branches = {"both": [BRANCH_ZERO, BRANCH_NONZERO],
                "zero": [BRANCH_ZERO],
                "nonzero": [BRANCH_NONZERO]}[cfg.branch]
    gens: list[Generator] = []
    notes: list[str] = list(ds.assumptions)
    dims: list[tuple[str, int]] = []
    for branch in branches:
        vecs, bnotes = _solve_branch(ds, cfg, branch, inst, fld)
        notes.extend(bnotes)
        dims.append((branch, len(vecs)))
        for v in vecs:
            gens.append(_vector_to_generator(ds, branch, inst, v, fld))
    final = normalize_generators(gens, ds.sys.sig, fld)
    return final, sorted(set(notes)), dims


def solve(ds: DeterminingSystem, cfg: Optional[SolverConfig] = None
          ) -> SolutionBasis:
    cfg = cfg if cfg is not None else SolverConfig()
    final, notes, dims = _solve_once(ds, cfg)
    if cfg.check_degree_stability:
        bigger, _, _ = _solve_once(ds, replace(cfg, poly_degree=cfg.poly_degree + 1,
                                               check_degree_stability=False))
        if len(bigger) != len(final):
            raise DegreeInsufficient(
                f"solution dimension moved from {len(final)} to {len(bigger)} "
                f"when the polynomial degree was raised from {cfg.poly_degree} "
                f"to {cfg.poly_degree + 1}")
    main = [g for g in final if not g.is_shift()]
    shifts = [g for g in final if g.is_shift()]
    reports = []
    for g in main + shifts:
        rep = verify_generator(ds.sys, g)
        if not rep.ok:
            bad = [render(r) for r in rep.all_residuals() if r != ZERO]
            raise VerificationFailed(
                f"emitted generator {g.describe()} left nonzero residuals: "
                + "; ".join(bad[:4]))
        reports.append(rep)
    return SolutionBasis(ds.sys, tuple(main), tuple(shifts), tuple(notes),
                         tuple(dims), tuple(reports[:len(main)]),
                         tuple(reports[len(main):]))


def normalize_basis(basis: SolutionBasis) -> SolutionBasis:
    """Reduced row-echelon normal form of the emitted generators; idempotent."""
    fld = Field(basis.sys.assumptions())
    merged = normalize_generators(list(basis.generators) +
                                  list(basis.shift_generators),
                                  basis.sys.sig, fld)
    main = tuple(g for g in merged if not g.is_shift())
    shifts = tuple(g for g in merged if g.is_shift())
    reports = tuple(verify_generator(basis.sys, g) for g in main)
    shift_reports = tuple(verify_generator(basis.sys, g) for g in shifts)
    return SolutionBasis(basis.sys, main, shifts, basis.assumptions,
                         basis.branch_dims, reports, shift_reports)


def solve_system(sys: PDESystem, cfg: Optional[SolverConfig] = None
                 ) -> tuple[DeterminingSystem, SolutionBasis]:
    ds = build_determining(sys)
    return ds, solve(ds, cfg)
