//! Noether symmetries, gauge terms and conserved vectors.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::symkernel::{Atom, Bindings, Expr, Indep, JetVar, Monomial};
use crate::symmetry::{prolong_first, utt_rule, PotentialSpec, SymmetryCandidate};

/// Default degree bound of the polynomial gauge ansatz.
pub const GAUGE_DEGREE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lagrangian {
    pub expr: Expr,
    pub potential: PotentialSpec,
}

/// `(1/2) V u^2 - (1/2) u_x^2 - (1/2) u_y^2 - u_t^2 / (2 eps)`.
pub fn lagrangian(v: &PotentialSpec) -> Lagrangian {
    let half = Expr::rational(1, 2);
    let [ut, ux, uy] = Indep::ALL.map(first_jet);
    let expr = v
        .expr()
        .mul(&Expr::u().square())
        .sub(&ux.square())
        .sub(&uy.square())
        .sub(&ut.square().div(&Expr::eps()).expect("eps is nonzero"))
        .mul(&half);
    Lagrangian {
        expr,
        potential: v.clone(),
    }
}

fn first_jet(v: Indep) -> Expr {
    Expr::jet(JetVar::base().extend(v))
}

fn first_jet_atom(v: Indep) -> Atom {
    Atom::Jet(JetVar::base().extend(v))
}

fn u_atom() -> Atom {
    Atom::Jet(JetVar::base())
}

/// `dL/du - D_i (dL/du_i)`.
pub fn euler_lagrange(l: &Lagrangian) -> Result<Expr> {
    let mut e = l.expr.partial_atom(&u_atom())?;
    for v in Indep::ALL {
        e = e.sub(&l.expr.partial_atom(&first_jet_atom(v))?.total_diff(v)?);
    }
    Ok(e)
}

/// Gauge vector `(f_t, f_x, f_y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeTriple {
    pub f: [Expr; 3],
}

impl GaugeTriple {
    pub fn zero() -> GaugeTriple {
        GaugeTriple {
            f: [Expr::zero(), Expr::zero(), Expr::zero()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().all(Expr::is_zero)
    }

    pub fn divergence(&self) -> Result<Expr> {
        let mut acc = Expr::zero();
        for v in Indep::ALL {
            acc = acc.add(&self.f[v.index()].total_diff(v)?);
        }
        Ok(acc)
    }
}

/// `X^(1) L + L D_i xi^i - D_i f^i`.
pub fn noether_residual(s: &SymmetryCandidate, l: &Lagrangian, f: &GaugeTriple) -> Result<Expr> {
    let first = prolong_first(s)?;
    let eta = s.eta();
    let mut r = Expr::zero();
    for v in Indep::ALL {
        let xi = &s.xi()[v.index()];
        if !xi.is_literal_zero() {
            r = r.add(&xi.mul(&l.expr.partial_atom(&v.symbol())?));
            r = r.add(&l.expr.mul(&xi.total_diff(v)?));
        }
        r = r.add(&first[v.index()].mul(&l.expr.partial_atom(&first_jet_atom(v))?));
    }
    r = r.add(&eta.mul(&l.expr.partial_atom(&u_atom())?));
    Ok(r.sub(&f.divergence()?))
}

/// A Noether symmetry: the candidate with `a0` fixed, and its gauge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherSolution {
    pub symmetry: SymmetryCandidate,
    pub gauge: GaugeTriple,
}

/// Symbol standing for the free constant `a0` while it is being fitted.
pub fn a0_symbol() -> Expr {
    Expr::sym("a0")
}

fn is_constant_in_points(e: &Expr) -> bool {
    !e.any_atom(&mut |a| match a {
        Atom::Sym(_) => Indep::ALL.iter().any(|v| v.symbol() == *a),
        _ => true,
    })
}

/// Polynomial in t, x, y of total degree at most `bound`, with no abstract
/// functions and no jets.
fn within_ansatz(e: &Expr, bound: u32) -> bool {
    if e.is_literal_zero() {
        return true;
    }
    if !e.is_polynomial() || e.contains_func() || e.contains_jets() {
        return false;
    }
    if e.any_atom(&mut |a| matches!(a, Atom::Elem(_))) {
        return false;
    }
    let pts: Vec<Atom> = Indep::ALL.iter().map(|v| v.symbol()).collect();
    e.num().terms().iter().all(|(m, _)| {
        let d: u32 = pts.iter().map(|p| m.degree_of(p)).sum();
        d <= bound
    })
}

/// Antiderivative in `v` of a polynomial.
fn integrate(e: &Expr, v: Indep) -> Expr {
    let a = v.symbol();
    let mut acc = Expr::zero();
    for (m, c) in e.num().terms() {
        let k = m.degree_of(&a);
        let term = Expr::from_poly(crate::symkernel::Poly::term(m.clone(), c.clone()))
            .mul(&Expr::var(v))
            .mul(&Expr::rational(1, i64::from(k) + 1));
        acc = acc.add(&term);
    }
    acc.div(&e.denominator()).expect("nonzero denominator")
}

/// Fits `a0` (when the candidate carries the symbol `a0`) and the gauge
/// `f^i = A_i u^2 + B_i u + C_i` by matching coefficients of the residual in
/// `u` and the first jets. Returns `None` when no gauge of polynomial
/// degree `<= bound` exists.
pub fn solve_gauge_with(s: &SymmetryCandidate, l: &Lagrangian, bound: u32) -> Result<Option<NoetherSolution>> {
    let mut s = s.clone();
    let r = noether_residual(&s, l, &GaugeTriple::zero())?;
    let jets: BTreeSet<Atom> = std::iter::once(u_atom())
        .chain(Indep::ALL.iter().map(|v| first_jet_atom(*v)))
        .collect();
    let Some(mut coeffs) = r.collect(&jets) else {
        return Ok(None);
    };
    let a0 = Atom::sym("a0");
    let uses_a0 = r.contains_atom(&a0);
    let quadratic = |m: &Monomial| -> bool {
        let d: u32 = Indep::ALL.iter().map(|v| m.degree_of(&first_jet_atom(*v))).sum();
        d == 2
    };
    if uses_a0 {
        let mut value: Option<Expr> = None;
        for (m, c) in &coeffs {
            if !quadratic(m) {
                continue;
            }
            let slope = c.diff_sym("a0")?;
            let at0 = c.substitute(&Bindings::new().bind(a0.clone(), Expr::zero()))?;
            if slope.is_zero() {
                continue;
            }
            let cand = at0.neg().div(&slope)?;
            if !is_constant_in_points(&cand) {
                return Ok(None);
            }
            match &value {
                None => value = Some(cand),
                Some(v) if !v.sub(&cand).is_zero() => return Ok(None),
                _ => {}
            }
        }
        let value = value.unwrap_or_else(Expr::zero);
        let b = Bindings::new().bind(a0.clone(), value.clone());
        s.a0 = s.a0.substitute(&b)?;
        s.u_coeff = s.u_coeff.substitute(&b)?;
        s.base.eta = s.base.eta.substitute(&b)?;
        let r = noether_residual(&s, l, &GaugeTriple::zero())?;
        coeffs = match r.collect(&jets) {
            Some(c) => c,
            None => return Ok(None),
        };
    }
    let get = |m: Monomial| coeffs.get(&m).cloned().unwrap_or_else(Expr::zero);
    let u = u_atom();
    let mono = |fs: &[(Atom, u32)]| {
        let mut m = Monomial::one();
        for (a, k) in fs {
            m = m.mul(&Monomial::var(a.clone(), *k));
        }
        m
    };
    // every monomial must be one the gauge divergence can produce
    for (m, c) in &coeffs {
        let ud = m.degree_of(&u);
        let jd: u32 = Indep::ALL.iter().map(|v| m.degree_of(&first_jet_atom(*v))).sum();
        let allowed = (jd == 0 && ud <= 2) || (jd == 1 && ud <= 1);
        if !allowed && !c.is_zero() {
            return Ok(None);
        }
    }
    let mut f: [Expr; 3] = Default::default();
    let mut div_a = Expr::zero();
    let mut div_b = Expr::zero();
    let mut a_parts: [Expr; 3] = Default::default();
    let mut b_parts: [Expr; 3] = Default::default();
    for v in Indep::ALL {
        let ja = first_jet_atom(v);
        let a = get(mono(&[(u.clone(), 1), (ja.clone(), 1)])).mul(&Expr::rational(1, 2));
        let b = get(mono(&[(ja, 1)]));
        if !within_ansatz(&a, bound) || !within_ansatz(&b, bound) {
            return Ok(None);
        }
        div_a = div_a.add(&a.diff(v)?);
        div_b = div_b.add(&b.diff(v)?);
        a_parts[v.index()] = a;
        b_parts[v.index()] = b;
    }
    if !get(mono(&[(u.clone(), 2)])).sub(&div_a).is_zero() {
        return Ok(None);
    }
    if !get(mono(&[(u.clone(), 1)])).sub(&div_b).is_zero() {
        return Ok(None);
    }
    let rest = get(Monomial::one());
    let mut c_parts: [Expr; 3] = Default::default();
    if !rest.is_zero() {
        if !within_ansatz(&rest, bound.saturating_sub(1)) {
            return Ok(None);
        }
        // D_i C_i = rest, solved with a single nonzero component
        c_parts[Indep::X.index()] = integrate(&rest, Indep::X);
    }
    for v in Indep::ALL {
        let i = v.index();
        f[i] = a_parts[i]
            .mul(&Expr::u().square())
            .add(&b_parts[i].mul(&Expr::u()))
            .add(&c_parts[i]);
    }
    let gauge = GaugeTriple { f };
    if !noether_residual(&s, l, &gauge)?.is_zero() {
        return Ok(None);
    }
    Ok(Some(NoetherSolution { symmetry: s, gauge }))
}

pub fn solve_gauge(s: &SymmetryCandidate, l: &Lagrangian) -> Result<Option<NoetherSolution>> {
    solve_gauge_with(s, l, GAUGE_DEGREE)
}

/// Conserved vector `(T^t, T^x, T^y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConservedVector {
    pub t: [Expr; 3],
}

impl ConservedVector {
    pub fn new(t: [Expr; 3]) -> ConservedVector {
        ConservedVector { t }
    }

    pub fn sub(&self, other: &ConservedVector) -> ConservedVector {
        ConservedVector {
            t: [0, 1, 2].map(|i| self.t[i].sub(&other.t[i])),
        }
    }

    pub fn component(&self, v: Indep) -> &Expr {
        &self.t[v.index()]
    }
}

/// `T^i = f^i - [xi^i L + W dL/du_i]` with `W = eta - xi^j u_j`.
pub fn conserved_vector(s: &SymmetryCandidate, l: &Lagrangian, f: &GaugeTriple) -> Result<ConservedVector> {
    let r = noether_residual(s, l, f)?;
    if !r.is_zero() {
        return Err(Error::Precondition(format!(
            "not a Noether symmetry with this gauge (residual {r})"
        )));
    }
    let mut w = s.eta();
    for v in Indep::ALL {
        w = w.sub(&s.xi()[v.index()].mul(&first_jet(v)));
    }
    let mut t: [Expr; 3] = Default::default();
    for v in Indep::ALL {
        let i = v.index();
        let inner = s.xi()[i]
            .mul(&l.expr)
            .add(&w.mul(&l.expr.partial_atom(&first_jet_atom(v))?));
        t[i] = f.f[i].sub(&inner);
    }
    Ok(ConservedVector { t })
}

fn t_count(j: &JetVar) -> usize {
    j.indices().iter().filter(|&&v| v == Indep::T).count()
}

/// Eliminates every jet with at least two t-indices using the evolution
/// form of the equation and its total derivatives.
pub fn on_shell(e: &Expr, v: &PotentialSpec) -> Result<Expr> {
    let rule = utt_rule(v);
    let mut cur = e.clone();
    loop {
        let mut b = Bindings::new();
        for a in cur.atoms() {
            let Atom::Jet(j) = &a else { continue };
            if t_count(j) < 2 {
                continue;
            }
            // j = u_tt extended by the remaining indices
            let rest = j
                .drop_one(Indep::T)
                .and_then(|r| r.drop_one(Indep::T))
                .expect("two t indices");
            let mut img = rule.clone();
            for &idx in rest.indices() {
                img = img.total_diff(idx)?;
            }
            b.insert(a.clone(), img);
        }
        if b.is_empty() {
            return Ok(cur);
        }
        cur = cur.substitute(&b)?;
    }
}

/// `D_t T^t + D_x T^x + D_y T^y` restricted to solutions.
pub fn divergence_on_shell(t: &ConservedVector, v: &PotentialSpec) -> Result<Expr> {
    let mut acc = Expr::zero();
    for d in Indep::ALL {
        acc = acc.add(&on_shell(&t.t[d.index()], v)?.total_diff(d)?);
    }
    on_shell(&acc, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Catalog, VectorField};
    use crate::symkernel::parse;

    fn pot(s: &str) -> PotentialSpec {
        PotentialSpec::parse(s).unwrap()
    }

    #[test]
    fn euler_lagrange_reproduces_equation() {
        let v = pot("V(t,x,y)");
        let el = euler_lagrange(&lagrangian(&v)).unwrap();
        let expected = parse("V(t,x,y)*u + u_xx + u_yy + u_tt/eps").unwrap();
        assert!(el.sub(&expected).is_zero());
    }

    #[test]
    fn euler_lagrange_small_cases() {
        let l = |s: &str| Lagrangian {
            expr: parse(s).unwrap(),
            potential: PotentialSpec::zero(),
        };
        assert_eq!(euler_lagrange(&l("u_x^2/2")).unwrap(), parse("-u_xx").unwrap());
        assert_eq!(euler_lagrange(&l("u")).unwrap(), Expr::one());
    }

    #[test]
    fn translations_need_no_gauge() {
        let c = Catalog::builtin();
        let l = lagrangian(&pot("V(x,y)"));
        let s = SymmetryCandidate::new(c.field(1).clone());
        assert!(noether_residual(&s, &l, &GaugeTriple::zero()).unwrap().is_zero());
        let l = lagrangian(&pot("V(t,y)"));
        let sol = solve_gauge(&SymmetryCandidate::new(c.field(2).clone()), &l).unwrap().unwrap();
        assert!(sol.gauge.is_zero());
    }

    #[test]
    fn homothety_needs_a0() {
        let c = Catalog::builtin();
        let l = lagrangian(&pot("1/t^2*V(x/t,y/t)"));
        let s = SymmetryCandidate::new(c.field(4).clone()).with_a0(a0_symbol());
        let sol = solve_gauge(&s, &l).unwrap().unwrap();
        assert_eq!(sol.symmetry.a0, Expr::rational(-1, 2));
        assert!(sol.gauge.is_zero());
    }

    #[test]
    fn scaling_of_u_is_not_noether() {
        let l = lagrangian(&pot("V(t,x,y)"));
        let s = SymmetryCandidate::new(VectorField::zero()).with_u_coeff(Expr::one());
        let r = noether_residual(&s, &l, &GaugeTriple::zero()).unwrap();
        assert!(r.sub(&l.expr.mul(&Expr::int(2))).is_zero());
        assert!(solve_gauge(&s, &l).unwrap().is_none());
    }

    #[test]
    fn special_conformal_gauge() {
        let c = Catalog::builtin();
        let l = lagrangian(&pot("1/t^2*V(x/t, (eps*t^2 + x^2 + y^2)/t)"));
        let s = SymmetryCandidate::new(c.field(8).clone())
            .with_u_coeff(c.psi(8).mul(&Expr::rational(-1, 2)))
            .with_a0(a0_symbol());
        let sol = solve_gauge(&s, &l).unwrap().expect("gauge exists");
        let t = conserved_vector(&sol.symmetry, &l, &sol.gauge).unwrap();
        assert!(divergence_on_shell(&t, &l.potential).unwrap().is_zero());
    }

    #[test]
    fn zero_symmetry_gives_zero_vector() {
        let l = lagrangian(&pot("V(x,y)"));
        let t = conserved_vector(&SymmetryCandidate::new(VectorField::zero()), &l, &GaugeTriple::zero()).unwrap();
        assert!(t.t.iter().all(Expr::is_literal_zero));
    }

    #[test]
    fn non_conserved_vector() {
        let t = ConservedVector::new([Expr::u(), Expr::zero(), Expr::zero()]);
        let d = divergence_on_shell(&t, &pot("V(x,y)")).unwrap();
        assert_eq!(d, parse("u_t").unwrap());
    }

    #[test]
    fn on_shell_removes_double_t_jets() {
        let v = pot("V(x,y)");
        let e = on_shell(&parse("u_ttx + u_ttt").unwrap(), &v).unwrap();
        assert_eq!(e.max_jet_order(), 3);
        assert!(!e.any_atom(&mut |a| a.as_jet().is_some_and(|j| t_count(j) >= 2)));
    }
}
