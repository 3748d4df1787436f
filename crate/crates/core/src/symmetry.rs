//! Potential constraint, prolongation and Lie invariance for
//! `(1/eps) u_tt + u_xx + u_yy + V u = 0`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{laplacian, satisfies_ckv, MetricSpec, VectorField};
use crate::symkernel::{parse, Atom, Bindings, EpsMode, Expr, Indep, JetVar};

/// Name of the abstract solution `b(t,x,y)` carried by the `b d_u` freedom.
pub const SOLUTION_FUNCTION: &str = "B";

/// The potential `V(t,x,y)`; any expression without `u` or jets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSpec {
    expr: Expr,
}

impl PotentialSpec {
    pub fn new(expr: Expr) -> Result<PotentialSpec> {
        if expr.contains_jets() {
            return Err(Error::Precondition(format!("potential `{expr}` depends on u or its jets")));
        }
        Ok(PotentialSpec { expr })
    }

    pub fn parse(text: &str) -> Result<PotentialSpec> {
        PotentialSpec::new(parse(text)?)
    }

    pub fn zero() -> PotentialSpec {
        PotentialSpec { expr: Expr::zero() }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

/// A point generator `xi^i d_i + ((c + a0) u + eta_0 [+ b]) d_u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryCandidate {
    /// Spatial part and any explicit `d_u` component `eta_0`.
    pub base: VectorField,
    /// Coefficient `c(t,x,y)` of `u` in `eta`.
    pub u_coeff: Expr,
    pub a0: Expr,
    /// Adds the term `B(t,x,y) d_u` with `B` an arbitrary solution.
    pub include_solution_term: bool,
}

impl SymmetryCandidate {
    pub fn new(base: VectorField) -> SymmetryCandidate {
        SymmetryCandidate {
            base,
            u_coeff: Expr::zero(),
            a0: Expr::zero(),
            include_solution_term: false,
        }
    }

    pub fn with_u_coeff(mut self, c: Expr) -> SymmetryCandidate {
        self.u_coeff = c;
        self
    }

    pub fn with_a0(mut self, a0: Expr) -> SymmetryCandidate {
        self.a0 = a0;
        self
    }

    pub fn with_solution_term(mut self) -> SymmetryCandidate {
        self.include_solution_term = true;
        self
    }

    pub fn xi(&self) -> &[Expr; 3] {
        &self.base.xi
    }

    pub fn eta(&self) -> Expr {
        let mut eta = self.base.eta.add(&self.u_coeff.add(&self.a0).mul(&Expr::u()));
        if self.include_solution_term {
            eta = eta.add(&solution_function(0, 0, 0));
        }
        eta
    }

    /// The generator as a plain vector field on `(t, x, y, u)`.
    pub fn field(&self) -> VectorField {
        VectorField {
            xi: self.base.xi.clone(),
            eta: self.eta(),
        }
    }
}

fn solution_function(dt: u32, dx: u32, dy: u32) -> Expr {
    Expr::func(SOLUTION_FUNCTION, vec![dt, dx, dy], vec![Expr::t(), Expr::x(), Expr::y()])
        .expect("three slots")
}

fn first_jet(v: Indep) -> Expr {
    Expr::jet(JetVar::base().extend(v))
}

fn second_jet(a: Indep, b: Indep) -> Expr {
    Expr::jet(JetVar::base().extend(a).extend(b))
}

/// First and second prolongation coefficients.
#[derive(Clone, Debug)]
pub struct ProlongedField {
    pub first: [Expr; 3],
    /// `second[i][j] = eta^{ij}`, symmetric.
    pub second: [[Expr; 3]; 3],
}

impl ProlongedField {
    pub fn first(&self, v: Indep) -> &Expr {
        &self.first[v.index()]
    }

    pub fn second(&self, a: Indep, b: Indep) -> &Expr {
        &self.second[a.index()][b.index()]
    }
}

/// First prolongation `eta^i = D_i eta - u_j D_i xi^j`.
pub fn prolong_first(s: &SymmetryCandidate) -> Result<[Expr; 3]> {
    let eta = s.eta();
    let mut first: Vec<Expr> = Vec::with_capacity(3);
    for i in Indep::ALL {
        let mut e = eta.total_diff(i)?;
        for j in Indep::ALL {
            let dxi = s.xi()[j.index()].total_diff(i)?;
            if !dxi.is_literal_zero() {
                e = e.sub(&first_jet(j).mul(&dxi));
            }
        }
        first.push(e);
    }
    Ok(first.try_into().expect("three components"))
}

/// First and second prolongation, `eta^{ij} = D_j eta^i - u_{ik} D_j xi^k`.
pub fn prolong(s: &SymmetryCandidate) -> Result<ProlongedField> {
    let first = prolong_first(s)?;
    let mut second: [[Expr; 3]; 3] = Default::default();
    for i in Indep::ALL {
        for j in Indep::ALL {
            if j.index() < i.index() {
                second[i.index()][j.index()] = second[j.index()][i.index()].clone();
                continue;
            }
            let mut e = first[i.index()].total_diff(j)?;
            for k in Indep::ALL {
                let dxi = s.xi()[k.index()].total_diff(j)?;
                if !dxi.is_literal_zero() {
                    e = e.sub(&second_jet(i, k).mul(&dxi));
                }
            }
            second[i.index()][j.index()] = e;
        }
    }
    Ok(ProlongedField { first, second })
}

/// `(1/eps) u_tt + u_xx + u_yy + V u`.
pub fn klein_gordon(v: &PotentialSpec) -> Expr {
    let utt = second_jet(Indep::T, Indep::T);
    utt.div(&Expr::eps()).expect("eps is nonzero")
        .add(&second_jet(Indep::X, Indep::X))
        .add(&second_jet(Indep::Y, Indep::Y))
        .add(&v.expr.mul(&Expr::u()))
}

/// Right side of the evolution form `u_tt = -eps (u_xx + u_yy + V u)`.
pub fn utt_rule(v: &PotentialSpec) -> Expr {
    second_jet(Indep::X, Indep::X)
        .add(&second_jet(Indep::Y, Indep::Y))
        .add(&v.expr.mul(&Expr::u()))
        .mul(&Expr::eps())
        .neg()
}

/// Residual of the potential condition `xi^k V_k + 2 psi V + (1/2) lap(psi)`.
///
/// Fails with [`Error::PsiMismatch`] if `psi` is not the conformal factor of `x`.
pub fn constraint_residual(x: &VectorField, psi: &Expr, v: &PotentialSpec) -> Result<Expr> {
    let g = MetricSpec::flat();
    if !satisfies_ckv(x, &g, psi, EpsMode::Both)? {
        return Err(Error::PsiMismatch { psi: psi.to_string() });
    }
    let spatial = VectorField::new(x.xi.clone());
    let dv = spatial.apply(&v.expr)?;
    let lap = laplacian(psi, &g)?;
    Ok(dv
        .add(&psi.mul(&v.expr).mul(&Expr::int(2)))
        .add(&lap.mul(&Expr::rational(1, 2))))
}

/// Second-prolonged action on the equation, restricted to its solutions.
pub fn lie_invariance_residual(s: &SymmetryCandidate, v: &PotentialSpec) -> Result<Expr> {
    let p = prolong(s)?;
    let xi_dv = VectorField::new(s.xi().clone()).apply(&v.expr)?;
    let action = p
        .second(Indep::T, Indep::T)
        .div(&Expr::eps())?
        .add(p.second(Indep::X, Indep::X))
        .add(p.second(Indep::Y, Indep::Y))
        .add(&xi_dv.mul(&Expr::u()))
        .add(&v.expr.mul(&s.eta()));
    let utt = JetVar::base().extend(Indep::T).extend(Indep::T);
    let mut r = action.substitute(&Bindings::new().jet(utt, utt_rule(v)))?;
    if s.include_solution_term {
        r = eliminate_solution_tt(&r, v)?;
    }
    Ok(r)
}

/// Replaces `B_tt` by `-eps (B_xx + B_yy + V B)`.
fn eliminate_solution_tt(e: &Expr, v: &PotentialSpec) -> Result<Expr> {
    let rule = solution_function(0, 2, 0)
        .add(&solution_function(0, 0, 2))
        .add(&v.expr.mul(&solution_function(0, 0, 0)))
        .mul(&Expr::eps())
        .neg();
    Ok(e.map_atoms(&mut |a: &Atom| {
        Ok(a.as_func()
            .filter(|f| &*f.name == SOLUTION_FUNCTION && f.derivs == [2, 0, 0])
            .map(|_| rule.clone()))
    })?)
}

/// Outcome of fitting `lambda` in `X + lambda psi u d_u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UCoefficient {
    /// `psi = 0`; no u-term is needed.
    NotNeeded,
    /// Constant `psi`: the term is indistinguishable from `a0 u`.
    AbsorbedIntoA0,
    Determined { lambda: Expr },
    /// No constant `lambda` makes the field a symmetry.
    NoSolution,
}

impl UCoefficient {
    /// The coefficient `lambda psi` of `u`, zero for the degenerate cases.
    pub fn coefficient(&self, psi: &Expr) -> Option<Expr> {
        match self {
            UCoefficient::NotNeeded | UCoefficient::AbsorbedIntoA0 => Some(Expr::zero()),
            UCoefficient::Determined { lambda } => Some(lambda.mul(psi)),
            UCoefficient::NoSolution => None,
        }
    }
}

fn is_point_free(e: &Expr) -> bool {
    !e.any_atom(&mut |a| match a {
        Atom::Sym(_) => Indep::ALL.iter().any(|v| v.symbol() == *a),
        _ => true,
    })
}

/// Finds the constant `lambda` with `X + lambda psi u d_u` a Lie symmetry,
/// by matching coefficients of the jet monomials.
pub fn determine_u_coefficient(x: &VectorField, psi: &Expr, v: &PotentialSpec) -> Result<UCoefficient> {
    if !satisfies_ckv(x, &MetricSpec::flat(), psi, EpsMode::Both)? {
        return Err(Error::PsiMismatch { psi: psi.to_string() });
    }
    if psi.is_zero() {
        return Ok(UCoefficient::NotNeeded);
    }
    if psi.is_constant() {
        return Ok(UCoefficient::AbsorbedIntoA0);
    }
    let base = SymmetryCandidate::new(x.clone());
    let r0 = lie_invariance_residual(&base, v)?;
    let r1 = lie_invariance_residual(&base.clone().with_u_coeff(psi.clone()), v)?.sub(&r0);
    let jets: BTreeSet<Atom> = r0
        .atoms()
        .into_iter()
        .chain(r1.atoms())
        .filter(|a| matches!(a, Atom::Jet(_)))
        .collect();
    let (Some(c0), Some(c1)) = (r0.collect(&jets), r1.collect(&jets)) else {
        return Ok(UCoefficient::NoSolution);
    };
    let keys: BTreeSet<_> = c0.keys().chain(c1.keys()).cloned().collect();
    let mut lambda: Option<Expr> = None;
    for m in keys {
        let a = c0.get(&m).cloned().unwrap_or_else(Expr::zero);
        let b = c1.get(&m).cloned().unwrap_or_else(Expr::zero);
        if b.is_zero() {
            if !a.is_zero() {
                return Ok(UCoefficient::NoSolution);
            }
            continue;
        }
        let cand = a.neg().div(&b)?;
        if !is_point_free(&cand) {
            return Ok(UCoefficient::NoSolution);
        }
        match &lambda {
            None => lambda = Some(cand),
            Some(l) => {
                if !l.sub(&cand).is_zero() {
                    return Ok(UCoefficient::NoSolution);
                }
            }
        }
    }
    let Some(lambda) = lambda else {
        // every coefficient vanishes independently of lambda
        return Ok(UCoefficient::Determined { lambda: Expr::zero() });
    };
    let check = r0.add(&r1.mul(&lambda));
    if !check.is_zero() {
        return Ok(UCoefficient::NoSolution);
    }
    Ok(UCoefficient::Determined { lambda })
}

/// Lie symmetry built from a conformal generator: `X` plus its fitted u-term.
pub fn lie_symmetry_from(x: &VectorField, psi: &Expr, v: &PotentialSpec) -> Result<Option<SymmetryCandidate>> {
    let u = determine_u_coefficient(x, psi, v)?;
    Ok(u
        .coefficient(psi)
        .map(|c| SymmetryCandidate::new(x.clone()).with_u_coeff(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Catalog;

    fn pot(s: &str) -> PotentialSpec {
        PotentialSpec::parse(s).unwrap()
    }

    #[test]
    fn constraint_examples() {
        let c = Catalog::builtin();
        assert!(constraint_residual(c.field(1), &Expr::zero(), &pot("V(x,y)")).unwrap().is_zero());
        assert!(constraint_residual(c.field(4), &Expr::one(), &pot("1/t^2*V(x/t,y/t)")).unwrap().is_zero());
        assert!(constraint_residual(&VectorField::zero(), &Expr::zero(), &pot("V(t,x,y)")).unwrap().is_zero());
        assert!(matches!(
            constraint_residual(c.field(4), &Expr::zero(), &pot("V(x)")),
            Err(Error::PsiMismatch { .. })
        ));
    }

    #[test]
    fn translation_prolongs_to_zero() {
        let s = SymmetryCandidate::new(VectorField::parse("1,0,0").unwrap());
        let p = prolong(&s).unwrap();
        assert!(p.first.iter().all(Expr::is_literal_zero));
        assert!(p.second.iter().flatten().all(Expr::is_literal_zero));
    }

    #[test]
    fn scaling_of_u_prolongs_to_jets() {
        let s = SymmetryCandidate::new(VectorField::zero()).with_u_coeff(Expr::one());
        let p = prolong(&s).unwrap();
        assert_eq!(p.first(Indep::X), &first_jet(Indep::X));
        assert_eq!(p.second(Indep::T, Indep::Y), &second_jet(Indep::T, Indep::Y));
    }

    #[test]
    fn homothety_prolongation() {
        // W = -t u_t - x u_x - y u_y, so D_x W + xi^j u_xj = -u_x
        let s = SymmetryCandidate::new(Catalog::builtin().field(4).clone());
        let p = prolong(&s).unwrap();
        assert_eq!(p.first(Indep::X), &first_jet(Indep::X).neg());
        assert_eq!(p.second(Indep::X, Indep::X), &second_jet(Indep::X, Indep::X).mul(&Expr::int(-2)));
    }

    #[test]
    fn invariance_examples() {
        let c = Catalog::builtin();
        let s = SymmetryCandidate::new(c.field(2).clone());
        assert!(lie_invariance_residual(&s, &pot("V(t,y)")).unwrap().is_zero());
        let s = SymmetryCandidate::new(VectorField::zero()).with_u_coeff(Expr::one());
        assert!(lie_invariance_residual(&s, &pot("V(t,x,y)")).unwrap().is_zero());
        let s = SymmetryCandidate::new(c.field(2).clone());
        assert!(!lie_invariance_residual(&s, &pot("V(x,y)")).unwrap().is_zero());
    }

    #[test]
    fn solution_term_is_a_symmetry() {
        let s = SymmetryCandidate::new(VectorField::zero()).with_solution_term();
        assert!(lie_invariance_residual(&s, &pot("V(t,x,y)")).unwrap().is_zero());
    }

    #[test]
    fn special_conformal_u_coefficient() {
        let c = Catalog::builtin();
        let v = pot("1/t^2*V(x/t, (eps*t^2 + x^2 + y^2)/t)");
        let u = determine_u_coefficient(c.field(8), &c.psi(8), &v).unwrap();
        assert_eq!(u, UCoefficient::Determined { lambda: Expr::rational(-1, 2) });
        let v = pot("1/x^2*V(y/x, (eps*t^2 + x^2 + y^2)/(eps*x))");
        let u = determine_u_coefficient(c.field(10), &c.psi(10), &v).unwrap();
        assert_eq!(u, UCoefficient::Determined { lambda: Expr::rational(-1, 2) });
    }

    #[test]
    fn degenerate_u_coefficients() {
        let c = Catalog::builtin();
        let u = determine_u_coefficient(c.field(1), &Expr::zero(), &pot("V(x,y)")).unwrap();
        assert_eq!(u, UCoefficient::NotNeeded);
        let u = determine_u_coefficient(c.field(4), &Expr::one(), &pot("1/t^2*V(x/t,y/t)")).unwrap();
        assert_eq!(u, UCoefficient::AbsorbedIntoA0);
        let u = determine_u_coefficient(c.field(8), &c.psi(8), &pot("V(x,y)")).unwrap();
        assert_eq!(u, UCoefficient::NoSolution);
    }
}
