//! Invariants of point symmetries and reduction by invariant ansatz.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::VectorField;
use crate::linalg;
use crate::symkernel::{parse, Atom, Bindings, EpsMode, Expr, Indep, REDUCED_FUNCTIONS};
use crate::symmetry::{klein_gordon, PotentialSpec};

/// `X(W)` for each proposed invariant `W`.
pub fn invariant_residuals(x: &VectorField, ws: &[Expr]) -> Result<Vec<Expr>> {
    ws.iter().map(|w| x.apply(w)).collect()
}

/// Generic point used to certify functional independence.
pub fn generic_point() -> Bindings {
    Bindings::new()
        .indep(Indep::T, Expr::rational(9, 4))
        .indep(Indep::X, Expr::int(4))
        .indep(Indep::Y, Expr::rational(25, 9))
        .bind(Atom::Jet(crate::symkernel::JetVar::base()), Expr::rational(5, 2))
}

/// Rank of the Jacobian of `ws` over `(t, x, y, u)` at [`generic_point`],
/// for the given signature sign. `None` if an entry is not rational there.
pub fn jacobian_rank(ws: &[Expr], eps_sign: i64) -> Result<Option<usize>> {
    let point = generic_point();
    let u = Atom::Jet(crate::symkernel::JetVar::base());
    let vars: Vec<Atom> = Indep::ALL.iter().map(|v| v.symbol()).chain([u]).collect();
    let mut rows = Vec::with_capacity(ws.len());
    for w in ws {
        let mut row = Vec::with_capacity(vars.len());
        for v in &vars {
            let d = w.partial_atom(v)?.instantiate_eps(eps_sign)?.substitute(&point)?;
            match d.as_constant() {
                Some(c) => row.push(c),
                None => return Ok(None),
            }
        }
        rows.push(row);
    }
    Ok(Some(linalg::rank(&rows)))
}

/// `u = shape * F(args)` with `F` an abstract reduced function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ansatz {
    pub shape: Expr,
    pub function: String,
    pub args: Vec<Expr>,
}

impl Ansatz {
    pub fn new(shape: Expr, function: &str, args: Vec<Expr>) -> Ansatz {
        Ansatz {
            shape,
            function: function.to_string(),
            args,
        }
    }

    /// Splits an expression such as `exp(k*x)*zeta(t,y)` into shape and
    /// reduced function; exactly one reduced function may occur, linearly.
    pub fn parse(text: &str) -> Result<Ansatz> {
        let e = parse(text)?;
        let mut apps = BTreeSet::new();
        e.any_atom(&mut |a| {
            if let Some(f) = a.as_func() {
                if REDUCED_FUNCTIONS.contains(&&*f.name) {
                    apps.insert(a.clone());
                }
            }
            false
        });
        let app = match apps.len() {
            1 => apps.into_iter().next().expect("one element"),
            0 => return Err(Error::Ansatz(format!("`{text}` contains no reduced function"))),
            _ => return Err(Error::Ansatz(format!("`{text}` contains several reduced functions"))),
        };
        let f = app.as_func().expect("function atom").clone();
        if !f.is_underived() {
            return Err(Error::Ansatz("the reduced function appears differentiated".into()));
        }
        let shape = e.div(&Expr::atom(app.clone()))?;
        if shape.contains_atom(&app) {
            return Err(Error::Ansatz(format!("`{text}` is not linear in {}", f.name)));
        }
        Ok(Ansatz {
            shape,
            function: f.name.to_string(),
            args: f.args.clone(),
        })
    }

    pub fn expr(&self) -> Expr {
        self.shape.mul(&Expr::apply(&self.function, self.args.clone()))
    }
}

/// Result of substituting an ansatz: `equation = shape * reduced`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub shape: Expr,
    pub reduced: Expr,
}

fn gradient(e: &Expr) -> Result<Vec<Expr>> {
    Indep::ALL.iter().map(|v| Ok(e.diff(*v)?)).collect()
}

fn det(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        3 => {
            let minor = |r: usize, c: usize| -> Expr {
                let sub: Vec<Vec<Expr>> = (0..3)
                    .filter(|&i| i != r)
                    .map(|i| (0..3).filter(|&j| j != c).map(|j| m[i][j].clone()).collect())
                    .collect();
                det(&sub)
            };
            minor(0, 0)
                .mul(&m[0][0])
                .sub(&minor(0, 1).mul(&m[0][1]))
                .add(&minor(0, 2).mul(&m[0][2]))
        }
        _ => unreachable!("at most 3x3"),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// True when some `k x k` minor of the gradient rows is nonzero.
fn has_full_rank(rows: &[Vec<Expr>]) -> bool {
    let k = rows.len();
    subsets(3, k).into_iter().any(|cols| {
        let m: Vec<Vec<Expr>> = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        !det(&m).is_zero()
    })
}

/// Whether `e` is a function of `args` alone (all minors of the stacked
/// gradients vanish).
pub fn depends_only_on(e: &Expr, args: &[Expr]) -> Result<bool> {
    let mut rows = vec![gradient(e)?];
    for a in args {
        rows.push(gradient(a)?);
    }
    if rows.len() > 3 {
        return Ok(true);
    }
    Ok(!has_full_rank(&rows))
}

/// Substitutes the ansatz into an equation written in `u` and its jets, and
/// divides by the shape.
pub fn substitute_ansatz(equation: &Expr, a: &Ansatz) -> Result<Reduction> {
    if a.shape.is_zero() {
        return Err(Error::Ansatz("shape factor is zero".into()));
    }
    let grads: Vec<Vec<Expr>> = a.args.iter().map(gradient).collect::<Result<_>>()?;
    if !has_full_rank(&grads) {
        return Err(Error::Ansatz("arguments of the reduced function are not independent".into()));
    }
    let substituted = equation.substitute_dependent(&a.expr())?;
    let reduced = substituted.div(&a.shape)?;
    let fatoms: BTreeSet<Atom> = reduced
        .atoms()
        .into_iter()
        .filter(|x| x.as_func().is_some_and(|f| *f.name == *a.function))
        .collect();
    let coeffs = reduced
        .collect(&fatoms)
        .ok_or_else(|| Error::Ansatz("reduced function in a denominator".into()))?;
    let mut lead: Option<Expr> = None;
    for c in coeffs.values() {
        if c.is_zero() {
            continue;
        }
        match &lead {
            None => lead = Some(c.clone()),
            Some(l) => {
                let ratio = c.div(l)?;
                if !depends_only_on(&ratio, &a.args)? {
                    return Err(Error::Ansatz(format!(
                        "reduced equation is not expressible in the invariants {}",
                        a.args.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                    )));
                }
            }
        }
    }
    Ok(Reduction {
        shape: a.shape.clone(),
        reduced,
    })
}

/// Substitutes the ansatz into the Klein-Gordon equation with potential `v`.
pub fn reduce_residual(a: &Ansatz, v: &PotentialSpec) -> Result<Reduction> {
    substitute_ansatz(&klein_gordon(v), a)
}

/// Nonzero factor `mu` with `computed = mu * printed` under every sign of
/// `mode`, fixed by the coefficients of the printed equation's leading
/// function atom.
pub fn proportionality(computed: &Expr, printed: &Expr, function: &str, mode: EpsMode) -> Result<Option<Expr>> {
    let fatoms: BTreeSet<Atom> = computed
        .atoms()
        .into_iter()
        .chain(printed.atoms())
        .filter(|x| x.as_func().is_some_and(|f| &*f.name == function))
        .collect();
    let (Some(cc), Some(pc)) = (computed.collect(&fatoms), printed.collect(&fatoms)) else {
        return Ok(None);
    };
    let Some((m, p0)) = pc.iter().rev().find(|(_, c)| !c.is_zero()) else {
        return Ok(computed.is_zero().then(Expr::one));
    };
    let c0 = cc.get(m).cloned().unwrap_or_else(Expr::zero);
    if c0.is_zero() {
        return Ok(None);
    }
    let mu = c0.div(p0)?;
    if computed.sub(&mu.mul(printed)).is_zero_in(mode) {
        let simple = [Expr::one(), Expr::int(-1), Expr::eps(), Expr::eps().neg()];
        Ok(Some(simple.into_iter().find(|c| c.sub(&mu).is_zero_in(mode)).unwrap_or(mu)))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Catalog;

    #[test]
    fn rotation_invariants() {
        let c = Catalog::builtin();
        let ws = [parse("t").unwrap(), Expr::u(), parse("x^2 + y^2").unwrap()];
        let r = invariant_residuals(c.field(5), &ws).unwrap();
        assert!(r.iter().all(Expr::is_zero));
        assert_eq!(jacobian_rank(&ws, 1).unwrap(), Some(3));
        assert!(invariant_residuals(c.field(5), &[Expr::int(7)]).unwrap()[0].is_zero());
    }

    #[test]
    fn ansatz_parsing() {
        let a = Ansatz::parse("exp(kappa1*x)*zeta(t, y)").unwrap();
        assert_eq!(a.function, "zeta");
        assert_eq!(a.shape, Expr::exp(parse("kappa1*x").unwrap()));
        assert!(Ansatz::parse("zeta(t,y)^2").is_err());
        assert!(Ansatz::parse("exp(x)").is_err());
    }

    #[test]
    fn separable_reduction() {
        let a = Ansatz::parse("exp(kappa1*x)*zeta(t, y)").unwrap();
        let v = PotentialSpec::parse("V(eps*t^2 + y^2)").unwrap();
        let red = reduce_residual(&a, &v).unwrap();
        let printed = parse("zeta[2,0](t,y) + eps*(zeta[0,2](t,y) + (kappa1^2 + V(eps*t^2 + y^2))*zeta(t,y))").unwrap();
        let mu = proportionality(&red.reduced, &printed, "zeta", EpsMode::Both).unwrap().unwrap();
        assert_eq!(mu, Expr::eps());
    }

    #[test]
    fn constant_solves_wave_equation() {
        let a = Ansatz::new(Expr::one(), "rho", vec![parse("x + y").unwrap()]);
        let red = reduce_residual(&a, &PotentialSpec::zero()).unwrap();
        assert_eq!(red.reduced, parse("2*rho[2](x + y)").unwrap());
        let b = Ansatz::new(Expr::zero(), "rho", vec![Expr::x()]);
        assert!(reduce_residual(&b, &PotentialSpec::zero()).is_err());
    }

    #[test]
    fn inconsistent_ansatz_is_rejected() {
        let a = Ansatz::parse("zeta(x)").unwrap();
        let v = PotentialSpec::parse("V(t, y)").unwrap();
        assert!(matches!(reduce_residual(&a, &v), Err(Error::Ansatz(_))));
    }
}
