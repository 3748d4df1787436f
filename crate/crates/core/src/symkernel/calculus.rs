//! Partial and total derivatives, plus substitution of abstract functions.

use std::collections::HashMap;

use super::atom::{Atom, ElemKind, Indep, JetVar, MAX_JET_ORDER};
use super::expr::{Bindings, Expr};
use super::SymError;

/// Differentiates with `leaf` supplying derivatives of symbols and jets.
///
/// Abstract functions and elementary functions are handled by the chain rule.
fn derive<F>(e: &Expr, leaf: &mut F, memo: &mut HashMap<Atom, Expr>) -> Result<Expr, SymError>
where
    F: FnMut(&Atom) -> Result<Option<Expr>, SymError>,
{
    let atoms = e.atoms();
    let mut datoms: Vec<(Atom, Expr)> = Vec::new();
    for a in atoms {
        let d = derive_atom(&a, leaf, memo)?;
        if !d.is_literal_zero() {
            datoms.push((a, d));
        }
    }
    if datoms.is_empty() {
        return Ok(Expr::zero());
    }
    let dpoly = |p: &super::poly::Poly| -> Expr {
        let mut acc = Expr::zero();
        for (a, d) in &datoms {
            let pa = p.partial(a);
            if !pa.is_zero() {
                acc = acc.add(&Expr::from_poly(pa).mul(d));
            }
        }
        acc
    };
    let dn = dpoly(e.num());
    if e.is_polynomial() {
        return Ok(dn);
    }
    let dd = dpoly(e.den());
    let d = e.denominator();
    let n = e.numerator();
    // (n/d)' = (n' d - n d') / d^2
    (&dn * &d - &n * &dd).div(&d.square())
}

fn derive_atom<F>(a: &Atom, leaf: &mut F, memo: &mut HashMap<Atom, Expr>) -> Result<Expr, SymError>
where
    F: FnMut(&Atom) -> Result<Option<Expr>, SymError>,
{
    if let Some(d) = memo.get(a) {
        return Ok(d.clone());
    }
    let d = match leaf(a)? {
        Some(d) => d,
        None => match a {
            Atom::Sym(_) | Atom::Jet(_) => Expr::zero(),
            Atom::Func(app) => {
                let mut acc = Expr::zero();
                for (slot, arg) in app.args.iter().enumerate() {
                    let da = derive(arg, leaf, memo)?;
                    if !da.is_literal_zero() {
                        acc = acc.add(&da.mul(&Expr::from_func_app(app.raised(slot))));
                    }
                }
                acc
            }
            Atom::Elem(el) => {
                let da = derive(&el.arg, leaf, memo)?;
                if da.is_literal_zero() {
                    Expr::zero()
                } else {
                    match el.kind {
                        ElemKind::Exp => da.mul(&Expr::atom(a.clone())),
                        ElemKind::Arctan => da.div(&(&Expr::one() + &el.arg.square()))?,
                        ElemKind::Sqrt => {
                            let s = Expr::atom(a.clone());
                            da.mul(&s).div(&el.arg.mul(&Expr::int(2)))?
                        }
                    }
                }
            }
        },
    };
    memo.insert(a.clone(), d.clone());
    Ok(d)
}

impl Expr {
    /// Partial derivative in an independent coordinate. Jets are rejected.
    pub fn diff(&self, v: Indep) -> Result<Expr, SymError> {
        let target = v.symbol();
        let mut leaf = |a: &Atom| -> Result<Option<Expr>, SymError> {
            match a {
                Atom::Sym(_) => Ok(Some(if *a == target { Expr::one() } else { Expr::zero() })),
                Atom::Jet(j) => Err(SymError::JetInPartial(j.to_string())),
                _ => Ok(None),
            }
        };
        derive(self, &mut leaf, &mut HashMap::new())
    }

    /// Total derivative `D_v` on the jet space.
    pub fn total_diff(&self, v: Indep) -> Result<Expr, SymError> {
        let target = v.symbol();
        let mut leaf = |a: &Atom| -> Result<Option<Expr>, SymError> {
            match a {
                Atom::Sym(_) => Ok(Some(if *a == target { Expr::one() } else { Expr::zero() })),
                Atom::Jet(j) => {
                    if j.order() >= MAX_JET_ORDER {
                        return Err(SymError::JetOrderExceeded(j.extend(v).to_string()));
                    }
                    Ok(Some(Expr::jet(j.extend(v))))
                }
                _ => Ok(None),
            }
        };
        derive(self, &mut leaf, &mut HashMap::new())
    }

    /// Derivative treating `target` as an independent indeterminate, e.g. `dL/du_x`.
    pub fn partial_atom(&self, target: &Atom) -> Result<Expr, SymError> {
        let mut leaf = |a: &Atom| -> Result<Option<Expr>, SymError> {
            if a == target {
                return Ok(Some(Expr::one()));
            }
            match a {
                Atom::Sym(_) | Atom::Jet(_) => Ok(Some(Expr::zero())),
                _ => Ok(None),
            }
        };
        derive(self, &mut leaf, &mut HashMap::new())
    }

    /// Derivative with respect to a symbol that is not one of t, x, y.
    pub fn diff_sym(&self, name: &str) -> Result<Expr, SymError> {
        self.partial_atom(&Atom::sym(name))
    }

    /// Repeated partial derivative, `counts[i]` times in the i-th coordinate.
    pub fn diff_multi(&self, vars: &[Atom], counts: &[u32]) -> Result<Expr, SymError> {
        let mut e = self.clone();
        for (v, &k) in vars.iter().zip(counts) {
            for _ in 0..k {
                e = e.partial_atom(v)?;
            }
        }
        Ok(e)
    }

    /// Replaces every application of the abstract function `name` by `body`
    /// with `params` bound to the arguments; derivative indices become
    /// derivatives of `body`.
    pub fn substitute_function(&self, name: &str, params: &[Atom], body: &Expr) -> Result<Expr, SymError> {
        let mut cache: HashMap<Vec<u32>, Expr> = HashMap::new();
        subst_func(self, name, params, body, &mut cache)
    }

    /// Replaces `u` and its jets by the corresponding derivatives of `shape`,
    /// an expression in t, x, y.
    pub fn substitute_dependent(&self, shape: &Expr) -> Result<Expr, SymError> {
        let mut images: HashMap<JetVar, Expr> = HashMap::new();
        let mut b = Bindings::new();
        for a in self.atoms() {
            if let Atom::Jet(j) = &a {
                let img = jet_image(j, shape, &mut images)?;
                b.insert(a.clone(), img);
            }
        }
        self.substitute(&b)
    }
}

fn jet_image(j: &JetVar, shape: &Expr, cache: &mut HashMap<JetVar, Expr>) -> Result<Expr, SymError> {
    if let Some(e) = cache.get(j) {
        return Ok(e.clone());
    }
    let img = match j.indices().last() {
        None => shape.clone(),
        Some(&v) => {
            let parent = j.drop_one(v).expect("index present");
            jet_image(&parent, shape, cache)?.diff(v)?
        }
    };
    cache.insert(j.clone(), img.clone());
    Ok(img)
}

fn subst_func(
    e: &Expr,
    name: &str,
    params: &[Atom],
    body: &Expr,
    cache: &mut HashMap<Vec<u32>, Expr>,
) -> Result<Expr, SymError> {
    e.map_atoms(&mut |a: &Atom| -> Result<Option<Expr>, SymError> {
        let Atom::Func(app) = a else {
            return Ok(None);
        };
        if &*app.name != name {
            return Ok(None);
        }
        if app.args.len() != params.len() {
            return Err(SymError::DerivativeArity {
                name: name.to_string(),
                expected: params.len(),
                got: app.args.len(),
            });
        }
        let derived = match cache.get(&app.derivs) {
            Some(d) => d.clone(),
            None => {
                let d = body.diff_multi(params, &app.derivs)?;
                cache.insert(app.derivs.clone(), d.clone());
                d
            }
        };
        let mut b = Bindings::new();
        for (p, arg) in params.iter().zip(&app.args) {
            let arg = subst_func(arg, name, params, body, &mut HashMap::new())?;
            b.insert(p.clone(), arg);
        }
        Ok(Some(derived.substitute(&b)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::x()
    }
    fn y() -> Expr {
        Expr::y()
    }
    fn t() -> Expr {
        Expr::t()
    }

    #[test]
    fn arctan_derivative() {
        let e = Expr::arctan(x().div(&y()).unwrap());
        let expected = y().div(&(&x().square() + &y().square())).unwrap();
        assert_eq!(e.diff(Indep::X).unwrap(), expected);
    }

    #[test]
    fn chain_rule_raises_multi_index() {
        let a = x().div(&t()).unwrap();
        let b = y().div(&t()).unwrap();
        let e = Expr::apply("V", vec![a.clone(), b.clone()]);
        let d = e.diff(Indep::X).unwrap();
        let expected = Expr::func("V", vec![1, 0], vec![a, b]).unwrap().div(&t()).unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn polynomial_derivative() {
        let e = &Expr::eps() * &t().square() + x().square();
        assert_eq!(e.diff(Indep::T).unwrap(), &Expr::int(2) * &(&Expr::eps() * &t()));
    }

    #[test]
    fn diff_rejects_jets() {
        assert!(matches!(Expr::u().diff(Indep::X), Err(SymError::JetInPartial(_))));
    }

    #[test]
    fn total_derivative_of_jets() {
        assert_eq!(Expr::u().total_diff(Indep::X).unwrap(), Expr::jet_of("x"));
        let e = &Expr::jet_of("x") * &Expr::jet_of("t");
        let expected = &Expr::jet_of("tx") * &Expr::jet_of("t") + &Expr::jet_of("x") * &Expr::jet_of("tt");
        assert_eq!(e.total_diff(Indep::T).unwrap(), expected);
    }

    #[test]
    fn total_derivative_with_potential() {
        let v = Expr::apply("V", vec![x(), y()]);
        let e = &v * &Expr::u().square();
        let vx = Expr::func("V", vec![1, 0], vec![x(), y()]).unwrap();
        let expected = &vx * &Expr::u().square() + &Expr::int(2) * &(&v * &(&Expr::u() * &Expr::jet_of("x")));
        assert_eq!(e.total_diff(Indep::X).unwrap(), expected);
    }

    #[test]
    fn jet_order_cap() {
        let e = Expr::jet_of("txy");
        assert!(matches!(e.total_diff(Indep::T), Err(SymError::JetOrderExceeded(_))));
    }

    #[test]
    fn function_substitution_handles_derivatives() {
        let e = Expr::func("F", vec![2], vec![x().square()]).unwrap();
        let s = Atom::sym("s");
        let body = Expr::sym("s").pow(3).unwrap();
        // F''(s) = 6 s at s = x^2
        let got = e.substitute_function("F", &[s], &body).unwrap();
        assert_eq!(got, &Expr::int(6) * &x().square());
    }

    #[test]
    fn dependent_substitution() {
        let shape = &Expr::exp(x()) * &t();
        let e = &Expr::jet_of("xx") + &Expr::jet_of("t");
        assert_eq!(e.substitute_dependent(&shape).unwrap(), &shape + &Expr::exp(x()));
    }
}
