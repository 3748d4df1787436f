//! Canonical rational-function expressions.
//!
//! An [`Expr`] is a single quotient `num/den` of polynomials over the
//! rationals in [`Atom`]s. Construction always goes through [`normalize`],
//! which applies the `eps^2 = 1` and `sqrt(e)^2 = e` rewrites, cancels the
//! polynomial gcd and makes the denominator monic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use super::atom::{Atom, ElemApp, ElemKind, FuncApp, Indep, JetVar};
use super::coeff::Coeff;
use super::poly::{gcd, Monomial, Poly};
use super::SymError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Ratio {
    num: Poly,
    den: Poly,
}

/// Exact symbolic expression in canonical form.
///
/// Values are immutable and cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Ratio>);

/// Which signature instantiations a zero test must survive.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum EpsMode {
    Plus,
    Minus,
    #[default]
    Both,
}

impl EpsMode {
    pub fn signs(self) -> &'static [i64] {
        match self {
            EpsMode::Plus => &[1],
            EpsMode::Minus => &[-1],
            EpsMode::Both => &[1, -1],
        }
    }
}

/// Simultaneous substitution map.
///
/// Keys are symbols, jet coordinates or whole abstract-function applications.
#[derive(Clone, Debug, Default)]
pub struct Bindings(BTreeMap<Atom, Expr>);

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn bind(mut self, key: Atom, value: Expr) -> Bindings {
        self.0.insert(key, value);
        self
    }

    pub fn sym(self, name: &str, value: Expr) -> Bindings {
        self.bind(Atom::sym(name), value)
    }

    pub fn indep(self, v: Indep, value: Expr) -> Bindings {
        self.bind(v.symbol(), value)
    }

    pub fn jet(self, j: JetVar, value: Expr) -> Bindings {
        self.bind(Atom::Jet(j), value)
    }

    pub fn insert(&mut self, key: Atom, value: Expr) {
        self.0.insert(key, value);
    }

    pub fn get(&self, key: &Atom) -> Option<&Expr> {
        self.0.get(key)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Expr)> {
        self.0.iter()
    }
}

impl FromIterator<(Atom, Expr)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (Atom, Expr)>>(iter: I) -> Self {
        Bindings(iter.into_iter().collect())
    }
}

fn needs_power_rewrite(p: &Poly) -> bool {
    p.terms().iter().any(|(m, _)| {
        m.factors()
            .iter()
            .any(|(a, e)| *e >= 2 && (a.is_eps() || a.as_sqrt_arg().is_some()))
    })
}

/// Accumulates a sum of fractions over a running common denominator.
struct FracSum {
    num: Vec<(Monomial, Coeff)>,
    extra: Vec<(Poly, Poly)>,
}

impl FracSum {
    fn finish(self) -> (Poly, Poly) {
        let mut num = Poly::from_terms(self.num);
        let mut den = Poly::one();
        for (n, d) in self.extra {
            if d == den {
                num = num.add(&n);
                continue;
            }
            let g = gcd(&den, &d);
            let dg = d.div_exact(&g).expect("gcd divides");
            let eg = den.div_exact(&g).expect("gcd divides");
            num = num.mul(&dg).add(&n.mul(&eg));
            den = den.mul(&dg);
        }
        (num, den)
    }
}

/// Rewrites `eps^k -> eps^(k mod 2)` and `sqrt(e)^k -> e^(k div 2) sqrt(e)^(k mod 2)`.
fn rewrite_powers(p: &Poly) -> (Poly, Poly) {
    let mut acc = FracSum {
        num: Vec::new(),
        extra: Vec::new(),
    };
    for (m, c) in p.terms() {
        let mut kept: SmallVec<[(Atom, u32); 4]> = SmallVec::new();
        let mut lifted: Vec<(&Expr, u32)> = Vec::new();
        for (a, e) in m.factors() {
            if a.is_eps() && *e >= 2 {
                if e % 2 == 1 {
                    kept.push((a.clone(), 1));
                }
            } else if let (Some(arg), true) = (a.as_sqrt_arg(), *e >= 2) {
                if e % 2 == 1 {
                    kept.push((a.clone(), 1));
                }
                lifted.push((arg, e / 2));
            } else {
                kept.push((a.clone(), *e));
            }
        }
        let base = Monomial::from_sorted(kept);
        if lifted.is_empty() {
            acc.num.push((base, c.clone()));
            continue;
        }
        let mut n = Poly::term(base, c.clone());
        let mut d = Poly::one();
        for (arg, k) in lifted {
            n = n.mul(&arg.num().pow(k));
            d = d.mul(&arg.den().pow(k));
        }
        if d.is_one() {
            acc.num.extend(n.terms().iter().cloned());
        } else {
            acc.extra.push((n, d));
        }
    }
    acc.finish()
}

/// Canonical form of `num/den`.
pub(crate) fn normalize(mut num: Poly, mut den: Poly) -> Result<Expr, SymError> {
    if den.is_zero() {
        return Err(SymError::DivisionByZero);
    }
    loop {
        let mut changed = false;
        if needs_power_rewrite(&num) {
            let (n, d) = rewrite_powers(&num);
            num = n;
            den = den.mul(&d);
            changed = true;
        }
        if needs_power_rewrite(&den) {
            let (n, d) = rewrite_powers(&den);
            num = num.mul(&d);
            den = n;
            changed = true;
        }
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        // 1/eps = eps and 1/sqrt(e) = sqrt(e)/e
        let content = den.monomial_content();
        for (a, e) in content.factors() {
            if a.is_eps() {
                let m = Monomial::var(a.clone(), *e);
                den = den.div_monomial(&m).expect("content divides");
                num = num.mul_term(&m, &Coeff::one());
                changed = true;
            } else if let Some(arg) = a.as_sqrt_arg() {
                let m = Monomial::var(a.clone(), *e);
                den = den.div_monomial(&m).expect("content divides");
                num = num.mul_term(&m, &Coeff::one());
                // e is 1 here once powers are rewritten
                for _ in 0..*e {
                    num = num.mul(arg.den());
                    den = den.mul(arg.num());
                }
                changed = true;
            }
        }
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if !changed {
            break;
        }
    }
    if num.is_zero() {
        return Ok(Expr::zero());
    }
    if let Some(c) = den.as_constant() {
        return Ok(Expr::from_ratio(num.scale(&c.recip()), Poly::one()));
    }
    let g = gcd(&num, &den);
    if !g.is_one() {
        num = num.div_exact(&g).expect("gcd divides numerator");
        den = den.div_exact(&g).expect("gcd divides denominator");
    }
    let lc = den.lc();
    if !lc.is_one() {
        let inv = lc.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    Ok(Expr::from_ratio(num, den))
}

impl Expr {
    fn from_ratio(num: Poly, den: Poly) -> Expr {
        Expr(Arc::new(Ratio { num, den }))
    }

    pub fn zero() -> Expr {
        Expr::from_ratio(Poly::zero(), Poly::one())
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Coeff::from_int(n))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::constant(Coeff::new(num, den))
    }

    pub fn constant(c: Coeff) -> Expr {
        Expr::from_ratio(Poly::constant(c), Poly::one())
    }

    /// A bare atom. Atoms needing folding should come from the smart constructors.
    pub fn atom(a: Atom) -> Expr {
        Expr::from_ratio(Poly::atom(a), Poly::one())
    }

    pub fn from_poly(p: Poly) -> Expr {
        normalize(p, Poly::one()).expect("unit denominator")
    }

    pub fn sym(name: &str) -> Expr {
        Expr::atom(Atom::sym(name))
    }

    pub fn var(v: Indep) -> Expr {
        Expr::atom(v.symbol())
    }

    pub fn t() -> Expr {
        Expr::var(Indep::T)
    }

    pub fn x() -> Expr {
        Expr::var(Indep::X)
    }

    pub fn y() -> Expr {
        Expr::var(Indep::Y)
    }

    pub fn eps() -> Expr {
        Expr::atom(Atom::eps())
    }

    /// The dependent variable `u`.
    pub fn u() -> Expr {
        Expr::atom(Atom::Jet(JetVar::base()))
    }

    pub fn jet(j: JetVar) -> Expr {
        Expr::atom(Atom::Jet(j))
    }

    /// Jet coordinate `u_J` from its index letters, e.g. `"tx"`.
    pub fn jet_of(suffix: &str) -> Expr {
        Expr::jet(JetVar::from_suffix(suffix).expect("valid jet suffix"))
    }

    /// Abstract function application `name[derivs](args)`.
    pub fn func(name: &str, derivs: Vec<u32>, args: Vec<Expr>) -> Result<Expr, SymError> {
        if derivs.len() != args.len() {
            return Err(SymError::DerivativeArity {
                name: name.to_string(),
                expected: args.len(),
                got: derivs.len(),
            });
        }
        Ok(Expr::atom(Atom::Func(Arc::new(FuncApp {
            name: Arc::from(name),
            derivs,
            args,
        }))))
    }

    /// Underived abstract function application.
    pub fn apply(name: &str, args: Vec<Expr>) -> Expr {
        let n = args.len();
        Expr::func(name, vec![0; n], args).expect("arity matches")
    }

    pub fn from_func_app(app: FuncApp) -> Expr {
        Expr::atom(Atom::Func(Arc::new(app)))
    }

    pub fn elem(kind: ElemKind, arg: Expr) -> Expr {
        match kind {
            ElemKind::Exp => Expr::exp(arg),
            ElemKind::Arctan => Expr::arctan(arg),
            ElemKind::Sqrt => Expr::sqrt(arg),
        }
    }

    pub fn exp(arg: Expr) -> Expr {
        if arg.is_literal_zero() {
            return Expr::one();
        }
        Expr::atom(Atom::Elem(Arc::new(ElemApp {
            kind: ElemKind::Exp,
            arg,
        })))
    }

    pub fn arctan(arg: Expr) -> Expr {
        if arg.is_literal_zero() {
            return Expr::zero();
        }
        Expr::atom(Atom::Elem(Arc::new(ElemApp {
            kind: ElemKind::Arctan,
            arg,
        })))
    }

    pub fn sqrt(arg: Expr) -> Expr {
        if let Some(c) = arg.as_constant() {
            if let Some(r) = c.sqrt_exact() {
                return Expr::constant(r);
            }
        }
        Expr::atom(Atom::Elem(Arc::new(ElemApp {
            kind: ElemKind::Sqrt,
            arg,
        })))
    }

    pub fn num(&self) -> &Poly {
        &self.0.num
    }

    pub fn den(&self) -> &Poly {
        &self.0.den
    }

    pub fn numerator(&self) -> Expr {
        Expr::from_ratio(self.0.num.clone(), Poly::one())
    }

    pub fn denominator(&self) -> Expr {
        Expr::from_ratio(self.0.den.clone(), Poly::one())
    }

    /// True only for the canonical zero; see [`Expr::is_zero`] for the full test.
    pub fn is_literal_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        if self.0.den.is_one() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single atom this expression consists of, if any.
    pub fn as_atom(&self) -> Option<&Atom> {
        if !self.0.den.is_one() {
            return None;
        }
        match self.0.num.terms() {
            [(m, c)] if c.is_one() => match m.factors() {
                [(a, 1)] => Some(a),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if self.is_literal_zero() {
            return other.clone();
        }
        if other.is_literal_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        if a.den.is_one() && b.den.is_one() {
            return normalize(a.num.add(&b.num), Poly::one()).expect("unit denominator");
        }
        if a.den == b.den {
            return normalize(a.num.add(&b.num), a.den.clone()).expect("nonzero denominator");
        }
        let g = gcd(&a.den, &b.den);
        let bd = b.den.div_exact(&g).expect("gcd divides");
        let ad = a.den.div_exact(&g).expect("gcd divides");
        let num = a.num.mul(&bd).add(&b.num.mul(&ad));
        normalize(num, a.den.mul(&bd)).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr::from_ratio(self.0.num.neg(), self.0.den.clone())
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_literal_zero() || other.is_literal_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let (a, b) = (&self.0, &other.0);
        if a.den.is_one() && b.den.is_one() {
            return normalize(a.num.mul(&b.num), Poly::one()).expect("unit denominator");
        }
        // cross-cancel before multiplying out
        let g1 = gcd(&a.num, &b.den);
        let g2 = gcd(&b.num, &a.den);
        let an = a.num.div_exact(&g1).expect("gcd divides");
        let bd = b.den.div_exact(&g1).expect("gcd divides");
        let bn = b.num.div_exact(&g2).expect("gcd divides");
        let ad = a.den.div_exact(&g2).expect("gcd divides");
        normalize(an.mul(&bn), ad.mul(&bd)).expect("nonzero denominator")
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::from_ratio(self.0.num.scale(c), self.0.den.clone())
    }

    pub fn recip(&self) -> Result<Expr, SymError> {
        normalize(self.0.den.clone(), self.0.num.clone())
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, SymError> {
        if other.is_literal_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, k: i32) -> Result<Expr, SymError> {
        if k < 0 {
            return self.recip()?.pow(-k);
        }
        let k = k as u32;
        normalize(self.0.num.pow(k), self.0.den.pow(k))
    }

    pub fn square(&self) -> Expr {
        self.mul(self)
    }

    /// Atoms of the outer polynomial layer (not descending into arguments).
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = self.0.num.atoms();
        s.extend(self.0.den.atoms());
        s
    }

    /// True if any atom, at any nesting depth, satisfies `pred`.
    pub fn any_atom(&self, pred: &mut dyn FnMut(&Atom) -> bool) -> bool {
        for a in self.atoms() {
            if pred(&a) {
                return true;
            }
            for c in a.children() {
                if c.any_atom(pred) {
                    return true;
                }
            }
        }
        false
    }

    pub fn contains_jets(&self) -> bool {
        self.any_atom(&mut |a| matches!(a, Atom::Jet(_)))
    }

    /// True if the dependent variable or a derivative of it appears.
    pub fn contains_dependent(&self) -> bool {
        self.contains_jets()
    }

    pub fn contains_sym(&self, name: &str) -> bool {
        self.any_atom(&mut |a| a.as_sym() == Some(name))
    }

    pub fn contains_atom(&self, target: &Atom) -> bool {
        self.any_atom(&mut |a| a == target)
    }

    pub fn contains_func(&self) -> bool {
        self.any_atom(&mut |a| matches!(a, Atom::Func(_)))
    }

    pub fn contains_func_named(&self, name: &str) -> bool {
        self.any_atom(&mut |a| matches!(a, Atom::Func(f) if &*f.name == name))
    }

    /// Highest jet order present at the outer layer.
    pub fn max_jet_order(&self) -> usize {
        self.atoms()
            .iter()
            .filter_map(|a| a.as_jet().map(JetVar::order))
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds the expression with every atom passed through `f`.
    ///
    /// `f` returns the replacement for an atom, or `None` to keep it; kept
    /// atoms with arguments are rebuilt from recursively mapped arguments.
    pub fn map_atoms<F>(&self, f: &mut F) -> Result<Expr, SymError>
    where
        F: FnMut(&Atom) -> Result<Option<Expr>, SymError>,
    {
        let atoms = self.atoms();
        let mut images: HashMap<Atom, Expr> = HashMap::new();
        for a in &atoms {
            let img = match f(a)? {
                Some(e) => e,
                None => rebuild_atom(a, f)?,
            };
            if img.as_atom() != Some(a) {
                images.insert(a.clone(), img);
            }
        }
        if images.is_empty() {
            return Ok(self.clone());
        }
        let (nn, nd) = eval_poly(&self.0.num, &images);
        let (dn, dd) = eval_poly(&self.0.den, &images);
        if dn.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        normalize(nn.mul(&dd), nd.mul(&dn))
    }

    /// Simultaneous substitution followed by normalization.
    pub fn substitute(&self, b: &Bindings) -> Result<Expr, SymError> {
        if b.is_empty() {
            return Ok(self.clone());
        }
        self.map_atoms(&mut |a| Ok(b.get(a).cloned()))
    }

    /// Replaces the signature symbol by `sign` (±1) everywhere.
    pub fn instantiate_eps(&self, sign: i64) -> Result<Expr, SymError> {
        let val = Expr::int(sign);
        self.map_atoms(&mut |a| Ok(a.is_eps().then(|| val.clone())))
    }

    /// Zero test under both signature instantiations.
    pub fn is_zero(&self) -> bool {
        self.is_zero_in(EpsMode::Both)
    }

    pub fn is_zero_in(&self, mode: EpsMode) -> bool {
        if self.is_literal_zero() {
            return true;
        }
        mode.signs().iter().all(|&s| match self.instantiate_eps(s) {
            Ok(e) => e.is_literal_zero(),
            Err(_) => false,
        })
    }

    /// Coefficients of the numerator as a polynomial in `atoms`, each divided
    /// by the denominator. `None` when the denominator involves `atoms`.
    pub fn collect(&self, atoms: &BTreeSet<Atom>) -> Option<BTreeMap<Monomial, Expr>> {
        if self.0.den.atoms().iter().any(|a| atoms.contains(a)) {
            return None;
        }
        let den = Expr::from_ratio(self.0.den.clone(), Poly::one());
        let mut out = BTreeMap::new();
        for (m, c) in self.0.num.collect_over(atoms) {
            let e = normalize(c, Poly::one()).expect("unit denominator");
            out.insert(m, e.div(&den).expect("nonzero denominator"));
        }
        Some(out)
    }

    /// Coefficients as a polynomial in the jet coordinates present.
    pub fn collect_jets(&self) -> Option<BTreeMap<Monomial, Expr>> {
        let jets: BTreeSet<Atom> = self
            .atoms()
            .into_iter()
            .filter(|a| matches!(a, Atom::Jet(_)))
            .collect();
        self.collect(&jets)
    }

    /// Degree of the numerator in `a`.
    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.0.num.degree(a)
    }
}

fn rebuild_atom<F>(a: &Atom, f: &mut F) -> Result<Expr, SymError>
where
    F: FnMut(&Atom) -> Result<Option<Expr>, SymError>,
{
    match a {
        Atom::Sym(_) | Atom::Jet(_) => Ok(Expr::atom(a.clone())),
        Atom::Func(app) => {
            let mut args = Vec::with_capacity(app.args.len());
            let mut same = true;
            for x in &app.args {
                let y = x.map_atoms(f)?;
                same &= &y == x;
                args.push(y);
            }
            if same {
                return Ok(Expr::atom(a.clone()));
            }
            Ok(Expr::from_func_app(FuncApp {
                name: app.name.clone(),
                derivs: app.derivs.clone(),
                args,
            }))
        }
        Atom::Elem(e) => {
            let arg = e.arg.map_atoms(f)?;
            if arg == e.arg {
                return Ok(Expr::atom(a.clone()));
            }
            Ok(Expr::elem(e.kind, arg))
        }
    }
}

/// Evaluates `p` with atoms replaced by `images`, returning numerator and
/// denominator over a common denominator.
fn eval_poly(p: &Poly, images: &HashMap<Atom, Expr>) -> (Poly, Poly) {
    let mut maxdeg: BTreeMap<&Atom, u32> = BTreeMap::new();
    let mut touched = false;
    for (m, _) in p.terms() {
        for (a, e) in m.factors() {
            if let Some(img) = images.get(a) {
                touched = true;
                if !img.den().is_one() {
                    let d = maxdeg.entry(a).or_insert(0);
                    *d = (*d).max(*e);
                }
            }
        }
    }
    if !touched {
        return (p.clone(), Poly::one());
    }
    let mut den = Poly::one();
    for (a, d) in &maxdeg {
        den = den.mul(&images[*a].den().pow(*d));
    }
    let mut powers: HashMap<(&Atom, u32), Poly> = HashMap::new();
    let mut terms: Vec<(Monomial, Coeff)> = Vec::new();
    for (m, c) in p.terms() {
        let mut kept: SmallVec<[(Atom, u32); 4]> = SmallVec::new();
        let mut prod = Poly::one();
        for (a, e) in m.factors() {
            let Some(img) = images.get(a) else {
                kept.push((a.clone(), *e));
                continue;
            };
            let np = powers
                .entry((a, *e))
                .or_insert_with(|| {
                    let mut q = img.num().pow(*e);
                    if let Some(d) = maxdeg.get(a) {
                        q = q.mul(&img.den().pow(d - e));
                    }
                    q
                })
                .clone();
            prod = prod.mul(&np);
        }
        // atoms missing from this term still carry their full denominator power
        for (a, d) in &maxdeg {
            if m.degree_of(a) == 0 {
                prod = prod.mul(&images[*a].den().pow(*d));
            }
        }
        let prod = prod.mul_term(&Monomial::from_sorted(kept), c);
        terms.extend(prod.terms().iter().cloned());
    }
    (Poly::from_terms(terms), den)
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Coeff> for Expr {
    fn from(c: Coeff) -> Self {
        Expr::constant(c)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$m(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$m(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$m(self, &rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a.add(&b))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = (&self.0.num, &self.0.den);
        if den.is_one() {
            return write!(f, "{num}");
        }
        if num.len() == 1 {
            write!(f, "{num}/")?;
        } else {
            write!(f, "({num})/")?;
        }
        let bare = matches!(den.terms(), [(m, c)] if c.is_one() && m.factors().len() == 1);
        if bare {
            write!(f, "{den}")
        } else {
            write!(f, "({den})")
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
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

    #[test]
    fn cancels_common_factors() {
        let a = (&x().square() - &y().square()).div(&(&x() - &y())).unwrap();
        assert_eq!(a, &x() + &y());
    }

    #[test]
    fn eps_squares_reduce() {
        let e = Expr::eps();
        assert_eq!(e.square(), Expr::one());
        assert_eq!(Expr::one().div(&e).unwrap(), e);
        assert_eq!(e.pow(3).unwrap(), e);
    }

    #[test]
    fn sqrt_squares_reduce() {
        let s = Expr::sqrt(x());
        assert_eq!(s.square(), x());
        assert_eq!(Expr::one().div(&s).unwrap(), s.div(&x()).unwrap());
        assert_eq!(Expr::sqrt(Expr::rational(9, 4)), Expr::rational(3, 2));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(x().div(&(&x() - &x())), Err(SymError::DivisionByZero));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let e = &x() + &(&Expr::int(2) * &y());
        let b = Bindings::new().indep(Indep::X, y()).indep(Indep::Y, x());
        assert_eq!(e.substitute(&b).unwrap(), &y() + &(&Expr::int(2) * &x()));
    }

    #[test]
    fn substitution_reaches_function_arguments() {
        let v = Expr::apply("V", vec![x(), y()]);
        let b = Bindings::new().indep(Indep::X, x().div(&Expr::t()).unwrap());
        let expected = Expr::apply("V", vec![x().div(&Expr::t()).unwrap(), y()]);
        assert_eq!(v.substitute(&b).unwrap(), expected);
    }

    #[test]
    fn eps_dependent_zero_test() {
        let e = Expr::eps();
        assert!((&e.square() - &Expr::one()).is_zero());
        assert!(!(&e - &Expr::one()).is_zero());
        assert!((&e - &Expr::one()).is_zero_in(EpsMode::Plus));
    }
}
