//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept sorted in descending lexicographic order, which makes the
//! leading term the first entry and gives every polynomial a unique layout.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use smallvec::SmallVec;

use super::atom::Atom;
use super::coeff::Coeff;

/// Power product of atoms, sorted by atom with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Atom, u32); 4]>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(SmallVec::new())
    }

    pub fn var(a: Atom, exp: u32) -> Monomial {
        if exp == 0 {
            return Monomial::one();
        }
        let mut v = SmallVec::new();
        v.push((a, exp));
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn degree_of(&self, a: &Atom) -> u32 {
        match self.0.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out: SmallVec<[(Atom, u32); 4]> = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() {
                match a.cmp(&other.0[j].0) {
                    Ordering::Greater => return None,
                    Ordering::Equal => {
                        let f = other.0[j].1;
                        j += 1;
                        if f > *e {
                            return None;
                        }
                        if f < *e {
                            out.push((a.clone(), e - f));
                        }
                        continue;
                    }
                    Ordering::Less => {}
                }
            }
            out.push((a.clone(), *e));
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for (a, e) in &self.0 {
            let f = other.degree_of(a);
            if f > 0 {
                out.push((a.clone(), (*e).min(f)));
            }
        }
        Monomial(out)
    }

    /// Drops `a` from the product, returning its former exponent.
    pub fn without(&self, a: &Atom) -> (Monomial, u32) {
        let mut out = self.0.clone();
        match out.binary_search_by(|(b, _)| b.cmp(a)) {
            Ok(i) => {
                let (_, e) = out.remove(i);
                (Monomial(out), e)
            }
            Err(_) => (self.clone(), 0),
        }
    }

    /// Splits into the part over `atoms` and the rest.
    pub fn split(&self, atoms: &BTreeSet<Atom>) -> (Monomial, Monomial) {
        let mut inside = SmallVec::new();
        let mut outside = SmallVec::new();
        for f in &self.0 {
            if atoms.contains(&f.0) {
                inside.push(f.clone());
            } else {
                outside.push(f.clone());
            }
        }
        (Monomial(inside), Monomial(outside))
    }

    pub(crate) fn from_sorted(v: SmallVec<[(Atom, u32); 4]>) -> Monomial {
        Monomial(v)
    }
}

impl Ord for Monomial {
    /// Lexicographic order with smaller atoms taking priority.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let mut i = 0;
        loop {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, ex)), Some((y, ey))) => match x.cmp(y) {
                    Ordering::Equal => {
                        if ex != ey {
                            return ex.cmp(ey);
                        }
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
            i += 1;
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{a}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Coeff)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn atom(a: Atom) -> Poly {
        Poly::term(Monomial::var(a, 1), Coeff::one())
    }

    pub fn term(m: Monomial, c: Coeff) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary terms, combining duplicates.
    pub fn from_terms(mut terms: Vec<(Monomial, Coeff)>) -> Poly {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Coeff)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 = &last.1 + &c;
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.as_slice() {
            [] => Some(Coeff::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms.as_slice(), [(m, c)] if m.is_one() && c.is_one())
    }

    pub fn lead(&self) -> Option<&(Monomial, Coeff)> {
        self.terms.first()
    }

    pub fn lc(&self) -> Coeff {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Coeff::zero)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for (a, _) in m.factors() {
                s.insert(a.clone());
            }
        }
        s
    }

    pub fn degree(&self, a: &Atom) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_of(a)).max().unwrap_or(0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, k: &Coeff) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        // multiplication by a monomial preserves the term order
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        if a.is_empty() {
            return other.clone();
        }
        if b.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Poly { terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                terms.push((m1.mul(m2), c1 * c2));
            }
        }
        Poly::from_terms(terms)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        if m.is_one() {
            return Some(self.clone());
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (n, c) in &self.terms {
            terms.push((n.div(m)?, c.clone()));
        }
        Some(Poly { terms })
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if d.terms.len() == 1 {
            let (m, c) = &d.terms[0];
            return self.div_monomial(m).map(|p| p.scale(&c.recip()));
        }
        let (lm, lc) = d.terms[0].clone();
        let lc_inv = lc.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.terms.first() {
            let qm = m.div(&lm)?;
            let qc = c * &lc_inv;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Coefficients with respect to `a`, keyed by exponent.
    pub fn coefficients_in(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut map: BTreeMap<u32, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.without(a);
            map.entry(e).or_default().push((rest, c.clone()));
        }
        map.into_iter().map(|(e, t)| (e, Poly::from_terms(t))).collect()
    }

    pub fn coefficient_of(&self, a: &Atom, e: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let (rest, f) = m.without(a);
                (f == e).then(|| (rest, c.clone()))
            })
            .collect();
        Poly::from_terms(terms)
    }

    /// Groups terms by their power product over `atoms`; each group's
    /// cofactor is a polynomial free of `atoms`.
    pub fn collect_over(&self, atoms: &BTreeSet<Atom>) -> BTreeMap<Monomial, Poly> {
        let mut map: BTreeMap<Monomial, Vec<(Monomial, Coeff)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(atoms);
            map.entry(inside).or_default().push((outside, c.clone()));
        }
        map.into_iter().map(|(m, t)| (m, Poly::from_terms(t))).collect()
    }

    /// Formal partial derivative with respect to the indeterminate `a`.
    pub fn partial(&self, a: &Atom) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.without(a);
            if e == 0 {
                continue;
            }
            let m2 = if e == 1 {
                rest
            } else {
                rest.mul(&Monomial::var(a.clone(), e - 1))
            };
            terms.push((m2, c * &Coeff::from_int(e as i64)));
        }
        Poly::from_terms(terms)
    }

    /// Applies `f` to each term's monomial and coefficient, resorting afterwards.
    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &Coeff) -> (Monomial, Coeff)) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| f(m, c)).collect())
    }
}

/// Greatest common divisor, normalized to leading coefficient 1.
///
/// Both arguments zero gives zero.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ca = a.monomial_content();
    let cb = b.monomial_content();
    let cm = ca.gcd(&cb);
    let a1 = a.div_monomial(&ca).expect("content divides");
    let b1 = b.div_monomial(&cb).expect("content divides");
    let g = gcd_primitive_monomials(&a1, &b1);
    g.mul_term(&cm, &Coeff::one()).monic()
}

/// GCD of two polynomials whose monomial content is trivial.
fn gcd_primitive_monomials(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.monic() == b.monic() {
        return a.monic();
    }
    let va = a.atoms();
    let vb = b.atoms();
    if va != vb {
        // A divisor of both cannot involve atoms missing from either side.
        let (wide, narrow, extra): (&Poly, &Poly, BTreeSet<Atom>) = if !va.is_subset(&vb) {
            (a, b, va.difference(&vb).cloned().collect())
        } else {
            (b, a, vb.difference(&va).cloned().collect())
        };
        let mut g = narrow.clone();
        for c in wide.collect_over(&extra).values() {
            g = gcd(&g, c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        return g.monic();
    }
    let main = va
        .iter()
        .min_by_key(|v| a.degree(v).max(b.degree(v)))
        .expect("non-constant polynomial has atoms")
        .clone();
    gcd_prs(a, b, &main)
}

fn content_in(p: &Poly, v: &Atom) -> Poly {
    let mut g = Poly::zero();
    for c in p.coefficients_in(v).values() {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part_in(p: &Poly, v: &Atom) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").monic()
}

fn pseudo_remainder(p: &Poly, q: &Poly, v: &Atom) -> Poly {
    let dq = q.degree(v);
    let lq = q.coefficient_of(v, dq);
    let mut r = p.clone();
    while !r.is_zero() {
        let dr = r.degree(v);
        if dr < dq {
            break;
        }
        let lr = r.coefficient_of(v, dr);
        let shift = Monomial::var(v.clone(), dr - dq);
        r = r.mul(&lq).sub(&lr.mul(&q.mul_term(&shift, &Coeff::one())));
    }
    r
}

/// Dense coefficients in `v` after sending the other atoms to small
/// distinct integers.
fn specialize(p: &Poly, v: &Atom, atoms: &[Atom]) -> Vec<Coeff> {
    let mut out = vec![Coeff::zero(); p.degree(v) as usize + 1];
    for (m, c) in &p.terms {
        let mut k = c.clone();
        let mut d = 0;
        for (a, e) in m.factors() {
            if a == v {
                d = *e as usize;
                continue;
            }
            let pos = atoms.binary_search(a).unwrap_or(0) as i64;
            let value = Coeff::from_int(3 + 2 * pos);
            k = &k * &value.pow(*e as i32);
        }
        out[d] = &out[d] + &k;
    }
    out
}

fn univariate_degree_of_gcd(mut a: Vec<Coeff>, mut b: Vec<Coeff>) -> usize {
    let trim = |p: &mut Vec<Coeff>| {
        while p.last().is_some_and(Coeff::is_zero) {
            p.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let lb = b.last().expect("nonempty").clone();
        while a.len() >= b.len() {
            let q = a.last().expect("nonempty") / &lb;
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] = &a[i + shift] - &(&q * c);
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when `a` and `b` provably have no common factor involving `v`: a
/// specialization keeping both leading coefficients nonzero is coprime.
fn coprime_in(a: &Poly, b: &Poly, v: &Atom) -> bool {
    let atoms: Vec<Atom> = a.atoms().union(&b.atoms()).cloned().collect();
    let sa = specialize(a, v, &atoms);
    let sb = specialize(b, v, &atoms);
    let kept = |p: &Poly, s: &[Coeff]| s.last().is_some_and(|c| !c.is_zero()) && s.len() == p.degree(v) as usize + 1;
    kept(a, &sa) && kept(b, &sb) && univariate_degree_of_gcd(sa, sb) == 0
}

/// Primitive polynomial remainder sequence in the main variable `v`.
fn gcd_prs(a: &Poly, b: &Poly, v: &Atom) -> Poly {
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let cont = gcd(&ca, &cb);
    if coprime_in(a, b, v) {
        return cont.monic();
    }
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree(v) < q.degree(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if q.degree(v) == 0 {
            p = Poly::one();
            break;
        }
        let r = pseudo_remainder(&p, &q, v);
        p = q;
        q = if r.is_zero() { r } else { primitive_part_in(&r, v) };
    }
    let pp = if p.is_constant() { Poly::one() } else { primitive_part_in(&p, v) };
    pp.mul(&cont).monic()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Poly {
        Poly::atom(Atom::sym(name))
    }

    fn c(n: i64) -> Poly {
        Poly::constant(Coeff::from_int(n))
    }

    #[test]
    fn lex_order_prefers_smaller_atoms() {
        let a = Monomial::var(Atom::sym("a"), 1);
        let b5 = Monomial::var(Atom::sym("b"), 5);
        assert!(a > b5);
        assert!(Monomial::one() < b5);
    }

    #[test]
    fn exact_division_roundtrip() {
        let x = v("x");
        let y = v("y");
        let p = x.add(&y).mul(&x.sub(&y)).mul(&x.add(&c(3)));
        let q = p.div_exact(&x.add(&c(3))).unwrap();
        assert_eq!(q, x.mul(&x).sub(&y.mul(&y)));
        assert!(p.div_exact(&x.add(&c(5))).is_none());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let x = v("x");
        let y = v("y");
        let t = v("t");
        let f = x.mul(&x).add(&y.mul(&t)).add(&c(1));
        let a = f.mul(&x.add(&y));
        let b = f.mul(&t.sub(&c(2))).mul(&x);
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn gcd_with_disjoint_atoms_is_one() {
        let a = v("x").add(&c(1));
        let b = v("y").add(&c(1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_monomial_content() {
        let x = v("x");
        let t = v("t");
        let a = x.mul(&x).mul(&t).add(&x.mul(&t).mul(&t));
        let b = x.mul(&t).mul(&t);
        assert_eq!(gcd(&a, &b), x.mul(&t));
    }

    #[test]
    fn coprime_shortcut_keeps_common_factors() {
        let x = v("x");
        let y = v("y");
        let a = v("a");
        // the common factor vanishes at the specialization point of y
        let f = y.sub(&c(3));
        let p = f.mul(&x.add(&a));
        let q = f.mul(&x.mul(&x).add(&c(1)));
        assert_eq!(gcd(&p, &q), f.monic());
        assert!(gcd(&x.add(&a), &x.sub(&a)).is_one());
    }
}
