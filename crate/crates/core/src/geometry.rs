//! Flat 3-metric `diag(eps, 1, 1)`, conformal Killing vectors, Lie brackets
//! and the ten-generator conformal algebra.

use std::fmt;

use crate::data::GeneratorRow;
use crate::error::{Error, Result};
use crate::symkernel::{parse, Atom, Coeff, EpsMode, Expr, Indep, JetVar};

/// Diagonal metric with constant entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricSpec {
    pub diag: [Expr; 3],
}

impl MetricSpec {
    /// `ds^2 = eps dt^2 + dx^2 + dy^2`.
    pub fn flat() -> MetricSpec {
        MetricSpec {
            diag: [Expr::eps(), Expr::one(), Expr::one()],
        }
    }

    pub fn component(&self, a: usize, b: usize) -> Expr {
        if a == b {
            self.diag[a].clone()
        } else {
            Expr::zero()
        }
    }

    pub fn inverse_diag(&self) -> [Expr; 3] {
        self.diag
            .clone()
            .map(|g| g.recip().expect("metric entries are nonzero"))
    }
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::flat()
    }
}

/// Point generator `xi^t d_t + xi^x d_x + xi^y d_y + eta d_u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub xi: [Expr; 3],
    pub eta: Expr,
}

fn point_partial(e: &Expr, v: Indep) -> Result<Expr> {
    Ok(e.partial_atom(&v.symbol())?)
}

fn u_partial(e: &Expr) -> Result<Expr> {
    Ok(e.partial_atom(&Atom::Jet(JetVar::base()))?)
}

impl VectorField {
    pub fn new(xi: [Expr; 3]) -> VectorField {
        VectorField { xi, eta: Expr::zero() }
    }

    pub fn with_eta(mut self, eta: Expr) -> VectorField {
        self.eta = eta;
        self
    }

    pub fn zero() -> VectorField {
        VectorField::new([Expr::zero(), Expr::zero(), Expr::zero()])
    }

    /// Parses three comma-separated components, e.g. `"1, 0, 0"`.
    pub fn parse(components: &str) -> Result<VectorField> {
        let parts = crate::symkernel::parse_list(components)?;
        let [a, b, c]: [Expr; 3] = parts.try_into().map_err(|v: Vec<Expr>| Error::Combination {
            text: components.to_string(),
            reason: format!("expected 3 components, found {}", v.len()),
        })?;
        Ok(VectorField::new([a, b, c]))
    }

    /// Components over `(t, x, y, u)`.
    pub fn components(&self) -> [&Expr; 4] {
        [&self.xi[0], &self.xi[1], &self.xi[2], &self.eta]
    }

    /// Action on a point function of `(t, x, y, u)`.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut acc = Expr::zero();
        for (v, xi) in Indep::ALL.iter().zip(&self.xi) {
            if !xi.is_literal_zero() {
                acc = acc.add(&xi.mul(&point_partial(f, *v)?));
            }
        }
        if !self.eta.is_literal_zero() {
            acc = acc.add(&self.eta.mul(&u_partial(f)?));
        }
        Ok(acc)
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            xi: [0, 1, 2].map(|i| self.xi[i].add(&other.xi[i])),
            eta: self.eta.add(&other.eta),
        }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        VectorField {
            xi: self.xi.clone().map(|c| c.mul(k)),
            eta: self.eta.mul(k),
        }
    }

    /// True if every component passes the zero test.
    pub fn is_zero_in(&self, mode: EpsMode) -> bool {
        self.components().iter().all(|c| c.is_zero_in(mode))
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_in(EpsMode::Both)
    }

    pub fn substitute_sym(&self, name: &str, value: &Expr) -> Result<VectorField> {
        let b = crate::symkernel::Bindings::new().sym(name, value.clone());
        Ok(VectorField {
            xi: [
                self.xi[0].substitute(&b)?,
                self.xi[1].substitute(&b)?,
                self.xi[2].substitute(&b)?,
            ],
            eta: self.eta.substitute(&b)?,
        })
    }

    /// Divergence `d_i xi^i` of the spatial part.
    pub fn divergence(&self) -> Result<Expr> {
        let mut acc = Expr::zero();
        for (v, xi) in Indep::ALL.iter().zip(&self.xi) {
            acc = acc.add(&point_partial(xi, *v)?);
        }
        Ok(acc)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in self.components().iter().zip(["d_t", "d_x", "d_y", "d_u"]) {
            if c.is_literal_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})*{name}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `[X, Y]^a = X(Y^a) - Y(X^a)` over `(t, x, y, u)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    let comp = |a: &Expr, b: &Expr| -> Result<Expr> { Ok(x.apply(b)?.sub(&y.apply(a)?)) };
    Ok(VectorField {
        xi: [
            comp(&x.xi[0], &y.xi[0])?,
            comp(&x.xi[1], &y.xi[1])?,
            comp(&x.xi[2], &y.xi[2])?,
        ],
        eta: comp(&x.eta, &y.eta)?,
    })
}

/// Lie derivative of a constant diagonal metric along `X`.
pub fn lie_derivative_metric(x: &VectorField, g: &MetricSpec) -> Result<[[Expr; 3]; 3]> {
    let mut d: Vec<Vec<Expr>> = Vec::with_capacity(3);
    for xi in &x.xi {
        let mut row = Vec::with_capacity(3);
        for v in Indep::ALL {
            row.push(point_partial(xi, v)?);
        }
        d.push(row);
    }
    // d[c][a] = d_a xi^c
    let entry = |a: usize, b: usize| g.diag[b].mul(&d[b][a]).add(&g.diag[a].mul(&d[a][b]));
    Ok([0, 1, 2].map(|a| [0, 1, 2].map(|b| entry(a, b))))
}

/// Candidate conformal factor `(1/6) g^{ab} (L_X g)_{ab}`.
pub fn conformal_factor_candidate(x: &VectorField, g: &MetricSpec) -> Result<Expr> {
    let l = lie_derivative_metric(x, g)?;
    let inv = g.inverse_diag();
    let trace: Expr = (0..3).map(|a| inv[a].mul(&l[a][a])).sum();
    Ok(trace.mul(&Expr::rational(1, 6)))
}

/// Whether `L_X g = 2 psi g` holds componentwise.
pub fn satisfies_ckv(x: &VectorField, g: &MetricSpec, psi: &Expr, mode: EpsMode) -> Result<bool> {
    let l = lie_derivative_metric(x, g)?;
    for (a, row) in l.iter().enumerate() {
        for (b, lab) in row.iter().enumerate().skip(a) {
            let r = lab.sub(&psi.mul(&Expr::int(2)).mul(&g.component(a, b)));
            if !r.is_zero_in(mode) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum CollineationKind {
    Kv,
    Hv,
    Sckv,
    ProperCkv,
    None,
}

impl CollineationKind {
    pub fn label(self) -> &'static str {
        match self {
            CollineationKind::Kv => "KV",
            CollineationKind::Hv => "HV",
            CollineationKind::Sckv => "sCKV",
            CollineationKind::ProperCkv => "properCKV",
            CollineationKind::None => "none",
        }
    }

    pub fn from_label(s: &str) -> Option<CollineationKind> {
        [
            CollineationKind::Kv,
            CollineationKind::Hv,
            CollineationKind::Sckv,
            CollineationKind::ProperCkv,
            CollineationKind::None,
        ]
        .into_iter()
        .find(|k| k.label().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for CollineationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollineationClass {
    pub kind: CollineationKind,
    /// Conformal factor; `None` exactly when `kind` is `None`.
    pub psi: Option<Expr>,
}

impl fmt::Display for CollineationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.psi {
            Some(p) => write!(f, "{} (psi = {p})", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

pub fn classify_collineation(x: &VectorField, g: &MetricSpec) -> Result<CollineationClass> {
    classify_collineation_in(x, g, EpsMode::Both)
}

pub fn classify_collineation_in(x: &VectorField, g: &MetricSpec, mode: EpsMode) -> Result<CollineationClass> {
    let psi = conformal_factor_candidate(x, g)?;
    if !satisfies_ckv(x, g, &psi, mode)? {
        return Ok(CollineationClass {
            kind: CollineationKind::None,
            psi: None,
        });
    }
    let kind = if psi.is_zero_in(mode) {
        CollineationKind::Kv
    } else {
        let first: Vec<Expr> = Indep::ALL.iter().map(|v| psi.diff(*v)).collect::<std::result::Result<_, _>>()?;
        if first.iter().all(|d| d.is_zero_in(mode)) {
            CollineationKind::Hv
        } else {
            let mut second_zero = true;
            'outer: for d in &first {
                for v in Indep::ALL {
                    if !d.diff(v)?.is_zero_in(mode) {
                        second_zero = false;
                        break 'outer;
                    }
                }
            }
            if second_zero {
                CollineationKind::Sckv
            } else {
                CollineationKind::ProperCkv
            }
        }
    };
    Ok(CollineationClass { kind, psi: Some(psi) })
}

/// `g^{ab} d_a d_b f` for the diagonal metric.
pub fn laplacian(f: &Expr, g: &MetricSpec) -> Result<Expr> {
    let inv = g.inverse_diag();
    let mut acc = Expr::zero();
    for (v, gi) in Indep::ALL.iter().zip(&inv) {
        acc = acc.add(&gi.mul(&f.diff(*v)?.diff(*v)?));
    }
    Ok(acc)
}

/// A generator of the catalog with its verified class.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub index: usize,
    pub field: VectorField,
    pub class: CollineationClass,
}

/// The ten conformal generators `X1..X10` of flat 3-space.
#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// The built-in catalog. Panics if the shipped data fails self-verification.
    pub fn builtin() -> Catalog {
        let rows = crate::data::DataSet::embedded()
            .expect("embedded data parses")
            .catalog;
        match Catalog::from_rows(&rows) {
            Ok(c) => c,
            Err(e) => panic!("built-in catalog failed verification: {e}"),
        }
    }

    /// Builds the catalog and checks each row's declared class and factor.
    pub fn from_rows(rows: &[GeneratorRow]) -> Result<Catalog> {
        let g = MetricSpec::flat();
        let mut entries = Vec::with_capacity(rows.len());
        for (pos, row) in rows.iter().enumerate() {
            let index = row.index;
            if index != pos + 1 {
                return Err(Error::Catalog {
                    index,
                    reason: format!("out of order (expected X{})", pos + 1),
                });
            }
            let xi = [parse(&row.xi[0])?, parse(&row.xi[1])?, parse(&row.xi[2])?];
            let field = VectorField::new(xi);
            let class = classify_collineation(&field, &g)?;
            let kind = CollineationKind::from_label(&row.class).ok_or_else(|| Error::Catalog {
                index,
                reason: format!("unknown class `{}`", row.class),
            })?;
            let psi = parse(&row.psi)?;
            if class.kind != kind {
                return Err(Error::Catalog {
                    index,
                    reason: format!("declared {kind}, computed {}", class.kind),
                });
            }
            let computed = class.psi.clone().unwrap_or_else(Expr::zero);
            if !computed.sub(&psi).is_zero() {
                return Err(Error::Catalog {
                    index,
                    reason: format!("declared psi = {psi}, computed {computed}"),
                });
            }
            entries.push(CatalogEntry { index, field, class });
        }
        Ok(Catalog { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Generator `X<index>`, 1-based.
    pub fn get(&self, index: usize) -> Option<&CatalogEntry> {
        index.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    pub fn field(&self, index: usize) -> &VectorField {
        &self.get(index).expect("catalog index in range").field
    }

    pub fn psi(&self, index: usize) -> Expr {
        self.get(index)
            .and_then(|e| e.class.psi.clone())
            .unwrap_or_else(Expr::zero)
    }
}

/// Linear combination `sum c_k X^k` of catalog generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    pub terms: Vec<(usize, Expr)>,
}

fn generator_symbol(k: usize) -> String {
    format!("X{k}")
}

impl Combination {
    pub fn single(k: usize) -> Combination {
        Combination {
            terms: vec![(k, Expr::one())],
        }
    }

    /// Parses e.g. `"a*X1 + b*X2"` or `"2*X6/eps"`; coefficients may use any
    /// symbols other than the generator names.
    pub fn parse(text: &str, max_index: usize) -> Result<Combination> {
        let err = |reason: String| Error::Combination {
            text: text.to_string(),
            reason,
        };
        let e = parse(text).map_err(|e| err(e.to_string()))?;
        let gens: std::collections::BTreeSet<Atom> =
            (1..=max_index).map(|k| Atom::sym(&generator_symbol(k))).collect();
        let present = e.any_atom(&mut |a| {
            a.as_sym()
                .is_some_and(|s| s.starts_with('X') && s[1..].parse::<usize>().is_ok())
        });
        if !present && !e.is_literal_zero() {
            return Err(err("no generator X1..Xn found".into()));
        }
        let coll = e
            .collect(&gens)
            .ok_or_else(|| err("generators appear in a denominator".into()))?;
        let mut terms = Vec::new();
        for (m, c) in coll {
            let f = m.factors();
            match f {
                [] => {
                    if !c.is_zero() {
                        return Err(err("constant term without a generator".into()));
                    }
                }
                [(a, 1)] => {
                    let name = a.as_sym().expect("generator symbol");
                    let k: usize = name[1..].parse().expect("generator index");
                    if c.any_atom(&mut |a| gens.contains(a)) {
                        return Err(err("generator inside a coefficient".into()));
                    }
                    terms.push((k, c));
                }
                _ => return Err(err("not linear in the generators".into())),
            }
        }
        for (k, _) in &terms {
            if *k == 0 || *k > max_index {
                return Err(err(format!("generator X{k} out of range")));
            }
        }
        // reject names like X11 that look like generators but are out of range
        if e.any_atom(&mut |a| {
            a.as_sym().is_some_and(|s| {
                s.starts_with('X') && s[1..].parse::<usize>().is_ok_and(|k| k == 0 || k > max_index)
            })
        }) {
            return Err(err("generator index out of range".into()));
        }
        terms.sort_by_key(|(k, _)| *k);
        Ok(Combination { terms })
    }

    pub fn field(&self, catalog: &Catalog) -> VectorField {
        self.terms
            .iter()
            .fold(VectorField::zero(), |acc, (k, c)| acc.add(&catalog.field(*k).scale(c)))
    }

    /// Conformal factor as the same combination of the generators' factors.
    pub fn psi(&self, catalog: &Catalog) -> Expr {
        self.terms.iter().map(|(k, c)| catalog.psi(*k).mul(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient list indexed by generator (length `n`).
    pub fn dense(&self, n: usize) -> Vec<Expr> {
        let mut v = vec![Expr::zero(); n];
        for (k, c) in &self.terms {
            v[k - 1] = c.clone();
        }
        v
    }
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "X{k}")?;
            } else {
                write!(f, "({c})*X{k}")?;
            }
        }
        Ok(())
    }
}

/// Span membership test: `target = sum c_k gens[k]` with rational `c_k`,
/// solved separately for each signature instantiation.
pub fn in_rational_span(target: &VectorField, gens: &[VectorField], mode: EpsMode) -> Result<bool> {
    use crate::symkernel::{Monomial, Poly};
    use std::collections::{BTreeMap, BTreeSet};
    for &s in mode.signs() {
        let inst = |v: &VectorField| -> Result<Vec<Expr>> {
            v.components()
                .iter()
                .map(|c| Ok(c.instantiate_eps(s)?))
                .collect()
        };
        let tv = inst(target)?;
        let gv: Vec<Vec<Expr>> = gens.iter().map(inst).collect::<Result<_>>()?;
        // one equation per (component, monomial); all entries must be polynomial
        let mut rows: BTreeMap<(usize, Monomial), (Vec<Coeff>, Coeff)> = BTreeMap::new();
        let mut atoms = BTreeSet::new();
        for c in tv.iter().chain(gv.iter().flatten()) {
            atoms.extend(c.atoms());
        }
        let as_poly = |e: &Expr| -> Result<Poly> {
            if !e.is_polynomial() {
                return Err(Error::Precondition(format!("non-polynomial component {e}")));
            }
            Ok(e.num().clone())
        };
        for (comp, t) in tv.iter().enumerate() {
            for (m, c) in as_poly(t)?.terms() {
                let row = rows
                    .entry((comp, m.clone()))
                    .or_insert_with(|| (vec![Coeff::zero(); gens.len()], Coeff::zero()));
                row.1 = c.clone();
            }
            for (k, g) in gv.iter().enumerate() {
                for (m, c) in as_poly(&g[comp])?.terms() {
                    let row = rows
                        .entry((comp, m.clone()))
                        .or_insert_with(|| (vec![Coeff::zero(); gens.len()], Coeff::zero()));
                    row.0[k] = c.clone();
                }
            }
        }
        let (a, b): (Vec<Vec<Coeff>>, Vec<Coeff>) = rows.into_values().unzip();
        if a.is_empty() {
            continue;
        }
        if crate::linalg::solve(&a, &b).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> Catalog {
        Catalog::builtin()
    }

    #[test]
    fn translation_has_zero_lie_derivative() {
        let l = lie_derivative_metric(cat().field(1), &MetricSpec::flat()).unwrap();
        assert!(l.iter().flatten().all(Expr::is_literal_zero));
    }

    #[test]
    fn homothety_doubles_metric() {
        let g = MetricSpec::flat();
        let l = lie_derivative_metric(cat().field(4), &g).unwrap();
        for (a, row) in l.iter().enumerate() {
            for (b, lab) in row.iter().enumerate() {
                assert!(lab.sub(&g.component(a, b).mul(&Expr::int(2))).is_zero());
            }
        }
    }

    #[test]
    fn special_ckv_factor() {
        let g = MetricSpec::flat();
        let l = lie_derivative_metric(cat().field(10), &g).unwrap();
        let four_t = Expr::int(4).mul(&Expr::t());
        assert!(l[0][0].sub(&four_t.mul(&Expr::eps())).is_zero());
        assert!(l[1][1].sub(&four_t).is_zero());
        assert!(l[0][1].is_zero());
    }

    #[test]
    fn classifies_catalog() {
        let c = cat();
        let g = MetricSpec::flat();
        let k1 = classify_collineation(c.field(1), &g).unwrap();
        assert_eq!(k1.kind, CollineationKind::Kv);
        let k4 = classify_collineation(c.field(4), &g).unwrap();
        assert_eq!((k4.kind, k4.psi), (CollineationKind::Hv, Some(Expr::one())));
        let k8 = classify_collineation(c.field(8), &g).unwrap();
        assert_eq!(k8.kind, CollineationKind::Sckv);
        assert_eq!(k8.psi, Some(Expr::int(2).mul(&Expr::y())));
    }

    #[test]
    fn non_conformal_field_is_none() {
        let f = VectorField::new([Expr::zero(), Expr::x().square(), Expr::zero()]);
        let k = classify_collineation(&f, &MetricSpec::flat()).unwrap();
        assert_eq!(k.kind, CollineationKind::None);
        assert!(k.psi.is_none());
    }

    #[test]
    fn laplacian_examples() {
        let g = MetricSpec::flat();
        assert!(laplacian(&parse("2*y").unwrap(), &g).unwrap().is_literal_zero());
        assert_eq!(laplacian(&parse("t^2").unwrap(), &g).unwrap(), parse("2/eps").unwrap());
        assert_eq!(laplacian(&parse("x^2+y^2").unwrap(), &g).unwrap(), Expr::int(4));
    }

    #[test]
    fn bracket_examples() {
        let c = cat();
        let b14 = lie_bracket(c.field(1), c.field(4)).unwrap();
        assert!(b14.sub(c.field(1)).is_zero());
        // The printed bracket table has +X3 here; with X5 = y d_x - x d_y the
        // componentwise bracket is -X3.
        let b25 = lie_bracket(c.field(2), c.field(5)).unwrap();
        assert!(b25.add(c.field(3)).is_zero());
        assert!(lie_bracket(c.field(8), c.field(8)).unwrap().is_zero());
    }

    #[test]
    fn combination_parsing() {
        let comb = Combination::parse("a*X1 + b*X2", 10).unwrap();
        assert_eq!(comb.terms.len(), 2);
        let c = Combination::parse("2*X6/eps", 10).unwrap();
        assert_eq!(c.terms[0], (6, parse("2*eps").unwrap()));
        assert!(Combination::parse("X1*X2", 10).is_err());
        assert!(Combination::parse("X11", 10).is_err());
        assert_eq!(Combination::parse("0", 10).unwrap().terms, vec![]);
    }

    #[test]
    fn span_membership() {
        let c = cat();
        let gens = [c.field(5).clone(), c.field(6).clone(), c.field(7).clone()];
        let br = lie_bracket(&gens[0], &gens[1]).unwrap();
        assert!(in_rational_span(&br, &gens, EpsMode::Both).unwrap());
        assert!(!in_rational_span(c.field(1), &gens, EpsMode::Both).unwrap());
    }
}
