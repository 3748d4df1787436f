//! Randomized algebraic properties, shared by the property tests and the
//! acceptance report.

use kgsym::geometry::{lie_bracket, Catalog, Combination, VectorField};
use kgsym::noether::{conserved_vector, divergence_on_shell, lagrangian, on_shell};
use kgsym::suites::noether_for;
use kgsym::symkernel::{parse, Atom, Expr, Indep};
use kgsym::symmetry::{lie_symmetry_from, PotentialSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 256;

fn leaf(jets: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    let mut names: Vec<&'static str> = vec!["t", "x", "y", "eps", "a", "u", "exp(t)", "V(x, y)", "sqrt(y)"];
    names.extend_from_slice(jets);
    prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        prop::sample::select(names).prop_map(|s| parse(s).expect("leaf parses")),
    ]
}

fn expr_with(jets: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    leaf(jets).prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            // divisor 1 + d^2 + eps^2 never vanishes
            (inner.clone(), inner).prop_map(|(a, d)| {
                let den = Expr::one().add(&d.square()).add(&Expr::eps().square());
                a.div(&den).expect("nonzero divisor")
            }),
        ]
    })
}

/// Expressions with first-order jets.
pub fn expr() -> impl Strategy<Value = Expr> {
    expr_with(&["u_t", "u_x", "u_y"])
}

/// Expressions that also carry second-order t-jets.
pub fn expr_with_t_jets() -> impl Strategy<Value = Expr> {
    expr_with(&["u_t", "u_x", "u_tt", "u_tx", "u_yy"])
}

pub fn combination(max_index: usize) -> impl Strategy<Value = Combination> {
    prop::collection::vec(-2i64..=2, max_index).prop_map(|cs| Combination {
        terms: cs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (k + 1, Expr::int(c)))
            .collect(),
    })
}

fn potential() -> impl Strategy<Value = PotentialSpec> {
    prop::sample::select(FAMILIES.iter().map(|f| f.0).collect::<Vec<_>>())
        .prop_map(|s| PotentialSpec::parse(s).expect("potential parses"))
}

fn run<S: Strategy>(
    strategy: S,
    cases: u32,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what()))
    }
}

fn sym_err(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Printing and re-reading a canonical expression gives it back, and the
/// neutral operations leave it unchanged.
pub fn normalize_idempotence(cases: u32) -> Result<(), String> {
    run(expr(), cases, |e| {
        let again = parse(&e.to_string()).map_err(sym_err)?;
        check(again == e, || format!("{e} re-read as {again}"))?;
        check(e.add(&Expr::zero()) == e && e.mul(&Expr::one()) == e, || format!("{e} not stable"))?;
        check(e.sub(&e).is_literal_zero(), || format!("{e} - itself is not literally zero"))
    })
}

/// `D_i D_j e = D_j D_i e` for every pair of independent variables.
pub fn total_derivative_commutation(cases: u32) -> Result<(), String> {
    let pairs = prop::sample::select(vec![
        (Indep::T, Indep::X),
        (Indep::T, Indep::Y),
        (Indep::X, Indep::Y),
        (Indep::X, Indep::X),
    ]);
    run((expr(), pairs), cases, |(e, (a, b))| {
        let ab = e.total_diff(a).and_then(|d| d.total_diff(b)).map_err(sym_err)?;
        let ba = e.total_diff(b).and_then(|d| d.total_diff(a)).map_err(sym_err)?;
        check(ab.sub(&ba).is_zero(), || format!("D_{a:?} D_{b:?} of {e} does not commute"))
    })
}

/// Antisymmetry and the Jacobi identity for random combinations.
pub fn bracket_identities(cases: u32) -> Result<(), String> {
    let catalog = Catalog::builtin();
    let n = catalog.len();
    run((combination(n), combination(n), combination(n)), cases, |(a, b, c)| {
        let [a, b, c]: [VectorField; 3] = [a.field(&catalog), b.field(&catalog), c.field(&catalog)];
        let br = |p: &VectorField, q: &VectorField| lie_bracket(p, q).map_err(sym_err);
        check(br(&a, &b)?.add(&br(&b, &a)?).is_zero(), || "antisymmetry".into())?;
        let jacobi = br(&a, &br(&b, &c)?)?
            .add(&br(&b, &br(&c, &a)?)?)
            .add(&br(&c, &br(&a, &b)?)?);
        check(jacobi.is_zero(), || format!("Jacobi residual {jacobi}"))
    })
}

fn has_tt_jet(e: &Expr) -> bool {
    e.any_atom(&mut |a| matches!(a, Atom::Jet(j) if j.count(Indep::T) >= 2))
}

/// Eliminating second t-derivatives does not depend on when it happens.
pub fn on_shell_confluence(cases: u32) -> Result<(), String> {
    run((expr_with_t_jets(), potential()), cases, |(e, v)| {
        let reduced = on_shell(&e, &v).map_err(sym_err)?;
        check(!has_tt_jet(&reduced), || format!("{reduced} keeps a u_tt jet"))?;
        check(on_shell(&reduced, &v).map_err(sym_err)? == reduced, || "not idempotent".into())?;
        for d in Indep::ALL {
            let late = on_shell(&e.total_diff(d).map_err(sym_err)?, &v).map_err(sym_err)?;
            let early = on_shell(&reduced.total_diff(d).map_err(sym_err)?, &v).map_err(sym_err)?;
            check(late.sub(&early).is_zero(), || format!("orders disagree on D_{d:?} of {e}"))?;
        }
        Ok(())
    })
}

/// Potentials paired with catalog generators that are point symmetries of them.
const FAMILIES: [(&str, &[usize]); 6] = [
    ("0", &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]),
    ("V0", &[1, 2, 3, 5, 6, 7]),
    ("V(x, y)", &[1]),
    ("V(t)", &[2, 3, 5]),
    ("V(x^2 + y^2)", &[1, 5]),
    ("x^2 + y^2", &[1, 5]),
];

fn family_member() -> impl Strategy<Value = (PotentialSpec, Combination)> {
    (0..FAMILIES.len(), prop::collection::vec(-2i64..=2, 10)).prop_map(|(f, cs)| {
        let (v, gens) = FAMILIES[f];
        let terms = gens
            .iter()
            .zip(cs)
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (*k, Expr::int(c)))
            .collect();
        (PotentialSpec::parse(v).expect("potential parses"), Combination { terms })
    })
}

/// Every Noether symmetry found yields a vector with zero on-shell divergence.
pub fn noether_implies_conservation(cases: u32) -> Result<(), String> {
    let catalog = Catalog::builtin();
    run(family_member(), cases, |(v, c)| {
        let x = c.field(&catalog);
        let psi = c.psi(&catalog);
        let s = lie_symmetry_from(&x, &psi, &v)
            .map_err(sym_err)?
            .ok_or_else(|| TestCaseError::fail(format!("{x} is no symmetry of V = {}", v.expr())))?;
        let Some(sol) = noether_for(&s, &v).map_err(sym_err)? else {
            return Ok(());
        };
        let t = conserved_vector(&sol.symmetry, &lagrangian(&v), &sol.gauge).map_err(sym_err)?;
        let div = divergence_on_shell(&t, &v).map_err(sym_err)?;
        check(div.is_zero(), || format!("divergence {div} for {x} with V = {}", v.expr()))
    })
}

pub type Property = fn(u32) -> Result<(), String>;

pub const ALL: [(&str, Property); 5] = [
    ("normalize idempotence", normalize_idempotence),
    ("total-derivative commutation", total_derivative_commutation),
    ("bracket antisymmetry and Jacobi", bracket_identities),
    ("on-shell confluence", on_shell_confluence),
    ("Noether implies conservation", noether_implies_conservation),
];
