//! Point symmetries of the Klein-Gordon equation for a given potential:
//! the potential constraint, the fitted u-term and the full invariance check.

use kgsym::geometry::Catalog;
use kgsym::symmetry::{
    constraint_residual, determine_u_coefficient, lie_invariance_residual, PotentialSpec, SymmetryCandidate,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    let cases = [
        (1, "V(x, y)"),
        (5, "V(t, x^2 + y^2)"),
        (4, "1/t^2*V(x/t, y/t)"),
        (8, "1/t^2*V(x/t, (eps*t^2 + x^2 + y^2)/t)"),
        (8, "V(x, y)"),
    ];
    for (k, pot) in cases {
        let v = PotentialSpec::parse(pot)?;
        let x = catalog.field(k);
        let psi = catalog.psi(k);
        let constraint = constraint_residual(x, &psi, &v)?;
        let u = determine_u_coefficient(x, &psi, &v)?;
        print!("X{k} with V = {pot}: constraint {}; {u:?}", constraint.is_zero());
        if let Some(c) = u.coefficient(&psi) {
            let s = SymmetryCandidate::new(x.clone()).with_u_coeff(c);
            let r = lie_invariance_residual(&s, &v)?;
            print!("; eta = {}; invariant {}", s.eta(), r.is_zero());
        }
        println!();
    }
    Ok(())
}
