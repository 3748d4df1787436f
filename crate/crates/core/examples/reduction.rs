//! Invariants of a symmetry and reduction of the equation by an invariant
//! ansatz, compared with a hand-written reduced equation.

use kgsym::geometry::Catalog;
use kgsym::reduction::{invariant_residuals, jacobian_rank, proportionality, reduce_residual, Ansatz};
use kgsym::symkernel::{parse, EpsMode};
use kgsym::symmetry::PotentialSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    // rotations X5 leave t, u and x^2 + y^2 fixed
    let ws = [parse("t")?, parse("u")?, parse("x^2 + y^2")?];
    let res = invariant_residuals(catalog.field(5), &ws)?;
    println!("X5 invariants: residuals zero {}, rank {:?}", res.iter().all(|r| r.is_zero()), jacobian_rank(&ws, 1)?);

    let v = PotentialSpec::parse("V(-a3*x + y)")?;
    let a = Ansatz::parse("exp(kappa3*t)*beta(x, y)")?;
    let red = reduce_residual(&a, &v)?;
    println!("reduced: {} = 0", red.reduced);

    let expected = parse("beta[2,0](x,y) + beta[0,2](x,y) + (V(-a3*x + y) + eps*kappa3^2)*beta(x,y)")?;
    match proportionality(&red.reduced, &expected, "beta", EpsMode::Both)? {
        Some(mu) => println!("matches the expected equation up to the factor {mu}"),
        None => println!("does not match the expected equation"),
    }
    Ok(())
}
