//! Canonical expressions: parsing, derivatives, total derivatives and the
//! signature-aware zero test.

use kgsym::symkernel::{parse, EpsMode, Expr, Indep};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = parse("(x^2 - y^2)/(x - y) + eps^3*V(t, x*y)")?;
    println!("normal form     {e}");

    let dx = e.diff(Indep::X)?;
    println!("d/dx            {dx}");

    // total derivative acts on the jet variables too
    let w = parse("u*u_x + t*u_t")?;
    println!("D_t (u u_x + t u_t) = {}", w.total_diff(Indep::T)?);

    // eps^2 = 1, so these agree for both signatures
    let a = parse("eps^2*x + sqrt(eps^2*y^2)")?;
    let b = parse("x + sqrt(y^2)")?;
    println!("eps^2 reduction  {}", a.sub(&b).is_zero_in(EpsMode::Both));

    let chain = Expr::exp(parse("k*x")?).mul(&parse("F(x^2 + y)")?);
    println!("d/dx exp(kx)F    {}", chain.diff(Indep::X)?);
    Ok(())
}
