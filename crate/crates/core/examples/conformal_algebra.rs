//! The ten conformal generators of flat 3-space, their classes and a few
//! Lie brackets, including a check that a subalgebra closes.

use kgsym::geometry::{classify_collineation, in_rational_span, lie_bracket, Catalog, Combination, MetricSpec};
use kgsym::symkernel::EpsMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    let g = MetricSpec::flat();
    for e in catalog.entries() {
        println!("X{:<2} {:<12} {}", e.index, e.class.to_string(), e.field);
    }

    let b = lie_bracket(catalog.field(2), catalog.field(10))?;
    println!("[X2, X10] = {b}");

    let x = Combination::parse("X1 + 2*X5", 10)?.field(&catalog);
    println!("X1 + 2 X5 is {}", classify_collineation(&x, &g)?);

    // span{X1, X2, X6} closes: [X1, X6] and [X2, X6] are multiples of X2 and X1
    let gens: Vec<_> = [1, 2, 6].iter().map(|k| catalog.field(*k).clone()).collect();
    let mut closed = true;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            closed &= in_rational_span(&lie_bracket(&gens[i], &gens[j])?, &gens, EpsMode::Both)?;
        }
    }
    println!("span{{X1, X2, X6}} closes: {closed}");
    Ok(())
}
