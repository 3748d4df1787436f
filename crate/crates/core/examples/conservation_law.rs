//! Noether symmetries with their gauge terms and the conserved vectors they
//! produce, checked by taking the divergence on solutions.

use kgsym::geometry::Catalog;
use kgsym::noether::{conserved_vector, divergence_on_shell, lagrangian};
use kgsym::suites::noether_for;
use kgsym::symmetry::{lie_symmetry_from, PotentialSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let catalog = Catalog::builtin();
    for (k, pot) in [(1, "V(x, y)"), (4, "0"), (8, "0"), (6, "V0")] {
        let v = PotentialSpec::parse(pot)?;
        let Some(s) = lie_symmetry_from(catalog.field(k), &catalog.psi(k), &v)? else {
            println!("X{k}: no Lie symmetry for V = {pot}");
            continue;
        };
        let Some(sol) = noether_for(&s, &v)? else {
            println!("X{k}: Lie but not Noether for V = {pot}");
            continue;
        };
        let t = conserved_vector(&sol.symmetry, &lagrangian(&v), &sol.gauge)?;
        let div = divergence_on_shell(&t, &v)?;
        println!("X{k}, V = {pot}: a0 = {}, gauge = ({}, {}, {})", sol.symmetry.a0, sol.gauge.f[0], sol.gauge.f[1], sol.gauge.f[2]);
        println!("  T^t = {}", t.t[0]);
        println!("  on-shell divergence zero: {}", div.is_zero());
    }
    Ok(())
}
