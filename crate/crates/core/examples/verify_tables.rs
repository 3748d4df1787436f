//! Runs the table-driven suites and prints their summaries; pass a suite name
//! (`brackets`, `potentials-4`, ...) to print that suite's records.

use kgsym::report::Format;
use kgsym::suites::{run_suite, Context, Suite};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = Context::embedded()?;
    let wanted = std::env::args().nth(1);
    for s in Suite::ALL {
        let rep = run_suite(&ctx, s)?;
        match &wanted {
            Some(name) if *name == s.name() => print!("{}", rep.render(Format::Records)),
            Some(_) => {}
            None => println!("{}", rep.summary()),
        }
    }
    Ok(())
}
