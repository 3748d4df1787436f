use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = kgsym::cli::run(std::env::args_os());
    if !outcome.diagnostic {
        print!("{}", outcome.output);
    } else {
        eprint!("{}", outcome.output);
    }
    ExitCode::from(outcome.code as u8)
}
