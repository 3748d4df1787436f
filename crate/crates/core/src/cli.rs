//! Command-line front end shared by the `kgsym` binary and the tests.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::geometry::{conformal_factor_candidate, satisfies_ckv, MetricSpec, VectorField};
use crate::noether::{conserved_vector, divergence_on_shell, lagrangian};
use crate::reduction::{reduce_residual, Ansatz};
use crate::report::{Format, Record, Report, Status};
use crate::suites::{noether_for, run_suite, Context, Suite, TableId};
use crate::symkernel::{parse, EpsMode};
use crate::symmetry::{
    constraint_residual, determine_u_coefficient, lie_invariance_residual, PotentialSpec, SymmetryCandidate,
    UCoefficient,
};

#[derive(Parser, Debug)]
#[command(name = "kgsym", version, about = "Symmetries of the Klein-Gordon equation on flat 3-space")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = FormatArg::Table, global = true)]
    pub format: FormatArg,
    /// Directory holding the table files; the built-in tables if omitted.
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EpsArg::Both, global = true, allow_hyphen_values = true)]
    pub eps: EpsArg,
    /// Worker threads for suite fan-out.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Table,
    Records,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EpsArg {
    #[value(name = "+1", alias = "1", alias = "plus")]
    Plus,
    #[value(name = "-1", alias = "minus")]
    Minus,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print X1..X10 with their classes and conformal factors.
    Catalog,
    /// Run a verification suite against the tables.
    Verify {
        #[command(subcommand)]
        suite: VerifyCommand,
    },
    /// Constraint and invariance check for one vector field.
    Check {
        /// Components xi^t, xi^x, xi^y, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
    },
    /// Derive a conserved vector.
    Derive {
        #[command(subcommand)]
        what: DeriveCommand,
    },
    /// Substitute an invariant ansatz into the equation.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        ansatz: String,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    Catalog,
    Brackets,
    Subalgebras,
    Potentials {
        #[arg(long, value_parser = ["3", "4", "grid", "grid1"])]
        table: String,
    },
    Noether,
    Conservation,
    Reductions,
    Wave,
    All,
}

#[derive(Subcommand, Debug)]
pub enum DeriveCommand {
    Conserved {
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
    },
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Records => Format::Records,
        }
    }
}

impl From<EpsArg> for EpsMode {
    fn from(e: EpsArg) -> EpsMode {
        match e {
            EpsArg::Plus => EpsMode::Plus,
            EpsArg::Minus => EpsMode::Minus,
            EpsArg::Both => EpsMode::Both,
        }
    }
}

/// Text to print and the process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
    /// The output is a diagnostic rather than a report.
    pub diagnostic: bool,
}

impl Outcome {
    fn from_reports(reports: &[Report], format: Format) -> Outcome {
        let mut output = String::new();
        for r in reports {
            output.push_str(&r.render(format));
        }
        let failed = reports.iter().any(Report::has_failures);
        Outcome {
            output,
            code: i32::from(failed),
            diagnostic: false,
        }
    }
}

fn vector_arg(components: &str, eta: Option<&str>) -> Result<VectorField> {
    let v = VectorField::parse(components)?;
    match eta {
        Some(e) => Ok(v.with_eta(parse(e)?)),
        None => Ok(v),
    }
}

fn context(cli: &Cli) -> Result<Context> {
    let data = match &cli.data_dir {
        Some(d) => DataSet::from_dir(d)?,
        None => DataSet::embedded()?,
    };
    Context::new(data, cli.eps.into())
}

fn catalog_report(ctx: &Context) -> Report {
    let mut rep = Report::new("catalog");
    for e in ctx.catalog.entries() {
        let f = &e.field;
        rep.push(
            Record::new(format!("X{}", e.index), "generator list", Status::Pass)
                .with_note(format!("({}, {}, {}); {}", f.xi[0], f.xi[1], f.xi[2], e.class)),
        );
    }
    rep
}

fn check_report(
    vector: &str,
    eta: Option<&str>,
    psi: Option<&str>,
    potential: &str,
    mode: EpsMode,
) -> Result<Report> {
    let x = vector_arg(vector, eta)?;
    let v = PotentialSpec::parse(potential)?;
    let g = MetricSpec::flat();
    let psi = match psi {
        Some(p) => parse(p)?,
        None => conformal_factor_candidate(&x, &g)?,
    };
    let mut rep = Report::new("check");
    let loc = format!("X = {x}, V = {}", v.expr());
    let ckv = satisfies_ckv(&x, &g, &psi, mode)?;
    rep.push(Record::new("conformal", loc.clone(), Status::from_bool(ckv)).with_note(format!("psi = {psi}")));
    if !ckv {
        return Ok(rep);
    }
    let r = constraint_residual(&x, &psi, &v)?;
    rep.push(Record::new("constraint", loc.clone(), Status::from_bool(r.is_zero_in(mode))).residual_unless_pass(&r));
    let s = if eta.is_some() {
        SymmetryCandidate::new(x)
    } else {
        let u = determine_u_coefficient(&x, &psi, &v)?;
        let note = match &u {
            UCoefficient::NotNeeded => "no u-term".to_string(),
            UCoefficient::AbsorbedIntoA0 => "u-term absorbed into a0".to_string(),
            UCoefficient::Determined { lambda } => format!("lambda = {lambda}"),
            UCoefficient::NoSolution => "no admissible u-term".to_string(),
        };
        let ok = !matches!(u, UCoefficient::NoSolution);
        rep.push(Record::new("u-coefficient", loc.clone(), Status::from_bool(ok)).with_note(note));
        SymmetryCandidate::new(x).with_u_coeff(u.coefficient(&psi).unwrap_or_else(crate::symkernel::Expr::zero))
    };
    let r = lie_invariance_residual(&s, &v)?;
    rep.push(
        Record::new("invariance", loc, Status::from_bool(r.is_zero_in(mode)))
            .residual_unless_pass(&r)
            .with_note(format!("eta = {}", s.eta())),
    );
    Ok(rep)
}

fn derive_report(vector: &str, eta: Option<&str>, potential: &str, mode: EpsMode) -> Result<Report> {
    let x = vector_arg(vector, eta)?;
    let v = PotentialSpec::parse(potential)?;
    let s = if eta.is_some() {
        SymmetryCandidate::new(x)
    } else {
        let psi = conformal_factor_candidate(&x, &MetricSpec::flat())?;
        let u = determine_u_coefficient(&x, &psi, &v)?;
        let c = u.coefficient(&psi).ok_or_else(|| {
            Error::Precondition(format!("{x} admits no u-term making it a symmetry of V = {}", v.expr()))
        })?;
        SymmetryCandidate::new(x).with_u_coeff(c)
    };
    let loc = format!("eta = {}, V = {}", s.eta(), v.expr());
    let mut rep = Report::new("derive");
    let Some(sol) = noether_for(&s, &v)? else {
        rep.push(Record::new("noether", loc, Status::Fail).with_note("not a Noether point symmetry"));
        return Ok(rep);
    };
    let t = conserved_vector(&sol.symmetry, &lagrangian(&v), &sol.gauge)?;
    let names = ["T^t", "T^x", "T^y"];
    for (name, c) in names.iter().zip(&t.t) {
        rep.push(Record::new(*name, loc.clone(), Status::Pass).with_note(c.to_string()));
    }
    let d = divergence_on_shell(&t, &v)?;
    rep.push(
        Record::new("divergence", loc, Status::from_bool(d.is_zero_in(mode)))
            .residual_unless_pass(&d)
            .with_note(format!("a0 = {}; f = ({}, {}, {})", sol.symmetry.a0, sol.gauge.f[0], sol.gauge.f[1], sol.gauge.f[2])),
    );
    Ok(rep)
}

fn reduce_report(ansatz: &str, potential: &str) -> Result<Report> {
    let a = Ansatz::parse(ansatz)?;
    let v = PotentialSpec::parse(potential)?;
    let red = reduce_residual(&a, &v)?;
    let mut rep = Report::new("reduce");
    rep.push(
        Record::new("reduced", format!("u = {}, V = {}", a.expr(), v.expr()), Status::Pass)
            .with_note(format!("{} = 0", red.reduced)),
    );
    Ok(rep)
}

fn verify_reports(ctx: &Context, which: &VerifyCommand) -> Result<Vec<Report>> {
    let suites: Vec<Suite> = match which {
        VerifyCommand::Catalog => vec![Suite::Catalog],
        VerifyCommand::Brackets => vec![Suite::Brackets],
        VerifyCommand::Subalgebras => vec![Suite::Subalgebras],
        VerifyCommand::Potentials { table } => {
            vec![Suite::Potentials(TableId::parse(table).expect("validated by clap"))]
        }
        VerifyCommand::Noether => vec![Suite::Noether],
        VerifyCommand::Conservation => vec![Suite::Conservation],
        VerifyCommand::Reductions => vec![Suite::Reductions],
        VerifyCommand::Wave => vec![Suite::Wave],
        VerifyCommand::All => Suite::ALL.to_vec(),
    };
    suites.into_iter().map(|s| run_suite(ctx, s)).collect()
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let format = Format::from(cli.format);
    let mode = EpsMode::from(cli.eps);
    let reports = match &cli.command {
        Command::Catalog => vec![catalog_report(&context(cli)?)],
        Command::Verify { suite } => verify_reports(&context(cli)?, suite)?,
        Command::Check {
            vector,
            eta,
            psi,
            potential,
        } => vec![check_report(vector, eta.as_deref(), psi.as_deref(), potential, mode)?],
        Command::Derive {
            what: DeriveCommand::Conserved { vector, eta, potential },
        } => vec![derive_report(vector, eta.as_deref(), potential, mode)?],
        Command::Reduce { ansatz, potential } => vec![reduce_report(ansatz, potential)?],
    };
    Ok(Outcome::from_reports(&reports, format))
}

/// Parses `args` (program name first) and runs the command. Usage errors
/// exit with 2, other errors with 1.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                output: e.to_string(),
                code,
                diagnostic: code != 0,
            };
        }
    };
    let pool = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().ok(),
        None => None,
    };
    let result = match &pool {
        Some(p) => p.install(|| execute(&cli)),
        None => execute(&cli),
    };
    match result {
        Ok(o) => o,
        Err(e) => Outcome {
            output: format!("error: {e}\n"),
            code: 1,
            diagnostic: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_check_passes() {
        let o = run(["kgsym", "check", "--vector", "1,0,0", "--psi", "0", "--potential", "V(x,y)"]);
        assert_eq!(o.code, 0, "{}", o.output);
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        assert_eq!(run(["kgsym", "frobnicate"]).code, 2);
    }

    #[test]
    fn malformed_expression_reports_position() {
        let o = run(["kgsym", "check", "--vector", "1,0,0", "--potential", "V(x,"]);
        assert_eq!(o.code, 1);
        assert!(o.output.contains("error"));
    }
}
