use kgsym::cli::run;

fn kgsym(args: &[&str]) -> kgsym::cli::Outcome {
    run(std::iter::once("kgsym").chain(args.iter().copied()))
}

#[test]
fn translation_is_a_symmetry_of_any_static_potential() {
    let o = kgsym(&["check", "--vector", "1,0,0", "--psi", "0", "--potential", "V(x,y)"]);
    assert_eq!(o.code, 0, "{}", o.output);
    assert!(o.output.contains("check: 4 pass, 0 fail, 0 flagged"));
}

#[test]
fn check_reports_a_broken_constraint() {
    let o = kgsym(&["check", "--vector", "0,1,0", "--potential", "V(x,y)"]);
    assert_eq!(o.code, 1);
    assert!(o.output.contains("fail"));
}

#[test]
fn bracket_records_cover_every_cell() {
    let o = kgsym(&["--format", "records", "verify", "brackets"]);
    let lines: Vec<&str> = o.output.lines().filter(|l| l.starts_with("suite=")).collect();
    assert_eq!(lines.len(), 100);
    let failed = lines.iter().any(|l| l.contains("status=fail"));
    assert_eq!(o.code, i32::from(failed));
}

#[test]
fn records_are_deterministic() {
    let args = ["--format", "records", "verify", "potentials", "--table", "4"];
    let a = kgsym(&args);
    let b = kgsym(&["--jobs", "3", "--format", "records", "verify", "potentials", "--table", "4"]);
    assert_eq!(a.output, b.output);
    assert_eq!(kgsym(&args).output, a.output);
}

#[test]
fn exit_status_tracks_failures() {
    for suite in ["catalog", "wave", "conservation", "brackets"] {
        let o = kgsym(&["--format", "records", "verify", suite]);
        let failed = o.output.contains("status=fail");
        assert_eq!(o.code, i32::from(failed), "{suite}");
    }
}

#[test]
fn empty_data_directory_is_a_missing_data_error() {
    let dir = std::env::temp_dir().join(format!("kgsym-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let o = kgsym(&["--data-dir", dir.to_str().unwrap(), "verify", "all"]);
    assert_ne!(o.code, 0);
    assert!(o.output.contains("missing data file"), "{}", o.output);
    std::fs::remove_dir(&dir).unwrap();
}

#[test]
fn shipped_data_directory_matches_the_built_in_tables() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let a = kgsym(&["--data-dir", dir, "--format", "records", "verify", "noether"]);
    let b = kgsym(&["--format", "records", "verify", "noether"]);
    assert_eq!(a, b);
}

#[test]
fn malformed_expression_is_reported() {
    let o = kgsym(&["reduce", "--ansatz", "exp(x)*zeta(t,", "--potential", "0"]);
    assert_eq!(o.code, 1);
    assert!(o.output.starts_with("error:"));
}

#[test]
fn unknown_subcommand_is_rejected() {
    assert_eq!(kgsym(&["verify", "everything"]).code, 2);
}

#[test]
fn derive_conserved_energy() {
    let o = kgsym(&["derive", "conserved", "--vector", "1,0,0", "--potential", "V(x,y)"]);
    assert_eq!(o.code, 0, "{}", o.output);
    assert!(o.output.contains("T^t"));
}

#[test]
fn reduce_separable_ansatz() {
    let o = kgsym(&["reduce", "--ansatz", "exp(k*x)*zeta(t, y)", "--potential", "V(t, y)"]);
    assert_eq!(o.code, 0, "{}", o.output);
    assert!(o.output.contains("zeta[2,0](t, y)"), "{}", o.output);
}

#[test]
fn signature_flag_accepts_signs() {
    for eps in ["+1", "-1", "both"] {
        let o = kgsym(&["--eps", eps, "verify", "wave"]);
        assert_eq!(o.code, 0, "{eps}: {}", o.output);
    }
}
