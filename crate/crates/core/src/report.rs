//! Check records and their two output formats.

use std::fmt::{self, Write as _};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    /// One reading of a known misprint; does not count as a failure.
    Flagged,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flagged => "flagged",
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    /// Where the checked claim is printed, e.g. `Table 3, row X8`.
    pub location: String,
    pub status: Status,
    /// Normalized residual; present when the check fails or is flagged.
    pub residual: Option<String>,
    pub note: String,
}

impl Record {
    pub fn new(id: impl Into<String>, location: impl Into<String>, status: Status) -> Record {
        Record {
            id: id.into(),
            location: location.into(),
            status,
            residual: None,
            note: String::new(),
        }
    }

    pub fn with_residual(mut self, r: impl ToString) -> Record {
        self.residual = Some(r.to_string());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Record {
        self.note = note.into();
        self
    }

    /// Attaches `residual` only when the record did not pass.
    pub fn residual_unless_pass(self, r: impl ToString) -> Record {
        if self.status == Status::Pass {
            self
        } else {
            self.with_residual(r)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Records,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Report {
        Report {
            suite: suite.into(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = Record>) {
        self.records.extend(rs);
    }

    pub fn count(&self, s: Status) -> usize {
        self.records.iter().filter(|r| r.status == s).count()
    }

    pub fn has_failures(&self) -> bool {
        self.count(Status::Fail) > 0
    }

    pub fn find(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Records whose id starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.id.starts_with(prefix))
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} pass, {} fail, {} flagged",
            self.suite,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Flagged)
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.render_table(),
            Format::Records => self.render_records(),
        }
    }

    fn render_table(&self) -> String {
        let id_w = self.records.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
        let loc_w = self.records.iter().map(|r| r.location.len()).max().unwrap_or(8).max(8);
        let mut out = String::new();
        let _ = writeln!(out, "{:<7}  {:<id_w$}  {:<loc_w$}  DETAIL", "STATUS", "ID", "LOCATION");
        for r in &self.records {
            let mut detail = r.note.clone();
            if let Some(res) = &r.residual {
                if !detail.is_empty() {
                    detail.push_str("; ");
                }
                detail.push_str("residual ");
                detail.push_str(res);
            }
            let line = format!("{:<7}  {:<id_w$}  {:<loc_w$}  {}", r.status.label(), r.id, r.location, detail);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(out, "{}", self.summary());
        out
    }

    fn render_records(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = write!(
                out,
                "suite={:?} id={:?} status={} location={:?}",
                self.suite,
                r.id,
                r.status.label(),
                r.location
            );
            if let Some(res) = &r.residual {
                let _ = write!(out, " residual={res:?}");
            }
            if !r.note.is_empty() {
                let _ = write!(out, " note={:?}", r.note);
            }
            out.push('\n');
        }
        out
    }
}

/// Status of several readings of one printed entry: when some reading
/// passes, the failing ones are flagged instead of failed.
pub fn resolve_readings(passes: &[bool]) -> Vec<Status> {
    let any = passes.iter().any(|&p| p);
    passes
        .iter()
        .map(|&p| match (p, any) {
            (true, _) => Status::Pass,
            (false, true) => Status::Flagged,
            (false, false) => Status::Fail,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readings_flag_only_when_one_passes() {
        assert_eq!(resolve_readings(&[false, true]), vec![Status::Flagged, Status::Pass]);
        assert_eq!(resolve_readings(&[false, false]), vec![Status::Fail, Status::Fail]);
        assert_eq!(resolve_readings(&[true]), vec![Status::Pass]);
    }

    #[test]
    fn record_format_is_stable() {
        let mut rep = Report::new("demo");
        rep.push(Record::new("a", "Table 2", Status::Pass));
        rep.push(Record::new("b", "Table 2", Status::Fail).with_residual("x").with_note("n"));
        assert_eq!(
            rep.render(Format::Records),
            "suite=\"demo\" id=\"a\" status=pass location=\"Table 2\"\n\
             suite=\"demo\" id=\"b\" status=fail location=\"Table 2\" residual=\"x\" note=\"n\"\n"
        );
        assert!(rep.has_failures());
        assert!(rep.render(Format::Table).ends_with("demo: 1 pass, 1 fail, 0 flagged\n"));
    }
}
