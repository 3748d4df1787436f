//! Table data files.
//!
//! Every table ships as a TOML file under `data/`; the files are embedded
//! into the binary and can be overridden with a directory on disk. Field
//! formats are documented at the top of each file.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const CATALOG_FILE: &str = "catalog.toml";
pub const BRACKETS_FILE: &str = "brackets.toml";
pub const SUBALGEBRAS_FILE: &str = "subalgebras.toml";
pub const TABLE3_FILE: &str = "table3.toml";
pub const TABLE4_FILE: &str = "table4.toml";
pub const GRID_FILE: &str = "grid.toml";
pub const GRID1_FILE: &str = "grid1.toml";
pub const CONSERVATION_FILE: &str = "conservation.toml";

pub const ALL_FILES: [&str; 8] = [
    CATALOG_FILE,
    BRACKETS_FILE,
    SUBALGEBRAS_FILE,
    TABLE3_FILE,
    TABLE4_FILE,
    GRID_FILE,
    GRID1_FILE,
    CONSERVATION_FILE,
];

fn embedded(name: &str) -> &'static str {
    match name {
        CATALOG_FILE => include_str!("../data/catalog.toml"),
        BRACKETS_FILE => include_str!("../data/brackets.toml"),
        SUBALGEBRAS_FILE => include_str!("../data/subalgebras.toml"),
        TABLE3_FILE => include_str!("../data/table3.toml"),
        TABLE4_FILE => include_str!("../data/table4.toml"),
        GRID_FILE => include_str!("../data/grid.toml"),
        GRID1_FILE => include_str!("../data/grid1.toml"),
        CONSERVATION_FILE => include_str!("../data/conservation.toml"),
        _ => unreachable!("unknown data file {name}"),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRow {
    pub index: usize,
    /// `xi^t, xi^x, xi^y` in the expression grammar.
    pub xi: [String; 3],
    pub class: String,
    pub psi: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    generator: Vec<GeneratorRow>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketTable {
    /// `rows[i][j]` is the printed value of `[X(i+1), X(j+1)]`.
    pub rows: Vec<Vec<String>>,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraRow {
    pub name: String,
    /// Generators as printed; each is a combination or an unparseable token.
    pub generators: Vec<String>,
    /// Set when the printed entry is known to contain a typo.
    #[serde(default)]
    pub as_printed: bool,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubalgebraFile {
    algebra: Vec<AlgebraRow>,
}

/// An alternative reading of a misprinted entry.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reading {
    pub label: String,
    pub expr: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table3Row {
    pub id: String,
    pub potential: String,
    /// Combination of catalog generators; empty for the pure `u d_u` row.
    pub generator: String,
    /// Extra `u d_u` coefficient, e.g. `"u"` for `X11 = u d_u`.
    #[serde(default)]
    pub eta: String,
    /// Printed coefficient `lambda` of `lambda psi u d_u`, when shown.
    #[serde(default)]
    pub printed_lambda: Option<String>,
    #[serde(default)]
    pub invariants: Vec<String>,
    /// Alternative readings of individual invariants, `[printed, alternative]`.
    #[serde(default)]
    pub invariant_alternates: Vec<[String; 2]>,
    pub noether: bool,
    #[serde(default)]
    pub conservation: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Table3File {
    row: Vec<Table3Row>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table4Row {
    pub id: String,
    pub potential: String,
    pub generators: String,
    #[serde(default = "yes")]
    pub noether: bool,
    #[serde(default)]
    pub alternates: Vec<Reading>,
    #[serde(default)]
    pub note: String,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Table4File {
    row: Vec<Table4Row>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRow {
    pub id: String,
    pub potential: String,
    pub algebra: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    row: Vec<GridRow>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1Row {
    pub id: String,
    pub potential: String,
    pub generators: Vec<String>,
    #[serde(default)]
    pub alternates: Vec<Reading>,
    #[serde(default)]
    pub note: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid1File {
    row: Vec<Grid1Row>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentReading {
    pub label: String,
    /// One of `t`, `x`, `y`.
    pub component: String,
    pub expr: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConservationRow {
    pub id: String,
    /// Id of the Table 3 row whose potential and symmetry this law belongs to.
    pub symmetry: String,
    pub t: String,
    pub x: String,
    pub y: String,
    /// Label of the printed reading when alternates exist.
    #[serde(default)]
    pub printed_label: String,
    #[serde(default)]
    pub alternates: Vec<ComponentReading>,
    #[serde(default)]
    pub canonical: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConservationFile {
    law: Vec<ConservationRow>,
}

/// All tables, parsed but not yet interpreted.
#[derive(Clone, Debug)]
pub struct DataSet {
    pub catalog: Vec<GeneratorRow>,
    pub brackets: BracketTable,
    pub subalgebras: Vec<AlgebraRow>,
    pub table3: Vec<Table3Row>,
    pub table4: Vec<Table4Row>,
    pub grid: Vec<GridRow>,
    pub grid1: Vec<Grid1Row>,
    pub conservation: Vec<ConservationRow>,
}

fn decode<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Data {
        file: name.to_string(),
        reason: e.to_string(),
    })
}

impl DataSet {
    pub fn embedded() -> Result<DataSet> {
        DataSet::from_source(|name| Ok(embedded(name).to_string()))
    }

    /// Loads every table from `dir`; a missing file is an error.
    pub fn from_dir(dir: &Path) -> Result<DataSet> {
        DataSet::from_source(|name| {
            let p = dir.join(name);
            std::fs::read_to_string(&p).map_err(|_| Error::MissingData(p))
        })
    }

    fn from_source(mut read: impl FnMut(&str) -> Result<String>) -> Result<DataSet> {
        let catalog: CatalogFile = decode(CATALOG_FILE, &read(CATALOG_FILE)?)?;
        let brackets: BracketTable = decode(BRACKETS_FILE, &read(BRACKETS_FILE)?)?;
        let subalgebras: SubalgebraFile = decode(SUBALGEBRAS_FILE, &read(SUBALGEBRAS_FILE)?)?;
        let table3: Table3File = decode(TABLE3_FILE, &read(TABLE3_FILE)?)?;
        let table4: Table4File = decode(TABLE4_FILE, &read(TABLE4_FILE)?)?;
        let grid: GridFile = decode(GRID_FILE, &read(GRID_FILE)?)?;
        let grid1: Grid1File = decode(GRID1_FILE, &read(GRID1_FILE)?)?;
        let conservation: ConservationFile = decode(CONSERVATION_FILE, &read(CONSERVATION_FILE)?)?;
        let n = brackets.rows.len();
        if brackets.rows.iter().any(|r| r.len() != n) {
            return Err(Error::Data {
                file: BRACKETS_FILE.into(),
                reason: "bracket table is not square".into(),
            });
        }
        Ok(DataSet {
            catalog: catalog.generator,
            brackets,
            subalgebras: subalgebras.algebra,
            table3: table3.row,
            table4: table4.row,
            grid: grid.row,
            grid1: grid1.row,
            conservation: conservation.law,
        })
    }

    pub fn algebra(&self, name: &str) -> Option<&AlgebraRow> {
        self.subalgebras.iter().find(|a| a.name == name)
    }

    pub fn table3_row(&self, id: &str) -> Option<&Table3Row> {
        self.table3.iter().find(|r| r.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_tables_parse() {
        let d = DataSet::embedded().unwrap();
        assert_eq!(d.catalog.len(), 10);
        assert_eq!(d.brackets.rows.len(), 10);
        assert_eq!(d.table4.len(), 20);
        assert_eq!(d.conservation.len(), 10);
    }

    #[test]
    fn missing_directory_is_reported() {
        let err = DataSet::from_dir(Path::new("/nonexistent/kgsym-data")).unwrap_err();
        assert!(matches!(err, Error::MissingData(_)));
    }
}
