use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lab::report::{EquivalenceReport, CSV_COLUMNS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExportFormat {
    #[default]
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

impl std::fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::parse(s, "expected `csv` or `json`")),
        }
    }
}

crate::descriptor::serde_via_str!(ExportFormat);

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

/// Writes `reports` sorted by scenario id. An empty list gives a
/// header-only CSV or an empty JSON array.
pub fn export_report(reports: &[EquivalenceReport], path: &Path, format: ExportFormat) -> Result<()> {
    let mut sorted: Vec<&EquivalenceReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    match format {
        ExportFormat::Csv => {
            let csv_err = |source| Error::Csv {
                path: path.to_owned(),
                source,
            };
            let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
            if sorted.is_empty() {
                w.write_record(CSV_COLUMNS).map_err(csv_err)?;
            }
            for r in sorted {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush().map_err(io_err(path))
        }
        ExportFormat::Json => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, &sorted).map_err(|source| Error::Json {
                path: path.to_owned(),
                source,
            })?;
            writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
        }
    }
}

pub fn read_reports(path: &Path, format: ExportFormat) -> Result<Vec<EquivalenceReport>> {
    match format {
        ExportFormat::Csv => {
            let csv_err = |source| Error::Csv {
                path: path.to_owned(),
                source,
            };
            let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
            r.deserialize().map(|row| row.map_err(csv_err)).collect()
        }
        ExportFormat::Json => {
            let file = File::open(path).map_err(io_err(path))?;
            serde_json::from_reader(BufReader::new(file)).map_err(|source| Error::Json {
                path: path.to_owned(),
                source,
            })
        }
    }
}
