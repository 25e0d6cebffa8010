use clap::ValueEnum;

use crate::error::CliError;
use crate::run::Output;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn csv_text<T: serde::Serialize>(rows: &[T], header: &[&str]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// DOT text for `dot`; the demo table for `counterexample` unless JSON is asked for;
/// otherwise the report as JSON or as check rows.
pub fn render(out: &Output, format: Option<Format>) -> Result<String, CliError> {
    if let Some(dot) = &out.dot {
        return Ok(dot.clone());
    }
    match (format, &out.rows) {
        (None | Some(Format::Csv), Some(rows)) => csv_text(rows, &["n", "element", "image", "distance"]),
        (Some(Format::Csv), None) => csv_text(&out.report.report.checks, &["check", "verdict", "witness", "value"]),
        (None | Some(Format::Json), _) => {
            let mut s = serde_json::to_string_pretty(&out.report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}
