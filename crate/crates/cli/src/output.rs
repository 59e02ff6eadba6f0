//! Report serialization: JSON (sorted keys), CSV (fixed column order) and a
//! 17-significant-digit audit format.

use anyhow::{Context, Result};
use clap::ValueEnum;
use semicircle::report::Report;
use std::path::Path;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Pretty,
}

pub fn render(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => {
            let values: Vec<serde_json::Value> =
                reports.iter().map(|r| r.to_json_value()).collect();
            let mut text = serde_json::to_string_pretty(&values).expect("reports serialize");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut text = String::from(Report::csv_header());
            text.push('\n');
            for r in reports {
                text.push_str(&r.to_csv_row());
                text.push('\n');
            }
            text
        }
        Format::Pretty => {
            let mut text = String::new();
            for r in reports {
                text.push_str(&r.to_pretty());
                text.push('\n');
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            text.push_str(&format!("{passed}/{} reports passed\n", reports.len()));
            text
        }
    }
}

pub fn emit(reports: &[Report], format: Format, out: Option<&Path>) -> Result<()> {
    let text = render(reports, format);
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
