use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputSpec;
use super::experiment::{ResultsTable, TrialRecord};
use crate::solvers::Program;
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "k",
    "regime",
    "program",
    "trials",
    "successes",
    "success_rate",
    "mean_error",
    "max_error",
    "cert_pass_rate",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    PlotData,
}

/// Success rate against `k` for one regime and program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub regime: String,
    pub program: Program,
    pub k: Vec<usize>,
    pub success_rate: Vec<f64>,
}

pub fn plot_series(table: &ResultsTable) -> Vec<PlotSeries> {
    let mut series: Vec<PlotSeries> = Vec::new();
    for c in &table.cells {
        match series.iter_mut().find(|s| s.regime == c.regime && s.program == c.program) {
            Some(s) => {
                s.k.push(c.k);
                s.success_rate.push(c.success_rate);
            }
            None => series.push(PlotSeries {
                regime: c.regime.clone(),
                program: c.program,
                k: vec![c.k],
                success_rate: vec![c.success_rate],
            }),
        }
    }
    series
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes `table` to `path` in `format`.
pub fn report(table: &ResultsTable, format: ReportFormat, path: &Path) -> Result<()> {
    if table.cells.is_empty() {
        return Err(Error::EmptyResults("results non-empty".into()));
    }
    match format {
        ReportFormat::Json => write_json(path, table),
        ReportFormat::PlotData => write_json(path, &plot_series(table)),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(create(path)?);
            w.write_record(CSV_HEADER)?;
            for c in &table.cells {
                w.write_record([
                    c.k.to_string(),
                    c.regime.clone(),
                    c.program.to_string(),
                    c.trials.to_string(),
                    c.successes.to_string(),
                    format!("{:?}", c.success_rate),
                    opt(c.mean_error),
                    opt(c.max_error),
                    opt(c.cert_pass_rate),
                ])?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
    }
}

/// Writes every output named in `spec`.
pub fn write_outputs(table: &ResultsTable, records: &[TrialRecord], spec: &OutputSpec) -> Result<()> {
    if let Some(p) = &spec.csv {
        report(table, ReportFormat::Csv, p)?;
    }
    if let Some(p) = &spec.json {
        report(table, ReportFormat::Json, p)?;
    }
    if let Some(p) = &spec.plotdata {
        report(table, ReportFormat::PlotData, p)?;
    }
    if let Some(p) = &spec.trials {
        write_json(p, &records)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::CellSummary;

    fn table(cells: Vec<CellSummary>) -> ResultsTable {
        ResultsTable { matrix_id: "00".into(), seed: 1, cells, failures: vec![] }
    }

    fn cell(k: usize, rate: f64) -> CellSummary {
        CellSummary {
            k,
            regime: "noiseless".into(),
            program: Program::P,
            trials: 3,
            successes: (rate * 3.0) as usize,
            success_rate: rate,
            mean_error: Some(0.1 + 0.2),
            max_error: Some(1e-300),
            cert_pass_rate: None,
            certificates: 0,
        }
    }

    #[test]
    fn empty_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = report(&table(vec![]), ReportFormat::Csv, &dir.path().join("a.csv")).unwrap_err();
        assert!(err.to_string().contains("results non-empty"));
    }

    #[test]
    fn single_cell_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        report(&table(vec![cell(2, 1.0)]), ReportFormat::Csv, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "2,noiseless,p,3,3,1.0,0.30000000000000004,1e-300,");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.json");
        let t = table(vec![cell(1, 1.0), cell(2, 2.0 / 3.0)]);
        report(&t, ReportFormat::Json, &path).unwrap();
        let back: ResultsTable = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn io_errors_carry_path() {
        let err = report(&table(vec![cell(1, 1.0)]), ReportFormat::Json, Path::new("/nonexistent/dir/x.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.json"));
    }

    #[test]
    fn plot_series_groups_by_regime_and_program() {
        let s = plot_series(&table(vec![cell(1, 1.0), cell(2, 0.5)]));
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].k, vec![1, 2]);
        assert_eq!(s[0].success_rate, vec![1.0, 0.5]);
    }
}
