use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use fibrelab_oracle::{richardson_order, FdError};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Verdict {
    /// Passes when `value ≤ threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value >= threshold, value, threshold }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Result of one experiment. Timing is kept out of the serialized report so
/// that reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub metrics: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<String>,
    #[serde(skip)]
    pub csv: Vec<Table>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        Self {
            experiment: experiment.to_string(),
            config: config.clone(),
            metrics: BTreeMap::new(),
            verdicts: Vec::new(),
            tables: Vec::new(),
            csv: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(format!("{}.csv", t.name));
        self.csv.push(t);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.passed).collect()
    }

    pub fn find(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `report.json` and every table into `dir`, returning the paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let mut out = Vec::new();
        let path = dir.join("report.json");
        fs::write(&path, self.to_json()?).map_err(|e| CliError::Io(e.to_string()))?;
        out.push(path);
        for t in &self.csv {
            let path = dir.join(format!("{}.csv", t.name));
            fs::write(&path, t.to_csv()?).map_err(|e| CliError::Io(e.to_string()))?;
            out.push(path);
        }
        Ok(out)
    }
}

/// Least-squares log-log slope of `(x, |y|)`; `None` when every `|y|` is at
/// or below `floor`.
pub fn fit_slope(points: &[(f64, f64)], floor: f64) -> Option<f64> {
    if points.iter().all(|(_, y)| y.abs() <= floor) {
        return None;
    }
    Some(richardson_order::<FdError<()>>(points).unwrap_or(f64::NAN))
}

/// Smallest ratio of successive defects, with a ratio involving a defect at
/// or below `floor` counted as passing.
pub fn worst_decay(defects: &[f64], floor: f64) -> f64 {
    defects
        .windows(2)
        .map(|w| if w[1] <= floor { f64::INFINITY } else { w[0] / w[1] })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_fixed_order() {
        let mut t = Table::new("demo", &["n", "name", "value"]);
        t.push(vec![16usize.into(), "a,b".into(), 0.5.into()]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "n,name,value\n16,\"a,b\",5e-1\n");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec![1usize.into()]);
    }

    #[test]
    fn decay_helpers() {
        assert_eq!(worst_decay(&[1.0, 0.1, 1e-14], 1e-12), 10.0);
        assert!((fit_slope(&[(8.0, 1.0), (32.0, 0.25)], 0.0).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(fit_slope(&[(8.0, 1e-14), (16.0, 0.0)], 1e-12), None);
    }

    #[test]
    fn verdict_direction() {
        assert!(Verdict::at_most("x", 1.0, 1.0).passed);
        assert!(!Verdict::at_least("x", 3.9, 4.0).passed);
    }
}
