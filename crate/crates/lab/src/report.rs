//! Report emission: a JSON summary plus one plot-ready CSV per table.
//!
//! Table schemas (column order is stable):
//! - `functionals`: the columns of `FunctionalReport::columns`
//! - `samples_a<a>`: t, l2, hdot_<s₁>…, trtau, grad_linf, diff_<α>…,
//!   trtau_diff, remainder, linear (empty cell when not tracked)
//! - `sweep`: a, sup_diff_<α>…, t_star_<α>…, sup_trtau_diff, t_star_trtau
//! - `series`: t, value

use std::fs;
use std::path::{Path, PathBuf};

use oldroyd_core::functionals::FunctionalReport;
use serde::Serialize;

use crate::ensemble::MemberTrace;
use crate::experiments::SweepPoint;
use crate::scenario::Format;
use crate::LabError;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        Table {
            name: name.into(),
            columns,
            rows: vec![],
        }
    }

    pub fn from_reports(name: &str, reports: &[&FunctionalReport]) -> Self {
        let columns = reports
            .first()
            .map(|r| r.columns().into_iter().map(|c| c.0).collect())
            .unwrap_or_else(|| vec!["t".to_string()]);
        let mut t = Table::new(name, columns);
        t.rows = reports.iter().map(|r| r.columns().into_iter().map(|c| c.1).collect()).collect();
        t
    }

    pub fn from_trace(name: &str, m: &MemberTrace) -> Self {
        let first = m.samples.first();
        let mut columns = vec!["t".to_string(), "l2".to_string()];
        if let Some(s) = first {
            columns.extend(s.hdot.iter().map(|p| format!("hdot_{}", p.0)));
        }
        columns.extend(["trtau".to_string(), "grad_linf".to_string()]);
        if let Some(s) = first {
            columns.extend(s.diffs.iter().map(|p| format!("diff_{}", p.0)));
        }
        columns.extend(["trtau_diff", "remainder", "linear"].map(String::from));
        let mut t = Table::new(name, columns);
        for s in &m.samples {
            let mut row = vec![Some(s.t), Some(s.l2)];
            row.extend(s.hdot.iter().map(|p| Some(p.1)));
            row.extend([Some(s.trtau), Some(s.grad_linf)]);
            row.extend(s.diffs.iter().map(|p| Some(p.1)));
            row.extend([Some(s.trtau_diff), s.remainder, s.linear]);
            t.rows.push(row);
        }
        t
    }

    pub fn from_sweep(points: &[SweepPoint]) -> Self {
        let alphas: Vec<f64> = points.first().map(|p| p.sup_diff.iter().map(|d| d.0).collect()).unwrap_or_default();
        let mut columns = vec!["a".to_string()];
        columns.extend(alphas.iter().map(|a| format!("sup_diff_{a}")));
        columns.extend(alphas.iter().map(|a| format!("t_star_{a}")));
        columns.extend(["sup_trtau_diff", "t_star_trtau"].map(String::from));
        let mut t = Table::new("points", columns);
        for p in points {
            let mut row = vec![Some(p.a)];
            row.extend(p.sup_diff.iter().map(|d| Some(d.1)));
            row.extend(p.sup_diff.iter().map(|d| Some(d.2)));
            row.extend([Some(p.sup_trtau_diff), Some(p.t_star_trtau)]);
            t.rows.push(row);
        }
        t
    }

    pub fn from_series(name: &str, value: &str, series: &[(f64, f64)]) -> Self {
        let mut t = Table::new(name, vec!["t".into(), value.into()]);
        t.rows = series.iter().map(|&(x, y)| vec![Some(x), Some(y)]).collect();
        t
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), LabError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map(|x| format!("{x:e}")).unwrap_or_default()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Tables of every member of a run (plus functionals when present).
pub fn trace_tables(members: &[MemberTrace]) -> Vec<Table> {
    let mut out = Vec::new();
    for m in members {
        out.push(Table::from_trace(&format!("samples_a{}", m.a), m));
        let reports: Vec<&FunctionalReport> = m.samples.iter().filter_map(|s| s.report.as_ref()).collect();
        if !reports.is_empty() {
            out.push(Table::from_reports(&format!("functionals_a{}", m.a), &reports));
        }
    }
    out
}

/// Write `<stem>.json` and `<stem>_<table>.csv` under `dir`.
pub fn emit_report<T: Serialize>(
    dir: &Path,
    stem: &str,
    summary: &T,
    tables: &[Table],
    formats: &[Format],
) -> Result<Vec<PathBuf>, LabError> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if formats.contains(&Format::Json) {
        let p = dir.join(format!("{stem}.json"));
        fs::write(&p, serde_json::to_string_pretty(summary)?)?;
        written.push(p);
    }
    if formats.contains(&Format::Csv) {
        for t in tables {
            let p = dir.join(format!("{stem}_{}.csv", t.name));
            t.write_csv(&p)?;
            written.push(p);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::fit_power_law;

    #[test]
    fn empty_results_are_well_formed() {
        let dir = tempfile::tempdir().unwrap();
        let empty: Vec<crate::fit::FitResult> = vec![];
        let files = emit_report(
            dir.path(),
            "empty",
            &empty,
            &[Table::new("series", vec!["t".into(), "value".into()])],
            &[Format::Csv, Format::Json],
        )
        .unwrap();
        assert_eq!(files.len(), 2);
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), "[]");
        assert_eq!(fs::read_to_string(&files[1]).unwrap(), "t,value\n");
    }

    #[test]
    fn json_round_trip_and_row_count() {
        let dir = tempfile::tempdir().unwrap();
        let s: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, (1.0 + i as f64).powf(-0.5))).collect();
        let fits = vec![
            fit_power_law(&s, (0.0, 100.0)).unwrap().named("x"),
            crate::fit::FitResult::skipped("y", crate::fit::Abscissa::LogA, [0.0, 1.0], "zero"),
        ];
        let files = emit_report(
            dir.path(),
            "r",
            &fits,
            &[Table::from_series("series", "y", &s)],
            &[Format::Json, Format::Csv],
        )
        .unwrap();
        let back: Vec<crate::fit::FitResult> = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert_eq!(back, fits);
        let mut rdr = csv::Reader::from_path(&files[1]).unwrap();
        assert_eq!(rdr.records().count(), s.len());
    }
}
