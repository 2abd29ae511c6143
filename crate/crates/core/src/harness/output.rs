//! Sweep results and their CSV form.

use std::path::Path;

use crate::{Error, Result};

pub const HEADER: [&str; 6] = ["sweep_value", "algorithm", "rmse_m", "trials", "mean_phi0", "seed"];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub sweep_value: String,
    pub algorithm: String,
    pub rmse_m: f64,
    pub trials: usize,
    pub mean_phi0: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn find(&self, sweep_value: &str, algorithm: &str) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.sweep_value == sweep_value && r.algorithm == algorithm)
    }
}

fn write_rows<W: std::io::Write>(w: W, result: &SweepResult) -> std::result::Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(HEADER)?;
    for r in &result.rows {
        // `{}` on f64 is locale independent and round-trips exactly.
        out.write_record([
            r.sweep_value.clone(),
            r.algorithm.clone(),
            format!("{}", r.rmse_m),
            r.trials.to_string(),
            r.mean_phi0.map(|p| format!("{p}")).unwrap_or_default(),
            r.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, result).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_rows(file, result).map_err(|source| Error::Csv { path: path.to_path_buf(), source })
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut rd = csv::Reader::from_path(path).map_err(csv_err)?;
    let bad = |what: &str, v: &str| Error::InvalidArgument(format!("{}: bad {what} '{v}'", path.display()));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != HEADER.len() {
            return Err(Error::InvalidArgument(format!("{}: expected 6 columns, got {}", path.display(), rec.len())));
        }
        rows.push(SweepRow {
            sweep_value: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            rmse_m: rec[2].parse().map_err(|_| bad("rmse_m", &rec[2]))?,
            trials: rec[3].parse().map_err(|_| bad("trials", &rec[3]))?,
            mean_phi0: if rec[4].is_empty() { None } else { Some(rec[4].parse().map_err(|_| bad("mean_phi0", &rec[4]))?) },
            seed: rec[5].parse().map_err(|_| bad("seed", &rec[5]))?,
        });
    }
    Ok(SweepResult { rows })
}
