//! `report operational`: per-solution operational time series derived
//! from a run's episode logs — manufacturing quantities, inventory
//! levels and per-market demand loss.

use std::path::Path;

use crate::csvio;
use crate::error::CliError;

/// Column projection of one log table by header prefixes.
fn project(
    header: &[String],
    rows: &[Vec<String>],
    prefixes: &[&str],
) -> (Vec<String>, Vec<Vec<String>>) {
    let mut keep: Vec<usize> = vec![0]; // the period column
    for (i, name) in header.iter().enumerate().skip(1) {
        if prefixes.iter().any(|p| name.starts_with(p)) {
            keep.push(i);
        }
    }
    let out_header = keep.iter().map(|&i| header[i].clone()).collect();
    let out_rows = rows
        .iter()
        .map(|row| keep.iter().map(|&i| row[i].clone()).collect())
        .collect();
    (out_header, out_rows)
}

fn write_projection(
    path: &Path,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Emits `manufacturing.csv`, `inventory.csv` and `demand_loss.csv`
/// under `out_dir/<solution>/` for every episode log of the run.
pub fn operational_report(run_dir: &Path, out_dir: &Path) -> Result<usize, CliError> {
    let logs_dir = run_dir.join("logs");
    if !logs_dir.is_dir() {
        return Err(CliError::Validation(format!(
            "{} holds no logs/ directory",
            run_dir.display()
        )));
    }
    let mut logs: Vec<_> = std::fs::read_dir(&logs_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    logs.sort();
    if logs.is_empty() {
        return Err(CliError::Validation(format!(
            "{} holds no episode logs",
            logs_dir.display()
        )));
    }

    for log_path in &logs {
        let (header, rows) = csvio::read_table(log_path)?;
        let solution = log_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("solution")
            .to_string();
        let dir = out_dir.join(&solution);
        std::fs::create_dir_all(&dir)?;

        let (h, r) = project(&header, &rows, &["prod_"]);
        write_projection(&dir.join("manufacturing.csv"), &h, &r)?;
        let (h, r) = project(&header, &rows, &["inv_"]);
        write_projection(&dir.join("inventory.csv"), &h, &r)?;
        let (h, r) = project(&header, &rows, &["demand_", "absorbed_", "loss_"]);
        write_projection(&dir.join("demand_loss.csv"), &h, &r)?;
    }
    Ok(logs.len())
}
