//! CSV formats: fronts, solver histories, per-period episode logs and
//! demand traces. Floats are written with Rust's shortest round-trip
//! formatting, so reading a file back reproduces the exact values.

use std::path::Path;

use echelon_core::env::StepInfo;
use echelon_core::pareto::Front;
use echelon_core::scenario::ScenarioConfig;

use crate::error::CliError;

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes a front as `profit,neg_emission,neg_sl_inequality,solution_id`
/// with ids `sol-<k>` taken from the front's provenance.
pub fn write_front(path: &Path, front: &Front) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["profit", "neg_emission", "neg_sl_inequality", "solution_id"])?;
    for (point, id) in front.points.iter().zip(&front.provenance) {
        w.write_record([
            fmt_f64(point[0]),
            fmt_f64(point[1]),
            fmt_f64(point[2]),
            format!("sol-{id}"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a front CSV back into points and solution ids.
pub fn read_front(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<String>), CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let mut points = Vec::new();
    let mut ids = Vec::new();
    for record in r.records() {
        let record = record?;
        if record.len() < 4 {
            return Err(CliError::Runtime(format!(
                "{}: front rows need 4 columns",
                path.display()
            )));
        }
        let parse = |i: usize| -> Result<f64, CliError> {
            record[i]
                .parse()
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
        };
        points.push(vec![parse(0)?, parse(1)?, parse(2)?]);
        ids.push(record[3].to_string());
    }
    Ok((points, ids))
}

/// Generic history writer: a header plus rows of optional floats.
pub fn write_history(
    path: &Path,
    header: &[&str],
    rows: &[Vec<Option<f64>>],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_opt(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Episode-log column names for a scenario, in writing order.
pub fn episode_log_header(cfg: &ScenarioConfig) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    for m in &cfg.echelons.manufacturers {
        header.push(format!("prod_{m}"));
    }
    for m in &cfg.echelons.manufacturers {
        header.push(format!("req_prod_{m}"));
    }
    for node in cfg.echelons.destination_nodes() {
        header.push(format!("inv_{node}"));
    }
    for route in &cfg.routes {
        header.push(format!("ship_{}_{}", route.from, route.to));
    }
    header.extend(
        ["revenue", "production_cost", "transport_cost", "inventory_cost", "emission", "sl_inequality"]
            .map(String::from),
    );
    for market in &cfg.echelons.markets {
        header.push(format!("sl_{market}"));
    }
    header.push("penalty".to_string());
    for market in &cfg.echelons.markets {
        header.push(format!("demand_{market}"));
    }
    for market in &cfg.echelons.markets {
        header.push(format!("absorbed_{market}"));
    }
    for market in &cfg.echelons.markets {
        header.push(format!("loss_{market}"));
    }
    header
}

/// Writes one episode log, one row per period.
pub fn write_episode_log(
    path: &Path,
    cfg: &ScenarioConfig,
    log: &[StepInfo],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(episode_log_header(cfg))?;
    for info in log {
        let mut row: Vec<String> = vec![info.period.to_string()];
        row.extend(info.production.iter().map(|&v| fmt_f64(v)));
        row.extend(info.requested_production.iter().map(|&v| fmt_f64(v)));
        row.extend(info.inventories.iter().map(|&v| fmt_f64(v)));
        row.extend(info.shipments.iter().map(|&v| fmt_f64(v)));
        row.push(fmt_f64(info.revenue));
        row.push(fmt_f64(info.production_cost));
        row.push(fmt_f64(info.transport_cost));
        row.push(fmt_f64(info.inventory_cost));
        row.push(fmt_f64(info.emission));
        row.push(fmt_f64(info.sl_inequality));
        row.extend(info.service_levels.iter().map(|&v| fmt_f64(v)));
        row.push(fmt_f64(info.penalty));
        row.extend(info.demand.iter().map(|&v| fmt_f64(v)));
        row.extend(info.absorbed.iter().map(|&v| fmt_f64(v)));
        row.extend(info.demand_loss.iter().map(|&v| fmt_f64(v)));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads any headed CSV into (header, rows-of-strings).
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let header = r
        .headers()?
        .iter()
        .map(String::from)
        .collect::<Vec<String>>();
    let mut rows = Vec::new();
    for record in r.records() {
        rows.push(record?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// Writes a demand trace as `t,market_id,demand` rows.
pub fn write_trace(
    path: &Path,
    trace: &echelon_core::demand::DemandTrace,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "market_id", "demand"])?;
    for (market, series) in &trace.per_market {
        for (t, d) in series.iter().enumerate() {
            w.write_record([t.to_string(), market.to_string(), d.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
