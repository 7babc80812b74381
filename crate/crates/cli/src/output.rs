//! CSV tables with JSON sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

/// `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<String>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_num(v)))
                .map_err(err)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Config(format!("csv: {e}")))
    }
}

/// Writes `table` as `<out>/<name>.csv` plus `<name>.json`.
///
/// Files are written under a temporary name and renamed, so a failed run
/// leaves no partial output.
pub fn write_table(
    cfg: &RunConfig,
    command: &str,
    table: &Table,
    extra: Value,
) -> CliResult<PathBuf> {
    let bytes = table.to_csv()?;
    let csv_path = cfg.out.join(format!("{}.csv", table.name));
    let sidecar = json!({
        "file": format!("{}.csv", table.name),
        "command": command,
        "columns": table.header,
        "rows": table.rows.len(),
        "csv_sha256": hex::encode(Sha256::digest(&bytes)),
        "config_sha256": cfg.hash(),
        "config": config_value(cfg),
        "versions": versions(),
        "tolerances": tolerances(cfg),
        "details": extra,
    });
    atomic_write(&csv_path, &bytes)?;
    let json_path = cfg.out.join(format!("{}.json", table.name));
    atomic_write(&json_path, &pretty(&sidecar))?;
    Ok(csv_path)
}

pub fn write_json(cfg: &RunConfig, name: &str, value: &Value) -> CliResult<PathBuf> {
    let path = cfg.out.join(format!("{name}.json"));
    atomic_write(&path, &pretty(value))?;
    Ok(path)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s.into_bytes()
}

fn config_value(cfg: &RunConfig) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Some(map) = v.as_object_mut() {
        map.remove("out");
    }
    v
}

pub fn versions() -> Value {
    let core = qscatter::VERSION;
    json!({
        "qscatter-cli": env!("CARGO_PKG_VERSION"),
        "numerics": core,
        "model": core,
        "observables": core,
        "bohmian": core,
        "arrival": core,
    })
}

pub fn tolerances(cfg: &RunConfig) -> Value {
    json!({
        "quadrature": {
            "abs_tol": cfg.abs_tol,
            "rel_tol": cfg.rel_tol,
            "envelope_cut": cfg.envelope_cut,
            "max_subdivisions": cfg.max_subdivisions,
        },
        "ode": {
            "initial_step": cfg.ode_initial_step,
            "abs_tol": cfg.ode_abs_tol,
            "rel_tol": cfg.ode_rel_tol,
            "max_step": cfg.ode_max_step,
        },
        "velocity_rho_floor": qscatter::bohmian::RHO_FLOOR,
        "arrival_max_tail_bound": qscatter::arrival::MAX_TAIL_BOUND,
    })
}

fn atomic_write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(-10.0), "-10");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(999_999_999_999.6), "1e12");
        assert_eq!(fmt_num(-1.5e-5), "-1.5e-5");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("x", vec!["a".into(), "b".into()]);
        t.rows.push(vec![1.0, 0.5]);
        t.rows.push(vec![-2.0, 1e-20]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\n1,0.5\n-2,1e-20\n");
    }
}
