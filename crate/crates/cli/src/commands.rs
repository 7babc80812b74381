//! One function per subcommand. Each computes its tables in full before
//! anything is written, so a numeric failure leaves the output directory
//! untouched.

use std::path::PathBuf;

use qscatter::arrival::{arrival_width, default_t_max, detector_sweep};
use qscatter::bohmian::{initial_velocity_nr, run_ensemble, run_from, velocity};
use qscatter::model::{Quantity, ScaledUnits};
use qscatter::observables::{current_generic, moments, rho_generic};
use qscatter::validation::run_suite;
use qscatter::{Family, WaveField64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_num, tolerances, versions, write_json, write_table, Table};

fn fields(cfg: &RunConfig) -> CliResult<Vec<WaveField64>> {
    let p = cfg.params()?;
    let q = cfg.quadrature();
    cfg.family_list()?
        .into_iter()
        .map(|f| Ok(WaveField64::new(f, p, q)?))
        .collect()
}

fn field(cfg: &RunConfig, family: Family) -> CliResult<WaveField64> {
    Ok(WaveField64::new(family, cfg.params()?, cfg.quadrature())?)
}

/// `n + 1` evenly spaced points on `[0, end]` with spacing close to `step`.
fn time_axis(end: f64, step: f64) -> Vec<f64> {
    let n = ((end / step).round() as usize).max(1);
    (0..=n).map(|i| end * i as f64 / n as f64).collect()
}

fn header(first: &str, prefix: &str, fields: &[WaveField64]) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain(fields.iter().map(|f| format!("{prefix}_{}", f.family)))
        .collect()
}

pub fn density(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let fs = fields(cfg)?;
    let n = cfg.n_x;
    let xs: Vec<f64> = (0..n)
        .map(|i| cfg.x_min + (cfg.x_max - cfg.x_min) * i as f64 / (n - 1) as f64)
        .collect();
    let mut tables = Vec::new();
    for &t in &cfg.times {
        let rows: Vec<Vec<f64>> = xs
            .par_iter()
            .map(|&x| {
                let mut row = vec![x];
                for f in &fs {
                    row.push(rho_generic(f, x, t)?);
                }
                Ok(row)
            })
            .collect::<qscatter::Result<_>>()?;
        let mut table = Table::new(
            format!("density_t{}", fmt_num(t)),
            header("x_bar", "rho", &fs),
        );
        table.rows = rows;
        tables.push((table, json!({ "t": t })));
    }
    tables
        .iter()
        .map(|(t, extra)| write_table(cfg, "density", t, extra.clone()))
        .collect()
}

pub fn moments_cmd(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let fs = fields(cfg)?;
    let ts = time_axis(cfg.t_final, cfg.moment_step);
    let mut tables = Vec::new();
    for f in &fs {
        let rows: Vec<Vec<f64>> = ts
            .par_iter()
            .map(|&t| moments(f, t).map(|m| vec![t, m.mean_x, m.mean_p, m.delta_x]))
            .collect::<qscatter::Result<_>>()?;
        let mut table = Table::new(
            format!("moments_{}", f.family),
            ["t", "mean_x", "mean_p", "delta_x"]
                .map(String::from)
                .to_vec(),
        );
        table.rows = rows;
        tables.push((
            table,
            json!({ "family": f.family.tag(), "norm_constant": f.norm_constant }),
        ));
    }
    tables
        .iter()
        .map(|(t, extra)| write_table(cfg, "moments", t, extra.clone()))
        .collect()
}

pub fn arrival(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let fs = fields(cfg)?;
    let q = cfg.quadrature();
    let records = detector_sweep(&fs, &cfg.detectors, cfg.t_max, &q)
        .into_iter()
        .collect::<qscatter::Result<Vec<_>>>()?;
    let nd = cfg.detectors.len();
    let record = |fi: usize, di: usize| &records[fi * nd + di];

    let mut tables = Vec::new();
    let mut summary = Table::new(
        "arrival_summary",
        std::iter::once("x_d".to_string())
            .chain(fs.iter().map(|f| format!("tau_{}", f.family)))
            .chain(fs.iter().map(|f| format!("width_{}", f.family)))
            .collect(),
    );
    let mut diagnostics = Vec::new();
    for (di, &x_d) in cfg.detectors.iter().enumerate() {
        let t_max = cfg.t_max.unwrap_or_else(|| default_t_max(&fs[0], x_d));
        let ts = time_axis(t_max, cfg.arrival_dt);
        let rows: Vec<Vec<f64>> = ts
            .par_iter()
            .map(|&t| {
                let mut row = vec![t];
                for (fi, f) in fs.iter().enumerate() {
                    row.push(current_generic(f, x_d, t)?.abs() / record(fi, di).mass_captured);
                }
                Ok(row)
            })
            .collect::<qscatter::Result<_>>()?;
        let mut table = Table::new(
            format!("arrival_xd{}", fmt_num(x_d)),
            header("t", "pi", &fs),
        );
        table.rows = rows;
        let diag: Vec<Value> = fs
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                let r = record(fi, di);
                json!({
                    "family": f.family.tag(),
                    "tau": r.mean_time,
                    "width": arrival_width(r),
                    "mass_captured": r.mass_captured,
                    "signed_mass": r.signed_mass,
                    "backflow_fraction": r.backflow_fraction(),
                    "tail_bound": r.tail_bound,
                    "tail_extrapolated": r.tail_extrapolated,
                    "current_zeros": r.current_zeros,
                    "quadrature_nodes": r.t_grid.len(),
                })
            })
            .collect();
        diagnostics.push(json!({ "x_d": x_d, "t_max": t_max, "records": diag.clone() }));
        tables.push((
            table,
            json!({ "x_d": x_d, "t_max": t_max, "records": diag }),
        ));

        let mut row = vec![x_d];
        row.extend((0..fs.len()).map(|fi| record(fi, di).mean_time));
        row.extend((0..fs.len()).map(|fi| arrival_width(record(fi, di))));
        summary.rows.push(row);
    }
    tables.push((summary, json!({ "detectors": diagnostics })));
    tables
        .iter()
        .map(|(t, extra)| write_table(cfg, "arrival", t, extra.clone()))
        .collect()
}

pub fn trajectories(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let fs = fields(cfg)?;
    let spec = cfg.ensemble();
    let mut tables = Vec::new();
    for f in &fs {
        let trs = run_ensemble(f, &spec)?;
        let mut table = Table::new(
            format!("trajectories_{}", f.family),
            std::iter::once("t".to_string())
                .chain(
                    trs.iter()
                        .map(|tr| format!("x_q{}", fmt_num(tr.quantile.unwrap_or(f64::NAN)))),
                )
                .collect(),
        );
        let n = trs.iter().map(|tr| tr.samples.len()).min().unwrap_or(0);
        for k in 0..n {
            let mut row = vec![trs[0].samples[k].0];
            row.extend(trs.iter().map(|tr| tr.samples[k].1));
            table.rows.push(row);
        }
        let launches: Vec<f64> = trs.iter().map(|tr| tr.x0).collect();
        tables.push((
            table,
            json!({ "family": f.family.tag(), "launch_positions": launches }),
        ));
    }

    let p = cfg.params()?;
    let gauss = field(cfg, Family::FreeGaussian)?;
    let mut v0 = Table::new(
        "initial_velocity",
        ["x_bar", "v_nr_initial", "v_G_initial"]
            .map(String::from)
            .to_vec(),
    );
    v0.rows = (0..=600)
        .map(|i| {
            let x = p.xc_bar - 3.0 + 0.01 * i as f64;
            Ok(vec![
                x,
                initial_velocity_nr(x, &p),
                velocity(&gauss, x, 0.0)?,
            ])
        })
        .collect::<qscatter::Result<_>>()?;
    tables.push((v0, json!({ "t": 0.0 })));

    let nr = field(cfg, Family::InteractingNonreflecting)?;
    let x0 = moments(&nr, 0.0)?.mean_x;
    let path = run_from(&nr, x0, cfg.t_final, &spec.ode, spec.cadence)?;
    let ts = time_axis(cfg.t_final, cfg.moment_step);
    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&t| {
            let m = moments(&nr, t)?;
            Ok(vec![t, m.mean_x, path.position_at(t).unwrap_or(f64::NAN)])
        })
        .collect::<qscatter::Result<_>>()?;
    let mut mean = Table::new(
        "mean_vs_bohm",
        ["t", "mean_x", "x_bohm"].map(String::from).to_vec(),
    );
    mean.rows = rows;
    tables.push((mean, json!({ "family": "i_nr", "x0": x0 })));

    tables
        .iter()
        .map(|(t, extra)| write_table(cfg, "trajectories", t, extra.clone()))
        .collect()
}

pub fn validate(cfg: &RunConfig, with_oracle: bool) -> CliResult<PathBuf> {
    let checks = run_suite(&cfg.params()?, &cfg.quadrature(), with_oracle)?;
    for c in &checks {
        println!(
            "{} {}: measured {:.3e}, tolerance {:.1e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let report = json!({
        "config_sha256": cfg.hash(),
        "versions": versions(),
        "tolerances": tolerances(cfg),
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "tolerance": c.tolerance,
            "measured": c.measured,
            "passed": c.passed,
        })).collect::<Vec<_>>(),
        "failed": failed,
    });
    let path = write_json(cfg, "validate_report", &report)?;
    if failed > 0 {
        return Err(CliError::Validation {
            failed,
            total: checks.len(),
        });
    }
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Direction {
    ToScaled,
    ToPhysical,
}

/// Returns `(physical, scaled)`.
pub fn units(
    mass: f64,
    hbar: f64,
    quantity: Quantity,
    value: f64,
    dir: Direction,
) -> CliResult<(f64, f64)> {
    let u = ScaledUnits::new(mass, hbar)?;
    Ok(match dir {
        Direction::ToScaled => (value, u.to_scaled(quantity, value)),
        Direction::ToPhysical => (u.from_scaled(quantity, value), value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_axis_hits_both_ends() {
        let ts = time_axis(20.0, 0.25);
        assert_eq!(ts.len(), 81);
        assert_eq!(ts[0], 0.0);
        assert_eq!(ts[80], 20.0);
        assert_eq!(ts[1], 0.25);
    }

    #[test]
    fn unit_conversion_directions() {
        let (phys, scaled) = units(4.0, 1.0, Quantity::Position, 3.0, Direction::ToScaled).unwrap();
        assert_eq!((phys, scaled), (3.0, 6.0));
        let (phys, _) = units(4.0, 1.0, Quantity::Position, 6.0, Direction::ToPhysical).unwrap();
        assert_eq!(phys, 3.0);
        assert_eq!(
            units(1.0, 1.0, Quantity::Density, 0.3, Direction::ToScaled).unwrap(),
            (0.3, 0.3)
        );
        assert!(units(0.0, 1.0, Quantity::Position, 1.0, Direction::ToScaled).is_err());
    }
}
