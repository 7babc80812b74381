//! Flat JSON run configuration. Every field has a default; a config file
//! only needs the keys it changes.

use std::path::{Path, PathBuf};

use qscatter::{EnsembleSpec64, Family, OdeSpec64, PacketParams64, QuadratureSpec64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub a_bar: f64,
    pub sigma0_bar: f64,
    pub xc_bar: f64,
    pub k0_bar: f64,
    /// Family tags: `i_nr`, `f_nr`, `f_G`, `i_G`.
    pub families: Vec<String>,
    /// Snapshot times for `density`.
    pub times: Vec<f64>,
    pub detectors: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    /// End of the `moments` and `trajectories` time range.
    pub t_final: f64,
    pub moment_step: f64,
    pub cadence: f64,
    /// Arrival horizon; per-detector default when absent.
    pub t_max: Option<f64>,
    pub arrival_dt: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub envelope_cut: f64,
    pub max_subdivisions: usize,
    pub ode_initial_step: f64,
    pub ode_abs_tol: f64,
    pub ode_rel_tol: f64,
    pub ode_max_step: f64,
    /// Output directory; not part of the config hash.
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PacketParams64::default();
        let q = QuadratureSpec64::default();
        let o = OdeSpec64::default();
        Self {
            a_bar: p.a_bar,
            sigma0_bar: p.sigma0_bar,
            xc_bar: p.xc_bar,
            k0_bar: p.k0_bar,
            families: ["i_nr", "f_nr", "f_G"].map(String::from).to_vec(),
            times: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            detectors: vec![2.0, 4.0, 6.0],
            quantiles: (1..10).map(|i| i as f64 / 10.0).collect(),
            x_min: -30.0,
            x_max: 40.0,
            n_x: 2000,
            t_final: 20.0,
            moment_step: 0.25,
            cadence: 0.05,
            t_max: None,
            arrival_dt: 0.05,
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            envelope_cut: q.envelope_cut,
            max_subdivisions: q.max_subdivisions,
            ode_initial_step: o.initial_step,
            ode_abs_tol: o.abs_tol,
            ode_rel_tol: o.rel_tol,
            ode_max_step: o.max_step,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Overrides {
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a_bar: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xc: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k0: Option<f64>,
    /// Comma-separated detector positions.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub detectors: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(o: &Overrides) -> CliResult<Self> {
        let mut c = match &o.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        if let Some(v) = o.a_bar {
            c.a_bar = v;
        }
        if let Some(v) = o.sigma0 {
            c.sigma0_bar = v;
        }
        if let Some(v) = o.xc {
            c.xc_bar = v;
        }
        if let Some(v) = o.k0 {
            c.k0_bar = v;
        }
        if let Some(v) = &o.detectors {
            c.detectors = v.clone();
        }
        if o.t_max.is_some() {
            c.t_max = o.t_max;
        }
        if let Some(v) = &o.out {
            c.out = v.clone();
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        self.params()?;
        self.quadrature().validate()?;
        self.ode().validate()?;
        if self.families.is_empty() {
            return bad("families must not be empty");
        }
        let fams = self.family_list()?;
        if (1..fams.len()).any(|i| fams[..i].contains(&fams[i])) {
            return bad("families must not repeat");
        }
        if self.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("times must be finite and non-negative");
        }
        if self.detectors.iter().any(|d| !d.is_finite()) {
            return bad("detectors must be finite");
        }
        self.ensemble().validate()?;
        if !(self.x_min < self.x_max) || self.n_x < 2 {
            return bad("density grid needs x_min < x_max and n_x >= 2");
        }
        if !(self.t_final > 0.0) || !(self.moment_step > 0.0) || !(self.arrival_dt > 0.0) {
            return bad("t_final, moment_step and arrival_dt must be positive");
        }
        if self.t_max.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
            return bad("t_max must be positive");
        }
        Ok(())
    }

    pub fn params(&self) -> CliResult<PacketParams64> {
        Ok(PacketParams64::new(
            self.a_bar,
            self.sigma0_bar,
            self.xc_bar,
            self.k0_bar,
        )?)
    }

    pub fn family_list(&self) -> CliResult<Vec<Family>> {
        self.families
            .iter()
            .map(|s| {
                s.parse()
                    .map_err(|e: qscatter::Error| CliError::Config(e.to_string()))
            })
            .collect()
    }

    pub fn quadrature(&self) -> QuadratureSpec64 {
        QuadratureSpec64 {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            envelope_cut: self.envelope_cut,
            max_subdivisions: self.max_subdivisions,
        }
    }

    pub fn ode(&self) -> OdeSpec64 {
        OdeSpec64 {
            initial_step: self.ode_initial_step,
            abs_tol: self.ode_abs_tol,
            rel_tol: self.ode_rel_tol,
            max_step: self.ode_max_step,
        }
    }

    pub fn ensemble(&self) -> EnsembleSpec64 {
        EnsembleSpec64 {
            quantiles: self.quantiles.clone(),
            t_final: self.t_final,
            ode: self.ode(),
            cadence: self.cadence,
        }
    }

    /// SHA-256 of the canonical JSON form with `out` cleared.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_set() {
        let c = RunConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.params().unwrap(), PacketParams64::default());
        assert_eq!(c.quantiles.len(), 9);
    }

    #[test]
    fn partial_file_and_overrides() {
        let c: RunConfig =
            serde_json::from_str(r#"{"xc_bar": -12.0, "detectors": [3.0]}"#).unwrap();
        assert_eq!(c.xc_bar, -12.0);
        assert_eq!(c.a_bar, 1.0);
        let o = Overrides {
            k0: Some(1.5),
            detectors: Some(vec![1.0, 2.0]),
            ..Default::default()
        };
        let r = RunConfig::resolve(&o).unwrap();
        assert_eq!(r.k0_bar, 1.5);
        assert_eq!(r.detectors, vec![1.0, 2.0]);
    }

    #[test]
    fn unknown_keys_and_empty_families_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"abar": 1.0}"#).is_err());
        let c = RunConfig {
            families: vec![],
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunConfig::default();
        let b = RunConfig {
            out: PathBuf::from("elsewhere"),
            ..Default::default()
        };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig {
            k0_bar: 1.1,
            ..Default::default()
        };
        assert_ne!(a.hash(), c.hash());
    }
}
