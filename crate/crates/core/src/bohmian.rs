//! Bohmian velocity fields and trajectory ensembles.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::{ComplexWidth, PacketParams, WaveField};
use crate::numerics::{ode_integrate_dense, OdeSpec, Trajectory};
use crate::observables::{f3, quantile};
use crate::real::Real;

/// Density below which the velocity `j/ρ` is not evaluated.
pub const RHO_FLOOR: f64 = 1e-12;

/// `v = ℑ(∂ₓΨ/Ψ)` at `(x̄, t)`.
pub fn velocity<T: Real>(field: &WaveField<T>, x: T, t: T) -> Result<T> {
    let (psi, dpsi) = field.eval_with_gradient(x, t)?;
    let rho = psi.norm_sqr();
    if !(rho > T::lit(RHO_FLOOR)) {
        return Err(Error::NodeProximity {
            x: x.as_f64(),
            t: t.as_f64(),
            rho: rho.as_f64(),
        });
    }
    Ok((psi.conj() * dpsi).im / rho)
}

/// Closed-form initial velocity of the interacting nonreflecting packet.
pub fn initial_velocity_nr<T: Real>(x: T, p: &PacketParams<T>) -> T {
    let s2 = p.sigma0_bar * p.sigma0_bar;
    let s8 = s2 * s2 * s2 * s2;
    let d = x - p.xc_bar;
    let im = p.a_bar * (p.a_bar * x).tanh() + d / (T::lit(2.0) * s2);
    let den = p.k0_bar * p.k0_bar + im * im;
    p.u_bar() * f3(x, p) / (T::lit(16.0) * s8 * p.k0_bar) / den
}

/// Closed-form free-Gaussian trajectory `x̄_c + ūt + (σ_t/σ₀)(x₀ − x̄_c)`.
pub fn gaussian_trajectory<T: Real>(x0: T, t: T, p: &PacketParams<T>) -> T {
    let w = ComplexWidth::at(t, p);
    p.xc_bar + p.u_bar() * t + w.sigma_t / p.sigma0_bar * (x0 - p.xc_bar)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec<T> {
    /// Launch quantiles of `ρ(·, 0)`, strictly increasing in `(0, 1)`.
    pub quantiles: Vec<T>,
    pub t_final: T,
    pub ode: OdeSpec<T>,
    /// Output sampling interval.
    pub cadence: T,
}

impl<T: Real> EnsembleSpec<T> {
    /// Launches at `0.1, 0.2, …, 0.9`.
    pub fn deciles(t_final: T) -> Self {
        Self {
            quantiles: (1..10).map(|i| T::from_count(i) / T::lit(10.0)).collect(),
            t_final,
            ode: OdeSpec::default(),
            cadence: T::lit(0.05),
        }
    }

    pub fn n_traj(&self) -> usize {
        self.quantiles.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.ode.validate()?;
        if self.quantiles.len() < 2 {
            return Err(invalid("an ensemble needs at least two quantiles"));
        }
        if !self
            .quantiles
            .iter()
            .all(|&q| q > T::zero() && q < T::one())
        {
            return Err(invalid("quantiles must lie in (0, 1)"));
        }
        if !self.quantiles.windows(2).all(|w| w[1] > w[0]) {
            return Err(invalid("quantiles must be strictly increasing"));
        }
        if !(self.t_final > T::zero()) || !(self.cadence > T::zero()) {
            return Err(invalid("t_final and cadence must be positive"));
        }
        Ok(())
    }
}

/// Positions splitting `ρ(·, 0)` at the given cumulative fractions.
pub fn launch_positions<T: Real>(field: &WaveField<T>, quantiles: &[T]) -> Result<Vec<T>> {
    quantiles
        .par_iter()
        .map(|&q| quantile(field, q, T::zero()))
        .collect()
}

/// Trajectory from `x0` at `t = 0` to `t_final`, sampled every `cadence`.
pub fn run_from<T: Real>(
    field: &WaveField<T>,
    x0: T,
    t_final: T,
    ode: &OdeSpec<T>,
    cadence: T,
) -> Result<Trajectory<T>> {
    let sol = ode_integrate_dense(
        |x, t| velocity(field, x, t).ok(),
        x0,
        T::zero(),
        t_final,
        ode,
    )?;
    Ok(sol.to_trajectory(cadence))
}

/// Integrates every launch in parallel; results come back sorted by `x0`.
pub fn run_ensemble<T: Real>(
    field: &WaveField<T>,
    spec: &EnsembleSpec<T>,
) -> Result<Vec<Trajectory<T>>> {
    spec.validate()?;
    let starts = launch_positions(field, &spec.quantiles)?;
    let mut out: Vec<Trajectory<T>> = spec
        .quantiles
        .par_iter()
        .zip(starts.par_iter())
        .map(|(&q, &x0)| {
            let mut tr =
                run_from(field, x0, spec.t_final, &spec.ode, spec.cadence).map_err(|e| {
                    Error::Trajectory {
                        quantile: q.as_f64(),
                        source: Box::new(e),
                    }
                })?;
            tr.quantile = Some(q);
            Ok(tr)
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.x0.partial_cmp(&b.x0).expect("finite launch positions"));
    Ok(out)
}

/// True when no pair of trajectories changes order at any common sample.
pub fn non_crossing<T: Real>(trajectories: &[Trajectory<T>]) -> bool {
    let mut sorted: Vec<&Trajectory<T>> = trajectories.iter().collect();
    sorted.sort_by(|a, b| a.x0.partial_cmp(&b.x0).expect("finite launch positions"));
    sorted.windows(2).all(|w| {
        w[0].samples
            .iter()
            .zip(&w[1].samples)
            .all(|(a, b)| a.0 == b.0 && a.1 < b.1)
    })
}
