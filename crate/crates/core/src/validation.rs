//! Invariant checks shared by the `validate` command and the test suites.

use num_complex::Complex;

use crate::bohmian::{non_crossing, run_ensemble, EnsembleSpec};
use crate::error::Result;
use crate::model::{
    free_gaussian, interacting_nonreflecting, potential, ComplexWidth, Family, PacketParams,
    WaveField,
};
use crate::numerics::{
    evolve_reference, fd_derivative, l2_distance, DerivativeOrder, GridSpec, QuadratureSpec,
};
use crate::observables::{
    cdf, current_closed, current_from_coefficients, current_generic, moments, normalize,
    rho_closed, CurrentCoefficients,
};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            measured,
            passed: measured <= tolerance,
        }
    }
}

/// Deterministic quasi-random points in `[0, 1)²` (additive recurrence on
/// the plastic number).
pub fn probe_unit_square(n: usize) -> Vec<(f64, f64)> {
    let g = 1.324_717_957_244_746_f64;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    (1..=n)
        .map(|i| {
            let i = i as f64;
            ((0.5 + a1 * i).fract(), (0.5 + a2 * i).fract())
        })
        .collect()
}

/// Probe points `(x̄, t)` with `t ∈ [0, t_max]` and `x̄` inside `±span·σ_t` of
/// the free-Gaussian center.
pub fn packet_probes(p: &PacketParams<f64>, n: usize, t_max: f64, span: f64) -> Vec<(f64, f64)> {
    probe_unit_square(n)
        .into_iter()
        .map(|(u, v)| {
            let t = v * t_max;
            let w = ComplexWidth::at(t, p).sigma_t;
            let x = p.xc_bar + p.u_bar() * t + (2.0 * u - 1.0) * span * w;
            (x, t)
        })
        .collect()
}

/// Relative residual of `i∂ₜΨ = −½∂ₓ²Ψ + VΨ`, with both sides from
/// finite differences of `psi`. Central differences in `t` need `psi` to be
/// defined slightly before `t`; the closed forms are analytic there.
pub fn schrodinger_residual<F>(psi: F, p: &PacketParams<f64>, x: f64, t: f64) -> f64
where
    F: Fn(f64, f64) -> Complex<f64>,
{
    let h = 0.05;
    let dt: Complex<f64> = fd_derivative(|s| psi(x, s), t, DerivativeOrder::First, h).value;
    let dxx: Complex<f64> = fd_derivative(|y| psi(y, t), x, DerivativeOrder::Second, h).value;
    let v = potential(x, p);
    let f = psi(x, t);
    let lhs = Complex::new(0.0, 1.0) * dt;
    let rhs = -dxx * 0.5 + f * v;
    let scale = lhs.norm().max(rhs.norm()).max((f * v).norm());
    (lhs - rhs).norm() / scale
}

/// Relative residual of `∂ₜρ + ∂ₓj = 0` from central finite differences.
pub fn continuity_residual<R, J>(rho: R, j: J, x: f64, t: f64) -> f64
where
    R: Fn(f64, f64) -> f64,
    J: Fn(f64, f64) -> f64,
{
    let h = 0.05;
    let drho = fd_derivative(|s| rho(x, s), t, DerivativeOrder::First, h).value;
    let dj = fd_derivative(|y| j(y, t), x, DerivativeOrder::First, h).value;
    (drho + dj).abs() / drho.abs().max(dj.abs()).max(1e-12)
}

fn max_continuity<J: Fn(f64, f64) -> f64>(p: &PacketParams<f64>, n2: f64, j: J) -> f64 {
    packet_probes(p, 100, 20.0, 3.0)
        .into_iter()
        .map(|(x, t)| continuity_residual(|y, s| rho_closed(y, s, p, n2), &j, x, t))
        .fold(0.0, f64::max)
}

/// Continuity check for the closed-form `(ρ, j)` pair at 100 probes.
pub fn check_continuity(p: &PacketParams<f64>, n2: f64) -> Check {
    let worst = max_continuity(p, n2, |x, t| current_closed(x, t, p, n2));
    Check::at_most("continuity (closed rho, j)", worst, 1e-5)
}

/// Same check with `f₂` scaled by `1 + eps`; used to confirm the continuity
/// check actually sees the coefficient polynomials.
pub fn check_continuity_with_f2_scaled(p: &PacketParams<f64>, n2: f64, eps: f64) -> Check {
    let worst = max_continuity(p, n2, |x, t| {
        let mut c = CurrentCoefficients::scaled(x, t, p);
        c.f2 *= 1.0 + eps;
        current_from_coefficients(&c, x, t, p, n2)
    });
    Check::at_most("continuity (f2 perturbed)", worst, 1e-5)
}

pub fn check_schrodinger(p: &PacketParams<f64>, n: f64) -> Check {
    let worst = packet_probes(p, 50, 20.0, 3.0)
        .into_iter()
        .filter(|&(x, t)| interacting_nonreflecting(x, t, p, n).norm_sqr() > 1e-6)
        .map(|(x, t)| schrodinger_residual(|y, s| interacting_nonreflecting(y, s, p, n), p, x, t))
        .fold(0.0, f64::max);
    Check::at_most("schrodinger residual (i_nr)", worst, 1e-6)
}

pub fn check_closed_current(field: &WaveField<f64>) -> Result<Check> {
    let p = &field.params;
    let n2 = field.norm_constant * field.norm_constant;
    let mut worst = 0.0f64;
    for (x, t) in packet_probes(p, 100, 20.0, 4.0) {
        let rho = rho_closed(x, t, p, n2);
        if rho <= 1e-12 {
            continue;
        }
        let a = current_closed(x, t, p, n2);
        let b = current_generic(field, x, t)?;
        worst = worst.max((a - b).abs() / b.abs().max(rho));
    }
    Ok(Check::at_most(
        "closed current vs Im(psi* dpsi)",
        worst,
        1e-8,
    ))
}

/// Crank–Nicolson comparison at time `t` on `[−60, 60]` with 4096 points.
pub fn oracle_distance(field: &WaveField<f64>, t: f64, n_steps: usize) -> Result<f64> {
    let grid = GridSpec {
        x_min: -60.0,
        x_max: 60.0,
        n_points: 4096,
        t_final: t,
        n_steps,
    };
    let xs = grid.points();
    let psi0: Vec<Complex<f64>> = xs
        .iter()
        .map(|&x| field.eval(x, 0.0))
        .collect::<Result<_>>()?;
    let v: Vec<f64> = if field.family.is_interacting() {
        xs.iter().map(|&x| potential(x, &field.params)).collect()
    } else {
        vec![0.0; xs.len()]
    };
    let evolved = evolve_reference(&psi0, &v, &grid)?;
    let exact: Vec<Complex<f64>> = xs
        .iter()
        .map(|&x| field.eval(x, t))
        .collect::<Result<_>>()?;
    Ok(l2_distance(&evolved.psi, &exact, grid.dx()))
}

/// The anchors, residuals and trajectory properties of the reference
/// parameter set, plus the oracle comparison when `with_oracle` is set.
pub fn run_suite(
    p: &PacketParams<f64>,
    quad: &QuadratureSpec<f64>,
    with_oracle: bool,
) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let norm = normalize(Family::InteractingNonreflecting, p, quad)?;
    let reference = *p == PacketParams::default();
    if reference {
        checks.push(Check::at_most(
            "squared norm = 9/4",
            (norm.squared_norm - 2.25).abs(),
            1e-2,
        ));
    }
    let inr = WaveField::new(Family::InteractingNonreflecting, *p, *quad)?;
    let m0 = moments(&inr, 0.0)?;
    if reference {
        checks.push(Check::at_most(
            "<p>(0) = 11/9",
            (m0.mean_p - 11.0 / 9.0).abs(),
            1e-3,
        ));
        checks.push(Check::at_most(
            "<x>(0) = -94/9",
            (m0.mean_x + 94.0 / 9.0).abs(),
            1e-3,
        ));
    }
    let gauss_norm = {
        let w = ComplexWidth::at(0.0, p).sigma_t;
        crate::numerics::integrate_interval(
            |x: f64| free_gaussian(x, 0.0, p).norm_sqr(),
            p.xc_bar - 12.0 * w,
            p.xc_bar + 12.0 * w,
            24,
            quad,
        )?
        .value
    };
    checks.push(Check::at_most(
        "free Gaussian norm",
        (gauss_norm - 1.0).abs(),
        1e-10,
    ));
    checks.push(check_schrodinger(p, norm.norm_constant));
    let n2 = norm.norm_constant * norm.norm_constant;
    checks.push(check_continuity(p, n2));
    checks.push(check_closed_current(&inr)?);

    let spec = EnsembleSpec::deciles(16.0);
    let trs = run_ensemble(&inr, &spec)?;
    checks.push(Check {
        name: "non-crossing (i_nr deciles)".into(),
        tolerance: 0.0,
        measured: if non_crossing(&trs) { 0.0 } else { 1.0 },
        passed: non_crossing(&trs),
    });
    let mut worst = 0.0f64;
    for tr in &trs {
        let q = tr.quantile.expect("ensemble labels quantiles");
        for &t in &[4.0, 8.0, 16.0] {
            let x = tr.position_at(t).expect("sampled to 16");
            worst = worst.max((cdf(&inr, x, t)? - q).abs());
        }
    }
    checks.push(Check::at_most("equivariance (i_nr deciles)", worst, 5e-3));

    if with_oracle {
        for fam in [
            Family::InteractingNonreflecting,
            Family::FreeNonreflecting,
            Family::InteractingGaussian,
        ] {
            let f = WaveField::new(fam, *p, *quad)?;
            let d = oracle_distance(&f, 8.0, 4000)?;
            checks.push(Check::at_most(
                format!("Crank-Nicolson oracle ({fam}, t=8)"),
                d,
                1e-3,
            ));
        }
    }
    Ok(checks)
}
