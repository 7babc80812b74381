//! Densities, currents, moments and normalization.

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::model::{
    free_gaussian, nonreflecting_bracket, ComplexWidth, Family, PacketParams, WaveField,
};
use crate::numerics::{fd_derivative, integrate_interval, DerivativeOrder, QuadratureSpec};
use crate::real::{Bundle, Real};

/// `(ρ, j, v)` at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample<T> {
    pub x_bar: T,
    pub t: T,
    pub rho: T,
    pub j: T,
    /// `j/ρ`; NaN where `ρ = 0`.
    pub v: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRecord<T> {
    pub t: T,
    pub mean_x: T,
    pub mean_p: T,
    pub delta_x: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization<T> {
    pub norm_constant: T,
    pub squared_norm: T,
}

/// The four coefficient polynomials of the closed-form current, kept apart so
/// the mass dependence `f₃m³ + f₂m² + f₁m + f₀` stays explicit.
///
/// The cubic term of `f₂` is `ħt(x−x_c)³`; the other terms carry the overall
/// factor four.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentCoefficients<T> {
    pub f3: T,
    pub f2: T,
    pub f1: T,
    pub f0: T,
}

impl<T: Real> CurrentCoefficients<T> {
    /// Coefficients in any unit system (`k0` is a wave number).
    pub fn evaluate(x: T, t: T, hbar: T, a: T, sigma0: T, xc: T, k0: T) -> Self {
        let lit = T::lit;
        let d = x - xc;
        let th = (a * x).tanh();
        let s2 = sigma0 * sigma0;
        let s4 = s2 * s2;
        let s6 = s4 * s2;
        let s8 = s4 * s4;
        let ht = hbar * t;
        let f3 = lit(4.0)
            * (lit(4.0) * k0 * k0 * k0 * s8
                + k0 * s4 * (lit(2.0) * s2 + lit(4.0) * a * a * s4 + d * d)
                + lit(4.0) * a * k0 * s6 * d * th);
        let f2 = ht
            * (lit(4.0) * a * a * s4 * d + lit(4.0) * k0 * k0 * s4 * d
                - lit(4.0) * a * s2 * (s2 + lit(4.0) * k0 * k0 * s4 - d * d) * th
                + d * d * d);
        let f1 = ht
            * ht
            * (lit(2.0) * k0 * s2 * (T::one() + lit(2.0) * a * a * s2)
                - lit(4.0) * a * k0 * s2 * d * th);
        let f0 = a * ht * ht * ht * (a * d - th);
        Self { f3, f2, f1, f0 }
    }

    /// Scaled units (`ħ = 1`).
    pub fn scaled(x: T, t: T, p: &PacketParams<T>) -> Self {
        Self::evaluate(x, t, T::one(), p.a_bar, p.sigma0_bar, p.xc_bar, p.k0_bar)
    }

    /// `f₃m³ + f₂m² + f₁m + f₀`.
    pub fn combine(&self, mass: T) -> T {
        ((self.f3 * mass + self.f2) * mass + self.f1) * mass + self.f0
    }
}

pub fn f3<T: Real>(x: T, p: &PacketParams<T>) -> T {
    CurrentCoefficients::scaled(x, T::zero(), p).f3
}

pub fn f2<T: Real>(x: T, t: T, p: &PacketParams<T>) -> T {
    CurrentCoefficients::scaled(x, t, p).f2
}

pub fn f1<T: Real>(x: T, t: T, p: &PacketParams<T>) -> T {
    CurrentCoefficients::scaled(x, t, p).f1
}

pub fn f0<T: Real>(x: T, t: T, p: &PacketParams<T>) -> T {
    CurrentCoefficients::scaled(x, t, p).f0
}

/// Closed-form `ρ_i,nr` in scaled units; `norm2 = |N|²`.
pub fn rho_closed<T: Real>(x: T, t: T, p: &PacketParams<T>, norm2: T) -> T {
    let w = ComplexWidth::at(t, p);
    let xi = x - p.xc_bar - p.u_bar() * t;
    let st2 = w.sigma_t * w.sigma_t;
    let s2 = p.sigma0_bar * p.sigma0_bar;
    let two = T::lit(2.0);
    let re = p.k0_bar + t * xi / (T::lit(4.0) * s2 * st2);
    let im = p.a_bar * (p.a_bar * x).tanh() + xi / (two * st2);
    let env = (-xi * xi / (two * st2)).exp() / ((two * T::PI()).sqrt() * w.sigma_t);
    norm2 * (re * re + im * im) * env
}

/// Closed-form current from given coefficients (scaled units, `m = ħ = 1`).
pub fn current_from_coefficients<T: Real>(
    c: &CurrentCoefficients<T>,
    x: T,
    t: T,
    p: &PacketParams<T>,
    norm2: T,
) -> T {
    let w = ComplexWidth::at(t, p);
    let xi = x - p.xc_bar - p.u_bar() * t;
    let two = T::lit(2.0);
    let s0 = p.sigma0_bar;
    let den = (two * s0 * w.sigma_t).powi(5);
    let env = (-xi * xi / (two * w.sigma_t * w.sigma_t)).exp();
    norm2 * s0 * (two / T::PI()).sqrt() * c.combine(T::one()) / den * env
}

/// Closed-form `j_i,nr` in scaled units.
pub fn current_closed<T: Real>(x: T, t: T, p: &PacketParams<T>, norm2: T) -> T {
    current_from_coefficients(&CurrentCoefficients::scaled(x, t, p), x, t, p, norm2)
}

pub fn rho_generic<T: Real>(field: &WaveField<T>, x: T, t: T) -> Result<T> {
    Ok(field.eval(x, t)?.norm_sqr())
}

/// `ℑ(Ψ* ∂ₓΨ)` with the analytic derivative of the family.
pub fn current_generic<T: Real>(field: &WaveField<T>, x: T, t: T) -> Result<T> {
    let (psi, dpsi) = field.eval_with_gradient(x, t)?;
    Ok((psi.conj() * dpsi).im)
}

/// `ℑ(Ψ* ∂ₓΨ)` with `∂ₓ` from Richardson-extrapolated central differences
/// starting at step `h`; an independent check on the analytic derivatives.
pub fn current_fd<T: Real>(field: &WaveField<T>, x: T, t: T, h: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let psi = field.eval(x, t)?;
    let mut failure = None;
    let d = fd_derivative(
        |y| match field.eval(y, t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex::new(T::zero(), T::zero())
            }
        },
        x,
        DerivativeOrder::First,
        h,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((psi.conj() * d.value).im)
}

pub fn flow_sample<T: Real>(field: &WaveField<T>, x: T, t: T) -> Result<FlowSample<T>> {
    let (psi, dpsi) = field.eval_with_gradient(x, t)?;
    let rho = psi.norm_sqr();
    let j = (psi.conj() * dpsi).im;
    let v = if rho > T::zero() { j / rho } else { T::nan() };
    Ok(FlowSample {
        x_bar: x,
        t,
        rho,
        j,
        v,
    })
}

/// Normalization constant `N = (∫|unnormalized Ψ(x̄,0)|²dx̄)^{-1/2}`.
pub fn normalize<T: Real>(
    family: Family,
    params: &PacketParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<Normalization<T>> {
    if !family.is_nonreflecting() {
        return Ok(Normalization {
            norm_constant: T::one(),
            squared_norm: T::one(),
        });
    }
    let s0 = params.sigma0_bar;
    let half = T::lit(14.0) * s0;
    let r = integrate_interval(
        |x: T| {
            let (b, _) = nonreflecting_bracket(x, T::zero(), params);
            b.norm_sqr() * free_gaussian(x, T::zero(), params).norm_sqr()
        },
        params.xc_bar - half,
        params.xc_bar + half,
        28,
        quad,
    )?;
    Ok(Normalization {
        norm_constant: r.value.sqrt().recip(),
        squared_norm: r.value,
    })
}

/// Integration window for moments at time `t`: the free-Gaussian center
/// `x̄_c + ūt` widened by `12σ_t` plus a few well ranges.
pub fn moment_window<T: Real>(field: &WaveField<T>, t: T) -> (T, T) {
    let p = &field.params;
    let w = ComplexWidth::at(t, p);
    let center = p.xc_bar + p.u_bar() * t;
    let half = T::lit(12.0) * w.sigma_t + T::lit(4.0) / p.a_bar;
    (center - half, center + half)
}

fn panels_for<T: Real>(lo: T, hi: T, field: &WaveField<T>, t: T) -> usize {
    let w = ComplexWidth::at(t, &field.params).sigma_t;
    ((hi - lo) / w).to_usize().unwrap_or(24).clamp(24, 400)
}

/// `⟨x̄⟩`, `⟨p̄⟩ = ∫j dx̄` and `Δx̄` at time `t`.
pub fn moments<T: Real>(field: &WaveField<T>, t: T) -> Result<MomentRecord<T>> {
    let (lo, hi) = moment_window(field, t);
    let n = panels_for(lo, hi, field, t);
    let failure = std::sync::Mutex::new(None);
    let r = integrate_interval(
        |x: T| match field.eval_with_gradient(x, t) {
            Ok((psi, dpsi)) => {
                let rho = psi.norm_sqr();
                Bundle([rho, x * rho, x * x * rho, (psi.conj() * dpsi).im])
            }
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Bundle([T::zero(); 4])
            }
        },
        lo,
        hi,
        n,
        &field.quad,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let [m0, m1, m2, jp] = r.value.0;
    let mean_x = m1 / m0;
    let var = (m2 / m0 - mean_x * mean_x).max(T::zero());
    Ok(MomentRecord {
        t,
        mean_x,
        mean_p: jp / m0,
        delta_x: var.sqrt(),
    })
}

/// Probability mass `∫ρ dx̄` over `[a, b]` at time `t`.
pub fn mass_between<T: Real>(field: &WaveField<T>, a: T, b: T, t: T) -> Result<T> {
    if !(b > a) {
        return Ok(T::zero());
    }
    let n = panels_for(a, b, field, t).min(200);
    let failure = std::sync::Mutex::new(None);
    let r = integrate_interval(
        |x: T| match field.eval(x, t) {
            Ok(psi) => psi.norm_sqr(),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                T::zero()
            }
        },
        a,
        b,
        n,
        &field.quad,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(r.value)
}

/// Cumulative distribution `∫_{-∞}^{x̄} ρ` at time `t` (the lower limit is
/// the edge of the moment window).
pub fn cdf<T: Real>(field: &WaveField<T>, x: T, t: T) -> Result<T> {
    let (lo, hi) = moment_window(field, t);
    if x <= lo {
        return Ok(T::zero());
    }
    mass_between(field, lo, x.min(hi), t)
}

/// Position below which a fraction `q` of the probability lies, by bisection.
pub fn quantile<T: Real>(field: &WaveField<T>, q: T, t: T) -> Result<T> {
    if !(q > T::zero() && q < T::one()) {
        return Err(invalid("quantile must lie in (0, 1)"));
    }
    let (mut lo, mut hi) = moment_window(field, t);
    let tol = T::lit(1e-11) * (T::one() + hi.abs().max(lo.abs()));
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if cdf(field, mid, t)? < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}
