//! The free Gaussian and the interacting nonreflecting packet written with
//! explicit `m` and `ħ`, independent of the scaled-unit code paths. Used to
//! check the scaling table against an unscaled pipeline.

use num_complex::Complex;

use super::units::ScaledUnits;
use super::PacketParams;
use crate::arrival::{arrival_from_current, ArrivalRecord};
use crate::error::{invalid, Result};
use crate::numerics::{integrate_interval, QuadratureSpec};
use crate::observables::CurrentCoefficients;
use crate::real::{Bundle, Real};

type C<T> = Complex<T>;

/// Well and packet parameters in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub mass: T,
    pub hbar: T,
    /// Inverse length.
    pub a: T,
    pub sigma0: T,
    pub xc: T,
    /// Wave number.
    pub k0: T,
}

impl<T: Real> PhysicalParams<T> {
    pub fn validate(&self) -> Result<()> {
        ScaledUnits::new(self.mass, self.hbar)?;
        if !(self.a > T::zero()) || !(self.sigma0 > T::zero()) {
            return Err(invalid("a and sigma0 must be positive"));
        }
        if !self.xc.is_finite() || !self.k0.is_finite() || !self.a.is_finite() {
            return Err(invalid("parameters must be finite"));
        }
        Ok(())
    }

    pub fn units(&self) -> ScaledUnits<T> {
        ScaledUnits {
            mass: self.mass,
            hbar: self.hbar,
        }
    }

    /// The same packet in scaled units.
    pub fn scaled(&self) -> PacketParams<T> {
        let l = self.units().length_factor();
        PacketParams {
            a_bar: self.a / l,
            sigma0_bar: self.sigma0 * l,
            xc_bar: self.xc * l,
            k0_bar: self.k0 / l,
        }
    }

    /// Group velocity `ħk₀/m`.
    pub fn u(&self) -> T {
        self.hbar * self.k0 / self.mass
    }

    /// `s_t = σ₀(1 + iħt/(2mσ₀²))`.
    pub fn s_t(&self, t: T) -> C<T> {
        let s0 = self.sigma0;
        C::new(s0, self.hbar * t / (T::lit(2.0) * self.mass * s0))
    }

    pub fn sigma_t(&self, t: T) -> T {
        self.s_t(t).norm()
    }
}

/// Normalized interacting nonreflecting packet in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPacket<T> {
    pub params: PhysicalParams<T>,
    pub norm_constant: T,
    pub squared_norm: T,
}

impl<T: Real> PhysicalPacket<T> {
    pub fn new(params: PhysicalParams<T>, quad: &QuadratureSpec<T>) -> Result<Self> {
        params.validate()?;
        let mut me = Self {
            params,
            norm_constant: T::one(),
            squared_norm: T::one(),
        };
        let half = T::lit(14.0) * params.sigma0;
        let r = integrate_interval(
            |x: T| me.psi(x, T::zero()).norm_sqr(),
            params.xc - half,
            params.xc + half,
            28,
            quad,
        )?;
        me.squared_norm = r.value;
        me.norm_constant = r.value.sqrt().recip();
        Ok(me)
    }

    /// `Ψ_f,G(x, t)` and its `x`-derivative.
    pub fn free_gaussian_with_gradient(&self, x: T, t: T) -> (C<T>, C<T>) {
        let p = &self.params;
        let two = T::lit(2.0);
        let s = self.params.s_t(t);
        let xi = x - p.xc - p.u() * t;
        let pre = (C::new(two * T::PI(), T::zero()) * s * s).powf(-T::lit(0.25));
        let expo = -(s * T::lit(4.0) * p.sigma0).inv() * xi * xi
            + C::new(T::zero(), p.k0 * (x - p.u() * t / two));
        let g = pre * expo.exp();
        let slope = -(s * two * p.sigma0).inv() * xi + C::new(T::zero(), p.k0);
        (g, g * slope)
    }

    /// `Ψ_i,nr(x, t)` and its `x`-derivative.
    pub fn psi_with_gradient(&self, x: T, t: T) -> (C<T>, C<T>) {
        let p = &self.params;
        let two = T::lit(2.0);
        let s = p.s_t(t);
        let xi = x - p.xc - p.u() * t;
        let th = (p.a * x).tanh();
        let b = C::new(-p.a * th, p.k0) - (s * two * p.sigma0).inv() * xi;
        let db = -(s * two * p.sigma0).inv() - p.a * p.a * (T::one() - th * th);
        let (g, dg) = self.free_gaussian_with_gradient(x, t);
        let n = self.norm_constant;
        ((b * g) * n, (db * g + b * dg) * n)
    }

    pub fn psi(&self, x: T, t: T) -> C<T> {
        self.psi_with_gradient(x, t).0
    }

    /// `|Ψ|²` from the closed density formula.
    pub fn rho(&self, x: T, t: T) -> T {
        let p = &self.params;
        let two = T::lit(2.0);
        let st = p.sigma_t(t);
        let st2 = st * st;
        let xi = x - p.xc - p.u() * t;
        let re = p.k0 + p.hbar * t * xi / (T::lit(4.0) * p.mass * p.sigma0 * p.sigma0 * st2);
        let im = p.a * (p.a * x).tanh() + xi / (two * st2);
        let env = (-xi * xi / (two * st2)).exp() / ((two * T::PI()).sqrt() * st);
        self.norm_constant * self.norm_constant * (re * re + im * im) * env
    }

    /// Closed-form current with the full polynomial in `m`.
    pub fn current(&self, x: T, t: T) -> T {
        let p = &self.params;
        let two = T::lit(2.0);
        let st = p.sigma_t(t);
        let xi = x - p.xc - p.u() * t;
        let c = CurrentCoefficients::evaluate(x, t, p.hbar, p.a, p.sigma0, p.xc, p.k0);
        let den = (two * p.mass * p.sigma0 * st).powi(5);
        let env = (-xi * xi / (two * st * st)).exp();
        self.norm_constant
            * self.norm_constant
            * p.mass
            * p.sigma0
            * p.hbar
            * (two / T::PI()).sqrt()
            * c.combine(p.mass)
            / den
            * env
    }

    /// `(ħ/m) ℑ(Ψ* ∂ₓΨ)`.
    pub fn current_from_psi(&self, x: T, t: T) -> T {
        let (psi, dpsi) = self.psi_with_gradient(x, t);
        self.params.hbar / self.params.mass * (psi.conj() * dpsi).im
    }

    pub fn velocity(&self, x: T, t: T) -> T {
        self.current(x, t) / self.rho(x, t)
    }

    /// `⟨x⟩` and `⟨p⟩ = m∫j dx` at time `t`.
    pub fn mean_position_momentum(&self, t: T, quad: &QuadratureSpec<T>) -> Result<(T, T)> {
        let p = &self.params;
        let center = p.xc + p.u() * t;
        let half = T::lit(12.0) * p.sigma_t(t) + T::lit(4.0) / p.a;
        let r = integrate_interval(
            |x: T| {
                let rho = self.rho(x, t);
                Bundle([rho, x * rho, self.current(x, t)])
            },
            center - half,
            center + half,
            60,
            quad,
        )?;
        let [m0, m1, jj] = r.value.0;
        Ok((m1 / m0, p.mass * jj / m0))
    }

    /// Arrival-time distribution at `x_d` (physical length).
    pub fn arrival(&self, x_d: T, t_max: T, quad: &QuadratureSpec<T>) -> Result<ArrivalRecord<T>> {
        let p = &self.params;
        let crossing = (x_d - p.xc) / p.u();
        let time_width = p.sigma_t(crossing.max(T::zero())) / p.u().abs();
        arrival_from_current(
            |t: T| Ok(self.current(x_d, t)),
            x_d,
            t_max,
            crossing,
            time_width,
            quad,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn electronish(mass: f64) -> PhysicalParams<f64> {
        PhysicalParams {
            mass,
            hbar: 1.0546e-34 / 1e-34,
            a: 0.8,
            sigma0: 1.3,
            xc: -12.0,
            k0: 0.9,
        }
    }

    #[test]
    fn closed_forms_match_wavefunction() {
        for &m in &[0.7, 2.8] {
            let pk = PhysicalPacket::new(electronish(m), &QuadratureSpec::default()).unwrap();
            for &(x, t) in &[(-12.0, 0.0), (-8.0, 3.0), (0.3, 9.0), (5.0, 17.0)] {
                let rho = pk.psi(x, t).norm_sqr();
                assert!((pk.rho(x, t) - rho).abs() <= 1e-10 * rho);
                let j = pk.current_from_psi(x, t);
                assert!((pk.current(x, t) - j).abs() <= 1e-8 * j.abs().max(rho));
            }
        }
    }

    #[test]
    fn scaled_parameters_at_unit_mass_and_hbar() {
        let p = PhysicalParams {
            mass: 1.0,
            hbar: 1.0,
            a: 1.0,
            sigma0: 1.0,
            xc: -10.0,
            k0: 1.0,
        };
        assert_eq!(p.scaled(), PacketParams::default());
        let bad = PhysicalParams { mass: 0.0, ..p };
        assert!(PhysicalPacket::new(bad, &QuadratureSpec::default()).is_err());
    }
}
