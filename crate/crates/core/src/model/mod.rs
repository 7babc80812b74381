//! Wavefunction families for the reflectionless sech² well (ν = 1) in scaled
//! units `ħ = m = 1`.

mod contour;
mod packets;
pub mod physical;
mod propagated;
pub mod units;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::numerics::QuadratureSpec;
use crate::real::Real;

pub use packets::{
    eigenstate, free_gaussian, free_gaussian_with_gradient, gaussian_spectrum, initial_gaussian_at,
    interacting_nonreflecting, interacting_nonreflecting_with_gradient, nonreflecting_bracket,
    potential, spectral_amplitude,
};
pub use propagated::{
    free_nonreflecting, free_nonreflecting_with_gradient, g_integral, interacting_gaussian,
    interacting_gaussian_with_gradient, nu1_propagator, propagator_correction,
};
pub use units::{Quantity, ScaledUnits};

/// Below this time the integral families use their short-time expansion.
pub const T_SWITCH: f64 = 1e-3;

/// Scaled packet and well parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams<T> {
    pub a_bar: T,
    pub sigma0_bar: T,
    pub xc_bar: T,
    pub k0_bar: T,
}

impl<T: Real> PacketParams<T> {
    pub fn new(a_bar: T, sigma0_bar: T, xc_bar: T, k0_bar: T) -> Result<Self> {
        let p = Self {
            a_bar,
            sigma0_bar,
            xc_bar,
            k0_bar,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_bar > T::zero()) || !self.a_bar.is_finite() {
            return Err(invalid("a_bar must be positive"));
        }
        if !(self.sigma0_bar > T::zero()) || !self.sigma0_bar.is_finite() {
            return Err(invalid("sigma0_bar must be positive"));
        }
        if !self.xc_bar.is_finite() || !self.k0_bar.is_finite() {
            return Err(invalid("xc_bar and k0_bar must be finite"));
        }
        Ok(())
    }

    /// Group velocity; equals `k̄₀` in scaled units.
    #[inline]
    pub fn u_bar(&self) -> T {
        self.k0_bar
    }
}

impl<T: Real> Default for PacketParams<T> {
    /// `ā = 1, σ̄₀ = 1, x̄_c = −10, k̄₀ = 1`.
    fn default() -> Self {
        Self {
            a_bar: T::one(),
            sigma0_bar: T::one(),
            xc_bar: T::lit(-10.0),
            k0_bar: T::one(),
        }
    }
}

/// `s_t = σ̄₀(1 + it/(2σ̄₀²))` and `σ_t = |s_t|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWidth<T> {
    pub s_t: Complex<T>,
    pub sigma_t: T,
}

impl<T: Real> ComplexWidth<T> {
    pub fn at(t: T, p: &PacketParams<T>) -> Self {
        let s0 = p.sigma0_bar;
        let r = t / (T::lit(2.0) * s0 * s0);
        Self {
            s_t: Complex::new(s0, s0 * r),
            sigma_t: s0 * (T::one() + r * r).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    FreeGaussian,
    InteractingNonreflecting,
    FreeNonreflecting,
    InteractingGaussian,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::InteractingNonreflecting,
        Family::FreeNonreflecting,
        Family::FreeGaussian,
        Family::InteractingGaussian,
    ];

    /// Short tag used in file names and CSV headers.
    pub fn tag(self) -> &'static str {
        match self {
            Family::FreeGaussian => "f_G",
            Family::InteractingNonreflecting => "i_nr",
            Family::FreeNonreflecting => "f_nr",
            Family::InteractingGaussian => "i_G",
        }
    }

    pub fn is_nonreflecting(self) -> bool {
        matches!(
            self,
            Family::InteractingNonreflecting | Family::FreeNonreflecting
        )
    }

    pub fn is_interacting(self) -> bool {
        matches!(
            self,
            Family::InteractingNonreflecting | Family::InteractingGaussian
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "fg" | "freegaussian" => Ok(Family::FreeGaussian),
            "inr" | "interactingnonreflecting" => Ok(Family::InteractingNonreflecting),
            "fnr" | "freenonreflecting" => Ok(Family::FreeNonreflecting),
            "ig" | "interactinggaussian" => Ok(Family::InteractingGaussian),
            _ => Err(invalid(format!("unknown family '{s}'"))),
        }
    }
}

/// A normalized wavefunction of one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveField<T> {
    pub family: Family,
    pub params: PacketParams<T>,
    /// `N`; one for the Gaussian families.
    pub norm_constant: T,
    /// `∫|unnormalized Ψ(x̄, 0)|² dx̄`; one for the Gaussian families.
    pub squared_norm: T,
    pub quad: QuadratureSpec<T>,
}

impl<T: Real> WaveField<T> {
    /// Builds and normalizes a field.
    pub fn new(family: Family, params: PacketParams<T>, quad: QuadratureSpec<T>) -> Result<Self> {
        params.validate()?;
        quad.validate()?;
        let n = crate::observables::normalize(family, &params, &quad)?;
        Ok(Self {
            family,
            params,
            norm_constant: n.norm_constant,
            squared_norm: n.squared_norm,
            quad,
        })
    }

    /// `Ψ(x̄, t)`.
    pub fn eval(&self, x: T, t: T) -> Result<Complex<T>> {
        Ok(self.eval_with_gradient(x, t)?.0)
    }

    /// `(Ψ, ∂ₓΨ)` at `(x̄, t)`; derivatives are analytic for every family
    /// (under the integral sign for the propagated ones).
    pub fn eval_with_gradient(&self, x: T, t: T) -> Result<(Complex<T>, Complex<T>)> {
        if !(t >= T::zero()) || !x.is_finite() {
            return Err(invalid("evaluation requires finite x and t >= 0"));
        }
        let p = &self.params;
        match self.family {
            Family::FreeGaussian => Ok(free_gaussian_with_gradient(x, t, p)),
            Family::InteractingNonreflecting => Ok(interacting_nonreflecting_with_gradient(
                x,
                t,
                p,
                self.norm_constant,
            )),
            Family::FreeNonreflecting => {
                free_nonreflecting_with_gradient(x, t, p, self.norm_constant, &self.quad)
            }
            Family::InteractingGaussian => interacting_gaussian_with_gradient(x, t, p, &self.quad),
        }
    }
}
