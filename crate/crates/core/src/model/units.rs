//! Conversions between physical and scaled (`x̄ = √(m/ħ) x`) units.
//!
//! Scaled fields follow `Ψ̄(x̄, t) = Ψ(x, t)`, so densities and arrival-time
//! distributions carry over unchanged while currents and velocities pick up
//! `√(m/ħ)`. A field normalized in `x̄` differs from this convention by
//! [`ScaledUnits::field_factor`].

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledUnits<T> {
    pub mass: T,
    pub hbar: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// Length: `x̄ = √(m/ħ) x`.
    Position,
    /// `p̄ = p/√(mħ)`.
    Momentum,
    /// Inverse length (`k`, `a`): `k̄ = k √(ħ/m)`.
    WaveNumber,
    /// `j̄ = √(m/ħ) j`.
    Current,
    /// `v̄ = √(m/ħ) v`.
    Velocity,
    /// `ρ̄ = ρ`.
    Density,
    /// `Π̄ = Π`.
    ArrivalDensity,
    /// `t` is not rescaled.
    Time,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Position,
        Quantity::Momentum,
        Quantity::WaveNumber,
        Quantity::Current,
        Quantity::Velocity,
        Quantity::Density,
        Quantity::ArrivalDensity,
        Quantity::Time,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Position => "x",
            Quantity::Momentum => "p",
            Quantity::WaveNumber => "k",
            Quantity::Current => "j",
            Quantity::Velocity => "v",
            Quantity::Density => "rho",
            Quantity::ArrivalDensity => "pi",
            Quantity::Time => "t",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "position" | "length" => Ok(Quantity::Position),
            "p" | "momentum" => Ok(Quantity::Momentum),
            "k" | "a" | "wavenumber" => Ok(Quantity::WaveNumber),
            "j" | "current" => Ok(Quantity::Current),
            "v" | "velocity" => Ok(Quantity::Velocity),
            "rho" | "density" => Ok(Quantity::Density),
            "pi" | "arrival" => Ok(Quantity::ArrivalDensity),
            "t" | "time" => Ok(Quantity::Time),
            _ => Err(invalid(format!("unknown quantity '{s}'"))),
        }
    }
}

impl<T: Real> ScaledUnits<T> {
    pub fn new(mass: T, hbar: T) -> Result<Self> {
        if !(mass > T::zero()) || !(hbar > T::zero()) || !mass.is_finite() || !hbar.is_finite() {
            return Err(invalid("mass and hbar must be positive and finite"));
        }
        Ok(Self { mass, hbar })
    }

    /// `√(m/ħ)`.
    pub fn length_factor(&self) -> T {
        (self.mass / self.hbar).sqrt()
    }

    /// `(m/ħ)^{1/4}`: ratio between the `Ψ̄ = Ψ` convention and a field normalized in `x̄`.
    pub fn field_factor(&self) -> T {
        self.length_factor().sqrt()
    }

    /// Multiplier taking a physical value to its scaled counterpart.
    pub fn factor(&self, q: Quantity) -> T {
        match q {
            Quantity::Position | Quantity::Current | Quantity::Velocity => self.length_factor(),
            Quantity::Momentum => (self.mass * self.hbar).sqrt().recip(),
            Quantity::WaveNumber => self.length_factor().recip(),
            Quantity::Density | Quantity::ArrivalDensity | Quantity::Time => T::one(),
        }
    }

    pub fn to_scaled(&self, q: Quantity, value: T) -> T {
        value * self.factor(q)
    }

    pub fn from_scaled(&self, q: Quantity, value: T) -> T {
        value / self.factor(q)
    }
}
