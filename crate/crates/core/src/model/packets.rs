//! Closed-form pieces: the sech² well, its scattering states, the Gaussian
//! packet and the interacting nonreflecting packet.

use num_complex::Complex;

use super::{ComplexWidth, PacketParams};
use crate::real::Real;

type C<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `sech x` without overflow for large `|x|`.
#[inline]
pub(crate) fn sech<T: Real>(x: T) -> T {
    let e = (-x.abs()).exp();
    (e + e) / (T::one() + e * e)
}

/// `V(x̄) = −ā² sech²(ā x̄)`.
pub fn potential<T: Real>(x: T, p: &PacketParams<T>) -> T {
    let s = sech(p.a_bar * x);
    -p.a_bar * p.a_bar * s * s
}

/// Scattering state `(ik − ā tanh(āx̄))/(ik + ā) · e^{ikx̄}` (unit incident amplitude).
pub fn eigenstate<T: Real>(k: T, x: T, p: &PacketParams<T>) -> C<T> {
    let a = p.a_bar;
    let num = cplx(-a * (a * x).tanh(), k);
    let den = cplx(a, k);
    num / den * C::from_polar(T::one(), k * x)
}

/// Fourier transform `φ₀(k)` of the initial Gaussian.
pub fn gaussian_spectrum<T: Real>(k: T, p: &PacketParams<T>) -> C<T> {
    let s2 = p.sigma0_bar * p.sigma0_bar;
    let dk = k - p.k0_bar;
    let amp = (T::lit(2.0) * s2 / T::PI()).powf(T::lit(0.25)) * (-s2 * dk * dk).exp();
    C::from_polar(amp, -dk * p.xc_bar)
}

/// `A(k) = (ik + ā) φ₀(k)`.
pub fn spectral_amplitude<T: Real>(k: T, p: &PacketParams<T>) -> C<T> {
    cplx(p.a_bar, k) * gaussian_spectrum(k, p)
}

/// Freely evolving Gaussian `Ψ_f,G` and its `x̄`-derivative.
pub fn free_gaussian_with_gradient<T: Real>(x: T, t: T, p: &PacketParams<T>) -> (C<T>, C<T>) {
    let w = ComplexWidth::at(t, p);
    let xi = x - p.xc_bar - p.u_bar() * t;
    let two = T::lit(2.0);
    // (2π s_t²)^{-1/4} on the principal branch, continuous from t = 0.
    let pref = (real::<T>(two * T::PI()).sqrt() * w.s_t).sqrt().inv();
    let expo = -real::<T>(xi * xi) / (w.s_t * (T::lit(4.0) * p.sigma0_bar))
        + cplx(T::zero(), p.k0_bar * (x - p.u_bar() * t / two));
    let psi = pref * expo.exp();
    let slope = -real::<T>(xi) / (w.s_t * (two * p.sigma0_bar)) + cplx(T::zero(), p.k0_bar);
    (psi, psi * slope)
}

/// Freely evolving Gaussian `Ψ_f,G(x̄, t)`.
pub fn free_gaussian<T: Real>(x: T, t: T, p: &PacketParams<T>) -> C<T> {
    free_gaussian_with_gradient(x, t, p).0
}

/// Initial Gaussian `Ψ_G(x̄, 0)`; accepts complex positions so contour
/// integrals can evaluate it off the real axis.
pub fn initial_gaussian_at<T: Real>(z: C<T>, p: &PacketParams<T>) -> C<T> {
    let s2 = p.sigma0_bar * p.sigma0_bar;
    let pref = (T::lit(2.0) * T::PI() * s2).powf(T::lit(-0.25));
    let d = z - p.xc_bar;
    (-(d * d) / (T::lit(4.0) * s2) + C::<T>::i() * z * p.k0_bar).exp() * pref
}

/// The bracket `ik̄₀ − ξ/(2σ̄₀s_t) − ā tanh(āx̄)` multiplying `Ψ_f,G`, and its derivative.
pub fn nonreflecting_bracket<T: Real>(x: T, t: T, p: &PacketParams<T>) -> (C<T>, C<T>) {
    let w = ComplexWidth::at(t, p);
    let two = T::lit(2.0);
    let xi = x - p.xc_bar - p.u_bar() * t;
    let a = p.a_bar;
    let s = sech(a * x);
    let inv = (w.s_t * (two * p.sigma0_bar)).inv();
    let b = cplx(-a * (a * x).tanh(), p.k0_bar) - inv * xi;
    let db = -inv - a * a * s * s;
    (b, db)
}

/// Interacting nonreflecting packet and its `x̄`-derivative.
pub fn interacting_nonreflecting_with_gradient<T: Real>(
    x: T,
    t: T,
    p: &PacketParams<T>,
    norm_constant: T,
) -> (C<T>, C<T>) {
    let (g, dg) = free_gaussian_with_gradient(x, t, p);
    let (b, db) = nonreflecting_bracket(x, t, p);
    ((b * g) * norm_constant, (db * g + b * dg) * norm_constant)
}

/// `Ψ_i,nr(x̄, t) = N [ik̄₀ − ξ/(2σ̄₀s_t) − ā tanh(āx̄)] Ψ_f,G(x̄, t)`.
pub fn interacting_nonreflecting<T: Real>(
    x: T,
    t: T,
    p: &PacketParams<T>,
    norm_constant: T,
) -> C<T> {
    interacting_nonreflecting_with_gradient(x, t, p, norm_constant).0
}
