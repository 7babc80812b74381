//! Error function of a complex argument.
//!
//! The first quadrant is split into three regions, each handled by the
//! expansion that avoids cancellation there:
//!
//! * `Re z < 2`: Maclaurin series (cancellation grows like `exp(2 Re(z)²)`),
//! * `Im z < 2`, `|z| < 6`: the Gaussian-damped series
//!   `erf z = 2/√π e^{-z²} Σ 2ⁿ z^{2n+1}/(2n+1)!!` (cancellation `exp(2 Im(z)²)`),
//! * otherwise: Laplace continued fraction for `erfc`, evaluated by
//!   the modified Lentz method.
//!
//! Other quadrants follow from `erf(-z) = -erf(z)` and `erf(z̄) = conj(erf z)`.

use num_complex::Complex;

use crate::real::Real;

const SERIES_LIMIT: f64 = 2.0;
const DAMPED_RADIUS: f64 = 6.0;
const MAX_TERMS: usize = 5000;

fn two_over_sqrt_pi<T: Real>() -> T {
    T::FRAC_2_SQRT_PI()
}

fn maclaurin<T: Real>(z: Complex<T>) -> Complex<T> {
    let z2 = z * z;
    let r2 = z2.norm();
    let mut term = z;
    let mut sum = z;
    for n in 1..MAX_TERMS {
        let nf = T::from_count(n);
        term = -term * z2 / nf;
        let add = term / (T::lit(2.0) * nf + T::one());
        sum += add;
        if nf > r2 && add.norm() <= T::epsilon() * sum.norm() {
            break;
        }
    }
    sum * two_over_sqrt_pi::<T>()
}

fn damped_series<T: Real>(z: Complex<T>) -> Complex<T> {
    let z2 = z * z;
    let two_z2 = z2 * T::lit(2.0);
    let mut term = z;
    let mut sum = z;
    for n in 1..MAX_TERMS {
        let nf = T::from_count(n);
        term = term * two_z2 / (T::lit(2.0) * nf + T::one());
        sum += term;
        if nf > z2.norm() && term.norm() <= T::epsilon() * sum.norm() {
            break;
        }
    }
    (-z2).exp() * sum * two_over_sqrt_pi::<T>()
}

/// `√π e^{z²} erfc(z)` for `Re z > 0` from the Laplace continued fraction.
fn scaled_erfc_cf<T: Real>(z: Complex<T>) -> Complex<T> {
    let tiny = Complex::new(T::min_positive_value().sqrt(), T::zero());
    let mut f = if z.norm() == T::zero() { tiny } else { z };
    let mut c = f;
    let mut d = Complex::new(T::zero(), T::zero());
    for n in 1..MAX_TERMS {
        let a = T::from_count(n) * T::lit(0.5);
        d = z + d * a;
        if d.norm() == T::zero() {
            d = tiny;
        }
        c = z + Complex::new(a, T::zero()) / c;
        if c.norm() == T::zero() {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).norm() <= T::epsilon() {
            break;
        }
    }
    f.inv()
}

fn in_cf_region<T: Real>(z: Complex<T>) -> bool {
    z.re >= T::lit(SERIES_LIMIT)
        && (z.im >= T::lit(SERIES_LIMIT) || z.norm() >= T::lit(DAMPED_RADIUS))
}

fn erfc_cf<T: Real>(z: Complex<T>) -> Complex<T> {
    (-z * z).exp() * scaled_erfc_cf(z) / T::PI().sqrt()
}

fn erf_first_quadrant<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re < T::lit(SERIES_LIMIT) {
        maclaurin(z)
    } else if !in_cf_region(z) {
        damped_series(z)
    } else {
        Complex::new(T::one(), T::zero()) - erfc_cf(z)
    }
}

/// Error function on the whole complex plane (principal analytic continuation).
pub fn erf_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re < T::zero() {
        return -erf_complex(-z);
    }
    if z.im < T::zero() {
        return erf_first_quadrant(z.conj()).conj();
    }
    erf_first_quadrant(z)
}

/// Complementary error function `1 − erf(z)`, computed directly where the
/// continued fraction applies so that tiny values keep their relative accuracy.
pub fn erfc_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    if z.re < T::zero() {
        return one + one - erfc_complex(-z);
    }
    let conj = z.im < T::zero();
    let w = if conj { z.conj() } else { z };
    let r = if w.re >= T::lit(SERIES_LIMIT) {
        erfc_cf(w)
    } else {
        one - erf_first_quadrant(w)
    };
    if conj {
        r.conj()
    } else {
        r
    }
}

/// Real error function.
pub fn erf_real<T: Real>(x: T) -> T {
    erf_complex(Complex::new(x, T::zero())).re
}

/// Real complementary error function.
pub fn erfc_real<T: Real>(x: T) -> T {
    erfc_complex(Complex::new(x, T::zero())).re
}
