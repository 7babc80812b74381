//! Real-line integrals of `(tanh or sech)(ā x′) × Gaussian chirp` evaluated
//! along the steepest-descent line of the chirp.
//!
//! On the real axis the kernel `exp(i(x−x′)²/2t)` oscillates at rate
//! `|x−x′|/t`, which is hopeless for small `t`. Rotating the path onto
//! `x′ = c + e^{iφ}s`, with `c` the saddle and `φ = −arg(A)/2`, turns the
//! quadratic exponent into the real decay `exp(−|A|s²)`. The poles of
//! `tanh`/`sech` at `iπ(n+½)/ā` swept between the two paths enter through
//! their residues.

use num_complex::Complex;

use crate::error::Result;
use crate::numerics::quadrature::{integrate_panels, oscillation_breakpoints};
use crate::numerics::{Integral, QuadratureSpec};
use crate::real::{Bundle, Real};

type C<T> = Complex<T>;

/// Upper bound on enclosed poles; beyond it the residues are far outside
/// any Gaussian envelope of interest.
const MAX_POLES: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub(crate) struct DescentLine<T> {
    pub origin: C<T>,
    pub dir: C<T>,
    /// Standard width of the `exp(−|A|s²)` envelope along the line.
    pub width: T,
}

impl<T: Real> DescentLine<T> {
    /// Line through `c` along which `exp(−A(x′−c)²)` is a real Gaussian.
    pub fn for_gaussian(a_coef: C<T>, c: C<T>) -> Self {
        let phi = -a_coef.arg() / T::lit(2.0);
        let width = (T::lit(2.0) * a_coef.norm()).sqrt().recip();
        Self {
            origin: c,
            dir: C::from_polar(T::one(), phi),
            width,
        }
    }

    #[inline]
    pub fn point(&self, s: T) -> C<T> {
        self.origin + self.dir * s
    }

    /// Height at which the line crosses `Re z = 0`.
    fn crossing_height(&self) -> T {
        self.origin.im - self.origin.re * self.dir.im / self.dir.re
    }

    /// Poles `iπ(n+½)/a` lying between the real axis and the line, each with
    /// the orientation sign of its residue in `∫_ℝ = ∫_line + 2πi Σ sign·Res`.
    pub fn enclosed_poles(&self, a: T) -> Vec<(i64, C<T>, T)> {
        let y_line = self.crossing_height();
        let step = T::PI() / a;
        let mut out = Vec::new();
        if y_line > T::zero() {
            let mut n = 0i64;
            loop {
                let y = step * (T::from_count(n as usize) + T::lit(0.5));
                if y >= y_line || out.len() >= MAX_POLES {
                    break;
                }
                out.push((n, C::new(T::zero(), y), T::one()));
                n += 1;
            }
        } else if y_line < T::zero() {
            let mut m = 0usize;
            loop {
                let y = -step * (T::from_count(m) + T::lit(0.5));
                if y <= y_line || out.len() >= MAX_POLES {
                    break;
                }
                out.push((-(m as i64) - 1, C::new(T::zero(), y), -T::one()));
                m += 1;
            }
        }
        out
    }

    /// `∫_ℝ f(x′) dx′` for `f` analytic apart from the `tanh`/`sech` poles.
    ///
    /// `extra` widens the truncated interval beyond `envelope_cut · width`
    /// on both sides; `residue(n, p)` returns `Res_{x′=p} f`.
    pub fn integrate_real_line<const N: usize, F, R>(
        &self,
        f: F,
        residue: R,
        a: T,
        extra: T,
        spec: &QuadratureSpec<T>,
    ) -> Result<Integral<Bundle<C<T>, N>, T>>
    where
        F: Fn(C<T>) -> [C<T>; N],
        R: Fn(i64, C<T>) -> [C<T>; N],
    {
        spec.validate()?;
        let half = spec.envelope_cut * self.width + extra;
        let along = |s: T| Bundle(f(self.point(s)).map(|v| v * self.dir));
        let probe = |s: T| f(self.point(s))[0];
        let pts = oscillation_breakpoints(probe, -half, half, self.width);
        let mut result = integrate_panels(along, &pts, spec)?;
        let two_pi_i = C::new(T::zero(), T::lit(2.0) * T::PI());
        for (n, p, sign) in self.enclosed_poles(a) {
            let r = residue(n, p);
            for (acc, v) in result.value.0.iter_mut().zip(r) {
                *acc += two_pi_i * v * sign;
            }
        }
        Ok(result)
    }
}
