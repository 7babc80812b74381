//! Scalar ODE integration with the Dormand–Prince 5(4) pair and its
//! fourth-order continuous extension.

use crate::error::{invalid, Error, Result};
use crate::real::Real;

/// Step control for [`ode_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSpec<T> {
    pub initial_step: T,
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_step: T,
}

impl<T: Real> Default for OdeSpec<T> {
    fn default() -> Self {
        Self {
            initial_step: T::lit(1e-2),
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-10),
            max_step: T::lit(0.5),
        }
    }
}

impl<T: Real> OdeSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.initial_step, self.abs_tol, self.rel_tol, self.max_step]
            .iter()
            .all(|v| *v > T::zero());
        if !positive {
            return Err(invalid("ODE spec values must be positive"));
        }
        if self.max_step < self.initial_step {
            return Err(invalid("max_step must be at least initial_step"));
        }
        Ok(())
    }
}

/// A time-stamped path `x(t)`; samples are strictly increasing in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// Launch position.
    pub x0: T,
    /// Cumulative-probability label of `x0` under the initial density, when known.
    pub quantile: Option<T>,
    pub samples: Vec<(T, T)>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_position(&self) -> T {
        self.samples.last().map(|s| s.1).unwrap_or(self.x0)
    }

    /// Position at `t`, linearly interpolated between stored samples.
    pub fn position_at(&self, t: T) -> Option<T> {
        let i = self.samples.partition_point(|s| s.0 < t);
        if i < self.samples.len() && self.samples[i].0 == t {
            return Some(self.samples[i].1);
        }
        if i == 0 || i == self.samples.len() {
            return None;
        }
        let (t0, x0) = self.samples[i - 1];
        let (t1, x1) = self.samples[i];
        Some(x0 + (x1 - x0) * (t - t0) / (t1 - t0))
    }
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output (Hairer, Nørsett & Wanner).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its interpolation coefficients.
#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    t0: T,
    h: T,
    r: [T; 5],
}

impl<T: Real> Segment<T> {
    fn eval(&self, t: T) -> T {
        let theta = (t - self.t0) / self.h;
        let theta1 = T::one() - theta;
        self.r[0]
            + theta * (self.r[1] + theta1 * (self.r[2] + theta * (self.r[3] + theta1 * self.r[4])))
    }

    fn t1(&self) -> T {
        self.t0 + self.h
    }
}

/// Continuous solution of a scalar ODE.
#[derive(Debug, Clone)]
pub struct DenseSolution<T> {
    pub t0: T,
    pub t1: T,
    pub x0: T,
    segments: Vec<Segment<T>>,
    pub rejected_steps: usize,
}

impl<T: Real> DenseSolution<T> {
    /// Accepted step end points, in integration order, starting at `(t0, x0)`.
    pub fn steps(&self) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push((self.t0, self.x0));
        for s in &self.segments {
            out.push((s.t1(), s.r[0] + s.r[1]));
        }
        out
    }

    /// Solution value at any `t` between `t0` and `t1`.
    pub fn eval(&self, t: T) -> Option<T> {
        let forward = self.t1 > self.t0;
        let (lo, hi) = if forward {
            (self.t0, self.t1)
        } else {
            (self.t1, self.t0)
        };
        let slack = (hi - lo) * T::lit(1e-12);
        if t < lo - slack || t > hi + slack {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.x0);
        }
        let idx = if forward {
            self.segments.partition_point(|s| s.t1() < t)
        } else {
            self.segments.partition_point(|s| s.t1() > t)
        };
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        Some(seg.eval(t))
    }

    pub fn final_value(&self) -> T {
        self.segments
            .last()
            .map(|s| s.r[0] + s.r[1])
            .unwrap_or(self.x0)
    }

    /// Samples on a uniform grid of spacing `cadence` from `t0`, always
    /// including the end point; returned in increasing time order.
    pub fn to_trajectory(&self, cadence: T) -> Trajectory<T> {
        let span = (self.t1 - self.t0).abs();
        let dir = if self.t1 >= self.t0 {
            T::one()
        } else {
            -T::one()
        };
        let n = (span / cadence + T::lit(1e-9))
            .floor()
            .to_usize()
            .unwrap_or(0);
        let mut samples: Vec<(T, T)> = (0..=n)
            .map(|i| {
                let t = self.t0 + dir * cadence * T::from_count(i);
                (t, self.eval(t).unwrap_or(self.x0))
            })
            .collect();
        let last_t = samples.last().map(|s| s.0).unwrap_or(self.t0);
        if (self.t1 - last_t).abs() > cadence * T::lit(1e-6) {
            samples.push((self.t1, self.final_value()));
        }
        if dir < T::zero() {
            samples.reverse();
        }
        Trajectory {
            x0: self.x0,
            quantile: None,
            samples,
        }
    }
}

/// Integrates `dx/dt = v(x, t)` from `(t0, x0)` to `t1` (either direction).
///
/// `v` returns `None` where it refuses to evaluate (e.g. near a density
/// node); such steps are rejected and retried with a smaller step.
pub fn ode_integrate_dense<T, V>(
    mut v: V,
    x0: T,
    t0: T,
    t1: T,
    spec: &OdeSpec<T>,
) -> Result<DenseSolution<T>>
where
    T: Real,
    V: FnMut(T, T) -> Option<T>,
{
    spec.validate()?;
    if t1 == t0 || !t1.is_finite() || !t0.is_finite() {
        return Err(invalid("ODE interval must be finite and non-empty"));
    }
    let dir = if t1 > t0 { T::one() } else { -T::one() };
    let lit = T::lit;
    let min_step = T::epsilon() * lit(64.0) * t0.abs().max(t1.abs()).max(T::one());

    let mut t = t0;
    let mut x = x0;
    let mut h = spec.initial_step.min((t1 - t0).abs());
    let mut k1 = v(x, t);
    let mut segments = Vec::new();
    let mut rejected = 0usize;

    while (t1 - t) * dir > T::zero() {
        if h < min_step {
            return Err(Error::StiffnessFailure {
                t: t.as_f64(),
                x: x.as_f64(),
                step: h.as_f64(),
            });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining * (T::one() - lit(1e-12));
        let hs = if last { remaining } else { h } * dir;

        let Some(k1v) = k1 else {
            // Cannot even evaluate at the current point: shrink and retry
            // from a nudged time so the field gets another chance.
            h *= lit(0.25);
            rejected += 1;
            k1 = v(x, t);
            if k1.is_none() && h < min_step {
                return Err(Error::StiffnessFailure {
                    t: t.as_f64(),
                    x: x.as_f64(),
                    step: h.as_f64(),
                });
            }
            continue;
        };

        let stages = (|| {
            let k2 = v(x + hs * lit(A21) * k1v, t + lit(C2) * hs)?;
            let k3 = v(x + hs * (lit(A31) * k1v + lit(A32) * k2), t + lit(C3) * hs)?;
            let k4 = v(
                x + hs * (lit(A41) * k1v + lit(A42) * k2 + lit(A43) * k3),
                t + lit(C4) * hs,
            )?;
            let k5 = v(
                x + hs * (lit(A51) * k1v + lit(A52) * k2 + lit(A53) * k3 + lit(A54) * k4),
                t + lit(C5) * hs,
            )?;
            let k6 = v(
                x + hs
                    * (lit(A61) * k1v
                        + lit(A62) * k2
                        + lit(A63) * k3
                        + lit(A64) * k4
                        + lit(A65) * k5),
                t + hs,
            )?;
            let x_new = x + hs
                * (lit(A71) * k1v + lit(A73) * k3 + lit(A74) * k4 + lit(A75) * k5 + lit(A76) * k6);
            let t_new = if last { t1 } else { t + hs };
            let k7 = v(x_new, t_new)?;
            Some((k2, k3, k4, k5, k6, k7, x_new, t_new))
        })();

        let Some((_k2, k3, k4, k5, k6, k7, x_new, t_new)) = stages else {
            h *= lit(0.25);
            rejected += 1;
            continue;
        };

        let err_est = hs
            * (lit(E1) * k1v
                + lit(E3) * k3
                + lit(E4) * k4
                + lit(E5) * k5
                + lit(E6) * k6
                + lit(E7) * k7);
        let scale = spec.abs_tol + spec.rel_tol * x.abs().max(x_new.abs());
        let err = (err_est / scale).abs();

        if err <= T::one() {
            let r1 = x;
            let r2 = x_new - x;
            let r3 = hs * k1v - r2;
            let r4 = r2 - hs * k7 - r3;
            let r5 = hs
                * (lit(D1) * k1v
                    + lit(D3) * k3
                    + lit(D4) * k4
                    + lit(D5) * k5
                    + lit(D6) * k6
                    + lit(D7) * k7);
            segments.push(Segment {
                t0: t,
                h: t_new - t,
                r: [r1, r2, r3, r4, r5],
            });
            t = t_new;
            x = x_new;
            k1 = Some(k7);
            let fac = if err == T::zero() {
                lit(5.0)
            } else {
                (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            };
            h = (h * fac).min(spec.max_step);
        } else {
            rejected += 1;
            let fac = (lit(0.9) * err.powf(lit(-0.2))).max(lit(0.1));
            h *= fac;
        }
    }

    Ok(DenseSolution {
        t0,
        t1,
        x0,
        segments,
        rejected_steps: rejected,
    })
}

/// Integrates `dx/dt = v(x, t)` and returns the accepted steps as a path.
pub fn ode_integrate<T, V>(v: V, x0: T, t0: T, t1: T, spec: &OdeSpec<T>) -> Result<Trajectory<T>>
where
    T: Real,
    V: FnMut(T, T) -> Option<T>,
{
    let sol = ode_integrate_dense(v, x0, t0, t1, spec)?;
    let mut samples = sol.steps();
    if t1 < t0 {
        samples.reverse();
    }
    Ok(Trajectory {
        x0,
        quantile: None,
        samples,
    })
}
