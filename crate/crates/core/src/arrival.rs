//! Arrival-time distributions `Π(x̄_d, t) = |j| / ∫|j| dt` and their moments.
//!
//! The time integral is adaptive Simpson on `|j|`. Sign changes of `j` are
//! located first (coarse scan plus bisection) and used as panel breaks, so
//! each Simpson panel sees a smooth integrand.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::model::{ComplexWidth, WaveField};
use crate::numerics::{erfc_real, QuadratureSpec};
use crate::observables::current_generic;
use crate::real::Real;

/// Largest accepted truncated-mass estimate.
pub const MAX_TAIL_BOUND: f64 = 1e-4;

const MAX_DEPTH: usize = 40;
const MIN_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRecord<T> {
    pub x_d: T,
    /// Quadrature nodes on `[0, t_max]`, increasing.
    pub t_grid: Vec<T>,
    /// Quadrature weights paired with `t_grid`.
    pub weights: Vec<T>,
    /// `Π` at the nodes; `Σ wᵢ Πᵢ = 1`.
    pub pi_values: Vec<T>,
    pub mean_time: T,
    /// `∫₀^{t_max} |j| dt`.
    pub mass_captured: T,
    /// `∫₀^{t_max} j dt`; below `mass_captured` when there is backflow.
    pub signed_mass: T,
    pub t_max: T,
    /// Truncated fraction estimated from the Gaussian envelope in time.
    pub tail_bound: T,
    /// Truncated fraction estimated by continuing the `1/t²` decay of `|j|`
    /// past `t_max`; diagnostic only.
    pub tail_extrapolated: T,
    /// Sign changes of `j` located on `[0, t_max]`.
    pub current_zeros: Vec<T>,
}

impl<T: Real> ArrivalRecord<T> {
    /// `Σ wᵢ Πᵢ`.
    pub fn total(&self) -> T {
        self.weights
            .iter()
            .zip(&self.pi_values)
            .map(|(&w, &p)| w * p)
            .sum()
    }

    /// Backflow measure `(∫|j| − ∫j) / ∫|j|`.
    pub fn backflow_fraction(&self) -> T {
        (self.mass_captured - self.signed_mass) / self.mass_captured
    }
}

/// `τ = ∫ t Π dt`.
pub fn mean_arrival<T: Real>(record: &ArrivalRecord<T>) -> T {
    record
        .t_grid
        .iter()
        .zip(&record.weights)
        .zip(&record.pi_values)
        .map(|((&t, &w), &p)| t * w * p)
        .sum()
}

/// Standard deviation of `Π` in time.
pub fn arrival_width<T: Real>(record: &ArrivalRecord<T>) -> T {
    let tau = record.mean_time;
    let var: T = record
        .t_grid
        .iter()
        .zip(&record.weights)
        .zip(&record.pi_values)
        .map(|((&t, &w), &p)| (t - tau) * (t - tau) * w * p)
        .sum();
    var.max(T::zero()).sqrt()
}

/// `3(x̄_d − x̄_c)/ū`, at least 40.
pub fn default_t_max<T: Real>(field: &WaveField<T>, x_d: T) -> T {
    let p = &field.params;
    (T::lit(3.0) * (x_d - p.xc_bar) / p.u_bar()).max(T::lit(40.0))
}

/// Upper Gaussian tail beyond `t_max` of an arrival pulse centered at
/// `crossing` with standard width `time_width`.
pub fn tail_bound<T: Real>(t_max: T, crossing: T, time_width: T) -> T {
    let z = (t_max - crossing) / (T::SQRT_2() * time_width);
    T::lit(0.5) * erfc_real(z)
}

/// Arrival record of `field` at detector `x̄_d`.
pub fn arrival_distribution<T: Real>(
    field: &WaveField<T>,
    x_d: T,
    t_max: T,
    quad: &QuadratureSpec<T>,
) -> Result<ArrivalRecord<T>> {
    let p = &field.params;
    let crossing = (x_d - p.xc_bar) / p.u_bar();
    let width = ComplexWidth::at(crossing.max(T::zero()), p).sigma_t / p.u_bar().abs();
    arrival_from_current(
        |t| current_generic(field, x_d, t),
        x_d,
        t_max,
        crossing,
        width,
        quad,
    )
}

/// Arrival record for an arbitrary current history `t ↦ j(x_d, t)`.
///
/// `crossing` and `time_width` describe the Gaussian envelope used for
/// `tail_bound`.
pub fn arrival_from_current<T, F>(
    current: F,
    x_d: T,
    t_max: T,
    crossing: T,
    time_width: T,
    quad: &QuadratureSpec<T>,
) -> Result<ArrivalRecord<T>>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
{
    quad.validate()?;
    if !x_d.is_finite() || !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(invalid("arrival needs finite x_d and t_max > 0"));
    }
    if !(time_width > T::zero()) {
        return Err(invalid("arrival time width must be positive"));
    }
    let bound = tail_bound(t_max, crossing, time_width);
    if bound > T::lit(MAX_TAIL_BOUND) {
        return Err(Error::TruncationTooTight {
            t_max: t_max.as_f64(),
            tail_bound: bound.as_f64(),
        });
    }

    // Coarse scan: locates sign changes and sets the error scale.
    let n = (t_max / T::lit(0.1)).to_usize().unwrap_or(400).max(200);
    let h = t_max / T::from_count(n);
    let coarse: Vec<(T, T)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let t = h * T::from_count(i);
            current(t).map(|j| (t, j))
        })
        .collect::<Result<_>>()?;
    let rough: T = coarse.iter().map(|&(_, j)| j.abs()).sum::<T>() * h;
    if !(rough > T::zero()) || !rough.is_finite() {
        return Err(invalid("current vanishes at the detector over [0, t_max]"));
    }

    let mut breaks = vec![T::zero()];
    for w in coarse.windows(2) {
        let ((a, ja), (b, jb)) = (w[0], w[1]);
        if ja == T::zero() && a > T::zero() {
            breaks.push(a);
        } else if ja * jb < T::zero() {
            breaks.push(bisect_zero(&current, a, ja, b)?);
        }
    }
    let zeros = breaks[1..].to_vec();
    breaks.push(t_max);

    let tol = (quad.rel_tol * rough).max(quad.abs_tol);
    let abs_j = |t: T| current(t).map(|j| j.abs());
    let segments: Vec<Vec<Leaf<T>>> = breaks
        .par_windows(2)
        .map(|w| {
            let share = tol * (w[1] - w[0]) / t_max;
            simpson_segment(&abs_j, w[0], w[1], share)
        })
        .collect::<Result<_>>()?;

    // Between consecutive breaks j keeps one sign.
    let signs: Vec<T> = breaks
        .windows(2)
        .map(|w| current((w[0] + w[1]) / T::lit(2.0)).map(|j| j.signum()))
        .collect::<Result<_>>()?;

    // Flatten leaves into nodes with two-panel Simpson weights.
    let mut t_grid: Vec<T> = Vec::new();
    let mut weights: Vec<T> = Vec::new();
    let mut values: Vec<T> = Vec::new();
    let mut signed = T::zero();
    let six = T::lit(6.0);
    for (leaf, sign) in segments
        .iter()
        .zip(&signs)
        .flat_map(|(leaves, &s)| leaves.iter().map(move |l| (l, s)))
    {
        let q = (leaf.b - leaf.a) / T::lit(4.0);
        let nodes = [leaf.a, leaf.a + q, leaf.a + q + q, leaf.b - q, leaf.b];
        let half = (leaf.b - leaf.a) / T::lit(2.0);
        let w = [
            half / six,
            T::lit(4.0) * half / six,
            T::lit(2.0) * half / six,
            T::lit(4.0) * half / six,
            half / six,
        ];
        let mut start = 0;
        if let Some(&last) = t_grid.last() {
            if last == leaf.a {
                *weights.last_mut().expect("nonempty") += w[0];
                start = 1;
            }
        }
        for k in 0..5 {
            signed += sign * w[k] * leaf.f[k];
        }
        for k in start..5 {
            t_grid.push(nodes[k]);
            weights.push(w[k]);
            values.push(leaf.f[k]);
        }
    }

    let mass: T = weights.iter().zip(&values).map(|(&w, &v)| w * v).sum();
    if !(mass > T::zero()) {
        return Err(invalid("current vanishes at the detector over [0, t_max]"));
    }
    let pi_values: Vec<T> = values.iter().map(|&v| v / mass).collect();

    let j_end = values.last().copied().unwrap_or_else(T::zero);
    let tail_extrapolated = j_end * t_max / mass;

    let mut rec = ArrivalRecord {
        x_d,
        t_grid,
        weights,
        pi_values,
        mean_time: T::zero(),
        mass_captured: mass,
        signed_mass: signed,
        t_max,
        tail_bound: bound,
        tail_extrapolated,
        current_zeros: zeros,
    };
    rec.mean_time = mean_arrival(&rec);
    Ok(rec)
}

/// One record per `(field, detector)`, fields outermost; failures are kept
/// per entry. `t_max = None` uses [`default_t_max`].
pub fn detector_sweep<T: Real>(
    fields: &[WaveField<T>],
    detectors: &[T],
    t_max: Option<T>,
    quad: &QuadratureSpec<T>,
) -> Vec<Result<ArrivalRecord<T>>> {
    let jobs: Vec<(usize, usize)> = (0..fields.len())
        .flat_map(|f| (0..detectors.len()).map(move |d| (f, d)))
        .collect();
    jobs.par_iter()
        .map(|&(f, d)| {
            let field = &fields[f];
            let x_d = detectors[d];
            let tm = t_max.unwrap_or_else(|| default_t_max(field, x_d));
            arrival_distribution(field, x_d, tm, quad)
        })
        .collect()
}

fn bisect_zero<T: Real, F>(f: &F, mut a: T, mut fa: T, mut b: T) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    for _ in 0..200 {
        let m = (a + b) / T::lit(2.0);
        if !(m > a && m < b) {
            break;
        }
        let fm = f(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if fa * fm < T::zero() {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok((a + b) / T::lit(2.0))
}

/// Accepted Simpson panel `[a, b]` with `|j|` at its five quarter points.
#[derive(Debug, Clone, Copy)]
struct Leaf<T> {
    a: T,
    b: T,
    f: [T; 5],
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn simpson_segment<T, F>(f: &F, a: T, b: T, tol: T) -> Result<Vec<Leaf<T>>>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let fm = f((a + b) / T::lit(2.0))?;
    let mut out = Vec::new();
    refine(f, a, b, fa, fm, fb, tol, 0, &mut out)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn refine<T, F>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    tol: T,
    depth: usize,
    out: &mut Vec<Leaf<T>>,
) -> Result<()>
where
    T: Real,
    F: Fn(T) -> Result<T>,
{
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let fl = f((a + m) / two)?;
    let fr = f((m + b) / two)?;
    let whole = simpson(a, b, fa, fm, fb);
    let halves = simpson(a, m, fa, fl, fm) + simpson(m, b, fm, fr, fb);
    let err = (halves - whole).abs() / T::lit(15.0);
    if depth >= MIN_DEPTH && (err <= tol || depth >= MAX_DEPTH) {
        if err > tol {
            return Err(Error::NonConvergence {
                re: halves.as_f64(),
                im: 0.0,
                error_bound: err.as_f64(),
            });
        }
        out.push(Leaf {
            a,
            b,
            f: [fa, fl, fm, fr, fb],
        });
        return Ok(());
    }
    let half_tol = tol / two;
    refine(f, a, m, fa, fl, fm, half_tol, depth + 1, out)?;
    refine(f, m, b, fm, fr, fb, half_tol, depth + 1, out)
}
