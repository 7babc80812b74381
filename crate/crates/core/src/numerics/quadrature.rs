//! Adaptive Gauss–Kronrod quadrature.
//!
//! The engine works on any [`LinearValue`] (real, complex or bundles of
//! them) over a finite interval split into initial panels. For complex
//! integrands carrying a rapidly varying phase, [`integrate_complex_line`]
//! lays out the initial panels so that none is wider than a quarter of the
//! local oscillation wavelength before adaptive bisection starts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::real::{LinearValue, Real};

/// Tolerances and truncation policy for real-line integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Number of envelope widths kept on each side of the center.
    pub envelope_cut: T,
    /// Budget of panel bisections.
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-13),
            rel_tol: T::lit(1e-11),
            envelope_cut: T::lit(8.0),
            max_subdivisions: 20_000,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) || !(self.rel_tol > T::zero()) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if !(self.envelope_cut >= T::lit(6.0)) {
            return Err(invalid("envelope_cut must be at least 6"));
        }
        if self.max_subdivisions == 0 {
            return Err(invalid("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    /// Same spec with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: T) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    fn target(&self, magnitude: T) -> T {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<V, T> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel<T, V> {
    a: T,
    b: T,
    value: V,
    error: T,
    /// `∫|f|` over the panel, for the roundoff floor.
    resabs: T,
}

impl<T: Real, V> PartialEq for Panel<T, V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real, V> Eq for Panel<T, V> {}
impl<T: Real, V> PartialOrd for Panel<T, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real, V> Ord for Panel<T, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod15<T, V, F>(f: &F, a: T, b: T) -> Panel<T, V>
where
    T: Real,
    V: LinearValue<T>,
    F: Fn(T) -> V,
{
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut fv1 = [V::zero(); 7];
    let mut fv2 = [V::zero(); 7];
    let mut resk = fc.scale(T::lit(WGK[7]));
    let mut resg = fc.scale(T::lit(WG[3]));
    let mut resabs = fc.magnitude() * T::lit(WGK[7]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let pair = f1 + f2;
        resk = resk + pair.scale(T::lit(WGK[j]));
        resabs += T::lit(WGK[j]) * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            resg = resg + pair.scale(T::lit(WG[j / 2]));
        }
    }
    let reskh = resk.scale(T::lit(0.5));
    let mut resasc = T::lit(WGK[7]) * (fc - reskh).magnitude();
    for j in 0..7 {
        resasc += T::lit(WGK[j]) * ((fv1[j] - reskh).magnitude() + (fv2[j] - reskh).magnitude());
    }
    let habs = half.abs();
    resasc *= habs;
    resabs *= habs;
    let mut err = (resk - resg).magnitude() * habs;
    if resasc != T::zero() && err != T::zero() {
        err = resasc * T::one().min((T::lit(200.0) * err / resasc).powf(T::lit(1.5)));
    }
    let round_floor = T::lit(50.0) * T::epsilon() * resabs;
    if round_floor > err {
        err = round_floor;
    }
    Panel {
        a,
        b,
        value: resk.scale(half),
        error: err,
        resabs,
    }
}

/// Adaptive integration over the panels delimited by `breakpoints`
/// (strictly increasing, at least two entries).
pub fn integrate_panels<T, V, F>(
    f: F,
    breakpoints: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Integral<V, T>>
where
    T: Real,
    V: LinearValue<T>,
    F: Fn(T) -> V,
{
    if breakpoints.len() < 2 {
        return Err(invalid("need at least one panel"));
    }
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 2);
    let mut evaluations = 0usize;
    for w in breakpoints.windows(2) {
        if !(w[1] > w[0]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        heap.push(kronrod15(&f, w[0], w[1]));
        evaluations += 15;
    }

    let totals = |heap: &BinaryHeap<Panel<T, V>>| {
        heap.iter()
            .fold((V::zero(), T::zero(), T::zero()), |(v, e, r), p| {
                (v + p.value, e + p.error, r + p.resabs)
            })
    };

    // With heavy cancellation the attainable accuracy is set by rounding
    // in ∫|f|, not by the value.
    let floor = |resabs: T| T::lit(100.0) * T::epsilon() * resabs;
    let mut subdivisions = 0usize;
    let (mut value, mut error, mut resabs) = totals(&heap);
    loop {
        if error <= spec.target(value.magnitude()).max(floor(resabs)) {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(nonconvergence(value, error));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at machine resolution.
            return Err(nonconvergence(value, error));
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        value = value - worst.value + left.value + right.value;
        error = error - worst.error + left.error + right.error;
        resabs = resabs - worst.resabs + left.resabs + right.resabs;
        heap.push(left);
        heap.push(right);
        // Resynchronise running sums now and then to stop drift.
        if subdivisions.is_multiple_of(256) {
            (value, error, resabs) = totals(&heap);
        }
    }
    let (value, error, _) = totals(&heap);
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

fn nonconvergence<T: Real, V: LinearValue<T>>(value: V, error: T) -> Error {
    // Bundles report their magnitude only.
    Error::NonConvergence {
        re: value.magnitude().as_f64(),
        im: 0.0,
        error_bound: error.as_f64(),
    }
}

/// Adaptive integral over `[a, b]` starting from `initial_panels` equal panels.
pub fn integrate_interval<T, V, F>(
    f: F,
    a: T,
    b: T,
    initial_panels: usize,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<V, T>>
where
    T: Real,
    V: LinearValue<T>,
    F: Fn(T) -> V,
{
    if !(b > a) {
        return Err(invalid("integration interval must have b > a"));
    }
    let n = initial_panels.max(1);
    let h = (b - a) / T::from_count(n);
    let mut pts: Vec<T> = (0..n).map(|i| a + h * T::from_count(i)).collect();
    pts.push(b);
    integrate_panels(f, &pts, spec)
}

/// Local phase rate |d arg f / dx| from a one-sided difference of the
/// unwrapped phase. Returns zero where `f` vanishes or is not finite.
fn phase_rate<T: Real>(probe: &impl Fn(T) -> Complex<T>, x: T, delta: T) -> T {
    let f0 = probe(x);
    let f1 = probe(x + delta);
    let ratio = f1 * f0.conj();
    if !(ratio.norm() > T::min_positive_value()) || !ratio.re.is_finite() || !ratio.im.is_finite() {
        return T::zero();
    }
    ratio.arg().abs() / delta
}

/// Panel boundaries over `[a, b]` such that no panel exceeds a quarter of
/// the local oscillation wavelength of `probe`, nor `max_panel`.
pub fn oscillation_breakpoints<T: Real>(
    probe: impl Fn(T) -> Complex<T>,
    a: T,
    b: T,
    max_panel: T,
) -> Vec<T> {
    let quarter_turn = T::FRAC_PI_2();
    let delta = max_panel * T::lit(1e-4);
    let min_panel = (b - a) * T::lit(1e-7);
    let step_at = |x: T| {
        let rate = phase_rate(&probe, x, delta);
        let h = if rate > T::zero() {
            (quarter_turn / rate).min(max_panel)
        } else {
            max_panel
        };
        h.max(min_panel)
    };
    let mut pts = vec![a];
    let mut x = a;
    loop {
        let mut h = step_at(x);
        // The phase rate usually grows across the panel; check its far end.
        h = h.min(step_at((x + h).min(b)));
        x += h;
        if x >= b - min_panel {
            pts.push(b);
            break;
        }
        pts.push(x);
    }
    pts
}

/// Integral of a Gaussian-damped complex function over the real line.
///
/// The line is truncated to `center ± envelope_cut·width` and the initial
/// panels follow [`oscillation_breakpoints`].
pub fn integrate_complex_line<T, F>(
    f: F,
    center: T,
    width: T,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<Complex<T>, T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    spec.validate()?;
    if !(width > T::zero()) {
        return Err(invalid("envelope width must be positive"));
    }
    let half = spec.envelope_cut * width;
    let pts = oscillation_breakpoints(&f, center - half, center + half, width);
    integrate_panels(f, &pts, spec)
}

/// Like [`integrate_complex_line`] for bundled integrands: `probe` supplies
/// the oscillating component used to lay out the panels.
pub fn integrate_line_with_probe<T, V, F, P>(
    f: F,
    probe: P,
    center: T,
    width: T,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<V, T>>
where
    T: Real,
    V: LinearValue<T>,
    F: Fn(T) -> V,
    P: Fn(T) -> Complex<T>,
{
    spec.validate()?;
    if !(width > T::zero()) {
        return Err(invalid("envelope width must be positive"));
    }
    let half = spec.envelope_cut * width;
    let pts = oscillation_breakpoints(probe, center - half, center + half, width);
    integrate_panels(f, &pts, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn gaussian_identity() {
        let r = integrate_complex_line(
            |x: f64| Complex::new((-x * x).exp(), 0.0),
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
            &spec(),
        )
        .unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(r.value.im.abs() < 1e-15);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let r = integrate_complex_line(
            |x: f64| Complex::new(x * (-x * x).exp(), 0.0),
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
            &spec(),
        )
        .unwrap();
        assert!(r.value.norm() < 1e-13);
    }

    #[test]
    fn tanh_gaussian_against_dense_trapezoid() {
        // Oracle: trapezoid with 10^6 uniform nodes over [-20, 0].
        let f = |x: f64| x.tanh() * (-(x + 10.0).powi(2) / 2.0).exp();
        let n = 1_000_000usize;
        let h = 20.0 / n as f64;
        let mut oracle = 0.5 * (f(-20.0) + f(0.0));
        for i in 1..n {
            oracle += f(-20.0 + i as f64 * h);
        }
        oracle *= h;
        let r = integrate_complex_line(|x| Complex::new(f(x), 0.0), -10.0, 1.0, &spec()).unwrap();
        assert!(
            (r.value.re - oracle).abs() < 1e-10,
            "{} vs {}",
            r.value.re,
            oracle
        );
        assert!((oracle + (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn chirped_gaussian_matches_closed_form() {
        // ∫ exp(-(α - iβ) x²) dx = sqrt(π / (α - iβ)), strongly oscillating for β ≫ α.
        let c = Complex::new(0.25, -40.0);
        let exact = (Complex::new(std::f64::consts::PI, 0.0) / c).sqrt();
        let r = integrate_complex_line(|x: f64| (-c * x * x).exp(), 0.0, 2.0f64.sqrt(), &spec())
            .unwrap();
        assert!((r.value - exact).norm() < 1e-11, "{} vs {}", r.value, exact);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let tight = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            envelope_cut: 8.0,
            max_subdivisions: 3,
        };
        let err = integrate_complex_line(
            |x: f64| Complex::new((x * 30.0).sin() * (-x * x).exp(), 0.0),
            0.0,
            1.0,
            &tight,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn spec_validation() {
        let mut s = spec();
        s.envelope_cut = 5.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.abs_tol = 0.0;
        assert!(s.validate().is_err());
        let mut s = spec();
        s.max_subdivisions = 0;
        assert!(s.validate().is_err());
        assert!(integrate_complex_line(|_| Complex::new(1.0, 0.0), 0.0, -1.0, &spec()).is_err());
    }

    #[test]
    fn bundles_integrate_componentwise() {
        use crate::real::Bundle;
        let r = integrate_interval(|x: f64| Bundle([x, x * x, 1.0]), 0.0, 2.0, 2, &spec()).unwrap();
        assert!((r.value.0[0] - 2.0).abs() < 1e-14);
        assert!((r.value.0[1] - 8.0 / 3.0).abs() < 1e-14);
        assert!((r.value.0[2] - 2.0).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            // Tightening tolerances moves a converged result by no more than its prior bound.
            #[test]
            fn tightening_stays_within_bound(alpha in 0.1f64..2.0, beta in -20.0f64..20.0, x0 in -3.0f64..3.0) {
                let c = Complex::new(alpha, beta);
                let f = |x: f64| (x + 0.5).tanh() * (-c * (x - x0) * (x - x0)).exp();
                let width = (0.5 / alpha).sqrt();
                let loose = QuadratureSpec { abs_tol: 1e-8, rel_tol: 1e-7, ..QuadratureSpec::default() };
                let a = integrate_complex_line(f, x0, width, &loose).unwrap();
                let b = integrate_complex_line(f, x0, width, &loose.tightened(0.5)).unwrap();
                prop_assert!((a.value - b.value).norm() <= a.error + 1e-15);
            }
        }
    }
}
