//! Crank–Nicolson reference evolver for `i ∂ₜψ = (−½∂ₓ² + V)ψ`.
//!
//! Kept as an independent oracle for the closed forms; the production
//! paths never call it. The Laplacian is the fourth-order five-point
//! stencil with hard walls just beyond the grid.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::real::Real;

/// Uniform grid `x_i = x_min + i·dx`, `i = 0..n_points`, evolved to `t_final`
/// in `n_steps` equal steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub n_points: usize,
    pub t_final: T,
    pub n_steps: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max) {
            return Err(invalid("grid requires x_min < x_max"));
        }
        if self.n_points < 16 {
            return Err(invalid("grid requires at least 16 points"));
        }
        if self.n_steps < 1 {
            return Err(invalid("grid requires at least one time step"));
        }
        if !(self.t_final >= T::zero()) {
            return Err(invalid("t_final must be non-negative"));
        }
        Ok(())
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_count(self.n_points - 1)
    }

    pub fn dt(&self) -> T {
        self.t_final / T::from_count(self.n_steps)
    }

    pub fn points(&self) -> Vec<T> {
        let dx = self.dx();
        (0..self.n_points)
            .map(|i| self.x_min + dx * T::from_count(i))
            .collect()
    }
}

/// Result of a reference run.
#[derive(Debug, Clone)]
pub struct Evolution<T> {
    pub psi: Vec<Complex<T>>,
    /// Largest relative change of `Σ|ψ|²dx` seen during the run.
    pub norm_drift: T,
}

const EDGE_START: f64 = 1e-8;
const EDGE_LIMIT: f64 = 1e-4;

/// Pentadiagonal matrix stored by rows, entry `(i, i+k-2)` at `[i][k]`.
struct Band<T> {
    rows: Vec<[Complex<T>; 5]>,
}

impl<T: Real> Band<T> {
    /// In-place LU without pivoting. Safe here because the matrix is
    /// `I + iK` with `K` real symmetric, whose Hermitian part is the identity.
    fn factor(&mut self) {
        let n = self.rows.len();
        for k in 0..n {
            let pivot = self.rows[k][2];
            for i in (k + 1)..(k + 3).min(n) {
                let off = k + 2 - i;
                let l = self.rows[i][off] / pivot;
                self.rows[i][off] = l;
                for j in (k + 1)..(k + 3).min(n) {
                    let src = self.rows[k][j + 2 - k];
                    self.rows[i][j + 2 - i] -= l * src;
                }
            }
        }
    }

    fn solve(&self, b: &mut [Complex<T>]) {
        let n = self.rows.len();
        for i in 0..n {
            let mut acc = b[i];
            for k in i.saturating_sub(2)..i {
                acc -= self.rows[i][k + 2 - i] * b[k];
            }
            b[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..(i + 3).min(n) {
                acc -= self.rows[i][j + 2 - i] * b[j];
            }
            b[i] = acc / self.rows[i][2];
        }
    }
}

fn norm2<T: Real>(psi: &[Complex<T>], dx: T) -> T {
    psi.iter().map(|z| z.norm_sqr()).sum::<T>() * dx
}

fn edge_amplitude<T: Real>(psi: &[Complex<T>]) -> T {
    let n = psi.len();
    [psi[0], psi[1], psi[n - 2], psi[n - 1]]
        .iter()
        .fold(T::zero(), |m, z| m.max(z.norm()))
}

/// Evolves `psi0` under `V = potential` on `grid` up to `grid.t_final`.
pub fn evolve_reference<T: Real>(
    psi0: &[Complex<T>],
    potential: &[T],
    grid: &GridSpec<T>,
) -> Result<Evolution<T>> {
    grid.validate()?;
    let n = grid.n_points;
    if psi0.len() != n || potential.len() != n {
        return Err(invalid("field lengths must match the grid"));
    }
    let start_edge = edge_amplitude(psi0);
    if start_edge >= T::lit(EDGE_START) {
        return Err(Error::BoundaryContamination {
            step: 0,
            amplitude: start_edge.as_f64(),
        });
    }

    let dx = grid.dx();
    let dt = grid.dt();
    let c = |v: f64| T::lit(v) / (dx * dx);
    // −½ of the five-point Laplacian (−1, 16, −30, 16, −1)/12.
    let off1 = -c(16.0 / 24.0);
    let off2 = c(1.0 / 24.0);
    let diag = c(30.0 / 24.0);
    let half = Complex::new(T::zero(), dt * T::lit(0.5));
    let one = Complex::new(T::one(), T::zero());

    let h_row = |i: usize| -> [T; 5] {
        let mut r = [off2, off1, diag + potential[i], off1, off2];
        if i < 2 {
            for k in 0..(2 - i) {
                r[k] = T::zero();
            }
        }
        if i + 2 >= n {
            for k in (n - i + 2).min(5)..5 {
                r[k] = T::zero();
            }
        }
        r
    };

    let mut lhs = Band {
        rows: (0..n)
            .map(|i| {
                let h = h_row(i);
                let mut r = [Complex::new(T::zero(), T::zero()); 5];
                for k in 0..5 {
                    r[k] = half * h[k];
                }
                r[2] += one;
                r
            })
            .collect(),
    };
    lhs.factor();
    let rhs_rows: Vec<[T; 5]> = (0..n).map(h_row).collect();

    let norm0 = norm2(psi0, dx);
    let mut psi = psi0.to_vec();
    let mut next = vec![Complex::new(T::zero(), T::zero()); n];
    let mut drift = T::zero();

    for step in 1..=grid.n_steps {
        for i in 0..n {
            let mut hpsi = Complex::new(T::zero(), T::zero());
            for k in 0..5 {
                let j = i + k;
                if j >= 2 && j - 2 < n {
                    hpsi += psi[j - 2] * rhs_rows[i][k];
                }
            }
            next[i] = psi[i] - half * hpsi;
        }
        lhs.solve(&mut next);
        std::mem::swap(&mut psi, &mut next);

        let edge = edge_amplitude(&psi);
        if edge > T::lit(EDGE_LIMIT) {
            return Err(Error::BoundaryContamination {
                step,
                amplitude: edge.as_f64(),
            });
        }
        drift = drift.max(((norm2(&psi, dx) - norm0) / norm0).abs());
    }

    Ok(Evolution {
        psi,
        norm_drift: drift,
    })
}

/// Discrete L² distance `(Σ|a−b|²dx)^{1/2}`.
pub fn l2_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>], dx: T) -> T {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<T>()
        .sqrt()
        * dx.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn free_gaussian(x: f64, t: f64) -> C {
        // σ0 = 1, x_c = -10, k0 = 1
        let s = C::new(1.0, t / 2.0);
        let xi = x + 10.0 - t;
        let pref = (C::new(2.0 * std::f64::consts::PI, 0.0) * s * s).powf(-0.25);
        pref * (-(xi * xi) / (s * 4.0) + C::new(0.0, x - t / 2.0)).exp()
    }

    fn grid(t_final: f64, n_steps: usize) -> GridSpec<f64> {
        GridSpec {
            x_min: -60.0,
            x_max: 60.0,
            n_points: 4096,
            t_final,
            n_steps,
        }
    }

    #[test]
    fn free_evolution_matches_closed_form() {
        let g = grid(8.0, 4000);
        let xs = g.points();
        let psi0: Vec<C> = xs.iter().map(|&x| free_gaussian(x, 0.0)).collect();
        let v = vec![0.0; xs.len()];
        let out = evolve_reference(&psi0, &v, &g).unwrap();
        let exact: Vec<C> = xs.iter().map(|&x| free_gaussian(x, 8.0)).collect();
        let err = l2_distance(&out.psi, &exact, g.dx());
        assert!(err <= 1e-4, "L2 error {err:e}");
        assert!(out.norm_drift <= 1e-8, "drift {:e}", out.norm_drift);
    }

    #[test]
    fn edge_leak_is_reported() {
        let g = GridSpec {
            x_min: -15.0,
            x_max: 15.0,
            n_points: 512,
            t_final: 30.0,
            n_steps: 600,
        };
        let xs = g.points();
        let psi0: Vec<C> = xs.iter().map(|&x| free_gaussian(x - 10.0, 0.0)).collect();
        let err = evolve_reference(&psi0, &vec![0.0; xs.len()], &g).unwrap_err();
        assert!(matches!(err, Error::BoundaryContamination { step, .. } if step > 0));
    }

    #[test]
    fn rejects_bad_grids_and_inputs() {
        let mut g = grid(1.0, 10);
        g.n_points = 8;
        assert!(g.validate().is_err());
        let g = grid(1.0, 10);
        let short = vec![C::new(0.0, 0.0); 10];
        assert!(evolve_reference(&short, &[0.0; 10], &g).is_err());
        let loud = vec![C::new(1.0, 0.0); g.n_points];
        let err = evolve_reference(&loud, &vec![0.0; g.n_points], &g).unwrap_err();
        assert!(matches!(err, Error::BoundaryContamination { step: 0, .. }));
    }

    #[test]
    fn band_solver_inverts_matrix() {
        let n = 20;
        let rows: Vec<[C; 5]> = (0..n)
            .map(|i| {
                let mut r = [C::new(0.0, 0.0); 5];
                for k in 0..5 {
                    let j = i as isize + k as isize - 2;
                    if j >= 0 && (j as usize) < n {
                        r[k] = C::new(if k == 2 { 1.0 } else { 0.0 }, 0.1 * (i + k) as f64 + 0.3);
                    }
                }
                r
            })
            .collect();
        // make the imaginary part symmetric
        let mut sym = rows.clone();
        for i in 0..n {
            for k in 0..5 {
                let j = i as isize + k as isize - 2;
                if j >= 0 && (j as usize) < n {
                    let j = j as usize;
                    let kk = i + 2 - j;
                    let v = 0.5 * (rows[i][k].im + rows[j][kk].im);
                    sym[i][k].im = v;
                }
            }
        }
        let x: Vec<C> = (0..n)
            .map(|i| C::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let mut b = vec![C::new(0.0, 0.0); n];
        for i in 0..n {
            for k in 0..5 {
                let j = i as isize + k as isize - 2;
                if j >= 0 && (j as usize) < n {
                    b[i] += sym[i][k] * x[j as usize];
                }
            }
        }
        let mut m = Band { rows: sym };
        m.factor();
        m.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).norm() < 1e-10);
        }
    }
}
