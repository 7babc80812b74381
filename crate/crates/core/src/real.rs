//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: in practice `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Values that quadrature and finite-difference kernels can accumulate:
/// real scalars, complex scalars and small fixed bundles of either.
pub trait LinearValue<T: Real>:
    Copy + Send + Sync + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self>
{
    fn zero() -> Self;
    fn scale(self, s: T) -> Self;
    /// A norm used for error control.
    fn magnitude(self) -> T;
}

impl<T: Real> LinearValue<T> for T {
    #[inline]
    fn zero() -> Self {
        T::zero()
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        self * s
    }
    #[inline]
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> LinearValue<T> for Complex<T> {
    #[inline]
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    #[inline]
    fn scale(self, s: T) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
    #[inline]
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Fixed-size bundle of values integrated together so that expensive
/// integrands are evaluated once per node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bundle<V, const N: usize>(pub [V; N]);

impl<V: Copy, const N: usize> std::ops::Add for Bundle<V, N>
where
    V: std::ops::Add<Output = V>,
{
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = *o + r;
        }
        Bundle(out)
    }
}

impl<V: Copy, const N: usize> std::ops::Sub for Bundle<V, N>
where
    V: std::ops::Sub<Output = V>,
{
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o = *o - r;
        }
        Bundle(out)
    }
}

impl<T: Real, V: LinearValue<T>, const N: usize> LinearValue<T> for Bundle<V, N> {
    fn zero() -> Self {
        Bundle([V::zero(); N])
    }
    fn scale(self, s: T) -> Self {
        Bundle(self.0.map(|v| v.scale(s)))
    }
    fn magnitude(self) -> T {
        self.0
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.magnitude()))
    }
}
