//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the library is generic over. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// A tolerance of `base`, floored at a small multiple of machine epsilon
    /// so that f64-calibrated thresholds stay attainable in f32.
    #[inline]
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(base).max(floor)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}

/// Euler gamma function; exact at small positive integers.
pub fn gamma_fn<T: Scalar>(x: T) -> T {
    let v = x.as_f64();
    if v.fract() == 0.0 && (1.0..=20.0).contains(&v) {
        return T::lit((2..v as u64).product::<u64>() as f64);
    }
    T::lit(statrs::function::gamma::gamma(v))
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_lower_regularized<T: Scalar>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    T::lit(statrs::function::gamma::gamma_lr(a.as_f64(), x.as_f64()))
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Returns `v / ‖v‖`, or `None` for a (numerically) zero vector.
pub fn normalized<T: Scalar>(v: &[T]) -> Option<Vec<T>> {
    let n = norm(v);
    if !(n > T::min_positive_value()) || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|&x| x / n).collect())
}

pub(crate) fn is_unit<T: Scalar>(u: &[T]) -> bool {
    !u.is_empty() && (norm(u) - T::one()).abs() <= T::tol(1e-12)
}
