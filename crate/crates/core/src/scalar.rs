//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the library computes in.
///
/// Besides the usual `Float` arithmetic, each implementation pins the
/// precision-dependent thresholds used by the eigensolver and the
/// definiteness checks, since those cannot be expressed uniformly in terms of
/// `epsilon()` without losing the f64 values the checks are specified with.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Largest accepted pre-symmetrization asymmetry, relative to the Frobenius norm.
    const SYMMETRY_TOL: f64;
    /// Jacobi stopping threshold on the off-diagonal norm, relative to the Frobenius norm.
    const JACOBI_TOL: f64;
    /// Positive-definiteness floor: `lambda_min > PD_FLOOR * lambda_max`.
    const PD_FLOOR: f64;

    /// Converts an `f64` literal. Every `Real` can represent an `f64` approximately.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f64 {
    const SYMMETRY_TOL: f64 = 1e-12;
    const JACOBI_TOL: f64 = 1e-13;
    const PD_FLOOR: f64 = 1e-12;
}

impl Real for f32 {
    const SYMMETRY_TOL: f64 = 1e-5;
    const JACOBI_TOL: f64 = 1e-6;
    const PD_FLOOR: f64 = 1e-6;
}

/// `max(1, xs...)`, the scale used by every relative tolerance in the crate.
pub fn unit_scale<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::one(), |acc, &x| acc.max(x.abs()))
}
