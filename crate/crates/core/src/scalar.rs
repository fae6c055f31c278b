//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type underlying a (possibly complex) matrix entry.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// expressed as `f64` literals and converted with [`Real::lit`].
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in target float")
    }

    /// Lossy conversion to `f64`, used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex entry type used by [`crate::ComplexMatrix`].
pub type Cx<R> = Complex<R>;

#[inline]
pub(crate) fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<R: Real>(re: R) -> Cx<R> {
    Complex::new(re, R::zero())
}

#[inline]
pub(crate) fn czero<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::zero())
}

/// Tolerance floor for a precision-sensitive check: `tol`, but never below a
/// small multiple of the machine epsilon of `R`.
#[inline]
pub(crate) fn floor_tol<R: Real>(tol: f64) -> R {
    R::lit(tol).max(R::epsilon() * R::lit(64.0))
}
