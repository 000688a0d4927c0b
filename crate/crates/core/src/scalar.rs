//! Real scalar abstraction used by real-valued domains.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar carried by `ExtendedReal`, `NonNegReal` and `UnitInterval` values.
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Absolute tolerance used when comparing real values produced by arithmetic.
    fn tolerance() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn approx_eq(self, other: Self) -> bool {
        if self == other {
            return true;
        }
        if self.is_infinite() || other.is_infinite() {
            return false;
        }
        (self - other).abs() <= Self::tolerance()
    }
}

impl Scalar for f32 {
    fn tolerance() -> f32 {
        1e-6
    }
}

impl Scalar for f64 {
    fn tolerance() -> f64 {
        1e-9
    }
}

/// `a - b` on extended reals, with `x - x = 0` for infinite `x`.
pub fn gap<F: Scalar>(a: F, b: F) -> F {
    if a == b {
        F::zero()
    } else {
        a - b
    }
}
