//! Real scalar abstraction the whole crate is generic over.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar for all graph and solver arithmetic: `f32` or `f64`.
///
/// `RealField` supplies the elementary functions and constants; the
/// `num_traits` conversions move literals and diagnostics across the
/// generic boundary.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    /// Machine epsilon of the concrete type.
    fn machine_epsilon() -> Self;

    /// Convert an `f64` literal into this scalar type.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    /// Lossy conversion back to `f64`, for error messages and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Scalar for f32 {
    fn machine_epsilon() -> Self {
        f32::EPSILON
    }
}

impl Scalar for f64 {
    fn machine_epsilon() -> Self {
        f64::EPSILON
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        assert_eq!(f64::lit(0.0985), 0.0985);
        assert_eq!(f32::lit(2.0), 2.0f32);
        assert_eq!(0.25f64.as_f64(), 0.25);
    }
}
