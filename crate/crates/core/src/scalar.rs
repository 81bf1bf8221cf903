//! Scalar abstraction: all numerics in this crate are generic over a real
//! floating-point type implementing [`Real`].

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    ///
    /// Panics if the literal is not representable at all (never happens for
    /// the finite constants used in this crate).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal conversion")
    }

    /// Lossy view as `f64`, used for diagnostics and cache keys.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip() {
        assert_eq!(f64::lit(0.5), 0.5);
        assert_eq!(f32::lit(0.5), 0.5f32);
        assert_eq!(0.25f64.as_f64(), 0.25);
    }
}
