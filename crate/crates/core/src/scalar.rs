//! Scalar abstraction shared by every geometric routine.
//!
//! Everything in this crate is written against [`Scalar`], which is a thin
//! bundle of `num-traits` bounds. `f64` is the working precision; `f32` is
//! supported with tolerances floored at a small multiple of its epsilon.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Real scalar type usable by the geometry routines.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into this type.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// A tolerance of nominal size `x`, never smaller than 16 ulps at 1.0.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(16.0);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
