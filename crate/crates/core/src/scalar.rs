//! Numeric traits shared by the agreement and similarity code.
//!
//! Agreement statistics only need field arithmetic, so they run over
//! [`Scalar`], which exact rationals implement as well as floats.
//! Vector similarity needs a square root and is restricted to
//! [`RealScalar`].

use std::fmt::Debug;

use num_rational::{Ratio, Rational64};
use num_traits::{Float, Num};

/// Field-like scalar: floats or exact rationals.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// Converts an occurrence count into the scalar domain.
    fn from_count(n: usize) -> Self;

    /// Lossy conversion for reporting.
    fn to_f64(self) -> f64;
}

/// Floating point scalar (f32 or f64).
pub trait RealScalar: Scalar + Float {
    fn from_f64(v: f64) -> Self;
}

impl Scalar for f64 {
    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    fn from_count(n: usize) -> Self {
        n as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl RealScalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl RealScalar for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
}

impl Scalar for Rational64 {
    fn from_count(n: usize) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count exceeds i64 range"))
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
