//! Floating-point abstraction for the statistics layer.
//!
//! Pixel kernels work on exact `u8` arithmetic; only percentages, summaries
//! and timings are computed in a generic real type.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub trait Real:
    Float + Default + FromPrimitive + ToPrimitive + Debug + Display + Serialize + DeserializeOwned + Send + Sync + 'static
{
    fn hundred() -> Self {
        Self::from_u8(100).unwrap()
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).unwrap()
    }

    /// Round half-up to two decimal places (inputs are non-negative).
    fn round2(self) -> Self {
        (self * Self::hundred()).round() / Self::hundred()
    }
}

impl Real for f32 {}
impl Real for f64 {}
