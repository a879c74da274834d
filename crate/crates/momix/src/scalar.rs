use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type for all density, graphon, and bound arithmetic: f32 or f64.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Converts an exact non-negative integer count to `T` via f64.
///
/// Counts in this crate stay below 2^53, so the f64 hop is lossless.
pub(crate) fn from_count<T: Real>(count: u128) -> T {
    T::from_f64(count as f64).unwrap()
}

/// Formats a scalar with 17 significant digits, enough to round-trip f64.
pub fn fmt_sig17<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap())
}
