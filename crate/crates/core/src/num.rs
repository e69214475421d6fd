//! Scalar abstraction: the geometric core is generic over the float type.

use std::fmt::{Debug, Display};
use std::sync::OnceLock;

use num_traits::{Float, FloatConst, FromPrimitive};

use crate::constants::BoundSet;

/// Floating-point scalar the library computes with: `f32` or `f64`.
///
/// The extra method hands out per-type storage for the memoized bound set,
/// so `constants::bounds::<F>()` can cache its result for every scalar type.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    fn bound_cell() -> &'static OnceLock<BoundSet<Self>>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn bound_cell() -> &'static OnceLock<BoundSet<$t>> {
                static CELL: OnceLock<BoundSet<$t>> = OnceLock::new();
                &CELL
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("constant not representable in scalar type")
}

/// Lossy view of a scalar as `f64`, for error messages and output documents.
#[inline]
pub(crate) fn show<F: Real>(x: F) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
