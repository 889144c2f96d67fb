use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the crate's numerics are generic over.
///
/// Implemented for `f32` and `f64`. `FromPrimitive` is required because grid
/// indices and trial counts are integers that must be lifted into the scalar
/// domain.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + core::fmt::Debug
        + core::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Lift a `u64` into the scalar domain.
///
/// Panics only if the conversion is unrepresentable, which cannot happen for
/// `f32`/`f64` (large values round).
pub(crate) fn real_from_u64<T: Real>(v: u64) -> T {
    T::from_u64(v).expect("u64 must convert into the scalar type")
}

pub(crate) fn real_from_f64<T: Real>(v: f64) -> T {
    T::from_f64(v).expect("f64 must convert into the scalar type")
}
