use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar the kernels are generic over (`f32`, `f64`).
pub trait Scalar: Float + FloatConst + FromPrimitive + NumAssign + Debug + Default + Send + Sync + 'static {
    /// Literal conversion; every constant in this crate is representable.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Default + Send + Sync + 'static {}
