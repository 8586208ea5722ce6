use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar used for embeddings, distortions and rates.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    fn from_int(x: i64) -> Self {
        Self::from_i64(x).expect("integer fits the scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
