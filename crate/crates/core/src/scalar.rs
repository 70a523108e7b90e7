use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar accepted by the geometric kernels: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, literals) into this type.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Default absolute tolerance scale for this precision.
    fn default_eps() -> Self;
}

impl Scalar for f32 {
    fn default_eps() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn default_eps() -> Self {
        1e-12
    }
}
