//! Scalar abstraction and numerical tolerances.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Tolerances appropriate for this precision.
    fn tolerances() -> Tolerances<Self>;

    /// Convert an `f64` literal. Never fails for `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }
}

/// Absolute tolerances used by validation and identity checks.
///
/// The `f64` values are the ones the library is specified against; `f32`
/// uses looser values scaled to its precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// `U^dagger U = I`, Kraus completeness, coin density checks.
    pub unitarity: T,
    /// Hermiticity and trace of evolved joint states.
    pub state: T,
    /// Most negative eigenvalue accepted for a joint state.
    pub psd: T,
    /// Negative eigenvalues in `[-eig_clip, 0)` are treated as zero in entropies.
    pub eig_clip: T,
    /// Probabilities at or below this are treated as off-support in KL divergences.
    pub support: T,
    /// Threshold on `|U00 U11|` (and `|U01 U10|`) for the hypergeometric closed form.
    pub singular: T,
    /// Agreement required between two computation paths of the same identity.
    pub identity: T,
}

impl Real for f64 {
    fn tolerances() -> Tolerances<f64> {
        Tolerances {
            unitarity: 1e-12,
            state: 1e-10,
            psd: 1e-8,
            eig_clip: 1e-10,
            support: 1e-14,
            singular: 1e-10,
            identity: 1e-9,
        }
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances<f32> {
        Tolerances {
            unitarity: 1e-5,
            state: 1e-4,
            psd: 1e-3,
            eig_clip: 1e-4,
            support: 1e-7,
            singular: 1e-5,
            identity: 1e-3,
        }
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        T::tolerances()
    }
}
