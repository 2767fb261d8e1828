//! Scalar abstraction shared by every game stage.
//!
//! All closed forms in this crate are polynomial in the plan locations, so
//! they evaluate exactly over rationals as well as over IEEE floats. The
//! [`Scalar`] trait gathers what the algorithms need and nothing more.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational scalar. Denominators grow with grid resolution, so keep
/// exact evaluation to profiles with modest denominators.
pub type Exact = Ratio<i128>;

/// Numeric field the game is evaluated over: `f32`, `f64` or [`Exact`].
pub trait Scalar:
    Copy + PartialOrd + Debug + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `num / den` evaluated in the scalar field.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits scalar") / Self::from_i64(den).expect("integer fits scalar")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits scalar")
    }

    /// Nearest representable value to `x`; approximate for [`Exact`].
    fn from_real(x: f64) -> Self;

    fn to_real(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    fn cube(self) -> Self {
        self * self * self
    }

    fn square(self) -> Self {
        self * self
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f32 {
    fn from_real(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Exact {
    fn from_real(x: f64) -> Self {
        Ratio::<i128>::from_f64(x).expect("finite real")
    }
}
