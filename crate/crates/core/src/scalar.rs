use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::Rational;

/// Numeric type for kernel values, densities and velocities.
///
/// Implemented for `f32`, `f64` and [`Rational`]. The rational instance makes
/// density evaluation exact; the integrator is normally run in `f64`.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic is exact, so tolerances collapse to zero.
    const EXACT: bool = false;

    /// Converts an exact rule coefficient into this scalar.
    fn from_rational(r: &Rational) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite value")
    }

    /// Shortest text that parses back to the same value.
    fn to_text(&self) -> String {
        format!("{}", self.to_f64_lossy())
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN) as f32
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_text(&self) -> String {
        crate::rational::format(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_conversion() {
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(f64::from_rational(&half), 0.5);
        assert_eq!(f32::from_rational(&half), 0.5);
        assert_eq!(Rational::from_rational(&half), half);
        assert_eq!(Rational::from_f64_lossy(0.25), Rational::new(1.into(), 4.into()));
    }
}
