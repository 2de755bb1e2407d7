//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Exact types compare without slack; floating types carry a tolerance that
//! callers add to bounds before a final integer verification.

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational with 128-bit numerator and denominator.
pub type Rational = Ratio<i128>;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Signed {
    /// True when arithmetic is exact and comparisons need no slack.
    const EXACT: bool;

    fn from_frac(num: i128, den: i128) -> Self;

    fn from_rational(r: &Rational) -> Self {
        Self::from_frac(*r.numer(), *r.denom())
    }

    fn from_int(n: i64) -> Self {
        Self::from_frac(n as i128, 1)
    }

    fn to_f64(&self) -> f64;

    /// Additive slack applied to upper bounds; zero for exact types.
    fn tolerance() -> Self;
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_frac(num: i128, den: i128) -> Self {
                (num as f64 / den as f64) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn tolerance() -> Self {
                $tol
            }
        }
    };
}

float_scalar!(f64, 1e-7);
float_scalar!(f32, 1e-3);

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_frac(num: i128, den: i128) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_frac(num: i128, den: i128) -> Self {
        BigRational::new(
            num_bigint::BigInt::from_i128(num).unwrap(),
            num_bigint::BigInt::from_i128(den).unwrap(),
        )
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn tolerance() -> Self {
        BigRational::from_integer(0.into())
    }
}

pub fn rat(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

pub fn rint(n: i128) -> Rational {
    Ratio::from_integer(n)
}

/// Largest integer not exceeding `r`.
pub fn floor_rat(r: &Rational) -> i128 {
    r.floor().to_integer()
}

/// Nearest integer, ties rounded up.
pub fn round_rat(r: &Rational) -> i128 {
    (r + rat(1, 2)).floor().to_integer()
}

/// Reduce `r` into `[0, m)` for a positive integer modulus `m`.
pub fn mod_rat(r: &Rational, m: i128) -> Rational {
    let q = (r / rint(m)).floor();
    r - q * rint(m)
}
