//! Scalar abstraction shared by every real-valued evaluation in the crate.
//!
//! All lattice quantities are dyadic rationals, so any scalar that can
//! represent `n * 2^-s` is enough to evaluate paths and fields. Floating
//! point types are exact as long as the numerators fit the mantissa;
//! [`BigRational`] is exact everywhere and is used by the oracle tests.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;

    /// `numer * 2^-shift`
    fn dyadic(numer: i64, shift: u32) -> Self;

    /// Largest integer not exceeding `self`.
    fn floor_i64(&self) -> i64;

    fn to_f64(&self) -> f64;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_i64(v: i64) -> Self {
                v as $t
            }

            #[inline]
            fn dyadic(numer: i64, shift: u32) -> Self {
                (numer as $t) * (2.0 as $t).powi(-(shift as i32))
            }

            #[inline]
            fn floor_i64(&self) -> i64 {
                self.floor() as i64
            }

            #[inline]
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn dyadic(numer: i64, shift: u32) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(1u8) << shift)
    }

    fn floor_i64(&self) -> i64 {
        self.floor()
            .to_integer()
            .to_i64()
            .expect("rational floor outside i64 range")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_values_agree_across_scalars() {
        for (n, s) in [(3, 2), (-5, 7), (0, 0), (1 << 20, 20)] {
            let f: f64 = Scalar::dyadic(n, s);
            let q: BigRational = Scalar::dyadic(n, s);
            assert_eq!(f, Scalar::to_f64(&q));
        }
    }

    #[test]
    fn floor_rounds_toward_negative_infinity() {
        assert_eq!(<f64 as Scalar>::dyadic(-3, 1).floor_i64(), -2);
        assert_eq!(<BigRational as Scalar>::dyadic(-3, 1).floor_i64(), -2);
        assert_eq!(<BigRational as Scalar>::dyadic(7, 2).floor_i64(), 1);
    }
}
