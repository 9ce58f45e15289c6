//! Exact law of the local time at the origin of a simple walk.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

fn check(n: u64, j: i64) -> Result<u64> {
    let half = n / 2;
    if j < 0 || j as u64 > half {
        return Err(Error::Domain(format!(
            "local time at time {n} takes values 0..={half}, got {j}"
        )));
    }
    Ok(half)
}

/// `P(l~(n) = j) = 2^{-2k+j} binom(2k-j, k)` for `n = 2k` or `n = 2k+1`,
/// where `l~(n) = #{0 < i <= n : S(i) = 0}`.
pub fn exact_local_time_pmf(n: u64, j: i64) -> Result<BigRational> {
    let k = check(n, j)?;
    let j = j as u64;
    let top = 2 * k - j;
    let numer: BigUint = num_integer::binomial(BigUint::from(top), BigUint::from(k));
    let denom = BigUint::from(1u8) << top;
    Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

/// Floating-point value of [`exact_local_time_pmf`], usable for large `n`.
pub fn local_time_pmf_f64(n: u64, j: i64) -> Result<f64> {
    let k = check(n, j)?;
    let top = 2 * k - j as u64;
    Ok((ln_binomial(top, k) - top as f64 * std::f64::consts::LN_2).exp())
}

/// `P(l~(n) >= j)`.
pub fn local_time_tail_f64(n: u64, j: i64) -> f64 {
    let half = (n / 2) as i64;
    (j.max(0)..=half)
        .map(|i| local_time_pmf_f64(n, i).expect("support checked"))
        .sum()
}

/// `P(l(k) / sqrt(k) >= u)` where `l(k) = 1 + l~(k - 1)` counts visits at
/// times `0 <= i < k`.
pub fn origin_local_time_tail(k: u64, u: f64) -> f64 {
    assert!(k >= 1, "local time needs k >= 1");
    let needed = (u * (k as f64).sqrt()).ceil() as i64;
    local_time_tail_f64(k - 1, needed - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_cases() {
        assert_eq!(exact_local_time_pmf(2, 0).unwrap(), q(1, 2));
        assert_eq!(exact_local_time_pmf(2, 1).unwrap(), q(1, 2));
        assert_eq!(exact_local_time_pmf(4, 0).unwrap(), q(3, 8));
        assert_eq!(exact_local_time_pmf(4, 1).unwrap(), q(3, 8));
        assert_eq!(exact_local_time_pmf(4, 2).unwrap(), q(1, 4));
        assert_eq!(exact_local_time_pmf(5, 2).unwrap(), q(1, 4));
        assert_eq!(exact_local_time_pmf(0, 0).unwrap(), BigRational::one());
    }

    #[test]
    fn domain_errors() {
        assert!(exact_local_time_pmf(4, 3).is_err());
        assert!(exact_local_time_pmf(4, -1).is_err());
        assert!(local_time_pmf_f64(7, 4).is_err());
    }

    #[test]
    fn masses_sum_to_one() {
        for n in 0..60u64 {
            let total = (0..=(n / 2) as i64)
                .map(|j| exact_local_time_pmf(n, j).unwrap())
                .fold(BigRational::zero(), |a, b| a + b);
            assert_eq!(total, BigRational::one(), "n = {n}");
        }
    }

    #[test]
    fn float_agrees_with_exact() {
        use num_traits::ToPrimitive;
        for n in [10u64, 31, 64] {
            for j in 0..=(n / 2) as i64 {
                let e = exact_local_time_pmf(n, j).unwrap().to_f64().unwrap();
                let f = local_time_pmf_f64(n, j).unwrap();
                assert!((e - f).abs() <= 1e-12 * e.max(1e-300), "{n} {j}");
            }
        }
        assert!((local_time_tail_f64(40, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_below_gaussian_bound() {
        let k = 10_000;
        let p = origin_local_time_tail(k, 3.0);
        assert!(p > 0.0 && p <= (-4.5f64).exp());
    }
}
