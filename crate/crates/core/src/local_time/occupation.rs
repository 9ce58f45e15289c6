use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::twist::{DyadicTime, ScaledPath};

/// Length of `[lo, hi] ∩ (x - eps, x + eps)`.
fn overlap<S: Scalar>(lo: S, hi: S, x: &S, eps: &S) -> S {
    let left = lo.max_of(x.clone() - eps.clone());
    let right = {
        let cap = x.clone() + eps.clone();
        if hi < cap {
            hi
        } else {
            cap
        }
    };
    if right > left {
        right - left
    } else {
        S::zero()
    }
}

/// Time spent in the band by a linear piece running from `y0` to `y1`
/// with slope `±2^m`.
fn piece_time<S: Scalar>(y0: S, y1: S, m: u32, x: &S, eps: &S) -> S {
    let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
    overlap(lo, hi, x, eps) * S::dyadic(1, m)
}

fn check_eps<S: Scalar>(eps: &S) -> Result<()> {
    if *eps <= S::zero() {
        return Err(Error::Domain(format!("band half-width must be positive, got {}", eps.to_f64())));
    }
    Ok(())
}

/// `(2 eps)^-1 |{s in [0, t] : B(s) in (x - eps, x + eps)}|`.
pub fn occupation_estimator<S: Scalar>(
    path: &ScaledPath,
    t: DyadicTime,
    x: &S,
    eps: &S,
) -> Result<S> {
    check_eps(eps)?;
    let m = path.level();
    let end: S = path.evaluate(t)?;
    let t_value: S = t.value();
    let full = (t_value * S::from_i64(1i64 << (2 * m))).floor_i64() as usize;
    let mut total = S::zero();
    for k in 0..full {
        total = total + piece_time(path.lattice_value(k), path.lattice_value(k + 1), m, x, eps);
    }
    if end != path.lattice_value(full) {
        total = total + piece_time(path.lattice_value(full), end, m, x, eps);
    }
    Ok(total / (S::from_i64(2) * eps.clone()))
}

/// The estimator at every lattice time `k 4^-m`, `0 <= k <= k_max`.
pub fn occupation_profile<S: Scalar>(
    path: &ScaledPath,
    x: &S,
    eps: &S,
    k_max: usize,
) -> Result<Vec<S>> {
    check_eps(eps)?;
    if k_max > path.lattice_len() {
        return Err(Error::OutOfRange(format!(
            "profile to {k_max} beyond a path of {} steps",
            path.lattice_len()
        )));
    }
    let m = path.level();
    let norm = S::from_i64(2) * eps.clone();
    let mut acc = S::zero();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(S::zero());
    for k in 0..k_max {
        acc = acc + piece_time(path.lattice_value(k), path.lattice_value(k + 1), m, x, eps);
        out.push(acc.clone() / norm.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_time::{build_field, lattice_local_time, LocalTimeKind};
    use crate::walk::{partial_sums, sample_steps, SeedSpec, WalkPath};
    use num_rational::BigRational;

    #[test]
    fn first_rising_segment() {
        for m in 0..5u32 {
            let w = WalkPath::from_values(m, vec![0, 1]).unwrap();
            let p = ScaledPath::borrowed(m, &w);
            let eps = f64::dyadic(1, m + 1);
            let v = occupation_estimator(&p, DyadicTime::lattice(1, m), &0.0, &eps).unwrap();
            assert_eq!(v, f64::dyadic(1, m + 1));
        }
    }

    #[test]
    fn wide_band_measures_elapsed_time() {
        let w = partial_sums(&sample_steps(SeedSpec::new(3, 3), 2, 100));
        let p = ScaledPath::borrowed(2, &w);
        let eps = BigRational::from_i64(1000);
        let t = DyadicTime::new(37 * 16 + 5, 4);
        let v: BigRational = occupation_estimator(&p, t, &BigRational::from_i64(0), &eps).unwrap();
        let expected = t.value::<BigRational>() / (BigRational::from_i64(2) * eps);
        assert_eq!(v, expected);
    }

    #[test]
    fn profile_matches_pointwise_estimator() {
        let w = partial_sums(&sample_steps(SeedSpec::new(8, 0), 3, 200));
        let p = ScaledPath::borrowed(3, &w);
        let x = BigRational::dyadic(1, 3);
        let eps = BigRational::dyadic(3, 5);
        let profile = occupation_profile(&p, &x, &eps, 200).unwrap();
        for k in (0..=200).step_by(13) {
            let v = occupation_estimator(&p, DyadicTime::lattice(k as u64, 3), &x, &eps).unwrap();
            assert_eq!(profile[k], v);
        }
    }

    #[test]
    fn sandwich_around_the_field() {
        let m = 4;
        let w = partial_sums(&sample_steps(SeedSpec::new(12, 4), m, 1024));
        let p = ScaledPath::borrowed(m, &w);
        let f = build_field(lattice_local_time(&w, LocalTimeKind::Total, 1024).unwrap()).unwrap();
        let (lo, hi) = f.lattice().site_range();
        let tol = f64::dyadic(1, m);
        for eps in [f64::dyadic(1, m + 1), f64::dyadic(1, m), f64::dyadic(3, m + 3)] {
            for j in lo..=hi {
                let x = f64::dyadic(j, m);
                let prof = occupation_profile(&p, &x, &eps, 1024).unwrap();
                for (k, v) in prof.iter().enumerate() {
                    assert!((v - f.lattice_value::<f64>(k, j)).abs() <= tol);
                }
            }
        }
    }

    #[test]
    fn rejects_empty_band() {
        let w = WalkPath::from_values(0, vec![0, 1]).unwrap();
        let p = ScaledPath::borrowed(0, &w);
        assert!(occupation_estimator(&p, DyadicTime::lattice(1, 0), &0.0, &0.0).is_err());
    }
}
