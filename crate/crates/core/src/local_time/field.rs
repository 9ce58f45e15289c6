use serde::{Deserialize, Serialize};

use super::{LatticeLocalTime, LocalTimeKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `L_m(t, x) = 2^-(m+w) l_m(t 4^m, x 2^m)` on the lattice, extended to
/// the plane by splitting every cell along its diagonal.
///
/// The weight exponent `w` is 0 for the plain field and 1 for the half
/// field `L_m / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeField {
    lattice: LatticeLocalTime,
    weight_shift: u32,
}

pub fn build_field(lattice: LatticeLocalTime) -> Result<LocalTimeField> {
    build_weighted_field(lattice, 0)
}

/// The field scaled by `2^-weight_shift`.
pub fn build_weighted_field(lattice: LatticeLocalTime, weight_shift: u32) -> Result<LocalTimeField> {
    match lattice.kind() {
        LocalTimeKind::Total | LocalTimeKind::Up | LocalTimeKind::Down => Ok(LocalTimeField {
            lattice,
            weight_shift,
        }),
        other => Err(Error::UnsupportedKind(other.name())),
    }
}

/// Value on the cell triangle with `b >= a`.
pub fn upper_formula<S: Scalar>(a: &S, b: &S, c: &[S; 4]) -> S {
    let [l00, l01, _, l11] = c;
    l00.clone() + a.clone() * (l11.clone() - l01.clone()) + b.clone() * (l01.clone() - l00.clone())
}

/// Value on the cell triangle with `b < a`.
pub fn lower_formula<S: Scalar>(a: &S, b: &S, c: &[S; 4]) -> S {
    let [l00, _, l10, l11] = c;
    l00.clone() + a.clone() * (l10.clone() - l00.clone()) + b.clone() * (l11.clone() - l10.clone())
}

impl LocalTimeField {
    pub fn level(&self) -> u32 {
        self.lattice.level()
    }

    pub fn kind(&self) -> LocalTimeKind {
        self.lattice.kind()
    }

    pub fn lattice(&self) -> &LatticeLocalTime {
        &self.lattice
    }

    pub fn weight_shift(&self) -> u32 {
        self.weight_shift
    }

    /// Exponent `s` with lattice values `count * 2^-s`.
    pub fn value_shift(&self) -> u32 {
        self.level() + self.weight_shift
    }

    /// Last covered lattice time index.
    pub fn k_max(&self) -> usize {
        self.lattice.k_max()
    }

    pub fn lattice_value<S: Scalar>(&self, k: usize, j: i64) -> S {
        S::dyadic(i64::from(self.lattice.count(k, j)), self.value_shift())
    }

    /// Counts at `(k, j), (k, j+1), (k+1, j), (k+1, j+1)`; the row `k + 1`
    /// is clamped to `k_max`.
    pub fn cell_counts(&self, k: usize, j: i64) -> [i64; 4] {
        let k1 = (k + 1).min(self.k_max());
        let c = |k, j| i64::from(self.lattice.count(k, j));
        [c(k, j), c(k, j + 1), c(k1, j), c(k1, j + 1)]
    }

    /// `L(t, x)` for `0 <= t <= k_max 4^-m`; zero off the visited sites.
    pub fn interpolate<S: Scalar>(&self, t: &S, x: &S) -> Result<S> {
        let m = self.level();
        let tt = t.clone() * S::from_i64(1i64 << (2 * m));
        if *t < S::zero() || tt > S::from_i64(self.k_max() as i64) {
            return Err(Error::OutOfRange(format!(
                "time {} outside [0, {} 4^-{m}]",
                t.to_f64(),
                self.k_max()
            )));
        }
        let xx = x.clone() * S::from_i64(1i64 << m);
        let k = tt.floor_i64() as usize;
        let j = xx.floor_i64();
        let a = tt - S::from_i64(k as i64);
        let b = xx - S::from_i64(j);
        let counts = self.cell_counts(k, j).map(S::from_i64);
        let v = if b >= a {
            upper_formula(&a, &b, &counts)
        } else {
            lower_formula(&a, &b, &counts)
        };
        Ok(v * S::dyadic(1, self.value_shift()))
    }

    /// Site whose value changes between lattice rows `k` and `k + 1`.
    pub fn changing_site(&self, k: usize) -> Option<i64> {
        self.lattice.counted_site(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_time::lattice_local_time;
    use crate::walk::{partial_sums, sample_steps, SeedSpec, WalkPath};
    use num_rational::BigRational;

    fn field(steps: usize, level: u32, kind: LocalTimeKind) -> LocalTimeField {
        let w = partial_sums(&sample_steps(SeedSpec::new(17, 2), level, steps));
        build_field(lattice_local_time(&w, kind, steps).unwrap()).unwrap()
    }

    #[test]
    fn scaling_of_counts() {
        let w = WalkPath::from_values(2, vec![0, 1, 0, 1, 0, 1, 0]).unwrap();
        let f = build_field(lattice_local_time(&w, LocalTimeKind::Total, 6).unwrap()).unwrap();
        assert_eq!(f.lattice_value::<f64>(5, 0), 0.75);
        let half = build_weighted_field(f.lattice().clone(), 1).unwrap();
        assert_eq!(half.lattice_value::<f64>(5, 0), 0.375);
    }

    #[test]
    fn crossing_kinds_have_no_field() {
        let w = WalkPath::from_values(0, vec![0, 1, 2]).unwrap();
        let lt = lattice_local_time(&w, LocalTimeKind::UpCross, 2).unwrap();
        assert!(matches!(build_field(lt), Err(Error::UnsupportedKind("upcross"))));
    }

    #[test]
    fn zero_at_time_zero_and_off_range() {
        let f = field(256, 3, LocalTimeKind::Total);
        for x in [-1.0, -0.3, 0.0, 0.125, 0.9] {
            assert_eq!(f.interpolate(&0.0f64, &x).unwrap(), 0.0);
        }
        assert_eq!(f.interpolate(&2.0f64, &1e3).unwrap(), 0.0);
        assert!(f.interpolate(&4.5f64, &0.0).is_err());
        assert!(f.interpolate(&-0.1f64, &0.0).is_err());
    }

    #[test]
    fn corners_reproduce_lattice_exactly() {
        for kind in [LocalTimeKind::Total, LocalTimeKind::Up, LocalTimeKind::Down] {
            let f = field(300, 2, kind);
            let (lo, hi) = f.lattice().site_range();
            for k in 0..=300usize {
                for j in lo - 1..=hi + 1 {
                    let t = BigRational::dyadic(k as i64, 4);
                    let x = BigRational::dyadic(j, 2);
                    assert_eq!(f.interpolate(&t, &x).unwrap(), f.lattice_value(k, j));
                }
            }
        }
    }

    #[test]
    fn formulas_agree_on_the_diagonal() {
        let c = [3, 5, 4, 7].map(BigRational::from_i64);
        for n in 0..=16 {
            let a = BigRational::dyadic(n, 4);
            assert_eq!(upper_formula(&a, &a, &c), lower_formula(&a, &a, &c));
        }
    }

    #[test]
    fn nondecreasing_in_time_at_lattice_sites() {
        let f = field(512, 2, LocalTimeKind::Total);
        let (lo, hi) = f.lattice().site_range();
        for j in lo..=hi {
            let x = BigRational::dyadic(j, 2);
            let mut prev = BigRational::from_i64(0);
            for n in 0..=(512 * 8) {
                let t = BigRational::dyadic(n, 7);
                let v = f.interpolate(&t, &x).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn continuous_across_cell_boundaries() {
        let f = field(200, 1, LocalTimeKind::Up);
        let eps = 1e-9;
        for n in 1..(200 * 4) {
            let t = n as f64 / 16.0;
            for i in -40..40 {
                let x = i as f64 / 8.0 + 0.03;
                let below = f.interpolate(&(t - eps), &x).unwrap();
                let above = f.interpolate(&(t + eps), &x).unwrap();
                assert!((below - above).abs() < 1e-6);
            }
        }
    }
}
