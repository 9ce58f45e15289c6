//! Thresholds and probability bounds of the convergence lemmas.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `log_* x = max(1, ln x)`.
pub fn log_star<F: Float>(x: F) -> F {
    x.ln().max(F::one())
}

fn lit<F: Float>(v: f64) -> F {
    F::from(v).expect("literal representable in every float type")
}

/// `(2 C N ln N)^{1/2}`, exceeded by `sup_{k <= N} |S_k|` with probability
/// at most [`ldi_bound`].
pub fn ldi_threshold<F: Float>(n: F, c: F) -> Result<F> {
    if !(c > F::one() && n > F::one()) {
        return Err(Error::Domain("need C > 1 and N > 1".into()));
    }
    Ok((lit::<F>(2.0) * c * n * n.ln()).sqrt())
}

/// `2 N^{1-C}`.
pub fn ldi_bound<F: Float>(n: F, c: F) -> F {
    lit::<F>(2.0) * n.powf(F::one() - c)
}

/// `(2 C ln N sup_var)^{1/2}` for sums of weighted signs.
pub fn hoeffding_threshold<F: Float>(n: u64, c: F, sup_var: F) -> Result<F> {
    if !(c > F::one()) || n < 1 || !(sup_var >= F::zero()) {
        return Err(Error::Domain("need C > 1, N >= 1 and sup_var >= 0".into()));
    }
    let n = F::from(n).expect("u64 fits a float");
    Ok((lit::<F>(2.0) * c * n.ln() * sup_var).sqrt())
}

/// Weight `a_r = 1 + (r mod 4) / 4` of the `r`-th sign in the weighted-sum check.
pub fn hoeffding_weight(r: u64) -> f64 {
    1.0 + (r % 4) as f64 / 4.0
}

/// `sum_{r=1}^{N} a_r^2`, the variance of the longest weighted sum.
pub fn hoeffding_sup_var(n: u64) -> f64 {
    (1..=n).map(|r| hoeffding_weight(r).powi(2)).sum()
}

/// `exp(-u^2 / 2)`, bounding `P(l(k) / sqrt(k) >= u)` for large `k`.
pub fn local_time_tail_bound<F: Float>(u: F) -> F {
    (-(u * u) / lit(2.0)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams<F> {
    pub c: F,
    pub k: F,
    pub m: u32,
}

impl<F: Float> BoundParams<F> {
    pub fn new(c: F, k: F, m: u32) -> Result<Self> {
        if !(c > F::one()) {
            return Err(Error::Domain("C must exceed 1".into()));
        }
        if !(k > F::zero() && k.is_finite()) {
            return Err(Error::Domain("K must be positive and finite".into()));
        }
        Ok(Self { c, k, m })
    }

    fn mf(&self) -> F {
        F::from(self.m).expect("u32 fits a float")
    }

    fn two_pow_m(&self) -> F {
        lit::<F>(2.0).powi(self.m as i32)
    }

    /// `max(1, K)`.
    pub fn k_star(&self) -> F {
        self.k.max(F::one())
    }

    pub fn log_star_k(&self) -> F {
        log_star(self.k)
    }

    /// `K 4^m`.
    pub fn lattice_size(&self) -> F {
        self.k * self.two_pow_m() * self.two_pow_m()
    }

    /// `floor(K 4^m)`.
    pub fn k_m(&self) -> u64 {
        self.lattice_size().floor().to_u64().unwrap_or(u64::MAX)
    }

    fn rate(&self, k: F) -> F {
        self.c
            * k.powf(lit(0.25))
            * self.log_star_k().powf(lit(0.75))
            * self.mf().powf(lit(0.75))
            * self.two_pow_m().sqrt().recip()
    }

    /// `C K^{1/4} (log_* K)^{3/4} m^{3/4} 2^{-m/2}`.
    pub fn d(&self) -> F {
        self.rate(self.k)
    }

    /// `D` with `K` replaced by `K_*`.
    pub fn d_star(&self) -> F {
        self.rate(self.k_star())
    }

    /// `(3 C m K log_* K)^{1/2} 2^m`.
    pub fn big_m(&self) -> F {
        (lit::<F>(3.0) * self.c * self.mf() * self.k * self.log_star_k()).sqrt() * self.two_pow_m()
    }

    /// `floor((24 C m K log_* K)^{1/2} 2^m)`.
    pub fn n_prime(&self) -> u64 {
        ((lit::<F>(24.0) * self.c * self.mf() * self.k * self.log_star_k()).sqrt() * self.two_pow_m())
            .floor()
            .to_u64()
            .unwrap_or(u64::MAX)
    }

    /// `sqrt(3) M`.
    pub fn n_double_prime(&self) -> F {
        lit::<F>(3.0).sqrt() * self.big_m()
    }

    /// `(K 4^m)^{1-C}`.
    pub fn tail_unit(&self) -> F {
        self.lattice_size().powf(F::one() - self.c)
    }

    /// `1 / (1 - 4^{1-C})`.
    pub fn geometric_factor(&self) -> F {
        (F::one() - lit::<F>(4.0).powf(F::one() - self.c)).recip()
    }

    /// `(r C K log_* K)^{1/2} m^{1/2} 2^-m`.
    fn lag_threshold(&self, r: f64) -> F {
        (lit::<F>(r) * self.c * self.k * self.log_star_k()).sqrt() * self.mf().sqrt()
            / self.two_pow_m()
    }
}

/// The bounded events checked by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaId {
    Lemma1,
    Hoeffding,
    Lemma2,
    Lemma3a,
    Lemma3b,
    Theorem1,
    Lemma4,
    Theorem2,
    Lemma5,
    Lemma6Up,
    Lemma6Down,
    Lemma7Half,
    Lemma7,
    Theorem3,
    Theorem4,
}

/// Which rate unit a threshold multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateUnit {
    D,
    DStar,
}

impl LemmaId {
    pub const ALL: [LemmaId; 15] = [
        LemmaId::Lemma1,
        LemmaId::Hoeffding,
        LemmaId::Lemma2,
        LemmaId::Lemma3a,
        LemmaId::Lemma3b,
        LemmaId::Theorem1,
        LemmaId::Lemma4,
        LemmaId::Theorem2,
        LemmaId::Lemma5,
        LemmaId::Lemma6Up,
        LemmaId::Lemma6Down,
        LemmaId::Lemma7Half,
        LemmaId::Lemma7,
        LemmaId::Theorem3,
        LemmaId::Theorem4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Lemma1 => "lemma1",
            LemmaId::Hoeffding => "hoeffding",
            LemmaId::Lemma2 => "lemma2",
            LemmaId::Lemma3a => "lemma3a",
            LemmaId::Lemma3b => "lemma3b",
            LemmaId::Theorem1 => "theorem1",
            LemmaId::Lemma4 => "lemma4",
            LemmaId::Theorem2 => "theorem2",
            LemmaId::Lemma5 => "lemma5",
            LemmaId::Lemma6Up => "lemma6up",
            LemmaId::Lemma6Down => "lemma6down",
            LemmaId::Lemma7Half => "lemma7half",
            LemmaId::Lemma7 => "lemma7",
            LemmaId::Theorem3 => "theorem3",
            LemmaId::Theorem4 => "theorem4",
        }
    }

    /// Multiplier of `D` or `D*` in the threshold, for the rate-type events.
    pub fn rate_multiplier(self) -> Option<(f64, RateUnit)> {
        use RateUnit::*;
        Some(match self {
            LemmaId::Lemma3a => (11.0 / 4.0, D),
            LemmaId::Lemma3b | LemmaId::Theorem1 | LemmaId::Theorem2 => (27.0, DStar),
            LemmaId::Lemma5 | LemmaId::Lemma6Up | LemmaId::Lemma6Down => (6.0, D),
            LemmaId::Lemma7Half => (9.0, D),
            LemmaId::Lemma7 | LemmaId::Theorem3 => (79.0, DStar),
            LemmaId::Theorem4 => (50.0, DStar),
            _ => return None,
        })
    }

    /// `(a, geometric)` with bound `a (K 4^m)^{1-C}`, divided by
    /// `1 - 4^{1-C}` when `geometric`. `None` for the `N`-indexed bounds.
    pub fn bound_multiplier(self) -> Option<(f64, bool)> {
        Some(match self {
            LemmaId::Lemma1 | LemmaId::Hoeffding => return None,
            LemmaId::Lemma2 => (2.0, false),
            LemmaId::Lemma3a => (6.0, false),
            LemmaId::Lemma3b | LemmaId::Theorem1 => (6.0, true),
            LemmaId::Lemma4 => (2.0, true),
            LemmaId::Theorem2 => (8.0, true),
            LemmaId::Lemma5 | LemmaId::Lemma6Up | LemmaId::Lemma6Down => (12.0, false),
            LemmaId::Lemma7Half => (15.0, false),
            LemmaId::Lemma7 | LemmaId::Theorem3 => (15.0, true),
            LemmaId::Theorem4 => (30.0, true),
        })
    }

    /// Whether the statistic compares against the reference level.
    pub fn needs_reference(self) -> bool {
        matches!(
            self,
            LemmaId::Lemma3b
                | LemmaId::Theorem1
                | LemmaId::Lemma4
                | LemmaId::Theorem2
                | LemmaId::Lemma7
                | LemmaId::Theorem3
                | LemmaId::Theorem4
        )
    }

    /// Number of steps `N` of the sums in the `N`-indexed checks.
    pub fn sum_length<F: Float>(params: &BoundParams<F>) -> u64 {
        params.k_m().max(2)
    }

    pub fn threshold<F: Float>(self, p: &BoundParams<F>) -> F {
        if let Some((a, unit)) = self.rate_multiplier() {
            let rate = match unit {
                RateUnit::D => p.d(),
                RateUnit::DStar => p.d_star(),
            };
            return lit::<F>(a) * rate;
        }
        let n = Self::sum_length(p);
        match self {
            LemmaId::Lemma1 => ldi_threshold(F::from(n).expect("u64 fits"), p.c)
                .expect("validated parameters"),
            LemmaId::Hoeffding => {
                hoeffding_threshold(n, p.c, lit(hoeffding_sup_var(n))).expect("validated parameters")
            }
            LemmaId::Lemma2 => p.lag_threshold(1.5),
            LemmaId::Lemma4 => p.lag_threshold(42.0),
            _ => unreachable!("rate-type events handled above"),
        }
    }

    pub fn probability_bound<F: Float>(self, p: &BoundParams<F>) -> F {
        match self.bound_multiplier() {
            Some((a, geometric)) => {
                let b = lit::<F>(a) * p.tail_unit();
                if geometric {
                    b * p.geometric_factor()
                } else {
                    b
                }
            }
            None => ldi_bound(F::from(Self::sum_length(p)).expect("u64 fits"), p.c),
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        LemmaId::ALL
            .into_iter()
            .find(|l| l.name() == lower)
            .ok_or_else(|| Error::UnsupportedLemma(s.to_string()))
    }
}
