//! Skorohod embedding of coarse walks into a fine reference path.
//!
//! The finest level of a family stands in for the Brownian path. Because
//! the reference is itself a lattice walk, every hitting time is an
//! integer index at the reference scale and all comparisons are exact.

use serde::{Deserialize, Serialize};

use crate::analytics::bounds::log_star;
use crate::error::{Error, Result};
use crate::twist::{NestedWalkFamily, ScaledPath};
use crate::walk::WalkPath;

/// Hitting times `s_m(0..=k_max)` of displacements `±2^-m` along a
/// reference path, as indices at the reference scale `4^-m_ref`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkorohodTimes {
    level: u32,
    reference_level: u32,
    times: Vec<usize>,
}

impl SkorohodTimes {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn reference_level(&self) -> u32 {
        self.reference_level
    }

    pub fn times(&self) -> &[usize] {
        &self.times
    }
}

pub fn skorohod_times(reference: &ScaledPath, m: u32, k_max: usize) -> Result<SkorohodTimes> {
    let m_ref = reference.level();
    if m > m_ref {
        return Err(Error::OutOfRange(format!(
            "cannot embed level {m} into a level-{m_ref} reference"
        )));
    }
    let unit = 1i64 << (m_ref - m);
    let values = reference.walk().values();
    let mut times = Vec::with_capacity(k_max + 1);
    times.push(0);
    let mut anchor = values[0];
    for (n, &v) in values.iter().enumerate().skip(1) {
        if times.len() > k_max {
            break;
        }
        let gap = (v - anchor).abs();
        // unit steps cannot jump over the target displacement
        assert!(gap <= unit, "lattice path overshot a hitting level");
        if gap == unit {
            times.push(n);
            anchor = v;
        }
    }
    if times.len() <= k_max {
        return Err(Error::ReferenceExhausted {
            hits: times.len() - 1,
            needed: k_max,
        });
    }
    Ok(SkorohodTimes {
        level: m,
        reference_level: m_ref,
        times,
    })
}

/// `B_m(k 4^-m) = W_ref(s_m(k))`, as a level-`m` path.
pub fn embedded_walk(reference: &ScaledPath, times: &SkorohodTimes) -> ScaledPath<'static> {
    let shift = times.reference_level - times.level;
    let values = times
        .times
        .iter()
        .map(|&s| reference.walk().value(s) >> shift)
        .collect();
    let walk = WalkPath::from_values(times.level, values)
        .expect("hitting times advance by exactly one coarse unit");
    ScaledPath::owned(times.level, walk)
}

/// `T_{m,n}(k) = T_n(T_{n-1}(... T_{m+1}(k)))`, as indices at level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedVisitTimes {
    pub from: u32,
    pub to: u32,
    pub values: Vec<usize>,
}

pub fn composed_visit_times(
    family: &NestedWalkFamily,
    m: u32,
    n: u32,
    k_max: usize,
) -> Result<ComposedVisitTimes> {
    if m >= n || n > family.m_max() {
        return Err(Error::OutOfRange(format!(
            "need m < n <= {}, got m = {m}, n = {n}",
            family.m_max()
        )));
    }
    let values = (0..=k_max)
        .map(|k| (m + 1..=n).try_fold(k, |k, level| family.visit_time(level, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComposedVisitTimes {
        from: m,
        to: n,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub level: u32,
    pub reference_level: u32,
    /// `floor(K 4^m)`.
    pub covered: usize,
    /// `sup_k |4^-m_ref T_{m,m_ref}(k) - k 4^-m|`; the composition to the
    /// reference level approximates the limiting time `t_m(k)`.
    pub reference_lag: f64,
    /// The same lag maximised over every intermediate level `m < n <= m_ref`.
    pub max_lag: f64,
    /// `B~_m(k 4^-m) = W_ref(4^-m_ref T_{m,m_ref}(k))` for every covered `k`.
    pub values_agree: bool,
    /// `s_m(k) = T_{m,m_ref}(k)` for every covered `k`.
    pub hitting_times_agree: bool,
    pub first_disagreement: Option<usize>,
    /// `(42 C K log_* K)^{1/2} m^{1/2} 2^-m`.
    pub threshold: f64,
    pub lag_below_threshold: bool,
}

pub fn embedding_threshold(m: u32, horizon: f64, c: f64) -> f64 {
    (42.0 * c * horizon * log_star(horizon)).sqrt() * f64::from(m).sqrt() * 0.5f64.powi(m as i32)
}

pub fn verify_embedding_agreement(
    family: &NestedWalkFamily,
    m: u32,
    horizon: f64,
    c: f64,
) -> Result<EmbeddingReport> {
    let m_ref = family.m_max();
    if m >= m_ref {
        return Err(Error::OutOfRange(format!(
            "embedding level {m} must lie below the reference level {m_ref}"
        )));
    }
    let covered = crate::twist::covered_index(horizon, m);
    let coarse = family.walk(m);
    let reference = family.scaled(m_ref);

    let mut max_lag = 0.0f64;
    let mut reference_lag = 0.0;
    let mut composed = Vec::new();
    for n in m + 1..=m_ref {
        let c_n = composed_visit_times(family, m, n, covered)?;
        let lag = c_n
            .values
            .iter()
            .enumerate()
            .map(|(k, &t)| (t as i64 - ((k as i64) << (2 * (n - m)))).unsigned_abs())
            .max()
            .unwrap_or(0);
        let lag = lag as f64 * 0.25f64.powi(n as i32);
        max_lag = max_lag.max(lag);
        if n == m_ref {
            reference_lag = lag;
            composed = c_n.values;
        }
    }

    let shift = m_ref - m;
    let values_agree = composed
        .iter()
        .enumerate()
        .all(|(k, &t)| reference.walk().value(t) == coarse.value(k) << shift);

    let (hitting_times_agree, first_disagreement) = match skorohod_times(&reference, m, covered) {
        Ok(s) => match s.times.iter().zip(&composed).position(|(a, b)| a != b) {
            None => (true, None),
            Some(k) => (false, Some(k)),
        },
        Err(Error::ReferenceExhausted { hits, .. }) => (false, Some(hits + 1)),
        Err(e) => return Err(e),
    };

    let threshold = embedding_threshold(m, horizon, c);
    Ok(EmbeddingReport {
        level: m,
        reference_level: m_ref,
        covered,
        reference_lag,
        max_lag,
        values_agree,
        hitting_times_agree,
        first_disagreement,
        threshold,
        lag_below_threshold: max_lag < threshold,
    })
}
