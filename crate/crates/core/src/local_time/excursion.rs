use serde::{Deserialize, Serialize};

use super::{lattice_local_time, LocalTimeKind};
use crate::error::{Error, Result};
use crate::twist::NestedWalkFamily;

/// Per-visit statistics of level `m+1` between consecutive visits of
/// level `m` to the coarse site `j`.
///
/// For the `i`-th window `[T(tau_{i-1}), T(tau_i))`:
/// `gamma` counts visits of the fine walk to `2j`, `alpha` the `+1, -1`
/// pairs at `2j`, `beta` the `-1, +1` pairs at `2j`, and `x` is 1 iff the
/// run of alternating pairs ends with `+1, +1`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExcursionCounts {
    pub level: u32,
    pub site: i64,
    pub gamma: Vec<u32>,
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub x: Vec<u8>,
}

impl ExcursionCounts {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
}

/// Coarse indices `k` for which `T_{m+1}(k)` is known.
fn coarse_extent(family: &NestedWalkFamily, m: u32) -> Result<usize> {
    if m >= family.m_max() {
        return Err(Error::OutOfRange(format!(
            "excursions at level {m} need level {} but m_max is {}",
            m + 1,
            family.m_max()
        )));
    }
    let times = family.visit_times(m + 1).expect("level above 0");
    Ok(times.bridges().min(family.walk(m).len_steps()))
}

fn window(fine: &[i64], start: usize, end: usize, site: i64, out: &mut ExcursionCounts) {
    let at = |n: usize| fine.get(n).copied();
    let mut gamma = 0;
    let mut alpha = 0;
    let mut beta = 0;
    for n in start..end {
        if fine[n] != site {
            continue;
        }
        gamma += 1;
        if at(n + 2) == Some(site) {
            match at(n + 1) {
                Some(v) if v == site + 1 => alpha += 1,
                Some(v) if v == site - 1 => beta += 1,
                _ => {}
            }
        }
    }
    let mut p = start;
    while fine[p + 2] == fine[p] {
        p += 2;
    }
    out.gamma.push(gamma);
    out.alpha.push(alpha);
    out.beta.push(beta);
    out.x.push(u8::from(fine[p + 2] > fine[p]));
}

pub fn excursion_counts(
    family: &NestedWalkFamily,
    m: u32,
    site: i64,
    n_visits: usize,
) -> Result<ExcursionCounts> {
    let extent = coarse_extent(family, m)?;
    let coarse = &family.walk(m).values()[..extent];
    let taus: Vec<usize> = (0..extent).filter(|&k| coarse[k] == site).collect();
    if taus.len() < n_visits {
        return Err(Error::InsufficientVisits {
            site,
            needed: n_visits,
            available: taus.len(),
        });
    }
    Ok(collect(family, m, site, &taus, n_visits, extent))
}

fn collect(
    family: &NestedWalkFamily,
    m: u32,
    site: i64,
    taus: &[usize],
    n: usize,
    extent: usize,
) -> ExcursionCounts {
    let fine = family.walk(m + 1).values();
    let times = family.visit_times(m + 1).expect("level above 0").times();
    let mut out = ExcursionCounts {
        level: m,
        site,
        ..Default::default()
    };
    for i in 0..n {
        let end = taus.get(i + 1).copied().unwrap_or(extent);
        window(fine, times[taus[i]], times[end], 2 * site, &mut out);
    }
    out
}

/// Every window of every visited coarse site.
pub fn all_excursions(family: &NestedWalkFamily, m: u32) -> Result<Vec<ExcursionCounts>> {
    let extent = coarse_extent(family, m)?;
    let coarse = &family.walk(m).values()[..extent];
    let mut by_site: std::collections::BTreeMap<i64, Vec<usize>> = Default::default();
    for (k, &v) in coarse.iter().enumerate() {
        by_site.entry(v).or_default().push(k);
    }
    Ok(by_site
        .into_iter()
        .map(|(site, taus)| collect(family, m, site, &taus, taus.len(), extent))
        .collect())
}

/// `l_{m+1}(T(k), 2j+1) = l+_{m+1}(T(k), 2j) + l-_{m+1}(T(k), 2j+2)`.
pub fn halved_neighbor_identity(
    family: &NestedWalkFamily,
    m: u32,
    k: usize,
    j: i64,
) -> Result<bool> {
    if m >= family.m_max() {
        return Err(Error::OutOfRange(format!("level {} not built", m + 1)));
    }
    let t = family.visit_time(m + 1, k)?;
    let fine = family.walk(m + 1);
    let total = lattice_local_time(fine, LocalTimeKind::Total, t)?;
    let up = lattice_local_time(fine, LocalTimeKind::Up, t)?;
    let down = lattice_local_time(fine, LocalTimeKind::Down, t)?;
    Ok(total.count(t, 2 * j + 1) == up.count(t, 2 * j) + down.count(t, 2 * j + 2))
}
