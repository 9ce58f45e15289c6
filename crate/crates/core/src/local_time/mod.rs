//! Discrete local times of a simple walk and their continuous extensions.

mod excursion;
mod field;
mod occupation;

pub use excursion::{all_excursions, excursion_counts, halved_neighbor_identity, ExcursionCounts};
pub use field::{build_field, build_weighted_field, lower_formula, upper_formula, LocalTimeField};
pub use occupation::{occupation_estimator, occupation_profile};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::WalkPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalTimeKind {
    /// Visits to `x` at times `0 <= j < k`.
    Total,
    /// Visits followed by a step to `x + 1`.
    Up,
    /// Visits followed by a step to `x - 1`.
    Down,
    /// `x - 1 -> x -> x + 1` at times `1 <= j < k`.
    UpCross,
    /// `x + 1 -> x -> x + 1` at times `1 <= j < k`.
    UpBounce,
    /// `x + 1 -> x -> x - 1` at times `1 <= j < k`.
    DownCross,
    /// `x - 1 -> x -> x - 1` at times `1 <= j < k`.
    DownBounce,
}

impl LocalTimeKind {
    pub const ALL: [LocalTimeKind; 7] = [
        LocalTimeKind::Total,
        LocalTimeKind::Up,
        LocalTimeKind::Down,
        LocalTimeKind::UpCross,
        LocalTimeKind::UpBounce,
        LocalTimeKind::DownCross,
        LocalTimeKind::DownBounce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LocalTimeKind::Total => "total",
            LocalTimeKind::Up => "up",
            LocalTimeKind::Down => "down",
            LocalTimeKind::UpCross => "upcross",
            LocalTimeKind::UpBounce => "upbounce",
            LocalTimeKind::DownCross => "downcross",
            LocalTimeKind::DownBounce => "downbounce",
        }
    }

    /// Whether time `j` of `values` is counted at site `values[j]`.
    /// Needs `values[j + 1]` for every kind but the total.
    #[inline]
    pub fn counts_at(self, values: &[i64], j: usize) -> bool {
        let x = values[j];
        let next = || values[j + 1] - x;
        let prev = || if j == 0 { None } else { Some(x - values[j - 1]) };
        match self {
            LocalTimeKind::Total => true,
            LocalTimeKind::Up => next() == 1,
            LocalTimeKind::Down => next() == -1,
            LocalTimeKind::UpCross => prev() == Some(1) && next() == 1,
            LocalTimeKind::UpBounce => prev() == Some(-1) && next() == 1,
            LocalTimeKind::DownCross => prev() == Some(-1) && next() == -1,
            LocalTimeKind::DownBounce => prev() == Some(1) && next() == -1,
        }
    }
}

impl std::fmt::Display for LocalTimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LocalTimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LocalTimeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown local-time kind {s:?}")))
    }
}

/// `l^kind(k, x)` for `0 <= k <= k_max`, stored as sorted counted times per site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLocalTime {
    level: u32,
    kind: LocalTimeKind,
    k_max: usize,
    min_site: i64,
    visits: Vec<Vec<u32>>,
    /// Site counted at each time `j < k_max`, if any.
    counted: Vec<Option<i64>>,
}

pub fn lattice_local_time(
    walk: &WalkPath,
    kind: LocalTimeKind,
    k_max: usize,
) -> Result<LatticeLocalTime> {
    if walk.len_steps() < k_max {
        return Err(Error::PathExhausted {
            level: walk.level(),
            needed: k_max,
            available: walk.len_steps(),
        });
    }
    let values = walk.values();
    let (lo, hi) = values[..=k_max]
        .iter()
        .fold((0i64, 0i64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mut visits = vec![Vec::new(); (hi - lo + 1) as usize];
    let mut counted = Vec::with_capacity(k_max);
    for j in 0..k_max {
        if kind.counts_at(values, j) {
            visits[(values[j] - lo) as usize].push(j as u32);
            counted.push(Some(values[j]));
        } else {
            counted.push(None);
        }
    }
    Ok(LatticeLocalTime {
        level: walk.level(),
        kind,
        k_max,
        min_site: lo,
        visits,
        counted,
    })
}

impl LatticeLocalTime {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn kind(&self) -> LocalTimeKind {
        self.kind
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Inclusive range of stored sites; counts vanish outside it.
    pub fn site_range(&self) -> (i64, i64) {
        (self.min_site, self.min_site + self.visits.len() as i64 - 1)
    }

    /// Counted times at site `x`, in increasing order.
    pub fn visit_times(&self, x: i64) -> &[u32] {
        usize::try_from(x - self.min_site)
            .ok()
            .and_then(|i| self.visits.get(i))
            .map_or(&[], Vec::as_slice)
    }

    /// `l^kind(k, x)`; `k` is clamped to `k_max`.
    pub fn count(&self, k: usize, x: i64) -> u32 {
        let times = self.visit_times(x);
        times.partition_point(|&j| (j as usize) < k) as u32
    }

    /// The site whose count increases between `k` and `k + 1`.
    pub fn counted_site(&self, k: usize) -> Option<i64> {
        self.counted.get(k).copied().flatten()
    }
}

/// `l(k, 0) = 1 + #{0 < j <= k - 1 : S(j) = 0}`.
pub fn origin_identity_check(walk: &WalkPath, k: usize) -> Result<bool> {
    if k == 0 || k > walk.len_steps() {
        return Err(Error::OutOfRange(format!(
            "origin identity needs 1 <= k <= {}, got {k}",
            walk.len_steps()
        )));
    }
    let total = lattice_local_time(walk, LocalTimeKind::Total, k)?.count(k, 0);
    let usual = walk.values()[1..k].iter().filter(|&&v| v == 0).count() as u32;
    Ok(total == 1 + usual)
}
