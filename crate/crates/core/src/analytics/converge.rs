//! Decay of consecutive-level distances across levels.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::{sup_lattice_distance_consecutive, sup_path_distance, LatticeStatistic};
use super::rate::{rate_fit, RateFit};
use crate::error::Result;
use crate::twist::{build_family_with, FamilyConfig};
use crate::walk::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSample {
    pub replication: u64,
    pub m: u32,
    /// `sup_{t <= K} |B~_{m+1}(t) - B~_m(t)|`.
    pub path: f64,
    /// `sup |L_{m+1} - L_m|` on the coarse lattice.
    pub local: f64,
    /// `sup |L+_{m+1} - L_m / 2|` on the coarse lattice.
    pub up_half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: u32,
    pub path: f64,
    pub local: f64,
    pub up_half: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub path_fit: Option<RateFit>,
    pub local_fit: Option<RateFit>,
    pub up_half_fit: Option<RateFit>,
    pub samples: Vec<ConvergenceSample>,
}

pub fn convergence_study(
    master_seed: u64,
    n_seeds: usize,
    levels: RangeInclusive<u32>,
    horizon: f64,
    family: &FamilyConfig,
) -> Result<ConvergenceStudy> {
    let top = *levels.end() + 1;
    let per_seed: Vec<Vec<ConvergenceSample>> = (0..n_seeds as u64)
        .into_par_iter()
        .map(|rep| {
            let fam = build_family_with(SeedSpec::new(master_seed, rep), top, horizon, family)?;
            levels
                .clone()
                .map(|m| {
                    Ok(ConvergenceSample {
                        replication: rep,
                        m,
                        path: sup_path_distance(&fam.scaled(m), &fam.scaled(m + 1), horizon)?,
                        local: sup_lattice_distance_consecutive(&fam, m, horizon, LatticeStatistic::Total)?,
                        up_half: sup_lattice_distance_consecutive(&fam, m, horizon, LatticeStatistic::UpHalf)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let samples: Vec<ConvergenceSample> = per_seed.into_iter().flatten().collect();
    let rows: Vec<ConvergenceRow> = levels
        .map(|m| {
            let of_m: Vec<_> = samples.iter().filter(|s| s.m == m).collect();
            let n = of_m.len() as f64;
            ConvergenceRow {
                m,
                path: of_m.iter().map(|s| s.path).sum::<f64>() / n,
                local: of_m.iter().map(|s| s.local).sum::<f64>() / n,
                up_half: of_m.iter().map(|s| s.up_half).sum::<f64>() / n,
            }
        })
        .collect();
    let fit = |f: fn(&ConvergenceRow) -> f64| {
        let pts: Vec<(u32, f64)> = rows.iter().map(|r| (r.m, f(r))).collect();
        rate_fit(&pts).ok()
    };
    Ok(ConvergenceStudy {
        path_fit: fit(|r| r.path),
        local_fit: fit(|r| r.local),
        up_half_fit: fit(|r| r.up_half),
        rows,
        samples,
    })
}
