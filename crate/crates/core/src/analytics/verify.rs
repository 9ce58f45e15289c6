//! Monte Carlo verification of the lemma bounds over many seeds.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{hoeffding_weight, BoundParams, LemmaId};
use super::distance::{
    sup_field_distance, sup_lattice_distance_consecutive, sup_lattice_path_distance,
    sup_path_distance, LatticeStatistic,
};
use super::stats::clopper_pearson_upper;
use crate::error::{Error, Result};
use crate::local_time::{build_weighted_field, lattice_local_time, LocalTimeField, LocalTimeKind};
use crate::skorohod::{embedded_walk, skorohod_times, verify_embedding_agreement};
use crate::twist::{build_family_with, covered_index, FamilyConfig, NestedWalkFamily};
use crate::walk::{sample_steps, SeedSpec};

pub const MIN_SEEDS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub master_seed: u64,
    pub n_seeds: usize,
    pub first_replication: u64,
    /// Level standing in for the limit; `m + 3` when unset.
    pub reference_level: Option<u32>,
    /// Bounds are only enforced when `K 4^m` reaches this floor.
    pub floor: f64,
    pub confidence: f64,
    pub family: FamilyConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            n_seeds: 2000,
            first_replication: 0,
            reference_level: None,
            floor: 1024.0,
            confidence: 0.95,
            family: FamilyConfig::default(),
        }
    }
}

impl VerifyConfig {
    pub fn reference_for(&self, m: u32) -> u32 {
        self.reference_level.unwrap_or(m + 3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Informational,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Informational => "informational",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma: LemmaId,
    pub m: u32,
    pub horizon: f64,
    pub c: f64,
    pub reference_level: Option<u32>,
    pub threshold: f64,
    pub bound: f64,
    pub n_seeds: usize,
    pub violations: u64,
    pub frequency: f64,
    /// One-sided exact upper confidence limit of the violation probability.
    pub ucl: f64,
    pub confidence: f64,
    pub status: Status,
    pub statistics: Vec<f64>,
}

impl VerificationReport {
    pub fn from_statistics(
        lemma: LemmaId,
        params: &BoundParams<f64>,
        statistics: Vec<f64>,
        config: &VerifyConfig,
    ) -> Self {
        let threshold = lemma.threshold(params);
        let bound = lemma.probability_bound(params);
        let n = statistics.len() as u64;
        let violations = statistics.iter().filter(|&&s| s >= threshold).count() as u64;
        let ucl = clopper_pearson_upper(violations, n, config.confidence);
        let status = if params.lattice_size() < config.floor {
            Status::Informational
        } else if ucl <= bound {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            lemma,
            m: params.m,
            horizon: params.k,
            c: params.c,
            reference_level: lemma
                .needs_reference()
                .then(|| config.reference_for(params.m)),
            threshold,
            bound,
            n_seeds: statistics.len(),
            violations,
            frequency: violations as f64 / n as f64,
            ucl,
            confidence: config.confidence,
            status,
            statistics,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Per-seed state shared by the statistics of several lemmas.
struct SeedContext<'a> {
    seed: SeedSpec,
    params: &'a BoundParams<f64>,
    reference: u32,
    family: Option<NestedWalkFamily>,
    fields: HashMap<(u32, LocalTimeKind, u32), LocalTimeField>,
}

impl<'a> SeedContext<'a> {
    fn family(&self) -> &NestedWalkFamily {
        self.family.as_ref().expect("family built for walk statistics")
    }

    fn field(&mut self, level: u32, kind: LocalTimeKind, weight: u32) -> Result<&LocalTimeField> {
        let key = (level, kind, weight);
        if !self.fields.contains_key(&key) {
            let walk = self.family().walk(level);
            let lt = lattice_local_time(walk, kind, walk.len_steps())?;
            self.fields.insert(key, build_weighted_field(lt, weight)?);
        }
        Ok(&self.fields[&key])
    }

    fn field_distance(&mut self, a: (u32, LocalTimeKind, u32), b: (u32, LocalTimeKind, u32)) -> Result<f64> {
        self.field(a.0, a.1, a.2)?;
        self.field(b.0, b.1, b.2)?;
        sup_field_distance(&self.fields[&a], &self.fields[&b], self.params.k)
    }

    fn statistic(&mut self, lemma: LemmaId) -> Result<f64> {
        let p = self.params;
        let (m, k) = (p.m, p.k);
        let r = self.reference;
        use LocalTimeKind::{Total, Up};
        Ok(match lemma {
            LemmaId::Lemma1 | LemmaId::Hoeffding => {
                let n = LemmaId::sum_length(p) as usize;
                let steps = sample_steps(self.seed, 0, n);
                let weighted = lemma == LemmaId::Hoeffding;
                let mut s = 0.0f64;
                let mut best = 0.0f64;
                for (i, &x) in steps.steps().iter().enumerate() {
                    let a = if weighted { hoeffding_weight(i as u64 + 1) } else { 1.0 };
                    s += a * f64::from(x);
                    best = best.max(s.abs());
                }
                best
            }
            LemmaId::Lemma2 => self.family().time_lag_sup::<f64>(m, k)?,
            LemmaId::Lemma3a => sup_lattice_path_distance(self.family(), m, k)?,
            LemmaId::Lemma3b => {
                let fam = self.family();
                let mut best = 0.0f64;
                for n in m + 1..=r {
                    best = best.max(sup_path_distance(&fam.scaled(m), &fam.scaled(n), k)?);
                }
                best
            }
            LemmaId::Theorem1 => {
                let fam = self.family();
                sup_path_distance(&fam.scaled(m), &fam.scaled(r), k)?
            }
            LemmaId::Lemma4 => verify_embedding_agreement(self.family(), m, k, p.c)?.max_lag,
            LemmaId::Theorem2 => {
                let fam = self.family();
                let reference = fam.scaled(r);
                let km = covered_index(k, m);
                let times = skorohod_times(&reference, m, km)?;
                let b = embedded_walk(&reference, &times);
                sup_path_distance(&b, &reference, km as f64 * 0.25f64.powi(m as i32))?
            }
            LemmaId::Lemma5 => {
                sup_lattice_distance_consecutive(self.family(), m, k, LatticeStatistic::Total)?
            }
            LemmaId::Lemma6Up => {
                sup_lattice_distance_consecutive(self.family(), m, k, LatticeStatistic::UpHalf)?
            }
            LemmaId::Lemma6Down => {
                sup_lattice_distance_consecutive(self.family(), m, k, LatticeStatistic::DownHalf)?
            }
            LemmaId::Lemma7Half => sup_lattice_distance_consecutive(
                self.family(),
                m,
                k,
                LatticeStatistic::HalfSiteTotal,
            )?,
            LemmaId::Lemma7 => {
                let mut best = 0.0f64;
                for n in m + 1..=r {
                    best = best.max(self.field_distance((m, Total, 0), (n, Total, 0))?);
                }
                best
            }
            LemmaId::Theorem3 => self.field_distance((m, Total, 0), (r, Total, 0))?,
            LemmaId::Theorem4 => self.field_distance((m + 1, Up, 0), (r, Total, 1))?,
        })
    }
}

fn check_levels(lemmas: &[LemmaId], m: u32, reference: u32) -> Result<u32> {
    let mut top = 0;
    for &l in lemmas {
        match l {
            LemmaId::Lemma1 | LemmaId::Hoeffding => {}
            LemmaId::Theorem4 if reference < m + 2 => {
                return Err(Error::OutOfRange(format!(
                    "{l} compares level {} against the reference; need reference >= {}",
                    m + 1,
                    m + 2
                )))
            }
            l if l.needs_reference() => {
                if reference <= m {
                    return Err(Error::OutOfRange(format!(
                        "{l} needs a reference level above {m}, got {reference}"
                    )));
                }
                top = top.max(reference);
            }
            _ => top = top.max(m + 1),
        }
        if l == LemmaId::Theorem4 {
            top = top.max(reference);
        }
    }
    Ok(top)
}

/// Statistics of every lemma in `lemmas` for one replication.
pub fn seed_statistics(
    lemmas: &[LemmaId],
    params: &BoundParams<f64>,
    seed: SeedSpec,
    config: &VerifyConfig,
) -> Result<Vec<f64>> {
    let reference = config.reference_for(params.m);
    let top = check_levels(lemmas, params.m, reference)?;
    let needs_family = lemmas
        .iter()
        .any(|l| !matches!(l, LemmaId::Lemma1 | LemmaId::Hoeffding));
    let family = if needs_family {
        Some(build_family_with(seed, top, params.k, &config.family)?)
    } else {
        None
    };
    let mut ctx = SeedContext {
        seed,
        params,
        reference,
        family,
        fields: HashMap::new(),
    };
    lemmas.iter().map(|&l| ctx.statistic(l)).collect()
}

pub fn verify_lemmas(
    lemmas: &[LemmaId],
    params: &BoundParams<f64>,
    config: &VerifyConfig,
) -> Result<Vec<VerificationReport>> {
    if config.n_seeds < MIN_SEEDS {
        return Err(Error::Domain(format!(
            "verification needs at least {MIN_SEEDS} seeds, got {}",
            config.n_seeds
        )));
    }
    check_levels(lemmas, params.m, config.reference_for(params.m))?;
    let per_seed: Vec<Vec<f64>> = (0..config.n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            let seed = SeedSpec::new(config.master_seed, config.first_replication + i);
            seed_statistics(lemmas, params, seed, config)
        })
        .collect::<Result<_>>()?;
    Ok(lemmas
        .iter()
        .enumerate()
        .map(|(i, &lemma)| {
            let stats = per_seed.iter().map(|row| row[i]).collect();
            VerificationReport::from_statistics(lemma, params, stats, config)
        })
        .collect())
}

pub fn verify_lemma(
    lemma: LemmaId,
    params: &BoundParams<f64>,
    config: &VerifyConfig,
) -> Result<VerificationReport> {
    Ok(verify_lemmas(&[lemma], params, config)?.remove(0))
}
