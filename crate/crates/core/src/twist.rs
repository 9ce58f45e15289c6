//! Twist-and-shrink construction of a nested family of simple walks.
//!
//! Level `m+1` is obtained from its raw steps by cutting the walk at the
//! times `T_{m+1}(k)` where it first moves two units away from the previous
//! cut, and flipping each such bridge whose net displacement disagrees with
//! `2 * X~_m(k+1)`. The shrunken path `B~_m(t) = 2^-m S~_m(t 4^m)` of each
//! level then revisits the values of the level below in order.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::walk::{SeedSpec, StepSequence, StepStream, WalkPath};

/// Default per-level cap on raw steps drawn during lazy extension.
pub const DEFAULT_STEP_CAP: usize = 1 << 31;

/// The time `numerator * 4^-scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicTime {
    pub numerator: u64,
    pub scale: u32,
}

impl DyadicTime {
    pub fn new(numerator: u64, scale: u32) -> Self {
        Self { numerator, scale }
    }

    /// Lattice time `k * 4^-m` of level `m`.
    pub fn lattice(k: u64, m: u32) -> Self {
        Self::new(k, m)
    }

    /// Numerator at a finer scale, or `None` if `scale` is coarser than `self`.
    pub fn at_scale(&self, scale: u32) -> Option<u64> {
        let d = scale.checked_sub(self.scale)?;
        self.numerator.checked_mul(1u64.checked_shl(2 * d)?)
    }

    pub fn value<S: Scalar>(&self) -> S {
        S::dyadic(self.numerator as i64, 2 * self.scale)
    }
}

fn ceil_index(horizon: f64, m: u32) -> usize {
    (horizon * 4f64.powi(m as i32)).ceil() as usize
}

/// `K_m = floor(K 4^m)`, the last lattice index with `k 4^-m <= K`.
pub fn covered_index(horizon: f64, m: u32) -> usize {
    (horizon * 4f64.powi(m as i32)).floor() as usize
}

/// Stopping times `T(0) = 0 < T(1) < ...` at which a walk first sits two
/// units away from its previous stopping value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenVisitTimes {
    level: u32,
    times: Vec<usize>,
}

impl EvenVisitTimes {
    pub fn from_times(level: u32, times: Vec<usize>) -> Result<Self> {
        if times.first() != Some(&0) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "even-visit times must start at 0 and increase strictly".into(),
            ));
        }
        Ok(Self { level, times })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn times(&self) -> &[usize] {
        &self.times
    }

    /// `T(k)`, if computed.
    #[inline]
    pub fn get(&self, k: usize) -> Option<usize> {
        self.times.get(k).copied()
    }

    /// Number of complete bridges, i.e. the largest `k` with `T(k)` known.
    pub fn bridges(&self) -> usize {
        self.times.len() - 1
    }
}

/// All complete stopping times contained in `path`.
pub(crate) fn visit_times_prefix(path: &WalkPath) -> Vec<usize> {
    let values = path.values();
    let mut times = vec![0];
    let mut anchor = values[0];
    for (n, &v) in values.iter().enumerate().skip(1) {
        if (v - anchor).abs() == 2 {
            times.push(n);
            anchor = v;
        }
    }
    times
}

/// `T(0..=max_k)` for `path`.
pub fn even_visit_times(path: &WalkPath, max_k: usize) -> Result<EvenVisitTimes> {
    let mut times = visit_times_prefix(path);
    if times.len() <= max_k {
        return Err(Error::PathExhausted {
            level: path.level(),
            needed: max_k,
            available: path.len_steps(),
        });
    }
    times.truncate(max_k + 1);
    Ok(EvenVisitTimes {
        level: path.level(),
        times,
    })
}

/// Twists the raw steps of one level against the twisted walk one level
/// below, bridge by bridge, for every step of `prev_twisted`.
pub fn twist_level(prev_twisted: &WalkPath, raw_steps: &StepSequence) -> Result<WalkPath> {
    let level = raw_steps.level();
    let needed = prev_twisted.len_steps();
    let steps = raw_steps.steps();
    let mut out = WalkPath::new(level);
    let mut start = 0usize;
    for k in 0..needed {
        let desired = prev_twisted.step(k + 1);
        let mut sum = 0i64;
        let mut end = start;
        while sum.abs() != 2 {
            if end == steps.len() {
                return Err(Error::PathExhausted {
                    level,
                    needed: k + 1,
                    available: steps.len(),
                });
            }
            sum += i64::from(steps[end]);
            end += 1;
        }
        let keep = sum == 2 * i64::from(desired);
        for &x in &steps[start..end] {
            out.push_step(if keep { x } else { -x });
        }
        start = end;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyConfig {
    /// Maximum raw steps drawn at any single level.
    pub step_cap: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

struct LevelBuilder {
    stream: StepStream,
    walk: WalkPath,
    times: Vec<usize>,
}

struct FamilyBuilder {
    levels: Vec<LevelBuilder>,
    cap: usize,
    scratch: Vec<i8>,
}

impl FamilyBuilder {
    fn new(seed: SeedSpec, m_max: u32, cap: usize) -> Self {
        let levels = (0..=m_max)
            .map(|m| LevelBuilder {
                stream: seed.stream(m),
                walk: WalkPath::new(m),
                times: vec![0],
            })
            .collect();
        Self {
            levels,
            cap,
            scratch: Vec::new(),
        }
    }

    fn bridges(&self, m: usize) -> usize {
        self.levels[m].times.len() - 1
    }

    fn ensure_len(&mut self, m: usize, len: usize) -> Result<()> {
        if m == 0 {
            let level = &mut self.levels[0];
            while level.walk.len_steps() < len {
                if level.stream.drawn() >= self.cap {
                    return Err(Error::StepCapExceeded {
                        level: 0,
                        cap: self.cap,
                    });
                }
                let x = level.stream.next_step();
                level.walk.push_step(x);
            }
            return Ok(());
        }
        while self.levels[m].walk.len_steps() < len {
            self.add_bridge(m)?;
        }
        Ok(())
    }

    fn ensure_bridges(&mut self, m: usize, bridges: usize) -> Result<()> {
        while self.bridges(m) < bridges {
            self.add_bridge(m)?;
        }
        Ok(())
    }

    fn add_bridge(&mut self, m: usize) -> Result<()> {
        let b = self.bridges(m);
        self.ensure_len(m - 1, b + 1)?;
        let desired = i64::from(self.levels[m - 1].walk.step(b + 1));
        let cap = self.cap;
        let level = &mut self.levels[m];
        self.scratch.clear();
        let mut sum = 0i64;
        while sum.abs() != 2 {
            if level.stream.drawn() >= cap {
                return Err(Error::StepCapExceeded {
                    level: m as u32,
                    cap,
                });
            }
            let x = level.stream.next_step();
            sum += i64::from(x);
            self.scratch.push(x);
        }
        let keep = sum == 2 * desired;
        for &x in &self.scratch {
            level.walk.push_step(if keep { x } else { -x });
        }
        level.times.push(level.walk.len_steps());
        Ok(())
    }

    fn composed(&self, from: usize, to: usize, k: usize) -> usize {
        (from + 1..=to).fold(k, |k, n| self.levels[n].times[k])
    }

    fn finish(self, horizon: f64) -> NestedWalkFamily {
        let mut walks = Vec::with_capacity(self.levels.len());
        let mut times = Vec::with_capacity(self.levels.len().saturating_sub(1));
        for (m, level) in self.levels.into_iter().enumerate() {
            walks.push(level.walk);
            if m > 0 {
                times.push(EvenVisitTimes {
                    level: m as u32,
                    times: level.times,
                });
            }
        }
        NestedWalkFamily {
            horizon,
            walks,
            times,
        }
    }
}

/// Twisted walks `S~_0, ..., S~_{m_max}` together with the stopping times
/// `T_1, ..., T_{m_max}` used to twist them.
///
/// Every level `m` covers at least `ceil(K 4^m)` steps, level `m+1` holds
/// `T_{m+1}(k)` for every `k <= ceil(K 4^m)`, and every composition
/// `T_{m,n}(floor(K 4^m))` with `n <= m_max` is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedWalkFamily {
    horizon: f64,
    walks: Vec<WalkPath>,
    times: Vec<EvenVisitTimes>,
}

pub fn build_family(seed: SeedSpec, m_max: u32, horizon: f64) -> Result<NestedWalkFamily> {
    build_family_with(seed, m_max, horizon, &FamilyConfig::default())
}

pub fn build_family_with(
    seed: SeedSpec,
    m_max: u32,
    horizon: f64,
    config: &FamilyConfig,
) -> Result<NestedWalkFamily> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Domain(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    let top = m_max as usize;
    let mut builder = FamilyBuilder::new(seed, m_max, config.step_cap);
    for m in 0..=top {
        builder.ensure_len(m, ceil_index(horizon, m as u32))?;
    }
    for n in 1..=top {
        let mut need = ceil_index(horizon, n as u32 - 1);
        for m in 0..n.saturating_sub(1) {
            let k = covered_index(horizon, m as u32);
            need = need.max(builder.composed(m, n - 1, k));
        }
        builder.ensure_bridges(n, need)?;
    }
    Ok(builder.finish(horizon))
}

impl NestedWalkFamily {
    /// Assembles a family from precomputed parts; `times[i]` belongs to
    /// level `i + 1`. No refinement check is performed.
    pub fn from_levels(
        horizon: f64,
        walks: Vec<WalkPath>,
        times: Vec<EvenVisitTimes>,
    ) -> Result<Self> {
        if walks.is_empty() || times.len() + 1 != walks.len() {
            return Err(Error::Domain(
                "need one walk per level and stopping times for every level above 0".into(),
            ));
        }
        Ok(Self {
            horizon,
            walks,
            times,
        })
    }

    pub fn m_max(&self) -> u32 {
        self.walks.len() as u32 - 1
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn walk(&self, m: u32) -> &WalkPath {
        &self.walks[m as usize]
    }

    /// `T_m`, defined for `1 <= m <= m_max`.
    pub fn visit_times(&self, m: u32) -> Option<&EvenVisitTimes> {
        (m >= 1).then(|| self.times.get(m as usize - 1)).flatten()
    }

    pub fn scaled(&self, m: u32) -> ScaledPath<'_> {
        ScaledPath::borrowed(m, self.walk(m))
    }

    /// `floor(K 4^m)` for the family horizon.
    pub fn covered_index(&self, m: u32) -> usize {
        covered_index(self.horizon, m)
    }

    #[cfg(test)]
    pub(crate) fn walk_mut(&mut self, m: u32) -> &mut WalkPath {
        &mut self.walks[m as usize]
    }

    /// `T_{m+1}(k)`, failing if level `m+1` does not hold it.
    pub fn visit_time(&self, m_plus_one: u32, k: usize) -> Result<usize> {
        self.visit_times(m_plus_one)
            .and_then(|t| t.get(k))
            .ok_or_else(|| {
                Error::OutOfRange(format!("T_{m_plus_one}({k}) not available"))
            })
    }

    /// `sup_{k <= floor(K 4^m)} |T_{m+1}(k) - 4k|`, in units of `4^-(m+1)`.
    pub fn time_lag_sup_ticks(&self, m: u32, horizon: f64) -> Result<u64> {
        if m >= self.m_max() {
            return Err(Error::OutOfRange(format!(
                "time lag needs level {} but m_max is {}",
                m + 1,
                self.m_max()
            )));
        }
        let k_max = covered_index(horizon, m);
        let times = self.visit_times(m + 1).expect("level above 0");
        if times.bridges() < k_max {
            return Err(Error::OutOfRange(format!(
                "level {} covers {} bridges, {} needed",
                m + 1,
                times.bridges(),
                k_max
            )));
        }
        Ok(times.times()[..=k_max]
            .iter()
            .enumerate()
            .map(|(k, &t)| (t as i64 - 4 * k as i64).unsigned_abs())
            .max()
            .unwrap_or(0))
    }

    /// `sup_{0 <= k 4^-m <= K} |T_{m+1}(k) 4^-(m+1) - k 4^-m|`.
    pub fn time_lag_sup<S: Scalar>(&self, m: u32, horizon: f64) -> Result<S> {
        let ticks = self.time_lag_sup_ticks(m, horizon)?;
        Ok(S::dyadic(ticks as i64, 2 * (m + 1)))
    }
}

/// `B~_m(t) = 2^-m S~_m(t 4^m)`, linearly interpolated between lattice times.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPath<'a> {
    level: u32,
    walk: Cow<'a, WalkPath>,
}

impl<'a> ScaledPath<'a> {
    pub fn borrowed(level: u32, walk: &'a WalkPath) -> Self {
        Self {
            level,
            walk: Cow::Borrowed(walk),
        }
    }

    pub fn owned(level: u32, walk: WalkPath) -> ScaledPath<'static> {
        ScaledPath {
            level,
            walk: Cow::Owned(walk),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn walk(&self) -> &WalkPath {
        &self.walk
    }

    /// Number of lattice steps of size `4^-m` covered.
    pub fn lattice_len(&self) -> usize {
        self.walk.len_steps()
    }

    /// `2^-m S(k)`.
    pub fn lattice_value<S: Scalar>(&self, k: usize) -> S {
        S::dyadic(self.walk.value(k), self.level)
    }

    pub fn evaluate<S: Scalar>(&self, t: DyadicTime) -> Result<S> {
        let m = self.level;
        let len = self.walk.len_steps() as u64;
        let out_of_range = || {
            Error::OutOfRange(format!(
                "time {}/4^{} beyond level-{m} path of {len} steps",
                t.numerator, t.scale
            ))
        };
        if t.scale <= m {
            let idx = t.at_scale(m).ok_or_else(out_of_range)?;
            if idx > len {
                return Err(out_of_range());
            }
            return Ok(self.lattice_value(idx as usize));
        }
        let d = t.scale - m;
        let cell = 1u64 << (2 * d);
        let q = t.numerator / cell;
        let r = t.numerator % cell;
        if r == 0 {
            if q > len {
                return Err(out_of_range());
            }
            return Ok(self.lattice_value(q as usize));
        }
        if q + 1 > len {
            return Err(out_of_range());
        }
        let s0 = self.walk.value(q as usize);
        let s1 = self.walk.value(q as usize + 1);
        let numer = s0 * cell as i64 + r as i64 * (s1 - s0);
        Ok(S::dyadic(numer, m + 2 * d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementViolation {
    /// Coarse level `m` of the failing pair `(m, m+1)`.
    pub level: u32,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub holds: bool,
    pub first_violation: Option<RefinementViolation>,
    /// Number of `(m, k)` pairs compared.
    pub checked: usize,
}

/// Re-derives the stopping times of every level from its twisted walk and
/// checks `B~_{m+1}(T_{m+1}(k) 4^-(m+1)) = B~_m(k 4^-m)` at every covered `k`.
pub fn check_refinement(family: &NestedWalkFamily) -> RefinementCheck {
    let mut checked = 0;
    for m in 0..family.m_max() {
        let coarse = family.scaled(m);
        let fine = family.scaled(m + 1);
        let stored = family.visit_times(m + 1).expect("level above 0");
        let recomputed = visit_times_prefix(fine.walk());
        let k_end = stored.bridges().min(coarse.lattice_len());
        for k in 0..=k_end {
            checked += 1;
            let violation = RefinementCheck {
                holds: false,
                first_violation: Some(RefinementViolation { level: m, k }),
                checked,
            };
            let Some(&t) = recomputed.get(k) else {
                return violation;
            };
            if t != stored.times()[k] {
                return violation;
            }
            if t > fine.lattice_len() {
                return violation;
            }
            let fine_value = fine.walk().value(t);
            if fine_value != 2 * coarse.walk().value(k) {
                return violation;
            }
        }
    }
    RefinementCheck {
        holds: true,
        first_violation: None,
        checked,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::partial_sums;

    fn walk(steps: &[i8]) -> WalkPath {
        partial_sums(&StepSequence::from_steps(1, steps.to_vec()).unwrap())
    }

    #[test]
    fn straight_walk_hits_two_at_step_two() {
        let t = even_visit_times(&walk(&[1, 1, 1, 1]), 2).unwrap();
        assert_eq!(t.times(), &[0, 2, 4]);
    }

    #[test]
    fn alternating_walk_never_completes_a_bridge() {
        let steps: Vec<i8> = (0..10).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        assert!(matches!(
            even_visit_times(&walk(&steps), 1),
            Err(Error::PathExhausted { .. })
        ));
    }

    #[test]
    fn down_then_up_trace() {
        // S = 0,-1,-2,-1,0,1,2: T(1) = 2 at -2, T(2) = 4 at 0, T(3) = 6 at 2
        let t = even_visit_times(&walk(&[-1, -1, 1, 1, 1, 1]), 3).unwrap();
        assert_eq!(t.times(), &[0, 2, 4, 6]);
    }

    #[test]
    fn twisting_flips_a_disagreeing_bridge() {
        let prev = WalkPath::from_values(0, vec![0, 1]).unwrap();
        let raw = StepSequence::from_steps(1, vec![-1, 1, -1, -1]).unwrap();
        let twisted = twist_level(&prev, &raw).unwrap();
        assert_eq!(twisted.values(), &[0, 1, 0, 1, 2]);
        let t = even_visit_times(&twisted, 1).unwrap();
        assert_eq!(twisted.value(t.times()[1]), 2 * prev.value(1));
    }

    #[test]
    fn twisting_keeps_an_agreeing_bridge() {
        let prev = WalkPath::from_values(0, vec![0, -1]).unwrap();
        let raw = StepSequence::from_steps(1, vec![-1, 1, -1, -1]).unwrap();
        let twisted = twist_level(&prev, &raw).unwrap();
        assert_eq!(twisted.values(), &[0, -1, 0, -1, -2]);
    }

    #[test]
    fn twisting_needs_enough_raw_steps() {
        let prev = WalkPath::from_values(0, vec![0, 1, 2]).unwrap();
        let raw = StepSequence::from_steps(1, vec![1, 1, 1]).unwrap();
        assert!(matches!(
            twist_level(&prev, &raw),
            Err(Error::PathExhausted { .. })
        ));
    }

    #[test]
    fn level_zero_family_is_a_plain_walk() {
        let seed = SeedSpec::new(5, 0);
        let fam = build_family(seed, 0, 3.5).unwrap();
        assert_eq!(fam.m_max(), 0);
        assert_eq!(fam.walk(0).len_steps(), 4);
        let raw = partial_sums(&crate::walk::sample_steps(seed, 0, 4));
        assert_eq!(fam.walk(0), &raw);
    }

    #[test]
    fn family_matches_standalone_twisting() {
        let seed = SeedSpec::new(17, 2);
        let fam = build_family(seed, 3, 1.0).unwrap();
        for m in 1..=3u32 {
            let prev = fam.walk(m - 1);
            let t = fam.visit_times(m).unwrap();
            let raw_len = t.times()[prev.len_steps().min(t.bridges())];
            let raw = crate::walk::sample_steps(seed, m, raw_len);
            let coarse = prev.truncated(t.bridges());
            let twisted = twist_level(&coarse, &raw).unwrap();
            assert_eq!(twisted.values(), &fam.walk(m).values()[..=twisted.len_steps()]);
        }
    }

    #[test]
    fn built_family_refines() {
        for rep in 0..10 {
            let fam = build_family(SeedSpec::new(3, rep), 4, 1.0).unwrap();
            let check = check_refinement(&fam);
            assert!(check.holds, "{check:?}");
            assert!(check.checked > 0);
        }
    }

    #[test]
    fn single_level_refinement_is_vacuous() {
        let fam = build_family(SeedSpec::new(3, 0), 0, 1.0).unwrap();
        let check = check_refinement(&fam);
        assert!(check.holds);
        assert_eq!(check.checked, 0);
    }

    #[test]
    fn negated_step_is_detected() {
        let mut fam = build_family(SeedSpec::new(8, 1), 3, 1.0).unwrap();
        let values: Vec<i64> = {
            let w = fam.walk(2);
            let mut steps: Vec<i8> = w.steps().collect();
            steps[5] = -steps[5];
            WalkPath::from_steps(2, &steps).values().to_vec()
        };
        *fam.walk_mut(2) = WalkPath::from_values(2, values).unwrap();
        let check = check_refinement(&fam);
        assert!(!check.holds);
        let v = check.first_violation.unwrap();
        assert!(v.level == 1 || v.level == 2, "{v:?}");
    }

    #[test]
    fn families_are_deterministic() {
        let s = SeedSpec::new(1234, 9);
        assert_eq!(build_family(s, 4, 1.0).unwrap(), build_family(s, 4, 1.0).unwrap());
    }

    #[test]
    fn visit_times_of_raw_and_twisted_walks_coincide() {
        let seed = SeedSpec::new(44, 0);
        let fam = build_family(seed, 3, 1.0).unwrap();
        let twisted = fam.walk(3);
        let raw = partial_sums(&crate::walk::sample_steps(seed, 3, twisted.len_steps()));
        assert_eq!(visit_times_prefix(&raw), visit_times_prefix(twisted));
        assert_eq!(
            &visit_times_prefix(twisted)[..],
            fam.visit_times(3).unwrap().times()
        );
    }

    #[test]
    fn evaluate_lattice_and_midpoints() {
        let w = WalkPath::from_values(2, vec![0, 1, 2, 1]).unwrap();
        let p = ScaledPath::borrowed(2, &w);
        assert_eq!(p.evaluate::<f64>(DyadicTime::new(0, 2)).unwrap(), 0.0);
        assert_eq!(p.evaluate::<f64>(DyadicTime::new(2, 2)).unwrap(), 0.5);
        // halfway between S = 1 and S = 2 at level 2
        assert_eq!(p.evaluate::<f64>(DyadicTime::new(6, 3)).unwrap(), 1.5 / 4.0);
        assert!(p.evaluate::<f64>(DyadicTime::new(4, 2)).is_err());
        assert_eq!(p.evaluate::<f64>(DyadicTime::new(0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn time_lag_anchors_and_bruteforce() {
        let fam = build_family(SeedSpec::new(21, 0), 4, 1.0).unwrap();
        for m in 0..4u32 {
            let t = fam.visit_times(m + 1).unwrap();
            assert_eq!(t.get(0), Some(0));
            let k_max = fam.covered_index(m);
            let mut brute = 0.0f64;
            for k in 0..=k_max {
                let lag = (t.times()[k] as f64 / 4f64.powi(m as i32 + 1)
                    - k as f64 / 4f64.powi(m as i32))
                .abs();
                brute = brute.max(lag);
            }
            assert_eq!(fam.time_lag_sup::<f64>(m, 1.0).unwrap(), brute);
        }
        assert!(fam.time_lag_sup::<f64>(4, 1.0).is_err());
    }

    #[test]
    fn exact_match_gives_zero_lag() {
        let walks = vec![
            WalkPath::from_values(0, vec![0, 1, 2]).unwrap(),
            WalkPath::from_values(1, vec![0, 1, 2, 3, 4, 3, 4, 5, 4]).unwrap(),
        ];
        let times = vec![EvenVisitTimes::from_times(1, vec![0, 4, 8]).unwrap()];
        let fake = NestedWalkFamily::from_levels(0.5, walks, times).unwrap();
        assert_eq!(fake.time_lag_sup_ticks(0, 2.0).unwrap(), 0);
    }

    #[test]
    fn family_coverage_guarantees() {
        let horizon = 1.5;
        let fam = build_family(SeedSpec::new(77, 4), 4, horizon).unwrap();
        for m in 0..=4u32 {
            assert!(fam.walk(m).len_steps() >= ceil_index(horizon, m));
        }
        for n in 1..=4u32 {
            for m in 0..n {
                let mut k = fam.covered_index(m);
                for level in m + 1..=n {
                    k = fam.visit_time(level, k).unwrap();
                }
                assert!(k <= fam.walk(n).len_steps());
            }
        }
    }

    #[test]
    fn rejects_bad_horizon() {
        assert!(build_family(SeedSpec::new(1, 1), 2, 0.0).is_err());
        assert!(build_family(SeedSpec::new(1, 1), 2, f64::NAN).is_err());
    }

    #[test]
    fn tiny_cap_is_reported() {
        let cfg = FamilyConfig { step_cap: 10 };
        assert!(matches!(
            build_family_with(SeedSpec::new(1, 1), 3, 1.0, &cfg),
            Err(Error::StepCapExceeded { .. })
        ));
    }
}
