//! Exhaustive enumeration over all sign sequences of small length.
//!
//! Every routine walks the binary tree of step choices depth-first and
//! updates its counters incrementally, so a leaf costs `O(1)` amortised.
//! Top-level subtrees are processed in parallel and merged with integer
//! arithmetic before conversion to exact rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_PMF_LENGTH: u32 = 24;
pub const MAX_IDENTITY_LENGTH: u32 = 20;
pub const MAX_EXCURSION_DEPTH: u32 = 20;

const SPLIT: u32 = 6;

fn limit(n: u32, max: u32) -> Result<()> {
    if n > max {
        Err(Error::TooLarge { n, max })
    } else {
        Ok(())
    }
}

fn dyadic(numer: u64, shift: u32) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(1u8) << shift)
}

fn to_law<K: Ord + Copy>(counts: &BTreeMap<K, u64>, shift: u32) -> BTreeMap<K, BigRational> {
    counts.iter().map(|(&k, &c)| (k, dyadic(c, shift))).collect()
}

fn merge<K: Ord>(mut a: BTreeMap<K, u64>, b: BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    for (k, c) in b {
        *a.entry(k).or_insert(0) += c;
    }
    a
}

/// Exact law of `#{0 < i <= n : S(i) = x}` over all `2^n` walks.
pub fn pmf_by_enumeration(n: u32, x: i64) -> Result<BTreeMap<u32, BigRational>> {
    limit(n, MAX_PMF_LENGTH)?;
    fn dfs(left: u32, pos: i64, x: i64, count: u32, hist: &mut [u64]) {
        if left == 0 {
            hist[count as usize] += 1;
            return;
        }
        for step in [-1, 1] {
            let p = pos + step;
            dfs(left - 1, p, x, count + u32::from(p == x), hist);
        }
    }
    let split = n.min(SPLIT);
    let hist = (0..1u64 << split)
        .into_par_iter()
        .map(|mask| {
            let mut hist = vec![0u64; n as usize + 1];
            let mut pos = 0i64;
            let mut count = 0u32;
            for i in 0..split {
                pos += if mask >> i & 1 == 1 { 1 } else { -1 };
                count += u32::from(pos == x);
            }
            dfs(n - split, pos, x, count, &mut hist);
            hist
        })
        .reduce(
            || vec![0u64; n as usize + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(a, b)| *a += b);
                a
            },
        );
    let counts: BTreeMap<u32, u64> = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(j, c)| (j as u32, c))
        .collect();
    Ok(to_law(&counts, n))
}

/// Incremental counters of the seven local-time kinds along one walk.
struct Counters {
    offset: i64,
    crossing_start: usize,
    values: Vec<i64>,
    total: Vec<i32>,
    up: Vec<i32>,
    down: Vec<i32>,
    upcross: Vec<i32>,
    upbounce: Vec<i32>,
    downcross: Vec<i32>,
    downbounce: Vec<i32>,
    zeros_after_start: i32,
}

impl Counters {
    fn new(n: u32, crossing_start: usize) -> Self {
        let width = 2 * n as usize + 3;
        let z = || vec![0i32; width];
        let mut values = Vec::with_capacity(n as usize + 1);
        values.push(0);
        Self {
            offset: i64::from(n) + 1,
            crossing_start,
            values,
            total: z(),
            up: z(),
            down: z(),
            upcross: z(),
            upbounce: z(),
            downcross: z(),
            downbounce: z(),
            zeros_after_start: 0,
        }
    }

    /// Adds `delta` to every counter fed by index `j = len - 2`, the
    /// index whose successor was just appended.
    fn touch(&mut self, delta: i32) {
        let j = self.values.len() - 2;
        let s = &self.values;
        let x = s[j];
        let next = s[j + 1];
        let at = (x + self.offset) as usize;
        self.total[at] += delta;
        let rising = next == x + 1;
        if rising {
            self.up[at] += delta;
        } else {
            self.down[at] += delta;
        }
        if j >= self.crossing_start {
            // j = 0 has no predecessor; the mutated rule pretends it came from below.
            let prev = if j == 0 { x - 1 } else { s[j - 1] };
            let from_below = prev == x - 1;
            match (from_below, rising) {
                (true, true) => self.upcross[at] += delta,
                (false, true) => self.upbounce[at] += delta,
                (false, false) => self.downcross[at] += delta,
                (true, false) => self.downbounce[at] += delta,
            }
        }
        if j > 0 && x == 0 {
            self.zeros_after_start += delta;
        }
    }

    fn push(&mut self, step: i64) {
        let last = *self.values.last().expect("nonempty");
        self.values.push(last + step);
        self.touch(1);
    }

    fn pop(&mut self) {
        self.touch(-1);
        self.values.pop();
    }

    /// Identities at `k = len - 1`; only the site of index `k - 1` changed.
    fn holds(&self) -> bool {
        let k = self.values.len() - 1;
        let x = self.values[k - 1];
        let at = (x + self.offset) as usize;
        let s1_up = u32::from(x == 0 && self.values[1] == 1) as i32;
        let s1_down = u32::from(x == 0 && self.values[1] == -1) as i32;
        let origin = self.offset as usize;
        self.total[at] == self.up[at] + self.down[at]
            && self.up[at] == self.upcross[at] + self.upbounce[at] + s1_up
            && self.down[at] == self.downcross[at] + self.downbounce[at] + s1_down
            && self.total[origin] == 1 + self.zeros_after_start
    }
}

fn identities_hold(n: u32, crossing_start: usize) -> bool {
    fn dfs(c: &mut Counters, left: u32) -> bool {
        if left == 0 {
            return true;
        }
        for step in [-1, 1] {
            c.push(step);
            let ok = c.holds() && dfs(c, left - 1);
            c.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    if n == 0 {
        return true;
    }
    let split = n.min(SPLIT);
    (0..1u64 << split).into_par_iter().all(|mask| {
        let mut c = Counters::new(n, crossing_start);
        for i in 0..split {
            c.push(if mask >> i & 1 == 1 { 1 } else { -1 });
            if !c.holds() {
                return false;
            }
        }
        dfs(&mut c, n - split)
    })
}

/// True iff `total = up + down`, both crossing/bouncing decompositions and
/// `l(k, 0) = 1 + #{0 < j < k : S(j) = 0}` hold on every walk of length
/// `n`, every `1 <= k <= n` and every site.
pub fn identity_check_by_enumeration(n: u32) -> Result<bool> {
    limit(n, MAX_IDENTITY_LENGTH)?;
    Ok(identities_hold(n, 1))
}

/// Exact laws of the excursion variables of one coarse visit, truncated
/// after `depth` fine step pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionLaw {
    pub depth: u32,
    pub gamma: BTreeMap<u32, BigRational>,
    pub alpha: BTreeMap<u32, BigRational>,
    pub beta: BTreeMap<u32, BigRational>,
    pub x: BTreeMap<u8, BigRational>,
    /// Mass of the outcomes still open after `depth` pairs.
    pub remainder: BigRational,
}

/// Enumerates a uniform coarse step together with the raw fine pairs of
/// the bridge it drives, applies the twist, and tabulates the laws of
/// `gamma`, `alpha`, `beta` and `X` at the bridge's starting site.
pub fn excursion_law_by_enumeration(depth: u32) -> Result<ExcursionLaw> {
    limit(depth, MAX_EXCURSION_DEPTH)?;
    let shift = 2 * depth + 1;
    let mut gamma = BTreeMap::new();
    let mut alpha = BTreeMap::new();
    let mut beta = BTreeMap::new();
    let mut x = BTreeMap::new();
    let mut remainder = 0u64;
    // Raw pairs before termination are `+-` or `-+`; a twist swaps them.
    for coarse in [-1i8, 1] {
        for terminal in [-1i8, 1] {
            let flip = terminal != coarse;
            let per_depth = (0..depth)
                .into_par_iter()
                .map(|returns| {
                    let mut g = BTreeMap::new();
                    let mut a = BTreeMap::new();
                    let mut b = BTreeMap::new();
                    // Leaf weight 4^{-(returns+1)} on the 2^{-shift} grid.
                    let w = 1u64 << (shift - 1 - 2 * (returns + 1));
                    let mut pm = vec![0u64; returns as usize + 1];
                    pair_counts(returns, &mut pm);
                    for (raw_up, &paths) in pm.iter().enumerate() {
                        let raw_up = raw_up as u32;
                        let (au, bd) = if flip {
                            (returns - raw_up, raw_up)
                        } else {
                            (raw_up, returns - raw_up)
                        };
                        *g.entry(returns + 1).or_insert(0) += paths * w;
                        *a.entry(au).or_insert(0) += paths * w;
                        *b.entry(bd).or_insert(0) += paths * w;
                    }
                    (g, a, b, (1u64 << returns) * w)
                })
                .collect::<Vec<_>>();
            let mut mass = 0u64;
            for (g, a, b, m) in per_depth {
                gamma = merge(gamma, g);
                alpha = merge(alpha, a);
                beta = merge(beta, b);
                mass += m;
            }
            let twisted = if flip { -terminal } else { terminal };
            *x.entry(u8::from(twisted == 1)).or_insert(0u64) += mass;
        }
        remainder += 1u64 << (shift - 1 - depth);
    }
    Ok(ExcursionLaw {
        depth,
        gamma: to_law(&gamma, shift),
        alpha: to_law(&alpha, shift),
        beta: to_law(&beta, shift),
        x: to_law(&x, shift),
        remainder: dyadic(remainder, shift),
    })
}

/// `out[u]` = number of sequences of `n` returning pairs with `u` of them `+-`,
/// found by walking every sequence.
fn pair_counts(n: u32, out: &mut [u64]) {
    fn dfs(left: u32, ups: usize, out: &mut [u64]) {
        if left == 0 {
            out[ups] += 1;
            return;
        }
        dfs(left - 1, ups + 1, out);
        dfs(left - 1, ups, out);
    }
    dfs(n, 0, out);
}
