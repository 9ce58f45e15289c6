//! Sup distances between levels of a family and between their local-time fields.
//!
//! Lattice statistics are evaluated exactly in integer arithmetic by
//! sweeping time once and re-examining only the sites whose counts change.
//! Continuous statistics exploit that both operands are piecewise linear:
//! the sup over a region is attained at a vertex of the common refinement
//! of the two triangulations, and away from the cells where either field
//! grows the difference does not depend on time at all.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_time::{LocalTimeField, LocalTimeKind};
use crate::twist::{covered_index, NestedWalkFamily, ScaledPath};

/// Sup statistics comparing levels `m` and `m+1` at coarse lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeStatistic {
    /// `|L_{m+1}(t_k, x_j) - L_m(t_k, x_j)|`.
    Total,
    /// `|L+_{m+1}(t_k, x_j) - L_m(t_k, x_j) / 2|`.
    UpHalf,
    /// `|L-_{m+1}(t_k, x_j) - L_m(t_k, x_j) / 2|`.
    DownHalf,
    /// `|L_{m+1}(t_k, x_{j+1/2}) - L_m(t_k, x_{j+1/2})|`.
    HalfSiteTotal,
    /// `|L+_{m+1}(t_k, x_{j+1/2}) - L_m(t_k, x_{j+1/2}) / 2|`.
    HalfSiteUp,
}

impl LatticeStatistic {
    fn fine_kind(self) -> LocalTimeKind {
        match self {
            LatticeStatistic::Total | LatticeStatistic::HalfSiteTotal => LocalTimeKind::Total,
            LatticeStatistic::UpHalf | LatticeStatistic::HalfSiteUp => LocalTimeKind::Up,
            LatticeStatistic::DownHalf => LocalTimeKind::Down,
        }
    }

    fn half_site(self) -> bool {
        matches!(self, LatticeStatistic::HalfSiteTotal | LatticeStatistic::HalfSiteUp)
    }

    /// Integer `e` with statistic `2^-(m+e) |value|`.
    fn shift(self) -> u32 {
        match self {
            LatticeStatistic::HalfSiteUp => 2,
            _ => 1,
        }
    }

    /// `value(j)` in units of `2^-(m + shift)`; `fine` holds counts at `2j + i`.
    fn value(self, fine: i64, coarse_j: i64, coarse_j1: i64) -> i64 {
        match self {
            LatticeStatistic::Total => fine - 2 * coarse_j,
            LatticeStatistic::UpHalf | LatticeStatistic::DownHalf => fine - coarse_j,
            LatticeStatistic::HalfSiteTotal => fine - coarse_j - coarse_j1,
            LatticeStatistic::HalfSiteUp => 2 * fine - coarse_j - coarse_j1,
        }
    }
}

/// Dense counts over a window of sites, growing on demand.
struct Counts {
    lo: i64,
    data: Vec<i64>,
}

impl Counts {
    fn new(lo: i64, hi: i64) -> Self {
        Self {
            lo,
            data: vec![0; (hi - lo + 1).max(1) as usize],
        }
    }

    #[inline]
    fn get(&self, x: i64) -> i64 {
        usize::try_from(x - self.lo)
            .ok()
            .and_then(|i| self.data.get(i))
            .copied()
            .unwrap_or(0)
    }

    #[inline]
    fn bump(&mut self, x: i64) {
        let i = (x - self.lo) as usize;
        self.data[i] += 1;
    }
}

fn require_pair(family: &NestedWalkFamily, m: u32) -> Result<()> {
    if m >= family.m_max() {
        return Err(Error::OutOfRange(format!(
            "levels {m} and {} needed, m_max is {}",
            m + 1,
            family.m_max()
        )));
    }
    Ok(())
}

/// `sup_{j} sup_{0 <= t_k <= K}` of the chosen consecutive-level statistic.
pub fn sup_lattice_distance_consecutive(
    family: &NestedWalkFamily,
    m: u32,
    horizon: f64,
    statistic: LatticeStatistic,
) -> Result<f64> {
    require_pair(family, m)?;
    let km = covered_index(horizon, m);
    let coarse = family.walk(m);
    let fine = family.walk(m + 1);
    if coarse.len_steps() < km || fine.len_steps() < 4 * km {
        return Err(Error::OutOfRange(format!(
            "horizon {horizon} exceeds the built levels {m}, {}",
            m + 1
        )));
    }
    let cv = &coarse.values()[..=km];
    let fv = &fine.values()[..=4 * km];
    let (clo, chi) = range(cv);
    let (flo, fhi) = range(fv);
    let mut cc = Counts::new(clo, chi);
    let mut fc = Counts::new(flo, fhi);
    let kind = statistic.fine_kind();
    let half = statistic.half_site();
    let value = |fc: &Counts, cc: &Counts, j: i64| {
        let f = if half { fc.get(2 * j + 1) } else { fc.get(2 * j) };
        statistic.value(f, cc.get(j), cc.get(j + 1))
    };
    let mut best = 0i64;
    let mut touched = Vec::with_capacity(10);
    for k in 0..km {
        touched.clear();
        let s = cv[k];
        cc.bump(s);
        touched.push(s);
        if half {
            touched.push(s - 1);
        }
        for n in 4 * k..4 * k + 4 {
            if kind.counts_at(fv, n) {
                let y = fv[n];
                fc.bump(y);
                if half {
                    if y.rem_euclid(2) == 1 {
                        touched.push((y - 1).div_euclid(2));
                    }
                } else if y.rem_euclid(2) == 0 {
                    touched.push(y / 2);
                }
            }
        }
        for &j in &touched {
            best = best.max(value(&fc, &cc, j).abs());
        }
    }
    Ok(best as f64 * 0.5f64.powi((m + statistic.shift()) as i32))
}

fn range(values: &[i64]) -> (i64, i64) {
    values
        .iter()
        .fold((0, 0), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `sup_{0 <= t_k <= K} |B~_{m+1}(t_k) - B~_m(t_k)|` over coarse lattice times.
pub fn sup_lattice_path_distance(family: &NestedWalkFamily, m: u32, horizon: f64) -> Result<f64> {
    require_pair(family, m)?;
    let km = covered_index(horizon, m);
    let coarse = family.walk(m);
    let fine = family.walk(m + 1);
    if coarse.len_steps() < km || fine.len_steps() < 4 * km {
        return Err(Error::OutOfRange(format!("horizon {horizon} not covered")));
    }
    let best = (0..=km)
        .map(|k| (fine.value(4 * k) - 2 * coarse.value(k)).abs())
        .max()
        .unwrap_or(0);
    Ok(best as f64 * 0.5f64.powi(m as i32 + 1))
}

/// `sup_{0 <= t <= K} |B_a(t) - B_b(t)|` for two interpolated paths.
///
/// Breakpoints of both lie on the finer lattice, so the sup is a maximum
/// over its points up to `floor(K 4^n)`.
pub fn sup_path_distance(a: &ScaledPath, b: &ScaledPath, horizon: f64) -> Result<f64> {
    let (coarse, fine) = if a.level() <= b.level() { (a, b) } else { (b, a) };
    let (c, f) = (coarse.level(), fine.level());
    let d = f - c;
    let nf = covered_index(horizon, f);
    let cell = 1usize << (2 * d);
    if fine.lattice_len() < nf || coarse.lattice_len() * cell < nf {
        return Err(Error::HorizonMismatch(format!(
            "levels {c} and {f} do not both cover [0, {horizon}]"
        )));
    }
    let cw = coarse.walk();
    let fw = fine.walk();
    let mut best = 0i64;
    for n in 0..=nf {
        let q = n >> (2 * d);
        let r = (n & (cell - 1)) as i64;
        let s0 = cw.value(q);
        let interp = if r == 0 {
            s0 * cell as i64
        } else {
            s0 * cell as i64 + r * (cw.value(q + 1) - s0)
        };
        best = best.max((fw.value(n) << d) - interp);
        best = best.max(interp - (fw.value(n) << d));
    }
    Ok(best as f64 * 0.5f64.powi((c + 2 * d) as i32))
}

/// Local field values in units of one fine cell: corners in the order
/// `(t0, x0), (t0, x1), (t1, x0), (t1, x1)`.
#[inline]
fn tri(a: f64, b: f64, c: [f64; 4]) -> f64 {
    if b >= a {
        c[0] + a * (c[3] - c[1]) + b * (c[1] - c[0])
    } else {
        c[0] + a * (c[2] - c[0]) + b * (c[3] - c[2])
    }
}

struct CoarseCell {
    /// Fine-slab offset of the coarse cell's first row.
    n0: i64,
    /// Fine-column offset of the coarse cell's first column.
    j0: i64,
    side: f64,
    values: [f64; 4],
}

impl CoarseCell {
    /// Coarse field at fine coordinates `(n, j)` (fractional).
    #[inline]
    fn at(&self, n: f64, j: f64) -> f64 {
        let a = (n - self.n0 as f64) / (self.side * self.side);
        let b = (j - self.j0 as f64) / self.side;
        tri(a, b, self.values)
    }
}

/// Max of `|fine - coarse|` over the rectangle `[n1, n1 + len] x [j, j + 1]`
/// in fine units. `fine` gives the fine cell corners; when `len > 1` the
/// fine field must not depend on time there.
fn rect_max(n1: i64, len: i64, j: i64, fine: [f64; 4], cell: &CoarseCell) -> f64 {
    let side = cell.side;
    let nr = (n1 - cell.n0) as f64;
    let jr = (j - cell.j0) as f64;
    let len_f = len as f64;
    let fine_at = |u: f64, v: f64| {
        if len == 1 {
            tri(u, v, fine)
        } else {
            fine[0] + v * (fine[1] - fine[0])
        }
    };
    let diff = |u: f64, v: f64| (fine_at(u, v) - cell.at(n1 as f64 + u, j as f64 + v)).abs();
    let mut best = diff(0.0, 0.0)
        .max(diff(0.0, 1.0))
        .max(diff(len_f, 0.0))
        .max(diff(len_f, 1.0));
    // coarse diagonal: v = (nr + u) / side - jr
    let v_at = |u: f64| (nr + u) / side - jr;
    let u_at = |v: f64| (v + jr) * side - nr;
    for u in [0.0, len_f] {
        let v = v_at(u);
        if (0.0..=1.0).contains(&v) {
            best = best.max(diff(u, v));
        }
    }
    for v in [0.0, 1.0] {
        let u = u_at(v);
        if (0.0..=len_f).contains(&u) {
            best = best.max(diff(u, v));
        }
    }
    if len == 1 && side > 1.0 {
        // coarse diagonal meets the fine diagonal v = u
        let u = (nr / side - jr) / (1.0 - 1.0 / side);
        if (0.0..=1.0).contains(&u) {
            best = best.max(diff(u, u));
        }
    }
    best
}

/// `sup_{(t, x) in [0, K] x R} |a(t, x) - b(t, x)|` for two fields.
pub fn sup_field_distance(a: &LocalTimeField, b: &LocalTimeField, horizon: f64) -> Result<f64> {
    let (coarse, fine) = if a.level() <= b.level() { (a, b) } else { (b, a) };
    let d = fine.level() - coarse.level();
    let side = 1i64 << d;
    let per_coarse = side * side;
    let nf = covered_index(horizon, fine.level()) as i64;
    let nc = (nf + per_coarse - 1) / per_coarse;
    if (fine.k_max() as i64) < nf || (coarse.k_max() as i64) < nc {
        return Err(Error::HorizonMismatch(format!(
            "fields of levels {} and {} do not both cover [0, {horizon}]",
            coarse.level(),
            fine.level()
        )));
    }
    let fscale = 0.5f64.powi(fine.value_shift() as i32);
    let cscale = 0.5f64.powi(coarse.value_shift() as i32);
    let (flo, fhi) = fine.lattice().site_range();
    let (clo, chi) = coarse.lattice().site_range();
    let mut frow = Counts::new(flo - 1, fhi + 1);
    let mut crow = Counts::new(clo - 1, chi + 1);
    let fine_corners = |n: usize, j: i64| {
        let c = fine.cell_counts(n, j);
        c.map(|v| v as f64 * fscale)
    };
    let mut best = 0.0f64;
    for kc in 0..nc {
        let csite = coarse.changing_site(kc as usize);
        let coarse_cell = |jc: i64, crow: &Counts| {
            let up = |x: i64| crow.get(x) + i64::from(csite == Some(x));
            CoarseCell {
                n0: kc * per_coarse,
                j0: jc * side,
                side: side as f64,
                values: [crow.get(jc), crow.get(jc + 1), up(jc), up(jc + 1)]
                    .map(|v| v as f64 * cscale),
            }
        };
        let n_start = kc * per_coarse;
        let n_end = (n_start + per_coarse).min(nf);
        let mut events: Vec<(i64, i64)> = Vec::new();
        for n in n_start..n_end {
            let Some(s) = fine.changing_site(n as usize) else {
                continue;
            };
            events.push((n, s));
            for j in [s - 1, s] {
                let f = [frow.get(j), frow.get(j + 1), frow.get(j) + i64::from(s == j), frow.get(j + 1) + i64::from(s == j + 1)]
                    .map(|v| v as f64 * fscale);
                let cell = coarse_cell(j.div_euclid(side), &crow);
                best = best.max(rect_max(n, 1, j, f, &cell));
            }
            frow.bump(s);
        }
        if let Some(cs) = csite {
            for jc in [cs - 1, cs] {
                let cell = coarse_cell(jc, &crow);
                for j in jc * side..(jc + 1) * side {
                    let mut n1 = n_start;
                    let active = events.iter().filter(|&&(_, s)| s == j || s == j + 1);
                    for n in active.map(|&(n, _)| n).chain(std::iter::once(n_end)) {
                        if n > n1 {
                            let f = fine_corners(n1 as usize, j);
                            best = best.max(rect_max(n1, n - n1, j, f, &cell));
                        }
                        n1 = n + 1;
                    }
                }
            }
            crow.bump(cs);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_time::{build_field, build_weighted_field, lattice_local_time, LocalTimeField};
    use crate::twist::build_family;
    use crate::walk::SeedSpec;

    fn brute_lattice(fam: &NestedWalkFamily, m: u32, horizon: f64, stat: LatticeStatistic) -> f64 {
        let km = covered_index(horizon, m);
        let coarse = lattice_local_time(fam.walk(m), LocalTimeKind::Total, km).unwrap();
        let fine = lattice_local_time(fam.walk(m + 1), stat.fine_kind(), 4 * km).unwrap();
        let (lo, hi) = fam.walk(m + 1).range();
        let mut best = 0.0f64;
        let h = 0.5f64.powi(m as i32);
        for k in 0..=km {
            for j in lo / 2 - 2..=hi / 2 + 2 {
                let c = |j| f64::from(coarse.count(k, j)) * h;
                let f = |y| f64::from(fine.count(4 * k, y)) * h / 2.0;
                let v = match stat {
                    LatticeStatistic::Total => f(2 * j) - c(j),
                    LatticeStatistic::UpHalf | LatticeStatistic::DownHalf => f(2 * j) - c(j) / 2.0,
                    LatticeStatistic::HalfSiteTotal => f(2 * j + 1) - (c(j) + c(j + 1)) / 2.0,
                    LatticeStatistic::HalfSiteUp => f(2 * j + 1) - (c(j) + c(j + 1)) / 4.0,
                };
                best = best.max(v.abs());
            }
        }
        best
    }

    #[test]
    fn lattice_statistics_match_double_loop() {
        for rep in 0..6 {
            let fam = build_family(SeedSpec::new(77, rep), 5, 1.0).unwrap();
            for m in [1, 3, 4] {
                for stat in [
                    LatticeStatistic::Total,
                    LatticeStatistic::UpHalf,
                    LatticeStatistic::DownHalf,
                    LatticeStatistic::HalfSiteTotal,
                    LatticeStatistic::HalfSiteUp,
                ] {
                    let fast = sup_lattice_distance_consecutive(&fam, m, 1.0, stat).unwrap();
                    assert_eq!(fast, brute_lattice(&fam, m, 1.0, stat), "{rep} {m} {stat:?}");
                }
            }
        }
    }

    #[test]
    fn tiny_horizon_uses_first_row_only() {
        let fam = build_family(SeedSpec::new(1, 1), 3, 0.01).unwrap();
        let v = sup_lattice_distance_consecutive(&fam, 1, 0.01, LatticeStatistic::Total).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(sup_lattice_path_distance(&fam, 1, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn lattice_path_distance_by_definition() {
        let fam = build_family(SeedSpec::new(5, 5), 4, 1.0).unwrap();
        let m = 3;
        let c = fam.scaled(m);
        let f = fam.scaled(m + 1);
        let expected = (0..=64u64)
            .map(|k| {
                let t = crate::twist::DyadicTime::lattice(k, m);
                (f.evaluate::<f64>(t).unwrap() - c.evaluate::<f64>(t).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert_eq!(sup_lattice_path_distance(&fam, m, 1.0).unwrap(), expected);
    }

    #[test]
    fn path_distance_matches_dense_sampling() {
        let fam = build_family(SeedSpec::new(6, 2), 5, 1.0).unwrap();
        for (a, b) in [(2, 3), (1, 5), (4, 4)] {
            let pa = fam.scaled(a);
            let pb = fam.scaled(b);
            let fast = sup_path_distance(&pa, &pb, 1.0).unwrap();
            let mut slow = 0.0f64;
            for n in 0..=(1u64 << 12) {
                let t = crate::twist::DyadicTime::new(n, 6);
                let d: f64 = pa.evaluate::<f64>(t).unwrap() - pb.evaluate::<f64>(t).unwrap();
                slow = slow.max(d.abs());
            }
            assert_eq!(fast, slow);
            assert_eq!(fast, sup_path_distance(&pb, &pa, 1.0).unwrap());
        }
    }

    fn field(fam: &NestedWalkFamily, m: u32, kind: LocalTimeKind, weight: u32) -> LocalTimeField {
        let k = fam.walk(m).len_steps();
        build_weighted_field(lattice_local_time(fam.walk(m), kind, k).unwrap(), weight).unwrap()
    }

    fn dense(a: &LocalTimeField, b: &LocalTimeField, horizon: f64, t_bits: u32, x_bits: u32) -> f64 {
        let (lo, hi) = a.lattice().site_range();
        let xlo = (lo - 2) as f64 * 0.5f64.powi(a.level() as i32);
        let xhi = (hi + 2) as f64 * 0.5f64.powi(a.level() as i32);
        let nt = (horizon * 2f64.powi(t_bits as i32)) as i64;
        let dx = 0.5f64.powi(x_bits as i32);
        let mut best = 0.0f64;
        for it in 0..=nt {
            let t = it as f64 * 0.5f64.powi(t_bits as i32);
            let mut x = xlo;
            while x <= xhi {
                let v = a.interpolate(&t, &x).unwrap() - b.interpolate(&t, &x).unwrap();
                best = best.max(v.abs());
                x += dx;
            }
        }
        best
    }

    #[test]
    fn field_distance_matches_dense_grid_for_consecutive_levels() {
        for rep in 0..4 {
            let fam = build_family(SeedSpec::new(13, rep), 4, 1.0).unwrap();
            for (m, kind) in [(2, LocalTimeKind::Total), (3, LocalTimeKind::Up)] {
                let a = field(&fam, m, LocalTimeKind::Total, u32::from(kind == LocalTimeKind::Up));
                let b = field(&fam, m + 1, kind, 0);
                let fast = sup_field_distance(&a, &b, 1.0).unwrap();
                let slow = dense(&a, &b, 1.0, 2 * (m + 1) + 2, m + 3);
                assert!((fast - slow).abs() <= 1e-12, "{rep} {m}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn field_distance_bounds_dense_grid_across_levels() {
        let fam = build_family(SeedSpec::new(14, 0), 4, 1.0).unwrap();
        let a = field(&fam, 1, LocalTimeKind::Total, 0);
        let b = field(&fam, 4, LocalTimeKind::Total, 0);
        let fast = sup_field_distance(&a, &b, 1.0).unwrap();
        let slow = dense(&a, &b, 1.0, 10, 7);
        assert!(fast + 1e-12 >= slow);
        assert!(fast - slow <= 2.0 * 0.5f64.powi(4), "{fast} vs {slow}");
    }

    #[test]
    fn field_distance_is_a_metric() {
        let fam = build_family(SeedSpec::new(15, 3), 5, 1.0).unwrap();
        let fs: Vec<_> = (2..=5).map(|m| field(&fam, m, LocalTimeKind::Total, 0)).collect();
        for (i, a) in fs.iter().enumerate() {
            assert_eq!(sup_field_distance(a, a, 1.0).unwrap(), 0.0);
            for b in &fs[i + 1..] {
                let ab = sup_field_distance(a, b, 1.0).unwrap();
                assert_eq!(ab, sup_field_distance(b, a, 1.0).unwrap());
                assert!(ab > 0.0);
                for c in &fs {
                    let ac = sup_field_distance(a, c, 1.0).unwrap();
                    let cb = sup_field_distance(c, b, 1.0).unwrap();
                    assert!(ab <= ac + cb + 1e-12);
                }
            }
        }
    }

    #[test]
    fn halved_field_distance() {
        let fam = build_family(SeedSpec::new(16, 1), 3, 1.0).unwrap();
        let f = field(&fam, 3, LocalTimeKind::Total, 0);
        let half = build_weighted_field(f.lattice().clone(), 1).unwrap();
        let (lo, hi) = f.lattice().site_range();
        let max = (0..=64usize)
            .flat_map(|k| (lo..=hi).map(move |j| (k, j)))
            .map(|(k, j)| f.lattice_value::<f64>(k, j))
            .fold(0.0, f64::max);
        assert_eq!(sup_field_distance(&f, &half, 1.0).unwrap(), max / 2.0);
    }

    #[test]
    fn horizon_mismatch() {
        let fam = build_family(SeedSpec::new(16, 1), 3, 1.0).unwrap();
        let short = build_field(lattice_local_time(fam.walk(3), LocalTimeKind::Total, 10).unwrap()).unwrap();
        let full = field(&fam, 2, LocalTimeKind::Total, 0);
        assert!(matches!(sup_field_distance(&short, &full, 1.0), Err(Error::HorizonMismatch(_))));
    }
}
