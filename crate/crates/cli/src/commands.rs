use std::collections::BTreeMap;

use nestedwalk::analytics::{
    convergence_study, exact_local_time_pmf, verify_lemmas, BoundParams, Status, VerifyConfig,
};
use nestedwalk::local_time::{build_field, lattice_local_time, LocalTimeKind};
use nestedwalk::oracle::{
    excursion_law_by_enumeration, identity_check_by_enumeration, pmf_by_enumeration,
};
use nestedwalk::twist::covered_index;
use nestedwalk::{build_family_with, check_refinement, FamilyConfig, SeedSpec};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{csv_writer, real, Run};

fn family_config(cfg: &ExperimentConfig) -> FamilyConfig {
    FamilyConfig {
        step_cap: cfg.step_cap,
    }
}

fn build(cfg: &ExperimentConfig, rep: u64, m_max: u32) -> Result<nestedwalk::NestedWalkFamily, CliError> {
    Ok(build_family_with(
        SeedSpec::new(cfg.master_seed, rep),
        m_max,
        cfg.horizon,
        &family_config(cfg),
    )?)
}

pub fn construct(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    let mut run = Run::start("construct", cfg)?;
    let reps = cfg.replications_or(1) as u64;
    let mut summary = csv_writer(
        &run.file("summary.csv"),
        &["replication", "m_max", "refinement_holds", "pairs_checked", "top_level_steps"],
    )?;
    let mut all_hold = true;
    for rep in 0..reps {
        let fam = build(cfg, rep, cfg.m_max)?;
        let rc = check_refinement(&fam);
        all_hold &= rc.holds;
        let dir = run.sub_dir(&format!("replication_{rep}"))?;
        let mut walks = csv_writer(&dir.join("walks.csv"), &["level", "k", "t", "value", "scaled"])?;
        let mut times = csv_writer(&dir.join("visit_times.csv"), &["level", "k", "time"])?;
        for m in 0..=cfg.m_max {
            let dt = 0.25f64.powi(m as i32);
            let dx = 0.5f64.powi(m as i32);
            for (k, &v) in fam.walk(m).values().iter().enumerate() {
                walks.write_record([
                    m.to_string(),
                    k.to_string(),
                    real(k as f64 * dt),
                    v.to_string(),
                    real(v as f64 * dx),
                ])?;
            }
            if let Some(t) = fam.visit_times(m) {
                for (k, &time) in t.times().iter().enumerate() {
                    times.write_record([m.to_string(), k.to_string(), time.to_string()])?;
                }
            }
        }
        walks.flush()?;
        times.flush()?;
        summary.write_record([
            rep.to_string(),
            cfg.m_max.to_string(),
            rc.holds.to_string(),
            rc.checked.to_string(),
            fam.walk(cfg.m_max).len_steps().to_string(),
        ])?;
    }
    summary.flush()?;
    let code = if all_hold { 0 } else { 1 };
    run.finish(code, json!({ "refinement_holds": all_hold }))
}

pub fn localtime(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    let mut run = Run::start("localtime", cfg)?;
    let reps = cfg.replications_or(1) as u64;
    let m = cfg.m_max;
    let k = covered_index(cfg.horizon, m);
    let dx = 0.5f64.powi(m as i32);
    let mut summary = csv_writer(
        &run.file("summary.csv"),
        &["replication", "level", "k", "kind", "sites", "max_count", "decomposition_holds"],
    )?;
    let mut all_hold = true;
    for rep in 0..reps {
        let fam = build(cfg, rep, m)?;
        let walk = fam.walk(m);
        let dir = run.sub_dir(&format!("replication_{rep}"))?;
        let lts: BTreeMap<&str, _> = LocalTimeKind::ALL
            .iter()
            .map(|&kind| Ok((kind.name(), lattice_local_time(walk, kind, k)?)))
            .collect::<Result<_, nestedwalk::Error>>()?;
        let (lo, hi) = lts["total"].site_range();
        let count = |name: &str, x: i64| i64::from(lts[name].count(k, x));
        let decomposition = (lo..=hi).all(|x| {
            let s1 = walk.value(1.min(k));
            let up0 = i64::from(k >= 1 && x == 0 && s1 == 1);
            let down0 = i64::from(k >= 1 && x == 0 && s1 == -1);
            count("total", x) == count("up", x) + count("down", x)
                && count("up", x) == count("upcross", x) + count("upbounce", x) + up0
                && count("down", x) == count("downcross", x) + count("downbounce", x) + down0
        });
        all_hold &= decomposition;
        let mut lattice = csv_writer(&dir.join("lattice.csv"), &["kind", "site", "x", "count", "value"])?;
        for &kind in &cfg.kinds {
            let lt = &lts[kind.name()];
            let mut max_count = 0;
            for x in lo..=hi {
                let c = lt.count(k, x);
                max_count = max_count.max(c);
                lattice.write_record([
                    kind.name().to_string(),
                    x.to_string(),
                    real(x as f64 * dx),
                    c.to_string(),
                    real(f64::from(c) * dx),
                ])?;
            }
            summary.write_record([
                rep.to_string(),
                m.to_string(),
                k.to_string(),
                kind.name().to_string(),
                (hi - lo + 1).to_string(),
                max_count.to_string(),
                decomposition.to_string(),
            ])?;
        }
        lattice.flush()?;
        let field = build_field(lattice_local_time(walk, LocalTimeKind::Total, k)?)?;
        let mut grid = csv_writer(&dir.join("field.csv"), &["t", "x", "value"])?;
        let t_max = k as f64 * 0.25f64.powi(m as i32);
        for i in 1..=8 {
            let t = t_max * f64::from(i) / 8.0;
            for j in 2 * lo - 2..=2 * hi + 2 {
                let x = j as f64 * dx / 2.0;
                let v: f64 = field.interpolate(&t, &x)?;
                grid.write_record([real(t), real(x), real(v)])?;
            }
        }
        grid.flush()?;
    }
    summary.flush()?;
    let code = if all_hold { 0 } else { 1 };
    run.finish(code, json!({ "decomposition_holds": all_hold, "k": k }))
}

pub fn converge(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    if cfg.m_min == 0 || cfg.m_min >= cfg.m_max {
        return Err(CliError::Config(format!(
            "converge needs 1 <= m_min < m_max, got {} and {}",
            cfg.m_min, cfg.m_max
        )));
    }
    let mut run = Run::start("converge", cfg)?;
    let reps = cfg.replications_or(200);
    let study = convergence_study(
        cfg.master_seed,
        reps,
        cfg.m_min..=cfg.m_max - 1,
        cfg.horizon,
        &family_config(cfg),
    )?;
    let mut summary = csv_writer(&run.file("summary.csv"), &["m", "path", "local", "up_half"])?;
    for r in &study.rows {
        summary.write_record([r.m.to_string(), real(r.path), real(r.local), real(r.up_half)])?;
    }
    summary.flush()?;
    let mut fits = csv_writer(
        &run.file("fits.csv"),
        &["statistic", "points", "slope", "intercept", "in_band"],
    )?;
    let mut fit_json = serde_json::Map::new();
    for (name, fit) in [
        ("path", &study.path_fit),
        ("local", &study.local_fit),
        ("up_half", &study.up_half_fit),
    ] {
        if let Some(f) = fit {
            let in_band = (-0.65..=-0.35).contains(&f.slope);
            fits.write_record([
                name.to_string(),
                f.points.len().to_string(),
                real(f.slope),
                real(f.intercept),
                in_band.to_string(),
            ])?;
            fit_json.insert(name.into(), json!({ "slope": f.slope, "in_band": in_band }));
        }
    }
    fits.flush()?;
    let mut samples = csv_writer(&run.file("samples.csv"), &["replication", "m", "statistic", "value"])?;
    for s in &study.samples {
        for (name, v) in [("path", s.path), ("local", s.local), ("up_half", s.up_half)] {
            samples.write_record([s.replication.to_string(), s.m.to_string(), name.into(), real(v)])?;
        }
    }
    samples.flush()?;
    run.finish(0, json!({ "fits": fit_json }))
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub check: String,
    pub size: u32,
    pub exact_match: bool,
    pub detail: String,
}

pub fn oracle_rows(cfg: &ExperimentConfig) -> Result<Vec<OracleRow>, CliError> {
    let o = &cfg.oracle;
    let mut rows = Vec::new();
    for n in 0..=o.pmf_max_n {
        let law = pmf_by_enumeration(n, 0)?;
        let mut mismatches = law.keys().filter(|&&j| j > n / 2).count();
        for j in 0..=n / 2 {
            let exact = exact_local_time_pmf(u64::from(n), i64::from(j))?;
            if law.get(&j).cloned().unwrap_or_else(BigRational::zero) != exact {
                mismatches += 1;
            }
        }
        rows.push(OracleRow {
            check: "pmf".into(),
            size: n,
            exact_match: mismatches == 0,
            detail: format!("{mismatches} mismatching masses"),
        });
    }
    for n in 0..=o.identity_max_n {
        let holds = identity_check_by_enumeration(n)?;
        rows.push(OracleRow {
            check: "identities".into(),
            size: n,
            exact_match: holds,
            detail: format!("all {} walks", 1u64 << n),
        });
    }
    let d = o.excursion_depth;
    let law = excursion_law_by_enumeration(d)?;
    let two = BigRational::from_integer(2.into());
    let gamma_ok = (1..=d).all(|g| law.gamma.get(&g) == Some(&(BigRational::one() / two.pow(g as i32))))
        && law.remainder == BigRational::one() / two.pow(d as i32);
    let third = BigRational::new(1.into(), 3.into());
    let alpha_ok = |map: &BTreeMap<u32, BigRational>| {
        map.iter().all(|(&a, p)| {
            let gap = BigRational::new(2.into(), 3.into()) * third.pow(a as i32) - p;
            gap >= BigRational::zero() && gap <= law.remainder
        })
    };
    let x_ok = law.x.get(&0) == law.x.get(&1);
    for (name, ok) in [
        ("excursion_gamma", gamma_ok),
        ("excursion_alpha", alpha_ok(&law.alpha)),
        ("excursion_beta", alpha_ok(&law.beta)),
        ("excursion_x", x_ok),
    ] {
        rows.push(OracleRow {
            check: name.into(),
            size: d,
            exact_match: ok,
            detail: format!("remainder 2^-{d}"),
        });
    }
    Ok(rows)
}

fn write_oracle_rows(run: &mut Run, rows: &[OracleRow]) -> Result<(), CliError> {
    let mut w = csv_writer(&run.file("oracle.csv"), &["check", "size", "exact_match", "detail"])?;
    for r in rows {
        w.write_record([r.check.clone(), r.size.to_string(), r.exact_match.to_string(), r.detail.clone()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn oracle(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    let mut run = Run::start("oracle", cfg)?;
    let rows = oracle_rows(cfg)?;
    write_oracle_rows(&mut run, &rows)?;
    let all = rows.iter().all(|r| r.exact_match);
    run.finish(if all { 0 } else { 1 }, json!({ "all_exact": all, "rows": rows.len() }))
}

pub fn verify(cfg: &ExperimentConfig) -> Result<i32, CliError> {
    let m = cfg.m_max.checked_sub(cfg.reference_offset).filter(|&m| m >= 1).ok_or_else(|| {
        CliError::Config(format!(
            "verify needs m_max > reference_offset, got {} and {}",
            cfg.m_max, cfg.reference_offset
        ))
    })?;
    let params = BoundParams::new(cfg.c, cfg.horizon, m)?;
    let vc = VerifyConfig {
        master_seed: cfg.master_seed,
        n_seeds: cfg.replications_or(2000),
        first_replication: 0,
        reference_level: Some(cfg.m_max),
        floor: cfg.floor,
        confidence: cfg.confidence,
        family: family_config(cfg),
    };
    let mut run = Run::start("verify", cfg)?;
    let reports = verify_lemmas(&cfg.lemmas, &params, &vc)?;
    let oracle = oracle_rows(cfg)?;
    let mut summary = csv_writer(
        &run.file("summary.csv"),
        &[
            "lemma", "m", "K", "C", "reference_level", "threshold", "bound", "seeds",
            "violations", "frequency", "ucl", "status",
        ],
    )?;
    for r in &reports {
        summary.write_record([
            r.lemma.to_string(),
            r.m.to_string(),
            real(r.horizon),
            real(r.c),
            r.reference_level.map_or(String::new(), |l| l.to_string()),
            real(r.threshold),
            real(r.bound),
            r.n_seeds.to_string(),
            r.violations.to_string(),
            real(r.frequency),
            real(r.ucl),
            r.status.to_string(),
        ])?;
    }
    for o in &oracle {
        summary.write_record([
            format!("oracle_{}_{}", o.check, o.size),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            if o.exact_match { "pass".into() } else { "fail".into() },
        ])?;
    }
    summary.flush()?;
    write_oracle_rows(&mut run, &oracle)?;
    let mut stats = csv_writer(
        &run.file("statistics.csv"),
        &["replication", "lemma", "statistic", "violated"],
    )?;
    for r in &reports {
        for (i, &s) in r.statistics.iter().enumerate() {
            stats.write_record([
                i.to_string(),
                r.lemma.to_string(),
                real(s),
                (s >= r.threshold).to_string(),
            ])?;
        }
    }
    stats.flush()?;
    let slim: Vec<_> = reports
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.statistics.clear();
            r
        })
        .collect();
    run.write_json("reports.json", &slim)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| r.status == Status::Fail)
        .map(|r| r.lemma.to_string())
        .chain(oracle.iter().filter(|o| !o.exact_match).map(|o| format!("oracle_{}_{}", o.check, o.size)))
        .collect();
    for r in &reports {
        eprintln!(
            "{:<11} violations {:>5}/{:<6} ucl {:.3e} bound {:.3e} {}",
            r.lemma.to_string(),
            r.violations,
            r.n_seeds,
            r.ucl,
            r.bound,
            r.status
        );
    }
    let code = if failed.is_empty() { 0 } else { 1 };
    run.finish(code, json!({ "m": m, "failed": failed }))
}
