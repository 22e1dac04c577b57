//! Experiment harness: norm-scaling curves, recovery-threshold phase
//! curves, concentration tails, and the oracle suite, all emitting
//! deterministic CSV.
//!
//! Cell and trial seeds derive as `mix(master, [kind tag, cell, trial])`
//! (see [`crate::seed`]); rows are computed in parallel, then sorted by
//! (cell, trial) and written in one pass, so re-running a spec reproduces
//! the file byte for byte. Wall-clock timing columns are zero unless
//! `timings=on`, keeping the default output reproducible.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{plant_clique, sample_gnp_half};
use crate::maximizer::{maximize, MaximizeOptions};
use crate::oracle::{self, VSource};
use crate::recovery::{recover, RecoveryConfig};
use crate::seed;
use crate::tensor::{self, Guards, TensorQuery};

pub const TAG_NORM_SCALING: u64 = 1;
pub const TAG_RECOVERY: u64 = 2;
pub const TAG_CONCENTRATION: u64 = 3;
pub const TAG_ORACLE: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    NormScaling,
    RecoveryThreshold,
    Concentration,
    OracleSuite,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "norm-scaling" => Ok(ExperimentKind::NormScaling),
            "recovery-threshold" => Ok(ExperimentKind::RecoveryThreshold),
            "concentration" => Ok(ExperimentKind::Concentration),
            "oracle-suite" => Ok(ExperimentKind::OracleSuite),
            other => Err(Error::invalid(format!(
                "unknown experiment kind {other:?}; expected norm-scaling, recovery-threshold, concentration or oracle-suite"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::NormScaling => "norm-scaling",
            ExperimentKind::RecoveryThreshold => "recovery-threshold",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::OracleSuite => "oracle-suite",
        }
    }
}

/// Whether recovery-threshold cells hand the maximizer a warm start.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WarmStart {
    None,
    /// Normalized indicator of the planted clique.
    Clique,
}

/// A parsed experiment specification.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n_grid: Vec<usize>,
    pub r: usize,
    pub p_grid: Vec<usize>,
    pub trials: usize,
    pub alpha: f64,
    pub seed: u64,
    pub out: Option<String>,
    pub restarts: usize,
    pub iters: usize,
    pub warm_start: WarmStart,
    pub t_over_n: Vec<f64>,
    pub samples: usize,
    pub nprime: Option<usize>,
    pub v_source: String,
    pub timings: bool,
    pub tuples: usize,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentSpec {
            kind,
            n_grid: Vec::new(),
            r: 3,
            p_grid: Vec::new(),
            trials: 5,
            alpha: 1.0,
            seed: 0,
            out: None,
            restarts: 8,
            iters: 40,
            warm_start: WarmStart::None,
            t_over_n: vec![1.0, 2.0, 3.0],
            samples: 10_000,
            nprime: None,
            v_source: "unit-random".to_string(),
            timings: false,
            tuples: 100,
        }
    }
}

fn parse_usize_list(v: &str, key: &str) -> Result<Vec<usize>> {
    v.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad value {t:?} in {key}")))
        })
        .collect()
}

fn parse_f64_list(v: &str, key: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad value {t:?} in {key}")))
        })
        .collect()
}

/// Parse a flat `key=value` config. `#` starts a comment; unknown keys are
/// rejected. `kind_hint` (from the CLI positional) fills in or must agree
/// with the `kind=` line.
pub fn parse_config(text: &str, kind_hint: Option<ExperimentKind>) -> Result<ExperimentSpec> {
    let mut kind = kind_hint;
    let mut pairs: Vec<(String, String)> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("expected key=value, got {line:?}")))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k == "kind" {
            let parsed = ExperimentKind::parse(&v)?;
            if let Some(h) = kind {
                if h != parsed {
                    return Err(Error::invalid(format!(
                        "config kind {} conflicts with requested kind {}",
                        parsed.name(),
                        h.name()
                    )));
                }
            }
            kind = Some(parsed);
        } else {
            pairs.push((k, v));
        }
    }
    let kind = kind.ok_or_else(|| Error::invalid("missing kind (set kind= or pass it on the command line)"))?;
    let mut spec = ExperimentSpec::new(kind);
    for (k, v) in pairs {
        match k.as_str() {
            "n_grid" => spec.n_grid = parse_usize_list(&v, "n_grid")?,
            "n" => spec.n_grid = vec![v.parse().map_err(|_| Error::invalid(format!("bad n {v:?}")))?],
            "r" => spec.r = v.parse().map_err(|_| Error::invalid(format!("bad r {v:?}")))?,
            "p_grid" => spec.p_grid = parse_usize_list(&v, "p_grid")?,
            "trials" => spec.trials = v.parse().map_err(|_| Error::invalid(format!("bad trials {v:?}")))?,
            "alpha" => spec.alpha = v.parse().map_err(|_| Error::invalid(format!("bad alpha {v:?}")))?,
            "seed" => spec.seed = v.parse().map_err(|_| Error::invalid(format!("bad seed {v:?}")))?,
            "out" => spec.out = Some(v),
            "restarts" => spec.restarts = v.parse().map_err(|_| Error::invalid(format!("bad restarts {v:?}")))?,
            "iters" => spec.iters = v.parse().map_err(|_| Error::invalid(format!("bad iters {v:?}")))?,
            "warm_start" => {
                spec.warm_start = match v.as_str() {
                    "none" => WarmStart::None,
                    "clique" => WarmStart::Clique,
                    other => return Err(Error::invalid(format!("bad warm_start {other:?}"))),
                }
            }
            "t_over_n" => spec.t_over_n = parse_f64_list(&v, "t_over_n")?,
            "samples" => spec.samples = v.parse().map_err(|_| Error::invalid(format!("bad samples {v:?}")))?,
            "nprime" => spec.nprime = Some(v.parse().map_err(|_| Error::invalid(format!("bad nprime {v:?}")))?),
            "v_source" => spec.v_source = v,
            "timings" => {
                spec.timings = match v.as_str() {
                    "on" => true,
                    "off" => false,
                    other => return Err(Error::invalid(format!("bad timings {other:?}, want on|off"))),
                }
            }
            "tuples" => spec.tuples = v.parse().map_err(|_| Error::invalid(format!("bad tuples {v:?}")))?,
            other => return Err(Error::invalid(format!("unknown config key {other:?}"))),
        }
    }
    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &ExperimentSpec) -> Result<()> {
    let needs_n = !matches!(spec.kind, ExperimentKind::OracleSuite);
    if needs_n && spec.n_grid.is_empty() {
        return Err(Error::invalid("n_grid must be nonempty"));
    }
    if spec.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n_grid must be strictly ascending"));
    }
    if spec.kind == ExperimentKind::RecoveryThreshold {
        if spec.p_grid.is_empty() {
            return Err(Error::invalid("p_grid must be nonempty for recovery-threshold"));
        }
        if spec.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("p_grid must be strictly ascending"));
        }
    }
    if spec.trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if spec.kind == ExperimentKind::Concentration && spec.t_over_n.is_empty() {
        return Err(Error::invalid("t_over_n must be nonempty"));
    }
    if !(spec.alpha > 0.0 && spec.alpha <= 1.0) {
        return Err(Error::invalid("alpha must be in (0, 1]"));
    }
    if spec.r < 2 {
        return Err(Error::invalid("r must be >= 2"));
    }
    Ok(())
}

fn fmt_row(fields: &[String]) -> String {
    fields.join(",")
}

fn f(v: f64) -> String {
    format!("{v}")
}

/// log2-based shape of the norm bound: sqrt(n) * log2(n)^((3r-1)/2).
pub fn bound_shape(n: usize, r: usize) -> f64 {
    let log = (n as f64).log2();
    (n as f64).sqrt() * log.powf((3.0 * r as f64 - 1.0) / 2.0)
}

/// Best heuristic form value per (n, trial) on fresh G(n, 1/2), with the
/// sqrt-n and bound-shape ratios.
pub fn run_norm_scaling(spec: &ExperimentSpec) -> Result<String> {
    let cells: Vec<usize> = spec.n_grid.clone();
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, _)| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let rows: Vec<((usize, usize), String)> = jobs
        .into_par_iter()
        .map(|(cell, trial)| {
            let n = cells[cell];
            let gseed = seed::mix(spec.seed, &[TAG_NORM_SCALING, cell as u64, trial as u64]);
            let g = sample_gnp_half(n, gseed)?;
            let mut opts = MaximizeOptions::new(seed::mix(gseed, &[0xa]));
            opts.restarts = spec.restarts;
            opts.iters_per_restart = spec.iters;
            let res = maximize(&g, spec.r, &opts)?;
            let row = fmt_row(&[
                n.to_string(),
                spec.r.to_string(),
                trial.to_string(),
                gseed.to_string(),
                f(res.value),
                f(res.value / (n as f64).sqrt()),
                f(res.value / bound_shape(n, spec.r)),
            ]);
            Ok(((cell, trial), row))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = rows;
    rows.sort_by_key(|(k, _)| *k);
    let mut out = String::from("n,r,trial,seed,value,value_per_sqrt_n,value_per_bound_shape\n");
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

/// Plant, maximize (budget scaled by 1/alpha²), recover; success means the
/// planted set was returned exactly.
pub fn run_recovery_threshold(spec: &ExperimentSpec) -> Result<String> {
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for &n in &spec.n_grid {
        for &p in &spec.p_grid {
            if p > n {
                return Err(Error::invalid(format!("cell p={p} exceeds n={n}")));
            }
            cells.push((n, p));
        }
    }
    let restarts = ((spec.restarts as f64 / (spec.alpha * spec.alpha)).ceil() as usize).clamp(1, 512);
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let rows: Vec<((usize, usize), String)> = jobs
        .into_par_iter()
        .map(|(cell, trial)| {
            let (n, p) = cells[cell];
            let gseed = seed::mix(spec.seed, &[TAG_RECOVERY, cell as u64, trial as u64]);
            let started = std::time::Instant::now();
            let g = sample_gnp_half(n, gseed)?;
            let inst = plant_clique(g, p, seed::mix(gseed, &[1]))?;
            let mut opts = MaximizeOptions::new(seed::mix(gseed, &[2]));
            opts.restarts = restarts;
            opts.iters_per_restart = spec.iters;
            if spec.warm_start == WarmStart::Clique {
                let mut w = vec![0.0; n];
                let val = 1.0 / (p as f64).sqrt();
                for &v in &inst.clique {
                    w[v] = val;
                }
                opts.init.warm_starts.push(w);
            }
            let max = maximize(&inst.graph, spec.r, &opts)?;
            let cfg = RecoveryConfig::default_for(n, spec.r, seed::mix(gseed, &[3]));
            let report = recover(&inst.graph, p, &max.x, &cfg)?;
            let success = report.found() == Some(inst.clique.as_slice());
            let ms = if spec.timings {
                started.elapsed().as_millis() as u64
            } else {
                0
            };
            let row = fmt_row(&[
                n.to_string(),
                spec.r.to_string(),
                p.to_string(),
                trial.to_string(),
                gseed.to_string(),
                if success { "1" } else { "0" }.to_string(),
                f(max.value),
                report.trials_used().to_string(),
                ms.to_string(),
            ]);
            Ok(((cell, trial), row))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = rows;
    rows.sort_by_key(|(k, _)| *k);
    let mut out = String::from("n,r,p,trial,seed,success,maximizer_value,trials_used,ms\n");
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

/// Tail estimates across the (N, t/N) grid.
pub fn run_concentration(spec: &ExperimentSpec) -> Result<String> {
    let v_source = VSource::parse(&spec.v_source)?;
    let mut cells: Vec<(usize, f64)> = Vec::new();
    for &n in &spec.n_grid {
        for &m in &spec.t_over_n {
            cells.push((n, m));
        }
    }
    let rows: Vec<(usize, String)> = cells
        .par_iter()
        .enumerate()
        .map(|(cell, &(n, mult))| {
            let dim = spec.nprime.unwrap_or(n);
            let t = mult * n as f64;
            let cseed = seed::mix(spec.seed, &[TAG_CONCENTRATION, cell as u64]);
            let est = oracle::concentration_tail(n, dim, t, spec.samples, cseed, &v_source)?;
            let row = fmt_row(&[
                n.to_string(),
                dim.to_string(),
                f(t),
                spec.samples.to_string(),
                est.exceed_count.to_string(),
                f(est.empirical_rate),
                f(est.paper_bound),
            ]);
            Ok((cell, row))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = rows;
    rows.sort_by_key(|(k, _)| *k);
    let mut out = String::from("N,Nprime,t,samples,exceed,rate,paper_bound\n");
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

/// One oracle-suite check row.
#[derive(Clone, Debug)]
pub struct SuiteRow {
    pub check: String,
    pub detail: String,
    pub pass: bool,
}

/// Exact small-instance checks: discretization bound, partition identity,
/// block evaluation against the dense oracle, and the tail-bound
/// direction where the bound is informative.
pub fn run_oracle_suite_checks(spec: &ExperimentSpec) -> Result<Vec<SuiteRow>> {
    let n = spec.n_grid.first().copied().unwrap_or(6);
    let r = spec.r;
    let gseed = seed::mix(spec.seed, &[TAG_ORACLE, 0]);
    let g = sample_gnp_half(n, gseed)?;
    let mut rows = Vec::new();

    let ua = oracle::check_u_approx(&g, r, spec.samples, seed::mix(gseed, &[1]))?;
    rows.push(SuiteRow {
        check: "u-approx".into(),
        detail: format!(
            "sampled_max={};u_max={};bound={};violations={}",
            f(ua.sampled_max),
            f(ua.u_max),
            f(ua.bound),
            ua.violations
        ),
        pass: ua.passed(),
    });

    if n % r == 0 {
        let pi = oracle::check_partition_identity(&g, r, spec.tuples, seed::mix(gseed, &[2]))?;
        rows.push(SuiteRow {
            check: "partition-identity".into(),
            detail: format!(
                "partitions={};appearances={};violations={};identity_residual={}",
                pi.partitions,
                pi.appearances,
                pi.inequality_violations,
                f(pi.identity_residual)
            ),
            pass: pi.passed(),
        });
    }

    // block evaluation against the dense oracle
    {
        use rand::{Rng, SeedableRng};
        let guards = Guards::default();
        let dense = tensor::dense_materialize(&g, r, &guards)?;
        let per_block = n / r.min(n);
        let blocks: Vec<Vec<usize>> = (0..r)
            .map(|slot| {
                let lo = slot * per_block;
                let hi = if slot == r - 1 { n } else { (slot + 1) * per_block };
                (lo..hi).collect()
            })
            .collect();
        let q = TensorQuery::with_blocks(blocks.clone())?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed::mix(gseed, &[3]));
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let xs: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
            let a = tensor::evaluate_block(&g, &q, &refs, &guards)?;
            let b = dense.form_on_blocks(&blocks, &refs);
            worst = worst.max((a - b).abs() / (1.0 + b.abs()));
        }
        rows.push(SuiteRow {
            check: "block-oracle".into(),
            detail: format!("max_rel_err={}", f(worst)),
            pass: worst <= 1e-9,
        });
    }

    // tail bound direction in the informative regime (bound < 1)
    {
        let nv = 16usize;
        let t = 50.0 * nv as f64;
        let est = oracle::concentration_tail(nv, nv, t, 2000, seed::mix(gseed, &[4]), &VSource::UnitRandom)?;
        let bound = est.paper_bound.min(1.0);
        let se = (est.empirical_rate * (1.0 - est.empirical_rate) / est.samples as f64)
            .sqrt()
            .max(1.0 / est.samples as f64);
        rows.push(SuiteRow {
            check: "concentration-direction".into(),
            detail: format!("rate={};bound={}", f(est.empirical_rate), f(est.paper_bound)),
            pass: est.empirical_rate <= bound + 3.0 * se,
        });
    }

    Ok(rows)
}

pub fn run_oracle_suite(spec: &ExperimentSpec) -> Result<String> {
    let n = spec.n_grid.first().copied().unwrap_or(6);
    let rows = run_oracle_suite_checks(spec)?;
    let mut out = String::from("check,n,r,detail,pass\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.check,
            n,
            spec.r,
            row.detail,
            if row.pass { 1 } else { 0 }
        )
        .unwrap();
    }
    Ok(out)
}

/// Run the experiment described by `spec`, returning the CSV body.
pub fn run(spec: &ExperimentSpec) -> Result<String> {
    validate(spec)?;
    match spec.kind {
        ExperimentKind::NormScaling => run_norm_scaling(spec),
        ExperimentKind::RecoveryThreshold => run_recovery_threshold(spec),
        ExperimentKind::Concentration => run_concentration(spec),
        ExperimentKind::OracleSuite => run_oracle_suite(spec),
    }
}

/// gnuplot script for a CSV produced by [`run`].
pub fn gnuplot_script(kind: ExperimentKind, csv_path: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    match kind {
        ExperimentKind::NormScaling => {
            s.push_str("set logscale x 2\nset xlabel 'n'\nset ylabel 'value / sqrt(n)'\n");
            let _ = writeln!(s, "plot '{csv_path}' using 1:6 with points");
        }
        ExperimentKind::RecoveryThreshold => {
            s.push_str("set xlabel 'p'\nset ylabel 'success'\n");
            let _ = writeln!(s, "plot '{csv_path}' using 3:6 with points");
        }
        ExperimentKind::Concentration => {
            s.push_str("set logscale y\nset xlabel 't'\nset ylabel 'rate'\n");
            let _ = writeln!(s, "plot '{csv_path}' using 3:6 with points, '{csv_path}' using 3:7 with lines");
        }
        ExperimentKind::OracleSuite => {
            s.push_str("# pass/fail table; nothing to plot\n");
        }
    }
    s
}

/// Result of re-deriving the recomputable CSV columns.
#[derive(Clone, Debug)]
pub struct CsvCheck {
    pub rows: usize,
    pub mismatches: Vec<String>,
}

impl CsvCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Recompute every derived column of a CSV and report mismatches beyond
/// 1e-12.
pub fn check_csv(kind: ExperimentKind, content: &str) -> Result<CsvCheck> {
    let mut lines = content.lines();
    let header = lines.next().ok_or_else(|| Error::invalid("empty CSV"))?;
    let expected_header = match kind {
        ExperimentKind::NormScaling => "n,r,trial,seed,value,value_per_sqrt_n,value_per_bound_shape",
        ExperimentKind::RecoveryThreshold => "n,r,p,trial,seed,success,maximizer_value,trials_used,ms",
        ExperimentKind::Concentration => "N,Nprime,t,samples,exceed,rate,paper_bound",
        ExperimentKind::OracleSuite => "check,n,r,detail,pass",
    };
    let mut mismatches = Vec::new();
    if header != expected_header {
        mismatches.push(format!("header {header:?} != {expected_header:?}"));
    }
    let mut rows = 0usize;
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        rows += 1;
        let cols: Vec<&str> = line.split(',').collect();
        let lineno = i + 2;
        let want = |c: usize| -> Result<f64> {
            cols.get(c)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("line {lineno}: bad numeric column {c}")))
        };
        match kind {
            ExperimentKind::NormScaling => {
                if cols.len() != 7 {
                    mismatches.push(format!("line {lineno}: expected 7 columns"));
                    continue;
                }
                let n = want(0)?;
                let r = want(1)? as usize;
                let value = want(4)?;
                if !close(want(5)?, value / n.sqrt()) {
                    mismatches.push(format!("line {lineno}: value_per_sqrt_n mismatch"));
                }
                if !close(want(6)?, value / bound_shape(n as usize, r)) {
                    mismatches.push(format!("line {lineno}: value_per_bound_shape mismatch"));
                }
            }
            ExperimentKind::RecoveryThreshold => {
                if cols.len() != 9 {
                    mismatches.push(format!("line {lineno}: expected 9 columns"));
                    continue;
                }
                let success = want(5)?;
                if success != 0.0 && success != 1.0 {
                    mismatches.push(format!("line {lineno}: success must be 0 or 1"));
                }
            }
            ExperimentKind::Concentration => {
                if cols.len() != 7 {
                    mismatches.push(format!("line {lineno}: expected 7 columns"));
                    continue;
                }
                let nv = want(0)? as usize;
                let t = want(2)?;
                let samples = want(3)?;
                let exceed = want(4)?;
                if !close(want(5)?, exceed / samples) {
                    mismatches.push(format!("line {lineno}: rate mismatch"));
                }
                if !close(want(6)?, oracle::tail_bound(nv, t)) {
                    mismatches.push(format!("line {lineno}: paper_bound mismatch"));
                }
            }
            ExperimentKind::OracleSuite => {
                if cols.len() != 5 {
                    mismatches.push(format!("line {lineno}: expected 5 columns"));
                    continue;
                }
                if cols[4] != "0" && cols[4] != "1" {
                    mismatches.push(format!("line {lineno}: pass must be 0 or 1"));
                }
            }
        }
    }
    if rows == 0 {
        mismatches.push("no data rows".into());
    }
    Ok(CsvCheck { rows, mismatches })
}
