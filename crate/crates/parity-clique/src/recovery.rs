//! Recovering a planted clique from a near-maximizing vector.
//!
//! The vector is decomposed into dyadic indicator components; for each
//! component support the top eigenvector of the restricted sign matrix
//! orders the vertices, and seed-and-expand trials sample a small seed set
//! from growing prefixes, take its common neighbors, and keep the vertices
//! whose degree inside that candidate set clears a fraction of p. A
//! returned set is always a clique of exactly p vertices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decomp;
use crate::error::{Error, Result};
use crate::graph::{mask_to_vertices, popcount, vertices_to_mask, SignGraph};
use crate::maximizer::top_eigenvector;
use crate::seed;

/// Tuning for [`recover`]. `default_for` fills the documented defaults:
/// seed sets of ⌈10 log2 n⌉ vertices (capped at the current prefix
/// length), degree threshold 7/8 · p, min(n², 10⁴) trials per prefix
/// length, and a power-of-two prefix schedule.
#[derive(Clone, Debug)]
pub struct RecoveryConfig {
    pub seed_set_size: usize,
    pub degree_fraction: f64,
    pub trial_budget_per_ell: usize,
    /// Explicit prefix schedule; `None` means powers of two up to |S|,
    /// with |S| itself appended.
    pub ell_schedule: Option<Vec<usize>>,
    /// Indicator decomposition depth (levels -depth..=depth are scanned).
    pub decomp_depth: usize,
    pub eigen_iters: usize,
    pub eigen_tol: f64,
    pub try_both_orientations: bool,
    pub seed: u64,
}

impl RecoveryConfig {
    /// Defaults for an n-vertex graph and tensor order r.
    pub fn default_for(n: usize, r: usize, seed: u64) -> Self {
        let n = n.max(2);
        RecoveryConfig {
            seed_set_size: (10.0 * (n as f64).log2()).ceil() as usize,
            degree_fraction: 7.0 / 8.0,
            trial_budget_per_ell: (n * n).min(10_000),
            ell_schedule: None,
            decomp_depth: decomp::default_depth(r, n),
            eigen_iters: 100,
            eigen_tol: 1e-7,
            try_both_orientations: true,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.seed_set_size == 0 {
            return Err(Error::invalid("seed_set_size must be >= 1"));
        }
        if !(self.degree_fraction > 0.0 && self.degree_fraction <= 1.0) {
            return Err(Error::invalid("degree_fraction must be in (0, 1]"));
        }
        if self.trial_budget_per_ell == 0 {
            return Err(Error::invalid("trial budget must be >= 1"));
        }
        Ok(())
    }
}

/// Overlap of a support eigenvector with the known clique.
#[derive(Clone, Debug)]
pub struct OverlapDiagnostic {
    /// max over ±v of the eigenvector mass on S ∩ P.
    pub stat: f64,
    /// sqrt(|S ∩ P| / 2).
    pub threshold: f64,
    pub passes: bool,
    /// Sign of v achieving the max (+1 or -1).
    pub orientation: i8,
}

/// Clique density among the first ℓ eigenvector-ordered vertices.
#[derive(Clone, Debug)]
pub struct PrefixDensityDiagnostic {
    pub holds: bool,
    /// Effective prefix length after clamping to |S|.
    pub ell: usize,
    pub clamped: bool,
    pub clique_in_prefix: usize,
    pub required: f64,
}

/// Per-component trace of one recovery run.
#[derive(Clone, Debug)]
pub struct ComponentDiagnostics {
    pub level: i32,
    pub support_size: usize,
    pub eigenvalue: f64,
    pub eigen_converged: bool,
    pub trials_used: usize,
    /// Testing mode only (known planted set).
    pub overlap: Option<OverlapDiagnostic>,
    pub prefix_density: Option<PrefixDensityDiagnostic>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Vec<usize>),
    Failure,
}

#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub outcome: Outcome,
    pub components: Vec<ComponentDiagnostics>,
}

impl RecoveryReport {
    pub fn found(&self) -> Option<&[usize]> {
        match &self.outcome {
            Outcome::Found(c) => Some(c),
            Outcome::Failure => None,
        }
    }

    pub fn trials_used(&self) -> usize {
        self.components.iter().map(|c| c.trials_used).sum()
    }
}

/// Eigenvector overlap statistic against a known clique: the maximum over
/// both orientations of the mass on S ∩ P, compared to sqrt(|S ∩ P| / 2).
/// An empty intersection compares 0 against 0 and never passes.
pub fn overlap_diagnostic(v: &[f64], s: &[usize], p: &[usize]) -> OverlapDiagnostic {
    let inter: f64 = s
        .iter()
        .enumerate()
        .filter(|(_, vertex)| p.binary_search(vertex).is_ok())
        .map(|(loc, _)| v[loc])
        .sum();
    let count = s.iter().filter(|vertex| p.binary_search(vertex).is_ok()).count();
    let stat = inter.abs().max(0.0);
    let orientation = if inter >= 0.0 { 1 } else { -1 };
    let threshold = (count as f64 / 2.0).sqrt();
    OverlapDiagnostic {
        stat,
        threshold,
        passes: stat > threshold,
        orientation,
    }
}

/// Whether the first ℓ vertices of the eigenvector ordering carry at
/// least |S ∩ P| / 8 clique members; ℓ beyond |S| is clamped and noted.
pub fn prefix_density_diagnostic(ordered: &[usize], p: &[usize], ell: usize) -> PrefixDensityDiagnostic {
    let overlap = ordered.iter().filter(|v| p.binary_search(v).is_ok()).count();
    let clamped = ell > ordered.len();
    let ell_used = ell.min(ordered.len());
    let in_prefix = ordered[..ell_used]
        .iter()
        .filter(|v| p.binary_search(v).is_ok())
        .count();
    let required = overlap as f64 / 8.0;
    PrefixDensityDiagnostic {
        holds: in_prefix as f64 >= required,
        ell: ell_used,
        clamped,
        clique_in_prefix: in_prefix,
        required,
    }
}

/// Run the recovery algorithm; `truth`, when supplied, enables the
/// per-component overlap and prefix-density diagnostics and the
/// subset assertions they imply.
pub fn recover_diagnosed(
    g: &SignGraph,
    p: usize,
    x: &[f64],
    cfg: &RecoveryConfig,
    truth: Option<&[usize]>,
) -> Result<RecoveryReport> {
    cfg.validate()?;
    let n = g.n();
    if p == 0 || p > n {
        return Err(Error::invalid(format!("clique size {p} out of range 1..={n}")));
    }
    if x.len() != n {
        return Err(Error::invalid(format!("vector length {} != n={n}", x.len())));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-12 {
        return Err(Error::invalid(format!("vector norm {norm} exceeds 1")));
    }
    if let Some(t) = truth {
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("truth clique must be sorted and distinct"));
        }
    }

    let components = decomp::decompose(x, cfg.decomp_depth)?;
    let truth_mask = truth.map(|t| vertices_to_mask(n, t));
    let mut diags = Vec::with_capacity(components.len());

    for (comp_idx, comp) in components.iter().enumerate() {
        let s = &comp.support;
        let eig = top_eigenvector(g, s, cfg.eigen_iters, cfg.eigen_tol)?;
        let mut diag = ComponentDiagnostics {
            level: comp.level,
            support_size: s.len(),
            eigenvalue: eig.eigenvalue,
            eigen_converged: eig.converged,
            trials_used: 0,
            overlap: None,
            prefix_density: None,
        };

        let orientations: &[f64] = if cfg.try_both_orientations {
            &[1.0, -1.0]
        } else {
            &[1.0]
        };

        if let Some(t) = truth {
            let overlap = overlap_diagnostic(&eig.vector, s, t);
            // order by the orientation that realizes the overlap statistic
            let ordered = order_by_eigenvector(s, &eig.vector, overlap.orientation as f64);
            let inter = s.iter().filter(|v| t.binary_search(v).is_ok()).count();
            let prefix = prefix_density_diagnostic(&ordered, t, 8 * inter);
            // deterministic implication: a passing overlap forces prefix density
            if overlap.passes {
                assert!(
                    prefix.holds,
                    "prefix density must hold whenever the overlap statistic passes"
                );
            }
            diag.overlap = Some(overlap);
            diag.prefix_density = Some(prefix);
        }

        for (oi, &orientation) in orientations.iter().enumerate() {
            let ordered = order_by_eigenvector(s, &eig.vector, orientation);
            let schedule = match &cfg.ell_schedule {
                Some(e) => e.clone(),
                None => default_schedule(s.len()),
            };
            for &ell in schedule.iter().filter(|&&e| e >= 1 && e <= s.len()) {
                let seed_size = cfg.seed_set_size.min(ell);
                // sampling the whole prefix has a single outcome
                let trials = if seed_size == ell { 1 } else { cfg.trial_budget_per_ell };
                for trial in 0..trials {
                    diag.trials_used += 1;
                    let q1: Vec<usize> = if seed_size == ell {
                        ordered[..ell].to_vec()
                    } else {
                        let ts = seed::mix(
                            cfg.seed,
                            &[comp_idx as u64, oi as u64, ell as u64, trial as u64],
                        );
                        let mut rng = ChaCha8Rng::seed_from_u64(ts);
                        rand::seq::index::sample(&mut rng, ell, seed_size)
                            .iter()
                            .map(|i| ordered[i])
                            .collect()
                    };
                    let q2_mask = g.common_neighbors_mask(&q1);
                    if let (Some(t), Some(tm)) = (truth, truth_mask.as_deref()) {
                        if q1.iter().all(|v| t.binary_search(v).is_ok()) {
                            // the +1 diagonal guarantees Q2 ⊇ P when Q1 ⊆ P
                            assert!(
                                tm.iter().zip(&q2_mask).all(|(a, b)| a & !b == 0),
                                "common neighbors of a clique subset must contain the clique"
                            );
                        }
                    }
                    if popcount(&q2_mask) < p {
                        continue;
                    }
                    let candidates = mask_to_vertices(&q2_mask);
                    let threshold = cfg.degree_fraction * p as f64;
                    let survivors: Vec<usize> = candidates
                        .into_iter()
                        .filter(|&v| g.degree_within_mask(v, &q2_mask) as f64 >= threshold)
                        .collect();
                    if survivors.len() == p && g.is_clique(&survivors)? {
                        diags.push(diag);
                        return Ok(RecoveryReport {
                            outcome: Outcome::Found(survivors),
                            components: diags,
                        });
                    }
                }
            }
        }
        diags.push(diag);
    }

    Ok(RecoveryReport {
        outcome: Outcome::Failure,
        components: diags,
    })
}

/// [`recover_diagnosed`] without a known planted set.
pub fn recover(g: &SignGraph, p: usize, x: &[f64], cfg: &RecoveryConfig) -> Result<RecoveryReport> {
    recover_diagnosed(g, p, x, cfg, None)
}

/// Vertices of `s` ordered by descending `orientation * v`, ties broken by
/// vertex index so the ordering is total and deterministic.
fn order_by_eigenvector(s: &[usize], v: &[f64], orientation: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&a, &b| {
        let va = orientation * v[a];
        let vb = orientation * v[b];
        vb.partial_cmp(&va).unwrap().then(s[a].cmp(&s[b]))
    });
    idx.into_iter().map(|loc| s[loc]).collect()
}

fn default_schedule(support_len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut ell = 1usize;
    while ell <= support_len {
        out.push(ell);
        ell *= 2;
    }
    if *out.last().unwrap_or(&0) != support_len {
        out.push(support_len);
    }
    out
}
