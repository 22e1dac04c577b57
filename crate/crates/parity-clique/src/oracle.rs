//! Brute-force and Monte-Carlo reference computations: exhaustive
//! maximization over the discretized set U, the concentration tail
//! sampler, and exact small-n verification of the discretization and
//! partition bounds. Indicator-vector sums are carried in integers;
//! floating point enters only at the final normalization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decomp::DiscretizedVector;
use crate::error::{Error, Result};
use crate::graph::SignGraph;
use crate::seed;
use crate::tensor::{self, Guards, TensorQuery};

/// Default cap on the number of (sign, support) slot combinations the
/// exhaustive U search may visit: (2^n)^r up to 2^24, i.e. n = 8 at r = 3.
pub const BRUTE_FORCE_GUARD: u128 = 1 << 24;

/// Result of the exhaustive search over U^r.
#[derive(Clone, Debug)]
pub struct BruteForceMax {
    /// Maximum of the form over independent U slots.
    pub value: f64,
    /// Integer tuple sum attaining the maximum (before normalization).
    pub numerator: i64,
    /// Argmax slots as discretized vectors.
    pub argmax: Vec<DiscretizedVector>,
}

/// Exact maximum of A(x^(1), …, x^(r)) over x^(i) ∈ U for r ∈ {2, 3}.
///
/// Signs contribute only a global ±1, so the search maximizes
/// |sum| / sqrt(prod |S_i|) over supports; for fixed leading supports the
/// tuple sum is additive over the last support, which reduces the inner
/// maximization to sorted prefix sums.
pub fn brute_force_max_over_u(g: &SignGraph, r: usize, guard: u128) -> Result<BruteForceMax> {
    let n = g.n();
    if !(2..=3).contains(&r) {
        return Err(Error::invalid("exhaustive U search supports r in {2, 3}"));
    }
    let candidates = (1u128 << n).saturating_pow(r as u32);
    if n >= 32 || candidates > guard {
        return Err(Error::limit(format!(
            "U^{r} enumeration of {candidates} support combinations exceeds guard {guard}"
        )));
    }

    let full: u32 = ((1u64 << n) - 1) as u32;
    let members = |m: u32| -> Vec<usize> { (0..n).filter(|&i| (m >> i) & 1 == 1).collect() };

    let mut best_value = 0.0f64;
    let mut best_num: i64 = 0;
    let mut best: Option<(u32, u32, Vec<usize>, i64)> = None; // S1, S2(unused for r=2), S3 members, numerator

    match r {
        2 => {
            for s1 in 1..=full {
                let s1v = members(s1);
                // additive weight of each candidate last-slot vertex
                let weights: Vec<(i64, usize)> = (0..n)
                    .map(|v| {
                        let mut w = 0i64;
                        for &k1 in &s1v {
                            if k1 != v {
                                w += g.sign_unchecked(k1, v);
                            }
                        }
                        (w, v)
                    })
                    .collect();
                if let Some((num, sel, value)) = best_suffix(&weights, s1v.len() as f64) {
                    if value > best_value {
                        best_value = value;
                        best_num = num;
                        best = Some((s1, 0, sel, num));
                    }
                }
            }
        }
        3 => {
            for s1 in 1..=full {
                let s1v = members(s1);
                for s2 in 1..=full {
                    let s2v = members(s2);
                    let weights: Vec<(i64, usize)> = (0..n)
                        .map(|v| {
                            let mut w = 0i64;
                            for &k1 in &s1v {
                                if k1 == v {
                                    continue;
                                }
                                let e1v = g.sign_unchecked(k1, v);
                                for &k2 in &s2v {
                                    if k2 == v || k2 == k1 {
                                        continue;
                                    }
                                    w += g.sign_unchecked(k1, k2) * e1v * g.sign_unchecked(k2, v);
                                }
                            }
                            (w, v)
                        })
                        .collect();
                    let denom = (s1v.len() * s2v.len()) as f64;
                    if let Some((num, sel, value)) = best_suffix(&weights, denom) {
                        if value > best_value {
                            best_value = value;
                            best_num = num;
                            best = Some((s1, s2, sel, num));
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    let argmax = match best {
        None => {
            // every tuple repeats an index (n = 1): the form is identically 0
            let v = DiscretizedVector {
                sign: 1,
                support: vec![0],
            };
            vec![v; r]
        }
        Some((s1, s2, s3, num)) => {
            let mut out = vec![DiscretizedVector {
                sign: 1,
                support: members(s1),
            }];
            if r == 3 {
                out.push(DiscretizedVector {
                    sign: 1,
                    support: members(s2),
                });
            }
            // put the sign correction on the last slot
            out.push(DiscretizedVector {
                sign: if num < 0 { -1 } else { 1 },
                support: s3,
            });
            out
        }
    };
    Ok(BruteForceMax {
        value: best_value,
        numerator: best_num.abs(),
        argmax,
    })
}

/// Best |prefix sum| / sqrt(denom * m) over the m largest or m smallest
/// weights; returns (signed numerator, chosen vertices, value).
fn best_suffix(weights: &[(i64, usize)], denom_product: f64) -> Option<(i64, Vec<usize>, f64)> {
    let mut sorted = weights.to_vec();
    sorted.sort_by_key(|&(w, v)| (std::cmp::Reverse(w), v));
    let mut best: Option<(i64, Vec<usize>, f64)> = None;
    let mut consider = |num: i64, sel: &[usize]| {
        let value = num.abs() as f64 / (denom_product * sel.len() as f64).sqrt();
        if best.as_ref().is_none_or(|b| value > b.2) {
            best = Some((num, sel.to_vec(), value));
        }
    };
    let mut acc = 0i64;
    let mut sel = Vec::new();
    for &(w, v) in &sorted {
        acc += w;
        sel.push(v);
        consider(acc, &sel);
    }
    acc = 0;
    sel.clear();
    for &(w, v) in sorted.iter().rev() {
        acc += w;
        sel.push(v);
        consider(acc, &sel);
    }
    best
}

/// Source of the fixed v-vectors for the concentration sampler.
#[derive(Clone, Debug)]
pub enum VSource {
    /// Independent uniform unit vectors.
    UnitRandom,
    /// Every coordinate 1/sqrt(dim).
    WorstIsh,
    Supplied(Vec<Vec<f64>>),
}

impl VSource {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "unit-random" => Ok(VSource::UnitRandom),
            "worst-ish" => Ok(VSource::WorstIsh),
            other => Err(Error::invalid(format!("unknown v_source {other:?}"))),
        }
    }
}

/// Empirical tail of sum_i (u^(i) · v^(i))^2 for random sign vectors u,
/// against the closed-form bound e^(-t/18) * (4 sqrt(e pi))^N.
#[derive(Clone, Debug)]
pub struct TailEstimate {
    pub n_vectors: usize,
    pub dim: usize,
    pub threshold: f64,
    pub samples: usize,
    pub exceed_count: usize,
    pub empirical_rate: f64,
    /// Bound value as given by the formula, even when above 1.
    pub paper_bound: f64,
    pub mean_statistic: f64,
    pub max_statistic: f64,
}

pub fn tail_bound(n_vectors: usize, threshold: f64) -> f64 {
    // exp(N ln(4 sqrt(e pi)) - t/18), assembled in the exponent to avoid
    // overflow at large N
    let ln_base = (4.0 * (std::f64::consts::E * std::f64::consts::PI).sqrt()).ln();
    (n_vectors as f64 * ln_base - threshold / 18.0).exp()
}

/// Sample the tail statistic: `samples` draws of fresh sign vectors
/// u^(1..N) against fixed v's, counting how often the squared-projection
/// sum reaches `threshold`.
pub fn concentration_tail(
    n_vectors: usize,
    dim: usize,
    threshold: f64,
    samples: usize,
    master_seed: u64,
    v_source: &VSource,
) -> Result<TailEstimate> {
    if n_vectors == 0 || dim == 0 || samples == 0 {
        return Err(Error::invalid("vector count, dimension and samples must be positive"));
    }
    let vs: Vec<Vec<f64>> = match v_source {
        VSource::WorstIsh => {
            vec![vec![1.0 / (dim as f64).sqrt(); dim]; n_vectors]
        }
        VSource::UnitRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(master_seed, &[0xfeed]));
            (0..n_vectors)
                .map(|_| {
                    let v: Vec<f64> = (0..dim)
                        .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal))
                        .collect();
                    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    v.into_iter().map(|a| a / norm).collect()
                })
                .collect()
        }
        VSource::Supplied(vs) => vs.clone(),
    };
    if vs.len() != n_vectors {
        return Err(Error::invalid(format!("expected {n_vectors} v vectors, got {}", vs.len())));
    }
    for v in &vs {
        if v.len() != dim {
            return Err(Error::invalid("v vector with wrong dimension"));
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::invalid(format!("v vector norm {norm} exceeds 1")));
        }
    }
    let sums: Vec<f64> = vs.iter().map(|v| v.iter().sum()).collect();

    // one statistic per sample, parallel with per-sample derived seeds
    let stats: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(master_seed, &[1, s as u64]));
            let mut stat = 0.0;
            for (v, &sum_v) in vs.iter().zip(&sums) {
                // u·v = sum v - 2 * sum over minus-sign coordinates
                let mut minus = 0.0;
                let mut j = 0;
                while j < dim {
                    let word: u64 = rand::Rng::random(&mut rng);
                    let take = (dim - j).min(64);
                    for b in 0..take {
                        if (word >> b) & 1 == 1 {
                            minus += v[j + b];
                        }
                    }
                    j += take;
                }
                let dot = sum_v - 2.0 * minus;
                stat += dot * dot;
            }
            stat
        })
        .collect();

    let mut exceed = 0usize;
    let mut mean = 0.0;
    let mut max = f64::NEG_INFINITY;
    for &s in &stats {
        if s >= threshold {
            exceed += 1;
        }
        mean += s;
        if s > max {
            max = s;
        }
    }
    mean /= samples as f64;

    Ok(TailEstimate {
        n_vectors,
        dim,
        threshold,
        samples,
        exceed_count: exceed,
        empirical_rate: exceed as f64 / samples as f64,
        paper_bound: tail_bound(n_vectors, threshold),
        mean_statistic: mean,
        max_statistic: max,
    })
}

/// Outcome of the discretization check: sampled unit-sphere tuples never
/// beat (2 ⌈r log2 n⌉)^r times the exact U maximum.
#[derive(Clone, Debug)]
pub struct UApproxReport {
    pub sampled_max: f64,
    pub u_max: f64,
    pub factor: f64,
    pub bound: f64,
    pub samples: usize,
    pub violations: usize,
}

impl UApproxReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn check_u_approx(g: &SignGraph, r: usize, samples: usize, master_seed: u64) -> Result<UApproxReport> {
    let n = g.n();
    let brute = brute_force_max_over_u(g, r, BRUTE_FORCE_GUARD)?;
    let depth = crate::decomp::default_depth(r, n);
    let factor = (2.0 * depth as f64).powi(r as i32);
    let bound = factor * brute.value;
    let guards = Guards::default();
    let q = TensorQuery::new(r)?;

    let maxima: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(master_seed, &[2, s as u64]));
            let xs: Vec<Vec<f64>> = (0..r)
                .map(|_| {
                    let v: Vec<f64> = (0..n)
                        .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal))
                        .collect();
                    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    v.into_iter().map(|a| a / norm).collect()
                })
                .collect();
            let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
            tensor::evaluate(g, &q, &refs, &guards).unwrap()
        })
        .collect();

    let mut sampled_max = f64::NEG_INFINITY;
    let mut violations = 0usize;
    for &m in &maxima {
        if m > sampled_max {
            sampled_max = m;
        }
        if m > bound + 1e-9 {
            violations += 1;
        }
    }
    Ok(UApproxReport {
        sampled_max,
        u_max: brute.value,
        factor,
        bound,
        samples,
        violations,
    })
}

/// Outcome of the partition check over all ordered equal-size partitions.
#[derive(Clone, Debug)]
pub struct PartitionReport {
    pub partitions: usize,
    /// Number of partitions each distinct tuple appears in (equal for all).
    pub appearances: usize,
    pub tuples_checked: usize,
    pub inequality_violations: usize,
    /// Max |A - (1/m) sum_V A|_V| over the checked tuples.
    pub identity_residual: f64,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.inequality_violations == 0 && self.identity_residual <= 1e-9
    }
}

/// Exhaustively verify that the full form is controlled by its
/// off-diagonal blocks: every distinct r-tuple appears in the same number
/// m of ordered equal partitions, |A| <= (r^r / |P|) * sum_V |A|_V|, and
/// A equals the partition average exactly.
pub fn check_partition_identity(g: &SignGraph, r: usize, tuples: usize, master_seed: u64) -> Result<PartitionReport> {
    let n = g.n();
    if r < 2 || !n.is_multiple_of(r) {
        return Err(Error::invalid(format!("need r >= 2 dividing n, got n={n} r={r}")));
    }
    let partitions = enumerate_equal_partitions(n, r);
    let count = partitions.len();
    if count > 100_000 {
        return Err(Error::limit(format!("{count} partitions exceed the enumeration guard")));
    }

    // equal-appearance count over all distinct ordered r-tuples
    let mut appearances: Option<usize> = None;
    let mut tuple = vec![0usize; r];
    loop {
        let distinct = (0..r).all(|a| !tuple[a + 1..].contains(&tuple[a]));
        if distinct {
            let m = partitions
                .iter()
                .filter(|p| (0..r).all(|slot| p[slot].contains(&tuple[slot])))
                .count();
            match appearances {
                None => appearances = Some(m),
                Some(prev) => {
                    if prev != m {
                        return Err(Error::invalid(format!(
                            "tuple {tuple:?} appears in {m} partitions, expected {prev}"
                        )));
                    }
                }
            }
        }
        let mut d = r;
        let mut done = false;
        loop {
            if d == 0 {
                done = true;
                break;
            }
            d -= 1;
            tuple[d] += 1;
            if tuple[d] < n {
                break;
            }
            tuple[d] = 0;
        }
        if done {
            break;
        }
    }
    let appearances = appearances.unwrap_or(0);

    let guards = Guards::default();
    let q = TensorQuery::new(r)?;
    let ratio = (r as f64).powi(r as i32) / count as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(master_seed, &[3]));
    let mut violations = 0usize;
    let mut residual = 0.0f64;
    for _ in 0..tuples {
        let xs: Vec<Vec<f64>> = (0..r)
            .map(|_| {
                let v: Vec<f64> = (0..n)
                    .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal))
                    .collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                v.into_iter().map(|a| a / norm).collect()
            })
            .collect();
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let full = tensor::evaluate(g, &q, &refs, &guards)?;
        let mut abs_sum = 0.0;
        let mut signed_sum = 0.0;
        for p in &partitions {
            let bq = TensorQuery::with_blocks(p.clone())?;
            let b = tensor::evaluate_block(g, &bq, &refs, &guards)?;
            abs_sum += b.abs();
            signed_sum += b;
        }
        if full.abs() > ratio * abs_sum + 1e-9 {
            violations += 1;
        }
        let id_err = (full - signed_sum / appearances as f64).abs();
        if id_err > residual {
            residual = id_err;
        }
    }

    Ok(PartitionReport {
        partitions: count,
        appearances,
        tuples_checked: tuples,
        inequality_violations: violations,
        identity_residual: residual,
    })
}

/// All ordered partitions of [0, n) into r blocks of size n/r.
fn enumerate_equal_partitions(n: usize, r: usize) -> Vec<Vec<Vec<usize>>> {
    let block = n / r;
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::with_capacity(r);
    let all: Vec<usize> = (0..n).collect();
    fn combos(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (i, &first) in pool.iter().enumerate() {
            if pool.len() - i < k {
                break;
            }
            for mut rest in combos(&pool[i + 1..], k - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    fn rec(
        remaining: Vec<usize>,
        block: usize,
        r: usize,
        current: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if current.len() == r {
            out.push(current.clone());
            return;
        }
        for c in combos(&remaining, block) {
            let rest: Vec<usize> = remaining.iter().filter(|v| !c.contains(v)).cloned().collect();
            current.push(c);
            rec(rest, block, r, current, out);
            current.pop();
        }
    }
    rec(all, block, r, &mut current, &mut out);
    out
}
