//! Indicator decomposition of unit-ball vectors into signed dyadic-height
//! indicator components, plus enumeration of the discretized vector sets
//! U and U_k (all vectors of the form ±|S|^{-1/2} χ^S).

use crate::error::{Error, Result};

/// One signed component y^(j): every supported coordinate holds
/// `sign(level) * 2^{-|level|}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorComponent {
    /// Nonzero level in [-depth, depth]; positive levels cover positive
    /// coordinates of the decomposed vector, negative levels the negative
    /// ones.
    pub level: i32,
    /// Sorted support.
    pub support: Vec<usize>,
}

impl IndicatorComponent {
    /// Per-coordinate magnitude 2^{-|level|}.
    pub fn magnitude(&self) -> f64 {
        0.5f64.powi(self.level.abs())
    }

    pub fn signed_value(&self) -> f64 {
        if self.level < 0 {
            -self.magnitude()
        } else {
            self.magnitude()
        }
    }

    pub fn norm(&self) -> f64 {
        self.magnitude() * (self.support.len() as f64).sqrt()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        let val = self.signed_value();
        for &i in &self.support {
            v[i] = val;
        }
        v
    }
}

/// Default decomposition depth ⌈r log2 n⌉ (at least 1).
pub fn default_depth(r: usize, n: usize) -> usize {
    let d = (r as f64 * (n as f64).log2()).ceil() as usize;
    d.max(1)
}

/// Decompose `x` (norm at most 1) into indicator components down to level
/// `depth`. Components are returned in ascending level order with empty
/// levels omitted; the reconstruction error is at most sqrt(n) * 2^-depth.
///
/// Level thresholds are strict: a coordinate equal to 2^-j is captured at
/// level j+1, so e.g. x_i = 1/4 first appears in S_3.
pub fn decompose(x: &[f64], depth: usize) -> Result<Vec<IndicatorComponent>> {
    if depth == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-12 {
        return Err(Error::invalid(format!("vector norm {norm} exceeds 1")));
    }

    let mut neg_levels = Vec::new();
    let mut pos_levels = Vec::new();

    // positive side: peel 2^-j off every coordinate still above 2^-j
    let mut residual: Vec<f64> = x.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect();
    for j in 1..=depth {
        let threshold = 0.5f64.powi(j as i32);
        let support: Vec<usize> = (0..x.len()).filter(|&i| residual[i] > threshold).collect();
        if !support.is_empty() {
            for &i in &support {
                residual[i] -= threshold;
            }
            pos_levels.push(IndicatorComponent {
                level: j as i32,
                support,
            });
        }
    }

    // negative side: exact mirror of the positive recurrence
    let mut residual: Vec<f64> = x.iter().map(|&v| if v < 0.0 { v } else { 0.0 }).collect();
    for j in 1..=depth {
        let threshold = 0.5f64.powi(j as i32);
        let support: Vec<usize> = (0..x.len()).filter(|&i| residual[i] < -threshold).collect();
        if !support.is_empty() {
            for &i in &support {
                residual[i] += threshold;
            }
            neg_levels.push(IndicatorComponent {
                level: -(j as i32),
                support,
            });
        }
    }

    neg_levels.reverse();
    neg_levels.extend(pos_levels);
    Ok(neg_levels)
}

/// Coordinate-wise sum of the components.
pub fn reconstruct(components: &[IndicatorComponent], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for c in components {
        let val = c.signed_value();
        for &i in &c.support {
            out[i] += val;
        }
    }
    out
}

/// A unit vector ±|S|^{-1/2} χ^S from the discretized set U.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscretizedVector {
    pub sign: i8,
    /// Sorted support.
    pub support: Vec<usize>,
}

impl DiscretizedVector {
    /// Per-coordinate magnitude |S|^{-1/2}.
    pub fn magnitude(&self) -> f64 {
        1.0 / (self.support.len() as f64).sqrt()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        let val = self.sign as f64 * self.magnitude();
        for &i in &self.support {
            v[i] = val;
        }
        v
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Stream of the 2·C(n,k) members of U_k in deterministic order: supports
/// ascend lexicographically, each yielding sign +1 then -1.
pub fn enumerate_u(n: usize, k: usize, guard: u128) -> Result<UkIter> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("support size {k} out of range 1..={n}")));
    }
    let count = 2 * binomial(n, k);
    if count > guard {
        return Err(Error::limit(format!("U_k enumeration of {count} vectors exceeds guard {guard}")));
    }
    Ok(UkIter {
        n,
        support: (0..k).collect(),
        pending_minus: false,
        done: false,
    })
}

/// Default |U_k| guard for [`enumerate_u`].
pub const U_ENUMERATION_GUARD: u128 = 10_000_000;

pub struct UkIter {
    n: usize,
    support: Vec<usize>,
    pending_minus: bool,
    done: bool,
}

impl Iterator for UkIter {
    type Item = DiscretizedVector;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.pending_minus {
            self.pending_minus = false;
            let item = DiscretizedVector {
                sign: -1,
                support: self.support.clone(),
            };
            // advance to the next k-combination of [0, n)
            let k = self.support.len();
            let mut i = k;
            loop {
                if i == 0 {
                    self.done = true;
                    break;
                }
                i -= 1;
                if self.support[i] < self.n - (k - i) {
                    self.support[i] += 1;
                    for j in i + 1..k {
                        self.support[j] = self.support[j - 1] + 1;
                    }
                    break;
                }
            }
            Some(item)
        } else {
            self.pending_minus = true;
            Some(DiscretizedVector {
                sign: 1,
                support: self.support.clone(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit_ball(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        // gaussian direction, radius^(1/n) scaling keeps it inside the ball
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let radius: f64 = rng.random_range(0.0..1.0f64).powf(1.0 / n as f64);
        v.into_iter().map(|a| a * radius / norm).collect()
    }

    #[test]
    fn zero_vector_gives_empty_list() {
        assert!(decompose(&[0.0; 8], 5).unwrap().is_empty());
        assert_eq!(reconstruct(&[], 4), vec![0.0; 4]);
    }

    #[test]
    fn basis_vector_hits_every_level() {
        let n = 4;
        let depth = 6;
        let mut e1 = vec![0.0; n];
        e1[1] = 1.0;
        let comps = decompose(&e1, depth).unwrap();
        assert_eq!(comps.len(), depth);
        for (idx, c) in comps.iter().enumerate() {
            assert_eq!(c.level, idx as i32 + 1);
            assert_eq!(c.support, vec![1]);
        }
        let rec = reconstruct(&comps, n);
        let want = 1.0 - 0.5f64.powi(depth as i32);
        assert!((rec[1] - want).abs() < 1e-15);
        assert_eq!(rec[0], 0.0);
    }

    #[test]
    fn quarter_height_clique_vector_enters_at_level_three() {
        // x = chi^P / 4 with |P| = 16: S_1 = S_2 = empty, S_3 = P
        let n = 64;
        let p: Vec<usize> = (10..26).collect();
        let mut x = vec![0.0; n];
        for &i in &p {
            x[i] = 0.25;
        }
        let comps = decompose(&x, 8).unwrap();
        assert_eq!(comps[0].level, 3);
        assert_eq!(comps[0].support, p);
        assert!((comps[0].magnitude() - 0.125).abs() < 1e-15);
        // every later level keeps peeling the same support
        for c in &comps {
            assert_eq!(c.support, p);
        }
    }

    #[test]
    fn norm_precondition_enforced() {
        let x = vec![0.8, 0.8];
        assert!(matches!(decompose(&x, 4), Err(Error::InvalidArgument(_))));
        assert!(matches!(decompose(&[0.5], 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn separation_of_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = random_unit_ball(&mut rng, 32);
            for c in decompose(&x, 12).unwrap() {
                for &i in &c.support {
                    if c.level > 0 {
                        assert!(x[i] > 0.0);
                    } else {
                        assert!(x[i] < 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruction_bound_and_component_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for &n in &[8usize, 64] {
            let depth = default_depth(3, n);
            for _ in 0..200 {
                let x = random_unit_ball(&mut rng, n);
                let comps = decompose(&x, depth).unwrap();
                for c in &comps {
                    assert!(c.norm() <= 1.0 + 1e-12);
                }
                let rec = reconstruct(&comps, n);
                let err = x
                    .iter()
                    .zip(&rec)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(err <= (n as f64).sqrt() * 0.5f64.powi(depth as i32) + 1e-15);
            }
        }
    }

    #[test]
    fn default_depth_matches_formula() {
        assert_eq!(default_depth(3, 256), 24);
        assert_eq!(default_depth(2, 1024), 20);
        assert_eq!(default_depth(3, 6), 8); // ceil(3 * log2 6) = ceil(7.75)
        assert_eq!(default_depth(2, 1), 1); // clamped
    }

    #[test]
    fn enumerate_u_counts_and_norms() {
        let all: Vec<_> = enumerate_u(3, 3, U_ENUMERATION_GUARD).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].support, vec![0, 1, 2]);
        assert_eq!(all[0].sign, 1);
        assert_eq!(all[1].sign, -1);

        let twelve: Vec<_> = enumerate_u(4, 2, U_ENUMERATION_GUARD).unwrap().collect();
        assert_eq!(twelve.len(), 12);
        // unit norm and no duplicates
        let mut seen = std::collections::HashSet::new();
        for v in &twelve {
            let dense = v.to_dense(4);
            let norm: f64 = dense.iter().map(|a| a * a).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(seen.insert((v.sign, v.support.clone())));
        }
        // guard
        assert!(matches!(enumerate_u(40, 20, 1000), Err(Error::ResourceLimit(_))));
        assert!(enumerate_u(4, 0, 100).is_err());
        assert!(enumerate_u(4, 5, 100).is_err());
    }

    proptest! {
        #[test]
        fn residuals_stay_in_band(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 16;
            let x = random_unit_ball(&mut rng, n);
            let depth = 10;
            // replay the positive recurrence checking the band at each level
            let mut residual: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
            for j in 1..=depth {
                let t = 0.5f64.powi(j);
                for r in residual.iter_mut() {
                    if *r > t {
                        *r -= t;
                    }
                }
                for (i, &r) in residual.iter().enumerate() {
                    prop_assert!(r >= 0.0 && r <= t + 1e-15, "i={i} level={j} residual={r}");
                }
            }
        }

        #[test]
        fn reconstruction_error_small(seed in 0u64..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 24;
            let x = random_unit_ball(&mut rng, n);
            let comps = decompose(&x, 20).unwrap();
            let rec = reconstruct(&comps, n);
            let err = x.iter().zip(&rec).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(err <= (n as f64).sqrt() * 0.5f64.powi(20));
        }
    }
}
