//! The r-parity tensor of a sign graph and its multilinear form.
//!
//! The order-r tensor has entry `prod_{i<j} E[k_i, k_j]` at tuples of
//! distinct vertices and 0 whenever an index repeats. [`evaluate`] computes
//! the multilinear form by exact enumeration over distinct tuples (the
//! reference semantics); [`evaluate_block`] computes the off-diagonal block
//! form through the recursive family of partial contractions exposed as
//! [`b_eval`]; [`gradient`] and [`evaluate_symmetric`] are closed-form
//! accelerations of the same sums used by the maximizer, and
//! [`dense_materialize`] is the brute-force oracle for tiny instances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SignGraph;

/// Resource guards for tensor operations. These are configuration, not
/// silent truncation: exceeding one is a hard `ResourceLimit` error.
#[derive(Clone, Debug)]
pub struct Guards {
    /// Maximum tensor order accepted by form/gradient evaluation.
    pub max_order: usize,
    /// Maximum number of entries (n^r) a dense materialization may hold.
    pub max_dense_entries: u128,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_order: 5,
            max_dense_entries: 10_000_000,
        }
    }
}

/// An order-r query against the tensor: the full form, or the restriction
/// to a block V_1 × … × V_r of pairwise-disjoint vertex sets.
#[derive(Clone, Debug)]
pub struct TensorQuery {
    r: usize,
    blocks: Option<Vec<Vec<usize>>>,
}

impl TensorQuery {
    pub fn new(r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
        }
        Ok(TensorQuery { r, blocks: None })
    }

    /// Query restricted to the given blocks; they must be nonempty and
    /// pairwise disjoint, one per slot.
    pub fn with_blocks(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let r = blocks.len();
        if r < 2 {
            return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
        }
        let mut seen = std::collections::HashSet::new();
        for (slot, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::invalid(format!("block {slot} is empty")));
            }
            for &v in b {
                if !seen.insert(v) {
                    return Err(Error::invalid(format!("blocks overlap at vertex {v}")));
                }
            }
        }
        Ok(TensorQuery {
            r,
            blocks: Some(blocks),
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> Option<&[Vec<usize>]> {
        self.blocks.as_deref()
    }
}

/// Tensor entry at an index tuple: 0 on repeated indices, otherwise the
/// product of the pairwise edge signs.
pub fn tensor_entry(g: &SignGraph, idx: &[usize]) -> Result<i64> {
    let r = idx.len();
    if r < 2 {
        return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
    }
    for &k in idx {
        if k >= g.n() {
            return Err(Error::invalid(format!("index {k} out of range for n={}", g.n())));
        }
    }
    for (a, &i) in idx.iter().enumerate() {
        if idx[a + 1..].contains(&i) {
            return Ok(0);
        }
    }
    let mut sign = 1i64;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            sign *= g.sign_unchecked(i, j);
        }
    }
    Ok(sign)
}

fn check_vectors(g: &SignGraph, r: usize, xs: &[&[f64]], guards: &Guards) -> Result<()> {
    if r > guards.max_order {
        return Err(Error::limit(format!("order {r} above guard {}", guards.max_order)));
    }
    if r < 2 {
        return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
    }
    if xs.len() != r {
        return Err(Error::invalid(format!("expected {r} slot vectors, got {}", xs.len())));
    }
    for (slot, x) in xs.iter().enumerate() {
        if x.len() != g.n() {
            return Err(Error::invalid(format!(
                "slot {slot} has length {}, expected n={}",
                x.len(),
                g.n()
            )));
        }
    }
    Ok(())
}

/// Multilinear form A(x^(1), …, x^(r)) over distinct index tuples.
///
/// Accumulation order is fixed: the two leading indices run
/// lexicographically and each innermost sum is taken as a masked running
/// total in ascending vertex order, so results are identical from run to
/// run of the same binary.
pub fn evaluate(g: &SignGraph, query: &TensorQuery, xs: &[&[f64]], guards: &Guards) -> Result<f64> {
    if let Some(blocks) = query.blocks() {
        return evaluate_block_inner(g, blocks, xs, guards);
    }
    let r = query.r();
    check_vectors(g, r, xs, guards)?;
    Ok(match r {
        2 => eval2(g, xs[0], xs[1]),
        3 => eval3(g, xs[0], xs[1], xs[2]),
        _ => eval_generic(g, xs),
    })
}

fn eval2(g: &SignGraph, x: &[f64], y: &[f64]) -> f64 {
    let sum_y: f64 = y.iter().sum();
    let mut acc = 0.0;
    for i in 0..g.n() {
        if x[i] == 0.0 {
            continue;
        }
        // sum over j of E_ij y_j, then drop the diagonal term y_i
        let set = masked_sum(g.row_words(i), y);
        acc += x[i] * (2.0 * set - sum_y - y[i]);
    }
    acc
}

/// Sum of `vals[k]` over the set bits of `mask`, ascending k.
#[inline]
fn masked_sum(mask: &[u64], vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (w, &word) in mask.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let k = w * 64 + bits.trailing_zeros() as usize;
            acc += vals[k];
            bits &= bits - 1;
        }
    }
    acc
}

fn eval3(g: &SignGraph, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let n = g.n();
    let sum_z: f64 = z.iter().sum();
    let mut acc = 0.0;
    for i in 0..n {
        if x[i] == 0.0 {
            continue;
        }
        let row_i = g.row_words(i);
        for j in 0..n {
            if j == i || y[j] == 0.0 {
                continue;
            }
            let row_j = g.row_words(j);
            // sum over all k of E_ik E_jk z_k; signs agree exactly off the XOR mask
            let mut diff = 0.0;
            for (w, (&a, &b)) in row_i.iter().zip(row_j).enumerate() {
                let mut x_bits = a ^ b;
                while x_bits != 0 {
                    let k = w * 64 + x_bits.trailing_zeros() as usize;
                    diff += z[k];
                    x_bits &= x_bits - 1;
                }
            }
            let e_ij = g.sign_f64(i, j);
            let inner = (sum_z - 2.0 * diff) - e_ij * (z[i] + z[j]);
            acc += x[i] * y[j] * e_ij * inner;
        }
    }
    acc
}

fn eval_generic(g: &SignGraph, xs: &[&[f64]]) -> f64 {
    let r = xs.len();
    let mut chosen = Vec::with_capacity(r);
    let mut acc = 0.0;
    eval_rec(g, xs, &mut chosen, 1, 1.0, &mut acc);
    acc
}

fn eval_rec(g: &SignGraph, xs: &[&[f64]], chosen: &mut Vec<usize>, sign: i64, weight: f64, acc: &mut f64) {
    let depth = chosen.len();
    if depth == xs.len() {
        *acc += sign as f64 * weight;
        return;
    }
    let x = xs[depth];
    for t in 0..g.n() {
        if chosen.contains(&t) || x[t] == 0.0 {
            continue;
        }
        let mut s = sign;
        for &c in chosen.iter() {
            s *= g.sign_unchecked(c, t);
        }
        chosen.push(t);
        eval_rec(g, xs, chosen, s, weight * x[t], acc);
        chosen.pop();
    }
}

/// Partial contraction B with the first `prefix.len()` indices fixed and
/// the remaining slots contracted against `xs`.
///
/// The product covers every sign pair with at least one free index, so
/// with all indices fixed the product is empty and the value is 1. The
/// expansion peels one level at a time:
/// `B(prefix) = sum_k x_k * prod_{i <= l} E[prefix_i, k] * B(prefix + k)`.
pub fn b_eval(g: &SignGraph, prefix: &[usize], xs: &[&[f64]], blocks: &[Vec<usize>]) -> Result<f64> {
    let r = blocks.len();
    let ell = prefix.len();
    if ell > r {
        return Err(Error::invalid(format!("prefix length {ell} exceeds order {r}")));
    }
    if xs.len() != r - ell {
        return Err(Error::invalid(format!(
            "expected {} trailing vectors, got {}",
            r - ell,
            xs.len()
        )));
    }
    for (slot, &k) in prefix.iter().enumerate() {
        if !blocks[slot].contains(&k) {
            return Err(Error::invalid(format!("prefix index {k} not in block {slot}")));
        }
    }
    for x in xs {
        if x.len() != g.n() {
            return Err(Error::invalid("trailing vectors must have length n"));
        }
    }
    Ok(b_eval_rec(g, prefix, xs, blocks))
}

fn b_eval_rec(g: &SignGraph, prefix: &[usize], xs: &[&[f64]], blocks: &[Vec<usize>]) -> f64 {
    let ell = prefix.len();
    if ell == blocks.len() {
        return 1.0;
    }
    let x = xs[0];
    let mut acc = 0.0;
    let mut next = Vec::with_capacity(ell + 1);
    next.extend_from_slice(prefix);
    next.push(0);
    for &k in &blocks[ell] {
        if x[k] == 0.0 {
            continue;
        }
        let mut sign = 1.0;
        for &p in prefix {
            sign *= g.sign_f64(p, k);
        }
        *next.last_mut().unwrap() = k;
        acc += x[k] * sign * b_eval_rec(g, &next, &xs[1..], blocks);
    }
    acc
}

/// Form restricted to a disjoint block V_1 × … × V_r, evaluated through the
/// recursive contraction family rather than tuple enumeration.
pub fn evaluate_block(g: &SignGraph, query: &TensorQuery, xs: &[&[f64]], guards: &Guards) -> Result<f64> {
    let blocks = query
        .blocks()
        .ok_or_else(|| Error::invalid("query has no blocks; use evaluate"))?;
    evaluate_block_inner(g, blocks, xs, guards)
}

fn evaluate_block_inner(g: &SignGraph, blocks: &[Vec<usize>], xs: &[&[f64]], guards: &Guards) -> Result<f64> {
    let r = blocks.len();
    check_vectors(g, r, xs, guards)?;
    for b in blocks {
        for &v in b {
            if v >= g.n() {
                return Err(Error::invalid(format!("block vertex {v} out of range for n={}", g.n())));
            }
        }
    }
    let x1 = xs[0];
    let mut acc = 0.0;
    for &k1 in &blocks[0] {
        if x1[k1] == 0.0 {
            continue;
        }
        acc += x1[k1] * b_eval_rec(g, &[k1], &xs[1..], blocks);
    }
    Ok(acc)
}

/// Gradient of x ↦ A(x, …, x): component i is `r * A(e_i, x, …, x)`.
///
/// Orders 2 and 3 use closed forms for the coincidence corrections so the
/// whole vector costs one pass over the sign rows; higher orders enumerate
/// (r-1)-tuples once and scatter into every component. Components are
/// computed independently (parallel over i), each with a fixed inner
/// order, so the output is deterministic.
pub fn gradient(g: &SignGraph, r: usize, x: &[f64], guards: &Guards) -> Result<Vec<f64>> {
    if r > guards.max_order {
        return Err(Error::limit(format!("order {r} above guard {}", guards.max_order)));
    }
    if r < 2 {
        return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
    }
    if x.len() != g.n() {
        return Err(Error::invalid(format!("vector length {} != n={}", x.len(), g.n())));
    }
    Ok(match r {
        2 => grad2(g, x),
        3 => grad3(g, x),
        _ => grad_generic(g, r, x),
    })
}

fn grad2(g: &SignGraph, x: &[f64]) -> Vec<f64> {
    let n = g.n();
    let sum_x: f64 = x.iter().sum();
    (0..n)
        .map(|i| {
            let set = masked_sum(g.row_words(i), x);
            2.0 * ((2.0 * set - sum_x) - x[i])
        })
        .collect()
}

fn grad3(g: &SignGraph, x: &[f64]) -> Vec<f64> {
    let n = g.n();
    let sum_x: f64 = x.iter().sum();
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    let mut out = vec![0.0; n];
    out.par_iter_mut().enumerate().for_each(|(i, gi)| {
        let row_i = g.row_words(i);
        let mut full = 0.0;
        for j in 0..n {
            if x[j] == 0.0 {
                continue;
            }
            let row_j = g.row_words(j);
            let mut diff = 0.0;
            for (w, (&a, &b)) in row_i.iter().zip(row_j).enumerate() {
                let mut bits = a ^ b;
                while bits != 0 {
                    let k = w * 64 + bits.trailing_zeros() as usize;
                    diff += x[k];
                    bits &= bits - 1;
                }
            }
            full += g.sign_f64(i, j) * x[j] * (sum_x - 2.0 * diff);
        }
        // remove coincidence tuples: b=c, b=i, c=i (triple added back twice)
        *gi = 3.0 * (full - norm_sq - 2.0 * x[i] * sum_x + 2.0 * x[i] * x[i]);
    });
    out
}

fn grad_generic(g: &SignGraph, r: usize, x: &[f64]) -> Vec<f64> {
    let n = g.n();
    let mut out = vec![0.0; n];
    let mut chosen: Vec<usize> = Vec::with_capacity(r - 1);
    grad_rec(g, r, x, &mut chosen, 1, 1.0, &mut out);
    for v in &mut out {
        *v *= r as f64;
    }
    out
}

fn grad_rec(g: &SignGraph, r: usize, x: &[f64], chosen: &mut Vec<usize>, sign: i64, weight: f64, out: &mut [f64]) {
    if chosen.len() == r - 1 {
        // scatter the completed (r-1)-tuple into every remaining component
        for i in 0..g.n() {
            if chosen.contains(&i) {
                continue;
            }
            let mut s = sign;
            for &c in chosen.iter() {
                s *= g.sign_unchecked(i, c);
            }
            out[i] += s as f64 * weight;
        }
        return;
    }
    for t in 0..g.n() {
        if chosen.contains(&t) || x[t] == 0.0 {
            continue;
        }
        let mut s = sign;
        for &c in chosen.iter() {
            s *= g.sign_unchecked(c, t);
        }
        chosen.push(t);
        grad_rec(g, r, x, chosen, s, weight * x[t], out);
        chosen.pop();
    }
}

/// A(x, …, x) through the gradient identity `A(x,…,x) = x·∇A / r`.
pub fn evaluate_symmetric(g: &SignGraph, r: usize, x: &[f64], guards: &Guards) -> Result<f64> {
    let grad = gradient(g, r, x, guards)?;
    Ok(x.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() / r as f64)
}

/// Exact integer evaluation for indicator slots `sign * |S|^{-1/2} * chi^S`:
/// returns the integer tuple sum together with the normalized value.
pub fn evaluate_indicator_exact(g: &SignGraph, slots: &[(i8, Vec<usize>)]) -> Result<(i128, f64)> {
    let r = slots.len();
    if r < 2 {
        return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
    }
    let mut work: u128 = 1;
    for (sign, support) in slots {
        if support.is_empty() {
            return Err(Error::invalid("indicator slot with empty support"));
        }
        if sign.abs() != 1 {
            return Err(Error::invalid("indicator sign must be ±1"));
        }
        for &v in support {
            if v >= g.n() {
                return Err(Error::invalid(format!("support vertex {v} out of range")));
            }
        }
        work = work.saturating_mul(support.len() as u128);
    }
    if work > 100_000_000 {
        return Err(Error::limit(format!("indicator enumeration of {work} tuples")));
    }
    let mut chosen = Vec::with_capacity(r);
    let mut acc: i128 = 0;
    indicator_rec(g, slots, &mut chosen, 1, &mut acc);
    let sign_prod: i128 = slots.iter().map(|(s, _)| *s as i128).product();
    let denom: f64 = slots.iter().map(|(_, s)| s.len() as f64).product::<f64>().sqrt();
    let total = sign_prod * acc;
    Ok((total, total as f64 / denom))
}

fn indicator_rec(g: &SignGraph, slots: &[(i8, Vec<usize>)], chosen: &mut Vec<usize>, sign: i64, acc: &mut i128) {
    let depth = chosen.len();
    if depth == slots.len() {
        *acc += sign as i128;
        return;
    }
    for &t in &slots[depth].1 {
        if chosen.contains(&t) {
            continue;
        }
        let mut s = sign;
        for &c in chosen.iter() {
            s *= g.sign_unchecked(c, t);
        }
        chosen.push(t);
        indicator_rec(g, slots, chosen, s, acc);
        chosen.pop();
    }
}

/// Fully materialized order-r tensor for tiny instances; the testing
/// oracle for every implicit evaluation path.
pub struct DenseTensor {
    n: usize,
    r: usize,
    entries: Vec<i8>,
}

impl DenseTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn get(&self, idx: &[usize]) -> i8 {
        assert_eq!(idx.len(), self.r);
        let mut off = 0usize;
        for &k in idx {
            off = off * self.n + k;
        }
        self.entries[off]
    }

    /// Full multilinear sum over all tuples, repeated indices included
    /// (their entries are zero).
    pub fn form(&self, xs: &[&[f64]]) -> f64 {
        assert_eq!(xs.len(), self.r);
        let mut acc = 0.0;
        let mut idx = vec![0usize; self.r];
        loop {
            let e = self.get(&idx);
            if e != 0 {
                let mut w = e as f64;
                for (d, &k) in idx.iter().enumerate() {
                    w *= xs[d][k];
                }
                acc += w;
            }
            // odometer
            let mut d = self.r;
            loop {
                if d == 0 {
                    return acc;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.n {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Multilinear sum restricted to a block V_1 × … × V_r.
    pub fn form_on_blocks(&self, blocks: &[Vec<usize>], xs: &[&[f64]]) -> f64 {
        assert_eq!(blocks.len(), self.r);
        let mut acc = 0.0;
        let mut pick = vec![0usize; self.r];
        let mut idx = vec![0usize; self.r];
        loop {
            for d in 0..self.r {
                idx[d] = blocks[d][pick[d]];
            }
            let e = self.get(&idx);
            if e != 0 {
                let mut w = e as f64;
                for (d, &k) in idx.iter().enumerate() {
                    w *= xs[d][k];
                }
                acc += w;
            }
            let mut d = self.r;
            loop {
                if d == 0 {
                    return acc;
                }
                d -= 1;
                pick[d] += 1;
                if pick[d] < blocks[d].len() {
                    break;
                }
                pick[d] = 0;
            }
        }
    }
}

/// Materialize every entry of the order-r tensor. Guarded by
/// `guards.max_dense_entries` on n^r.
pub fn dense_materialize(g: &SignGraph, r: usize, guards: &Guards) -> Result<DenseTensor> {
    if r < 2 {
        return Err(Error::invalid(format!("tensor order must be >= 2, got {r}")));
    }
    let n = g.n();
    let count = (n as u128).pow(r as u32);
    if count > guards.max_dense_entries {
        return Err(Error::limit(format!(
            "dense materialization of {count} entries exceeds guard {}",
            guards.max_dense_entries
        )));
    }
    let mut entries = vec![0i8; count as usize];
    let mut idx = vec![0usize; r];
    for (off, slot) in entries.iter_mut().enumerate() {
        let mut o = off;
        for d in (0..r).rev() {
            idx[d] = o % n;
            o /= n;
        }
        let distinct = (0..r).all(|a| !idx[a + 1..].contains(&idx[a]));
        if distinct {
            let mut sign = 1i64;
            for a in 0..r {
                for b in a + 1..r {
                    sign *= g.sign_unchecked(idx[a], idx[b]);
                }
            }
            *slot = sign as i8;
        }
    }
    Ok(DenseTensor { n, r, entries })
}
