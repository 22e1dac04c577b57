//! Evaluate the parity tensor every way the crate knows how: single
//! entries, the full multilinear form, the recursive block form, the
//! gradient, and the dense materialized oracle they are all checked
//! against.
//!
//! Run with: cargo run --example tensor_evaluation

use parity_clique::graph::{plant_clique, sample_gnp_half};
use parity_clique::tensor::{
    b_eval, dense_materialize, evaluate, evaluate_block, evaluate_indicator_exact, gradient,
    tensor_entry, Guards, TensorQuery,
};

fn main() -> parity_clique::Result<()> {
    let guards = Guards::default();
    let n = 9;
    let g = sample_gnp_half(n, 4)?;

    println!("entry at (0,1,2): {}", tensor_entry(&g, &[0, 1, 2])?);
    println!("entry with a repeat (0,0,2): {}", tensor_entry(&g, &[0, 0, 2])?);

    // full form vs the dense oracle
    let x: Vec<f64> = (0..n).map(|i| ((i as f64) * 0.9).sin() / 3.0).collect();
    let q = TensorQuery::new(3)?;
    let xs: Vec<&[f64]> = (0..3).map(|_| x.as_slice()).collect();
    let fast = evaluate(&g, &q, &xs, &guards)?;
    let dense = dense_materialize(&g, 3, &guards)?;
    println!("A(x,x,x) = {fast}  (dense oracle: {})", dense.form(&xs));

    // block form through the recursive contraction family
    let blocks = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
    let bq = TensorQuery::with_blocks(blocks.clone())?;
    let block_val = evaluate_block(&g, &bq, &xs, &guards)?;
    println!(
        "A restricted to {blocks:?}: {block_val}  (dense: {})",
        dense.form_on_blocks(&blocks, &xs)
    );
    println!("B with full prefix (empty product): {}", b_eval(&g, &[0, 3, 6], &[], &blocks)?);

    // gradient and the directional identity A(x,..,x) = x·∇A / r
    let grad = gradient(&g, 3, &x, &guards)?;
    let via_grad: f64 = x.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>() / 3.0;
    println!("x·∇A/3 = {via_grad} (matches the form above)");

    // exact integer value on a planted clique indicator
    let inst = plant_clique(sample_gnp_half(64, 5)?, 9, 6)?;
    let slots: Vec<(i8, Vec<usize>)> = (0..3).map(|_| (1i8, inst.clique.clone())).collect();
    let (numerator, value) = evaluate_indicator_exact(&inst.graph, &slots)?;
    println!("clique indicator (p=9, r=3): integer sum {numerator} = 9·8·7, value {value}");
    Ok(())
}
