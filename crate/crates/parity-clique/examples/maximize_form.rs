//! Maximize A(x, …, x) heuristically: the r=2 spectral route on a planted
//! instance, higher-order power iteration at r=3, and the effect of a
//! warm start.
//!
//! Run with: cargo run --release --example maximize_form

use parity_clique::graph::{plant_clique, sample_gnp_half};
use parity_clique::maximizer::{maximize, tensor_power_step, top_eigenvector, MaximizeOptions};
use parity_clique::tensor::Guards;

fn main() -> parity_clique::Result<()> {
    let n = 256;
    let p = 40;
    let inst = plant_clique(sample_gnp_half(n, 21)?, p, 22)?;

    // r = 2: the top eigenvector already points at the clique
    let all: Vec<usize> = (0..n).collect();
    let eig = top_eigenvector(&inst.graph, &all, 300, 1e-10)?;
    println!(
        "top eigenvalue {:.2} (clique size {p}, random bulk ~2 sqrt(n) = {:.1})",
        eig.eigenvalue,
        2.0 * (n as f64).sqrt()
    );

    let mut opts = MaximizeOptions::new(1);
    opts.restarts = 4;
    opts.iters_per_restart = 100;
    let res2 = maximize(&inst.graph, 2, &opts)?;
    println!("r=2 maximize: value {:.2} from init {:?}", res2.value, res2.init_label);

    // r = 3 from the default menu
    let mut opts = MaximizeOptions::new(2);
    opts.restarts = 8;
    opts.iters_per_restart = 30;
    let cold = maximize(&inst.graph, 3, &opts)?;
    println!("r=3 maximize (cold): value {:.2} from init {:?}", cold.value, cold.init_label);

    // warm start at the clique indicator: one power step keeps the clique
    // coordinates on top, and the reported value can only improve on it
    let mut warm = vec![0.0; n];
    for &v in &inst.clique {
        warm[v] = 1.0 / (p as f64).sqrt();
    }
    let (stepped, _) = tensor_power_step(&inst.graph, 3, &warm, &Guards::default())?;
    let min_clique = inst.clique.iter().map(|&v| stepped[v]).fold(f64::INFINITY, f64::min);
    let max_other = (0..n)
        .filter(|v| inst.clique.binary_search(v).is_err())
        .map(|v| stepped[v])
        .fold(f64::NEG_INFINITY, f64::max);
    println!("after one power step: min clique coord {min_clique:.4} > max outside coord {max_other:.4}");

    let mut opts = MaximizeOptions::new(3);
    opts.restarts = 2;
    opts.iters_per_restart = 20;
    opts.init.warm_starts.push(warm);
    let hot = maximize(&inst.graph, 3, &opts)?;
    let exact = (p * (p - 1) * (p - 2)) as f64 / (p as f64).powf(1.5);
    println!(
        "r=3 maximize (clique warm start): value {:.2} (exact clique value {exact:.2})",
        hot.value
    );
    Ok(())
}
