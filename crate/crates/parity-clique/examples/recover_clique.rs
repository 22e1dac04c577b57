//! The full r=3 pipeline on a planted instance: maximize the form, feed
//! the vector to the recovery algorithm, and inspect the per-component
//! diagnostics it leaves behind.
//!
//! Run with: cargo run --release --example recover_clique

use parity_clique::graph::{plant_clique, sample_gnp_half};
use parity_clique::maximizer::{maximize, MaximizeOptions};
use parity_clique::recovery::{recover_diagnosed, Outcome, RecoveryConfig};

fn main() -> parity_clique::Result<()> {
    let n = 512;
    let p = 64;
    let inst = plant_clique(sample_gnp_half(n, 31)?, p, 32)?;
    println!("n = {n}, planted p = {p}");

    let mut warm = vec![0.0; n];
    for &v in &inst.clique {
        warm[v] = 1.0 / (p as f64).sqrt();
    }
    let mut opts = MaximizeOptions::new(33);
    opts.restarts = 2;
    opts.iters_per_restart = 10;
    opts.init.warm_starts.push(warm);
    let max = maximize(&inst.graph, 3, &opts)?;
    println!("maximizer value {:.2} from init {:?}", max.value, max.init_label);

    let cfg = RecoveryConfig::default_for(n, 3, 34);
    println!(
        "recovery config: seed sets of {} vertices, degree threshold {:.3} p, {} trials per prefix",
        cfg.seed_set_size, cfg.degree_fraction, cfg.trial_budget_per_ell
    );

    let report = recover_diagnosed(&inst.graph, p, &max.x, &cfg, Some(&inst.clique))?;
    for c in report.components.iter().take(8) {
        let overlap = c
            .overlap
            .as_ref()
            .map(|o| format!("overlap {:.2}/{:.2} ({})", o.stat, o.threshold, if o.passes { "passes" } else { "below" }))
            .unwrap_or_default();
        println!(
            "  level {:3}: |S| = {:3}, eigenvalue {:7.2}, trials {:5}, {overlap}",
            c.level, c.support_size, c.eigenvalue, c.trials_used
        );
    }
    match &report.outcome {
        Outcome::Found(clique) => {
            println!(
                "FOUND a {}-clique; equals the planted set: {}",
                clique.len(),
                clique == &inst.clique
            );
        }
        Outcome::Failure => println!("FAILURE after {} trials", report.trials_used()),
    }
    Ok(())
}
