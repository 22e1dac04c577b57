//! Drive the experiment harness in-process: a small norm-scaling grid at
//! r=3, printed as the same CSV the `experiment` subcommand writes, plus
//! the derived-column check the `verify` subcommand runs on it.
//!
//! Run with: cargo run --release --example norm_scaling

use parity_clique::experiments::{self, ExperimentKind, ExperimentSpec};

fn main() -> parity_clique::Result<()> {
    let mut spec = ExperimentSpec::new(ExperimentKind::NormScaling);
    spec.n_grid = vec![32, 64, 128];
    spec.r = 3;
    spec.trials = 3;
    spec.restarts = 6;
    spec.iters = 30;
    spec.seed = 4242;

    let csv = experiments::run(&spec)?;
    print!("{csv}");

    let check = experiments::check_csv(spec.kind, &csv)?;
    println!("\nchecker: {} rows, derived columns consistent = {}", check.rows, check.passed());

    // byte-identical on a rerun with the same spec
    let again = experiments::run(&spec)?;
    println!("rerun byte-identical = {}", csv == again);

    // per-n best values and their doubling ratios
    let mut best = std::collections::BTreeMap::<usize, f64>::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let n: usize = cols[0].parse().unwrap();
        let v: f64 = cols[4].parse().unwrap();
        let e = best.entry(n).or_insert(f64::NEG_INFINITY);
        if v > *e {
            *e = v;
        }
    }
    let pairs: Vec<(usize, f64)> = best.into_iter().collect();
    for w in pairs.windows(2) {
        println!(
            "best value {:.2} at n={} -> {:.2} at n={}: ratio {:.3}",
            w[0].1,
            w[0].0,
            w[1].1,
            w[1].0,
            w[1].1 / w[0].1
        );
    }
    Ok(())
}
