//! Exact small-instance cross-checks: exhaustive maximization over the
//! discretized set U, the sampled discretization bound, and the
//! equal-partition identity, all on a 6-vertex graph.
//!
//! Run with: cargo run --release --example oracle_checks

use parity_clique::graph::sample_gnp_half;
use parity_clique::oracle::{
    brute_force_max_over_u, check_partition_identity, check_u_approx, BRUTE_FORCE_GUARD,
};

fn main() -> parity_clique::Result<()> {
    let g = sample_gnp_half(6, 99)?;

    let brute = brute_force_max_over_u(&g, 3, BRUTE_FORCE_GUARD)?;
    println!("exact max over U^3: {:.4} (integer sum {})", brute.value, brute.numerator);
    for (slot, v) in brute.argmax.iter().enumerate() {
        println!("  slot {slot}: sign {:+}, support {:?}", v.sign, v.support);
    }

    let ua = check_u_approx(&g, 3, 10_000, 5)?;
    println!(
        "\nsampled unit-sphere max {:.4} <= (2 ceil(r log2 n))^r * U max = {:.4}: {} violations",
        ua.sampled_max, ua.bound, ua.violations
    );

    let pi = check_partition_identity(&g, 3, 100, 9)?;
    println!(
        "\npartition check: {} ordered partitions, every distinct triple in exactly {} of them",
        pi.partitions, pi.appearances
    );
    println!(
        "inequality violations: {}, exact-identity residual: {:.2e}",
        pi.inequality_violations, pi.identity_residual
    );
    Ok(())
}
