//! Split a vector into signed dyadic indicator components, watch the
//! reconstruction error shrink with depth, and enumerate a slice of the
//! discretized set U_k.
//!
//! Run with: cargo run --example indicator_decomposition

use parity_clique::decomp::{decompose, default_depth, enumerate_u, reconstruct, U_ENUMERATION_GUARD};

fn main() -> parity_clique::Result<()> {
    // a clique-like plateau at height 1/4 plus some negative noise
    let n = 32;
    let mut x = vec![0.0; n];
    for v in &mut x[8..20] {
        *v = 0.25;
    }
    x[0] = -0.3;
    x[1] = -0.09;

    let depth = default_depth(3, n);
    println!("depth = ceil(3 log2 {n}) = {depth}");
    let comps = decompose(&x, depth)?;
    for c in comps.iter().take(6) {
        println!(
            "level {:3}: |support| = {:2}, coordinate value {:+.6}",
            c.level,
            c.support.len(),
            c.signed_value()
        );
    }
    println!("({} components total)", comps.len());

    // the height-1/4 plateau (vertices 8..20) enters at level 3 whole
    let level3 = comps.iter().find(|c| c.level == 3).unwrap();
    println!("level 3 support: {:?}", level3.support);

    for d in [4usize, 8, 16] {
        let rec = reconstruct(&decompose(&x, d)?, n);
        let err: f64 = x.iter().zip(&rec).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        println!(
            "depth {d:2}: reconstruction error {err:.3e} (bound sqrt(n) 2^-d = {:.3e})",
            (n as f64).sqrt() * 0.5f64.powi(d as i32)
        );
    }

    let uk: Vec<_> = enumerate_u(4, 2, U_ENUMERATION_GUARD)?.collect();
    println!("U_2 over 4 vertices has {} members:", uk.len());
    for v in uk {
        println!("  sign {:+}, support {:?}", v.sign, v.support);
    }
    Ok(())
}
