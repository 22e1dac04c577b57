//! Sample a random sign graph, plant a clique, poke at the graph
//! predicates, and round-trip the instance through its file format.
//!
//! Run with: cargo run --example generate_and_plant

use parity_clique::graph::{plant_clique, read_instance, sample_gnp_half, write_instance};

fn main() -> parity_clique::Result<()> {
    let n = 64;
    let g = sample_gnp_half(n, 7)?;
    let plus: usize = (0..n)
        .map(|i| (0..i).filter(|&j| g.edge_sign(i, j).unwrap() == 1).count())
        .sum();
    println!("G({n}, 1/2) with seed 7: {plus} of {} off-diagonal signs are +1", n * (n - 1) / 2);

    let inst = plant_clique(g, 12, 99)?;
    println!("planted clique: {:?}", inst.clique);
    println!("is_clique(planted) = {}", inst.graph.is_clique(&inst.clique)?);

    // common neighbors of a clique subset always contain the whole clique
    let q1 = &inst.clique[..4];
    let q2 = inst.graph.common_neighbors(q1)?;
    let contains_all = inst.clique.iter().all(|v| q2.binary_search(v).is_ok());
    println!("common_neighbors({q1:?}) has {} vertices, contains the clique: {contains_all}", q2.len());

    let v = inst.clique[0];
    println!(
        "degree of vertex {v} within the clique: {}",
        inst.graph.degree_within(v, &inst.clique)?
    );

    let dir = std::env::temp_dir().join("parity-clique-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("instance.txt");
    write_instance(&path, &inst.graph, Some(&inst.clique))?;
    let (g2, clique2) = read_instance(&path)?;
    println!(
        "round trip through {}: graphs equal = {}, clique preserved = {}",
        path.display(),
        g2 == inst.graph,
        clique2.as_deref() == Some(inst.clique.as_slice())
    );
    Ok(())
}
