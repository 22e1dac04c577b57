//! Subgraph parity tensors of random ±1 sign graphs: exact evaluation of
//! the multilinear form, indicator decomposition, heuristic norm
//! maximization, planted-clique recovery, and a seeded Monte-Carlo
//! experiment harness with deterministic CSV output.
//!
//! Start with the runnable programs under `examples/`; the `parity-clique`
//! binary exposes the same capabilities as subcommands.

pub mod decomp;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod maximizer;
pub mod oracle;
pub mod recovery;
pub mod seed;
pub mod tensor;

pub use error::{Error, Result};
pub use graph::{plant_clique, read_instance, sample_gnp_half, write_instance, PlantedInstance, SignGraph};
pub use tensor::{dense_materialize, evaluate, evaluate_block, gradient, tensor_entry, TensorQuery};
