//! Quantum stochastic walks on weighted digraphs.
//!
//! The crate builds the vectorized Lindblad generator of a walk, splits it
//! row-wise across worker threads and evolves density matrices with a
//! scaling-and-squaring Taylor method for the action of the exponential.
//!
//! ```
//! use qsw_core::{generator_matrix, symmetrize, InitialState, WalkSystem, WeightedDigraph};
//!
//! let g = WeightedDigraph::from_arcs(3, [(0, 2, 1.0), (1, 2, 1.0)]).unwrap();
//! let h = generator_matrix(1.0, &symmetrize(&g)).unwrap();
//! let mut walk = WalkSystem::new_gqsw(1.0, &h, &[g.adjacency().clone()], None, None, 2).unwrap();
//! walk.initial_state(InitialState::Populations(vec![1.0, 0.0, 0.0])).unwrap();
//! walk.step(100.0).unwrap();
//! let p = walk.gather_populations().unwrap();
//! assert!((p[2] - 0.5).abs() < 1e-8);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expm;
pub mod graph;
pub mod operators;
pub mod sparse;
pub mod superop;
pub mod walk;

pub use error::{QswError, Result};
pub use expm::{select_parameters, series, step, ExpmConfig, SeriesResult, TaylorParameters};
pub use graph::{
    augment, generator_matrix, in_degrees, load_matrix_market, markov_chain_matrix, out_degrees,
    read_matrix_market_file, save_matrix_market, symmetrize, DegreeVector, SinkArc, SourceArc, WeightedDigraph,
};
pub use operators::{
    demoralised_weights, fourier_entry, fourier_matrix, global_lindblad, local_lindblad, nm_h, nm_h_rot, nm_l,
    nm_measure, nm_rho_map, nm_vsets, Channel, OperatorSet, VertexSubspaces, WalkKind,
};
pub use sparse::SparseMatrix;
pub use superop::{DistributedLiouvillian, RowPartition, StateVector};
pub use walk::{expected_survival_time, DensityMatrix, InitialState, WalkSystem};
