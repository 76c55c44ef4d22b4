//! Predictive states and predictive complexity of single sites in the
//! two-magnon sector of the periodic ferromagnetic Heisenberg chain.
//!
//! The crate is organised bottom-up:
//!
//! * [`sector`]: pair basis, sector Hamiltonian and its spectral decomposition;
//! * [`fullspace`]: brute-force `2^N` evolution used as an oracle;
//! * [`bethe`]: Bethe-ansatz roots and eigenstates, an alternative backend;
//! * [`propagate`]: the common eigen-expansion evolution interface;
//! * [`predictive`]: generic equivalence projectors, the predictive map and
//!   von Neumann entropies for any finite bipartition;
//! * [`chain`]: the single-site specialization with horizon classes;
//! * [`scan`]: spacetime grids, equilibrium statistics and peak ratios.

pub mod bethe;
pub mod chain;
pub mod error;
pub mod exec;
pub mod fullspace;
pub mod linalg;
pub mod predictive;
pub mod propagate;
pub mod scan;
pub mod sector;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64 as C64;
pub use propagate::{build_engine, EngineKind, Propagator, Trajectory};
pub use sector::{ChainConfig, PairIndex, SectorState, SpectralDecomposition};
