//! Lattice-structured operations on learned embeddings of planar sets.
//!
//! The crate builds up in layers:
//!
//! - [`algebra`]: symbolic terms over meet/join, law catalog, random term
//!   generation, and equivalence-preserving rewriting.
//! - [`mirrored`]: the eight candidate vector operations and the 28×8 matrix
//!   of numerically satisfied laws.
//! - [`diffcore`]: a small reverse-mode autodiff tape, Adam, and a gradient
//!   checker.
//! - [`setgen`]: random planar set specifications, occupancy grids, and
//!   dataset files.
//! - [`embed`]: the set autoencoder (encoder to latent vectors, coordinate
//!   decoder) and its trainer.
//! - [`transport`]: the invertible coupling map that carries mirrored-space
//!   operations onto latents, plus directly parameterized baselines.
//! - [`harness`]: evaluation metrics, experiment drivers, and report output.
//!
//! Everything is deterministic given a seed; see [`rng::SeedRng`].

pub mod algebra;
pub mod diffcore;
pub mod embed;
pub mod harness;
pub mod mirrored;
pub mod setgen;
pub mod transport;
pub mod rng;

pub use algebra::{OperationSymbol, Term};
pub use embed::{EmbedModel, LatentVector};
pub use harness::{EvalConfig, ExperimentReport, ReportRow};
pub use mirrored::{CandidateOp, MirroredPair};
pub use rng::SeedRng;
pub use setgen::{Dataset, Grid, Point, SetSpec, Split};
pub use transport::{BaselineKind, DirectBaseline, LatentOps, TransportModel};
