//! Candidate operations on the mirrored space R^l and numerical testing of
//! which lattice laws each (meet, join) assignment satisfies.

mod check;
mod ops;

pub use check::{
    canonical_pairs, check_law, law_matrix, pair_law_profile, riesz_pair, LawCheckConfig, LawMatrix,
    LawMatrixRow, MirroredPair, TolerancePolicy,
};
pub use ops::{
    apply_candidate, apply_candidate_f32, roll, sq, sq_inv, square_side, CandidateOp, OpError,
};
