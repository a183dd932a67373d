//! Numerical testing of which lattice laws each candidate-operation pair
//! satisfies, and the resulting 28-row matrix.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::algebra::laws::{law_names, LawCatalog, LAW_COUNT};
use crate::algebra::{eval_term, Law, PairRealization};
use crate::rng::SeedRng;

use super::ops::{
    apply_candidate, apply_candidate_f32, square_side, CandidateOp, OpError,
};

/// Assignment of candidate operations to the two lattice symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MirroredPair {
    meet: CandidateOp,
    join: CandidateOp,
}

impl MirroredPair {
    /// Panics if both symbols get the same operation.
    pub fn new(meet: CandidateOp, join: CandidateOp) -> Self {
        assert_ne!(meet, join, "meet and join need distinct operations");
        MirroredPair { meet, join }
    }

    pub fn meet(&self) -> CandidateOp {
        self.meet
    }

    pub fn join(&self) -> CandidateOp {
        self.join
    }

    pub fn uses(&self, op: CandidateOp) -> bool {
        self.meet == op || self.join == op
    }

    /// Realization over f64 vectors. Panics on dimension errors, so callers
    /// feed equal-length vectors and a square length when mat_prod is used.
    pub fn realization_f64(
        &self,
    ) -> PairRealization<Vec<f64>, impl Fn(&Vec<f64>, &Vec<f64>) -> Vec<f64>, impl Fn(&Vec<f64>, &Vec<f64>) -> Vec<f64>>
    {
        let meet = self.meet;
        let join = self.join;
        PairRealization::new(
            move |a: &Vec<f64>, b: &Vec<f64>| apply_candidate(meet, a, b).expect("meet operands"),
            move |a: &Vec<f64>, b: &Vec<f64>| apply_candidate(join, a, b).expect("join operands"),
        )
    }

    /// Single-precision twin of [`MirroredPair::realization_f64`].
    pub fn realization_f32(
        &self,
    ) -> PairRealization<Vec<f32>, impl Fn(&Vec<f32>, &Vec<f32>) -> Vec<f32>, impl Fn(&Vec<f32>, &Vec<f32>) -> Vec<f32>>
    {
        let meet = self.meet;
        let join = self.join;
        PairRealization::new(
            move |a: &Vec<f32>, b: &Vec<f32>| {
                apply_candidate_f32(meet, a, b).expect("meet operands")
            },
            move |a: &Vec<f32>, b: &Vec<f32>| {
                apply_candidate_f32(join, a, b).expect("join operands")
            },
        )
    }
}

impl fmt::Display for MirroredPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.meet, self.join)
    }
}

/// The 28 distinct pairs, in the matrix's canonical row order. Flipped
/// assignments are excluded; each unordered pair appears once.
pub fn canonical_pairs() -> Vec<MirroredPair> {
    use CandidateOp::*;
    const ORDER: [(CandidateOp, CandidateOp); 28] = [
        (Max, Min),
        (Max, Hadamard),
        (Min, Add),
        (Max, Add),
        (Min, Hadamard),
        (Min, ScaledAdd),
        (Add, Hadamard),
        (Max, ScaledAdd),
        (Min, MatProd),
        (Add, MatProd),
        (Hadamard, ScaledAdd),
        (Max, Sub),
        (Max, MatProd),
        (Max, CyclicAdd),
        (Min, CyclicAdd),
        (Add, ScaledAdd),
        (Hadamard, MatProd),
        (ScaledAdd, MatProd),
        (Min, Sub),
        (Add, Sub),
        (Add, CyclicAdd),
        (Sub, Hadamard),
        (Hadamard, CyclicAdd),
        (Sub, ScaledAdd),
        (Sub, MatProd),
        (ScaledAdd, CyclicAdd),
        (MatProd, CyclicAdd),
        (Sub, CyclicAdd),
    ];
    ORDER.into_iter().map(|(m, j)| MirroredPair::new(m, j)).collect()
}

/// The lattice-structured pair: meet as elementwise max, join as elementwise
/// min. The only candidate pair satisfying all eight laws.
pub fn riesz_pair() -> MirroredPair {
    MirroredPair::new(CandidateOp::Max, CandidateOp::Min)
}

/// How numerical law checks decide equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TolerancePolicy {
    /// Double-precision evaluation; a sample passes iff
    /// ‖lhs−rhs‖∞ ≤ τ·(1+‖lhs‖∞).
    SemiRelative { tau: f64 },
    /// Single-precision evaluation; every element must satisfy
    /// |lhs−rhs| ≤ atol + rtol·|rhs|.
    SinglePrecision { atol: f32, rtol: f32 },
}

/// Dimension, sample count, and tolerance for a law check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawCheckConfig {
    pub dim: usize,
    pub num_samples: usize,
    pub policy: TolerancePolicy,
}

impl LawCheckConfig {
    /// Default policy; matches the golden law matrix fixture and is robust to
    /// the sampling seed.
    pub fn reference() -> Self {
        LawCheckConfig {
            dim: 1024,
            num_samples: 512,
            policy: TolerancePolicy::SinglePrecision { atol: 1e-8, rtol: 1e-5 },
        }
    }

    /// Double-precision semi-relative check at small dimension. Stricter than
    /// [`LawCheckConfig::reference`]: it flags three borderline matrix cells
    /// differently (see the module tests).
    pub fn semi_relative() -> Self {
        LawCheckConfig {
            dim: 16,
            num_samples: 512,
            policy: TolerancePolicy::SemiRelative { tau: 1e-9 },
        }
    }
}

/// Draws `num_samples` argument tuples with coordinates i.i.d. uniform on
/// [0,1], evaluates both sides of `law` under the pair's realization, and
/// returns whether every sample passes the configured tolerance.
pub fn check_law(
    pair: MirroredPair,
    law: &Law,
    config: &LawCheckConfig,
    rng: &mut SeedRng,
) -> Result<bool, OpError> {
    if (pair.uses(CandidateOp::MatProd)) && square_side(config.dim).is_none() {
        return Err(OpError::NotSquare { len: config.dim });
    }
    let num_vars = law.lhs.max_variable().max(law.rhs.max_variable());
    match config.policy {
        TolerancePolicy::SemiRelative { tau } => {
            let real = pair.realization_f64();
            for _ in 0..config.num_samples {
                let args: Vec<Vec<f64>> = (0..num_vars)
                    .map(|_| (0..config.dim).map(|_| rng.uniform_f64()).collect())
                    .collect();
                let lhs = eval_term(&law.lhs, &real, &args).expect("law evaluates");
                let rhs = eval_term(&law.rhs, &real, &args).expect("law evaluates");
                let diff = lhs
                    .iter()
                    .zip(&rhs)
                    .map(|(l, r)| (l - r).abs())
                    .fold(0.0_f64, f64::max);
                let scale = lhs.iter().map(|l| l.abs()).fold(0.0_f64, f64::max);
                if diff > tau * (1.0 + scale) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        TolerancePolicy::SinglePrecision { atol, rtol } => {
            let real = pair.realization_f32();
            for _ in 0..config.num_samples {
                let args: Vec<Vec<f32>> = (0..num_vars)
                    .map(|_| (0..config.dim).map(|_| rng.uniform_f32()).collect())
                    .collect();
                let lhs = eval_term(&law.lhs, &real, &args).expect("law evaluates");
                let rhs = eval_term(&law.rhs, &real, &args).expect("law evaluates");
                let ok = lhs
                    .iter()
                    .zip(&rhs)
                    .all(|(l, r)| (l - r).abs() <= atol + rtol * r.abs());
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// One matrix row: which laws a pair satisfies, in catalog column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawMatrixRow {
    pub pair: (CandidateOp, CandidateOp),
    pub satisfied: [bool; LAW_COUNT],
}

impl LawMatrixRow {
    pub fn count(&self) -> usize {
        self.satisfied.iter().filter(|&&b| b).count()
    }
}

/// The 28×8 satisfaction matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawMatrix {
    pub rows: Vec<LawMatrixRow>,
}

impl LawMatrix {
    pub fn row(&self, meet: CandidateOp, join: CandidateOp) -> Option<&LawMatrixRow> {
        self.rows.iter().find(|r| r.pair == (meet, join))
    }

    /// CSV with columns pair, count, then one boolean column per law.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["pair".to_string(), "count".to_string()];
        header.extend(law_names().iter().map(|n| n.to_string()));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![
                format!("({}, {})", row.pair.0, row.pair.1),
                row.count().to_string(),
            ];
            rec.extend(row.satisfied.iter().map(|b| b.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Satisfaction profile of one pair across the standard catalog, in catalog
/// column order. Cell seeds match [`law_matrix`], so a profile equals the
/// corresponding matrix row.
pub fn pair_law_profile(
    pair: MirroredPair,
    config: &LawCheckConfig,
    seed: u64,
) -> Result<[bool; LAW_COUNT], OpError> {
    let catalog = LawCatalog::standard();
    let mut satisfied = [false; LAW_COUNT];
    for (li, law) in catalog.laws().iter().enumerate() {
        let mut rng = SeedRng::derived(
            seed,
            &[pair.meet().index() as u64, pair.join().index() as u64, li as u64],
        );
        satisfied[li] = check_law(pair, law, config, &mut rng)?;
    }
    Ok(satisfied)
}

/// Checks all 28 canonical pairs against all 8 laws.
///
/// Each (pair, law) cell runs on an rng derived from `seed` and the cell's
/// stable identity, so rows can be computed in parallel with output identical
/// to a serial run, and a standalone [`check_law`] with the same derived
/// seed reproduces any single cell.
pub fn law_matrix(config: &LawCheckConfig, seed: u64) -> Result<LawMatrix, OpError> {
    if square_side(config.dim).is_none() {
        return Err(OpError::NotSquare { len: config.dim });
    }
    let rows = canonical_pairs()
        .par_iter()
        .map(|pair| {
            let satisfied = pair_law_profile(*pair, config, seed)?;
            Ok(LawMatrixRow { pair: (pair.meet(), pair.join()), satisfied })
        })
        .collect::<Result<Vec<_>, OpError>>()?;
    Ok(LawMatrix { rows })
}
