//! The eight candidate binary operations on R^l.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("operands have different lengths: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("length {len} is not a perfect square")]
    NotSquare { len: usize },
}

/// Identifier of a candidate operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CandidateOp {
    Min,
    Max,
    Add,
    Sub,
    Hadamard,
    ScaledAdd,
    MatProd,
    CyclicAdd,
}

impl CandidateOp {
    pub const ALL: [CandidateOp; 8] = [
        CandidateOp::Min,
        CandidateOp::Max,
        CandidateOp::Add,
        CandidateOp::Sub,
        CandidateOp::Hadamard,
        CandidateOp::ScaledAdd,
        CandidateOp::MatProd,
        CandidateOp::CyclicAdd,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CandidateOp::Min => "min",
            CandidateOp::Max => "max",
            CandidateOp::Add => "add",
            CandidateOp::Sub => "sub",
            CandidateOp::Hadamard => "hadamard",
            CandidateOp::ScaledAdd => "scaled_add",
            CandidateOp::MatProd => "mat_prod",
            CandidateOp::CyclicAdd => "cyclic_add",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.id() == id)
    }

    /// Index within [`CandidateOp::ALL`]; stable key for seed derivation.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&op| op == self).expect("member of ALL")
    }

    pub fn needs_square_dim(self) -> bool {
        matches!(self, CandidateOp::MatProd)
    }
}

impl fmt::Display for CandidateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Scalar abstraction so each operation has one definition for f64 and f32.
pub(crate) trait Real:
    Copy
    + PartialOrd
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
{
    const ZERO: Self;
    const TWO: Self;
}

impl Real for f64 {
    const ZERO: Self = 0.0;
    const TWO: Self = 2.0;
}

impl Real for f32 {
    const ZERO: Self = 0.0;
    const TWO: Self = 2.0;
}

/// Side length k with k*k = len, if len is a perfect square.
pub fn square_side(len: usize) -> Option<usize> {
    let k = (len as f64).sqrt().round() as usize;
    (k * k == len).then_some(k)
}

fn check_dims<T>(a: &[T], b: &[T]) -> Result<(), OpError> {
    if a.len() != b.len() {
        return Err(OpError::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

pub(crate) fn apply_generic<T: Real>(
    op: CandidateOp,
    a: &[T],
    b: &[T],
) -> Result<Vec<T>, OpError> {
    check_dims(a, b)?;
    let l = a.len();
    let out = match op {
        CandidateOp::Min => {
            a.iter().zip(b).map(|(&x, &y)| if y < x { y } else { x }).collect()
        }
        CandidateOp::Max => {
            a.iter().zip(b).map(|(&x, &y)| if y > x { y } else { x }).collect()
        }
        CandidateOp::Add => a.iter().zip(b).map(|(&x, &y)| x + y).collect(),
        CandidateOp::Sub => a.iter().zip(b).map(|(&x, &y)| x - y).collect(),
        CandidateOp::Hadamard => a.iter().zip(b).map(|(&x, &y)| x * y).collect(),
        CandidateOp::ScaledAdd => {
            a.iter().zip(b).map(|(&x, &y)| T::TWO * x + T::TWO * y).collect()
        }
        CandidateOp::MatProd => {
            let k = square_side(l).ok_or(OpError::NotSquare { len: l })?;
            let mut out = vec![T::ZERO; l];
            for i in 0..k {
                for j in 0..k {
                    let mut acc = T::ZERO;
                    for m in 0..k {
                        acc = acc + a[i * k + m] * b[m * k + j];
                    }
                    out[i * k + j] = acc;
                }
            }
            out
        }
        CandidateOp::CyclicAdd => {
            let mut out = vec![T::ZERO; l];
            for i in 0..l {
                out[(i + 1) % l] = a[i];
            }
            for i in 0..l {
                out[i] = out[i] + b[i];
            }
            out
        }
    };
    Ok(out)
}

/// Applies a candidate operation to two equal-length f64 vectors.
///
/// min/max are elementwise, `scaled_add` is 2a+2b, `mat_prod` multiplies the
/// row-major square reshapes, `cyclic_add` shifts `a` one index forward and
/// adds `b`.
pub fn apply_candidate(op: CandidateOp, a: &[f64], b: &[f64]) -> Result<Vec<f64>, OpError> {
    apply_generic(op, a, b)
}

/// Single-precision twin of [`apply_candidate`].
pub fn apply_candidate_f32(op: CandidateOp, a: &[f32], b: &[f32]) -> Result<Vec<f32>, OpError> {
    apply_generic(op, a, b)
}

/// Row-major reshape of a length-k² vector into a k×k matrix.
pub fn sq(a: &[f64]) -> Result<Vec<Vec<f64>>, OpError> {
    let k = square_side(a.len()).ok_or(OpError::NotSquare { len: a.len() })?;
    Ok((0..k).map(|i| a[i * k..(i + 1) * k].to_vec()).collect())
}

/// Flattens a square matrix back to a vector; inverse of [`sq`].
pub fn sq_inv(m: &[Vec<f64>]) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

/// Moves element i to index (i+1) mod l.
pub fn roll(a: &[f64]) -> Vec<f64> {
    let l = a.len();
    let mut out = vec![0.0; l];
    for i in 0..l {
        out[(i + 1) % l] = a[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_add_doubles_both_sides() {
        let got = apply_candidate(CandidateOp::ScaledAdd, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(got, vec![8.0, 12.0]);
    }

    #[test]
    fn mat_prod_identity_matrix() {
        let got = apply_candidate(
            CandidateOp::MatProd,
            &[1.0, 0.0, 0.0, 1.0],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn mat_prod_matches_reshape_multiply() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [5.0, 6.0, 7.0, 8.0];
        // [[1,2],[3,4]] * [[5,6],[7,8]] = [[19,22],[43,50]]
        let got = apply_candidate(CandidateOp::MatProd, &a, &b).unwrap();
        assert_eq!(got, vec![19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn cyclic_add_rolls_first_argument() {
        let got = apply_candidate(
            CandidateOp::CyclicAdd,
            &[1.0, 2.0, 3.0, 4.0],
            &[0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(got, vec![4.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn roll_examples() {
        assert_eq!(roll(&[1.0, 2.0, 3.0, 4.0]), vec![4.0, 1.0, 2.0, 3.0]);
        assert_eq!(roll(&[7.0]), vec![7.0]);
        let a = [0.5, -1.0, 2.0];
        let mut cur = a.to_vec();
        for _ in 0..a.len() {
            cur = roll(&cur);
        }
        assert_eq!(cur, a.to_vec());
    }

    #[test]
    fn sq_round_trip_and_errors() {
        assert_eq!(sq(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let a: Vec<f64> = (0..16).map(|i| i as f64 * 0.31).collect();
        assert_eq!(sq_inv(&sq(&a).unwrap()), a);
        assert_eq!(sq(&[1.0, 2.0, 3.0]), Err(OpError::NotSquare { len: 3 }));
        assert_eq!(
            apply_candidate(CandidateOp::MatProd, &[1.0; 3], &[1.0; 3]),
            Err(OpError::NotSquare { len: 3 })
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert_eq!(
            apply_candidate(CandidateOp::Add, &[1.0], &[1.0, 2.0]),
            Err(OpError::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn ids_round_trip() {
        for op in CandidateOp::ALL {
            assert_eq!(CandidateOp::from_id(op.id()), Some(op));
        }
        assert_eq!(CandidateOp::from_id("median"), None);
    }

    #[test]
    fn square_side_detects_squares() {
        assert_eq!(square_side(16), Some(4));
        assert_eq!(square_side(1024), Some(32));
        assert_eq!(square_side(1), Some(1));
        assert_eq!(square_side(15), None);
    }
}
