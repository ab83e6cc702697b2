use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::rat;

/// Integer matrix of a torus embedding: ambient coordinate `x_i` pulls back
/// to `sum_j matrix[i][j] * y_j` on the subtorus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorusMap {
    ambient_rank: usize,
    sub_rank: usize,
    matrix: Vec<Vec<i64>>,
}

impl TorusMap {
    pub fn new(ambient_rank: usize, sub_rank: usize, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != ambient_rank {
            return Err(Error::DimensionMismatch(format!(
                "torus map needs {ambient_rank} rows, got {}",
                matrix.len()
            )));
        }
        if let Some(r) = matrix.iter().find(|r| r.len() != sub_rank) {
            return Err(Error::DimensionMismatch(format!(
                "torus map rows need {sub_rank} entries, got {}",
                r.len()
            )));
        }
        Ok(TorusMap {
            ambient_rank,
            sub_rank,
            matrix,
        })
    }

    pub fn identity(n: usize) -> Self {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        TorusMap {
            ambient_rank: n,
            sub_rank: n,
            matrix,
        }
    }

    pub fn zero(ambient_rank: usize, sub_rank: usize) -> Self {
        TorusMap {
            ambient_rank,
            sub_rank,
            matrix: vec![vec![0; sub_rank]; ambient_rank],
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn sub_rank(&self) -> usize {
        self.sub_rank
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    /// `self ∘ inner`: first embed by `inner`, then by `self`.
    pub fn compose(&self, inner: &TorusMap) -> Result<TorusMap> {
        if self.sub_rank != inner.ambient_rank {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: outer map expects a rank-{} torus, inner map lands in rank {}",
                self.sub_rank, inner.ambient_rank
            )));
        }
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..inner.sub_rank)
                    .map(|j| (0..self.sub_rank).map(|k| row[k] * inner.matrix[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(TorusMap {
            ambient_rank: self.ambient_rank,
            sub_rank: inner.sub_rank,
            matrix,
        })
    }

    pub fn block_diagonal(blocks: &[TorusMap]) -> TorusMap {
        let ambient: usize = blocks.iter().map(|b| b.ambient_rank).sum();
        let sub: usize = blocks.iter().map(|b| b.sub_rank).sum();
        let mut out = TorusMap::zero(ambient, sub);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.ambient_rank {
                for j in 0..b.sub_rank {
                    out.matrix[r0 + i][c0 + j] = b.matrix[i][j];
                }
            }
            r0 += b.ambient_rank;
            c0 += b.sub_rank;
        }
        out
    }

    /// Stacks maps with a common subtorus: `y ↦ (A y, B y, …)`.
    pub fn stack(blocks: &[TorusMap]) -> Result<TorusMap> {
        let sub = blocks.first().map_or(0, |b| b.sub_rank);
        if blocks.iter().any(|b| b.sub_rank != sub) {
            return Err(Error::DimensionMismatch(
                "stacked torus maps must share a subtorus".into(),
            ));
        }
        let matrix: Vec<Vec<i64>> = blocks.iter().flat_map(|b| b.matrix.clone()).collect();
        Ok(TorusMap {
            ambient_rank: matrix.len(),
            sub_rank: sub,
            matrix,
        })
    }

    pub fn column_rank(&self) -> usize {
        let cols: Vec<linalg::SparseVec> = (0..self.sub_rank)
            .map(|j| {
                (0..self.ambient_rank)
                    .filter(|&i| self.matrix[i][j] != 0)
                    .map(|i| (i, rat(self.matrix[i][j])))
                    .collect()
            })
            .collect();
        linalg::rank(&cols)
    }

    /// A torus embedding is injective exactly when the matrix has full column rank.
    pub fn is_injective(&self) -> bool {
        self.column_rank() == self.sub_rank
    }
}

impl fmt::Display for TorusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.matrix.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let s: Vec<String> = r.iter().map(i64::to_string).collect();
            write!(f, "{}", s.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_blocks() {
        let a = TorusMap::new(2, 1, vec![vec![1], vec![-1]]).unwrap();
        let id = TorusMap::identity(1);
        assert_eq!(a.compose(&id).unwrap(), a);
        let b = TorusMap::block_diagonal(&[a.clone(), id.clone()]);
        assert_eq!(b.rows(), &[vec![1, 0], vec![-1, 0], vec![0, 1]]);
        assert!(b.is_injective());
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn injectivity() {
        let zero_col = TorusMap::new(2, 2, vec![vec![1, 0], vec![1, 0]]).unwrap();
        assert!(!zero_col.is_injective());
        let dependent = TorusMap::new(2, 2, vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert!(!dependent.is_injective());
        assert!(TorusMap::zero(3, 0).is_injective());
    }

    #[test]
    fn shape_checks() {
        assert!(TorusMap::new(2, 1, vec![vec![1]]).is_err());
        assert!(TorusMap::new(1, 2, vec![vec![1]]).is_err());
    }
}
