//! `(p+1) × (p+1)` grids of `D × D` matrices, i.e. operators on `p+1` copies
//! of the truncated Fock space. Absent blocks are zero and are skipped in
//! products, so the strictly banded charges stay cheap to multiply.
//!
//! Block indices are 0-based: the matrix unit `e_{i,j}` of the physics
//! notation is block `(i-1, j-1)` here.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BlockError {
    #[error("block ({row}, {col}) outside a {order}x{order} grid")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        order: usize,
    },
    #[error("block ({row}, {col}) is {rows}x{cols}, expected {dim}x{dim}")]
    DimensionMismatch {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    order: usize,
    dim: usize,
    blocks: Vec<Option<Matrix>>,
}

impl BlockOperator {
    pub fn zeros(order: usize, dim: usize) -> Self {
        BlockOperator {
            order,
            dim,
            blocks: alloc::vec![None; order * order],
        }
    }

    pub fn identity(order: usize, dim: usize) -> Self {
        let mut op = Self::zeros(order, dim);
        for i in 0..order {
            op.blocks[i * order + i] = Some(Matrix::identity(dim, dim));
        }
        op
    }

    /// Number of block rows (`p + 1`).
    pub fn order(&self) -> usize {
        self.order
    }

    /// Dimension of each block (the Fock truncation `D`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_dim(&self) -> usize {
        self.order * self.dim
    }

    pub fn block(&self, row: usize, col: usize) -> Option<&Matrix> {
        self.blocks[row * self.order + col].as_ref()
    }

    /// The block at `(row, col)`, materializing zeros when absent.
    pub fn block_or_zero(&self, row: usize, col: usize) -> Matrix {
        self.block(row, col)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim, self.dim))
    }

    pub fn set_block(&mut self, row: usize, col: usize, m: Matrix) -> Result<(), BlockError> {
        if row >= self.order || col >= self.order {
            return Err(BlockError::IndexOutOfRange {
                row,
                col,
                order: self.order,
            });
        }
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(BlockError::DimensionMismatch {
                row,
                col,
                rows: m.nrows(),
                cols: m.ncols(),
                dim: self.dim,
            });
        }
        self.blocks[row * self.order + col] = Some(m);
        Ok(())
    }

    /// Iterates over present blocks as `(row, col, matrix)`.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &Matrix)> {
        self.blocks
            .iter()
            .enumerate()
            .filter_map(move |(k, b)| b.as_ref().map(|m| (k / self.order, k % self.order, m)))
    }

    /// Transposes the grid and each block (all entries are real).
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.order, self.dim);
        for (i, j, m) in self.blocks() {
            out.blocks[j * self.order + i] = Some(m.transpose());
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.as_ref().map(|m| m * factor))
            .collect();
        BlockOperator {
            order: self.order,
            dim: self.dim,
            blocks,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.order, self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, unitary: &BlockOperator) -> Self {
        &(unitary * self) * &unitary.adjoint()
    }

    pub fn to_dense(&self) -> Matrix {
        let d = self.dim;
        let mut out = Matrix::zeros(self.total_dim(), self.total_dim());
        for (i, j, m) in self.blocks() {
            out.view_mut((i * d, j * d), (d, d)).copy_from(m);
        }
        out
    }

    /// Euclidean norm of column `local` of block column `copy`, across all block rows.
    pub fn column_norm(&self, copy: usize, local: usize) -> f64 {
        let mut sq = 0.0;
        for i in 0..self.order {
            if let Some(m) = self.block(i, copy) {
                sq += m.column(local).norm_squared();
            }
        }
        libm::sqrt(sq)
    }

    /// Same as [`column_norm`](Self::column_norm) but only over off-diagonal blocks.
    pub fn off_diagonal_column_norm(&self, copy: usize, local: usize) -> f64 {
        let mut sq = 0.0;
        for i in (0..self.order).filter(|&i| i != copy) {
            if let Some(m) = self.block(i, copy) {
                sq += m.column(local).norm_squared();
            }
        }
        libm::sqrt(sq)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.blocks().map(|(_, _, m)| m.amax()).fold(0.0, f64::max)
    }

    /// True if every present block is exactly diagonal and sits on the block diagonal.
    pub fn is_block_diagonal_of_diagonals(&self) -> bool {
        self.blocks().all(|(i, j, m)| {
            if i != j {
                return m.iter().all(|x| *x == 0.0);
            }
            (0..self.dim).all(|r| (0..self.dim).all(|c| r == c || m[(r, c)] == 0.0))
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Matrix, &Matrix) -> Matrix, neg: bool) -> Self {
        assert_eq!(
            (self.order, self.dim),
            (other.order, other.dim),
            "block operator shape mismatch"
        );
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(f(a, b)),
                (Some(a), None) => Some(a.clone()),
                (None, Some(b)) => Some(if neg { -b } else { b.clone() }),
                (None, None) => None,
            })
            .collect();
        BlockOperator {
            order: self.order,
            dim: self.dim,
            blocks,
        }
    }
}

/// Places `entries[(i, j)]` at block `(i, j)` (0-based) of a `(p+1) × (p+1)` grid.
/// Repeated positions are summed.
pub fn block_compose<I>(p: usize, dim: usize, entries: I) -> Result<BlockOperator, BlockError>
where
    I: IntoIterator<Item = ((usize, usize), Matrix)>,
{
    let mut op = BlockOperator::zeros(p + 1, dim);
    for ((row, col), mut m) in entries {
        if row <= p && col <= p {
            if let Some(existing) = op.block(row, col).filter(|e| e.shape() == m.shape()) {
                m += existing;
            }
        }
        op.set_block(row, col, m)?;
    }
    Ok(op)
}

impl Mul for &BlockOperator {
    type Output = BlockOperator;

    fn mul(self, rhs: &BlockOperator) -> BlockOperator {
        assert_eq!(
            (self.order, self.dim),
            (rhs.order, rhs.dim),
            "block operator shape mismatch"
        );
        let n = self.order;
        let mut out = BlockOperator::zeros(n, self.dim);
        for i in 0..n {
            for k in 0..n {
                let mut acc: Option<Matrix> = None;
                for j in 0..n {
                    if let (Some(a), Some(b)) = (self.block(i, j), rhs.block(j, k)) {
                        let prod = a * b;
                        acc = Some(match acc {
                            Some(s) => s + prod,
                            None => prod,
                        });
                    }
                }
                out.blocks[i * n + k] = acc;
            }
        }
        out
    }
}

impl Add for &BlockOperator {
    type Output = BlockOperator;

    fn add(self, rhs: &BlockOperator) -> BlockOperator {
        self.zip_with(rhs, |a, b| a + b, false)
    }
}

impl Sub for &BlockOperator {
    type Output = BlockOperator;

    fn sub(self, rhs: &BlockOperator) -> BlockOperator {
        self.zip_with(rhs, |a, b| a - b, true)
    }
}

impl Neg for &BlockOperator {
    type Output = BlockOperator;

    fn neg(self) -> BlockOperator {
        self.scale(-1.0)
    }
}
