//! Small dense matrices over truncated Laurent series.
//!
//! Gaussian elimination pivots on the entry of minimal z-adic valuation to
//! keep precision loss down; singular-to-precision matrices are reported as
//! such. Sizes here are the ranks of q-difference modules, so everything is
//! schoolbook.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{assert_same_ctx, Ctx, Scalar};
use crate::series::LaurentSeries;

#[derive(Clone)]
pub struct Matrix {
    ctx: Ctx,
    rows: usize,
    cols: usize,
    data: Vec<LaurentSeries>,
}

impl Matrix {
    pub fn new(ctx: &Ctx, rows: usize, cols: usize, data: Vec<LaurentSeries>) -> Self {
        assert_eq!(data.len(), rows * cols);
        for s in &data {
            assert_same_ctx(ctx, s.ctx());
        }
        Matrix {
            ctx: ctx.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zero(ctx: &Ctx, rows: usize, cols: usize, prec: i64) -> Self {
        Matrix {
            ctx: ctx.clone(),
            rows,
            cols,
            data: vec![LaurentSeries::zero(ctx, prec); rows * cols],
        }
    }

    pub fn identity(ctx: &Ctx, n: usize, prec: i64) -> Self {
        let mut m = Matrix::zero(ctx, n, n, prec);
        for i in 0..n {
            m.set(i, i, LaurentSeries::one(ctx, prec));
        }
        m
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut out = Matrix::zero(&self.ctx, self.cols, self.rows, 0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix::new(&self.ctx, self.rows, self.cols, data)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.sub(b))
            .collect();
        Matrix::new(&self.ctx, self.rows, self.cols, data)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let prec = self
            .data
            .iter()
            .chain(&rhs.data)
            .map(|s| s.prec())
            .min()
            .unwrap_or(self.ctx.default_prec());
        let mut out = Matrix::zero(&self.ctx, self.rows, rhs.cols, prec);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = LaurentSeries::zero(&self.ctx, prec);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(rhs.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[LaurentSeries]) -> Vec<LaurentSeries> {
        assert_eq!(self.cols, v.len());
        let prec = self
            .data
            .iter()
            .chain(v.iter())
            .map(|s| s.prec())
            .min()
            .unwrap_or(self.ctx.default_prec());
        (0..self.rows)
            .map(|i| {
                let mut acc = LaurentSeries::zero(&self.ctx, prec);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let data = self.data.iter().map(|s| s.scale(c)).collect();
        Matrix::new(&self.ctx, self.rows, self.cols, data)
    }

    /// Entry-wise `σ_q^k`.
    pub fn sigma_pow(&self, k: i64) -> Self {
        let data = self.data.iter().map(|s| s.sigma_pow(k)).collect();
        Matrix::new(&self.ctx, self.rows, self.cols, data)
    }

    /// Kronecker product (tensor of systems).
    pub fn kronecker(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Matrix::zero(&self.ctx, rows, cols, 0);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        out.set(
                            i1 * rhs.rows + i2,
                            j1 * rhs.cols + j2,
                            self.get(i1, j1).mul(rhs.get(i2, j2)),
                        );
                    }
                }
            }
        }
        out
    }

    /// Gauss–Jordan inverse, pivoting on minimal valuation.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a square matrix");
        let n = self.rows;
        let prec = self
            .data
            .iter()
            .map(|s| s.prec())
            .min()
            .unwrap_or(self.ctx.default_prec());
        let mut a = self.clone();
        let mut inv = Matrix::identity(&self.ctx, n, prec);
        for col in 0..n {
            let pivot = (col..n)
                .filter_map(|r| a.get(r, col).v0().map(|v| (r, v)))
                .min_by_key(|(_, v)| *v)
                .map(|(r, _)| r)
                .ok_or(Error::DivisionByZeroSeries)?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(pivot, j).clone();
                    a.set(pivot, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                    let tmp = inv.get(pivot, j).clone();
                    inv.set(pivot, j, inv.get(col, j).clone());
                    inv.set(col, j, tmp);
                }
            }
            let piv_inv = a.get(col, col).invert()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&piv_inv));
                inv.set(col, j, inv.get(col, j).mul(&piv_inv));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero_to_prec() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, a.get(r, j).sub(&factor.mul(a.get(col, j))));
                    inv.set(r, j, inv.get(r, j).sub(&factor.mul(inv.get(col, j))));
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination with minimal-valuation pivoting; the result
    /// may be zero to precision.
    pub fn det(&self) -> LaurentSeries {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let prec = self
            .data
            .iter()
            .map(|s| s.prec())
            .min()
            .unwrap_or(self.ctx.default_prec());
        let mut a = self.clone();
        let mut det = LaurentSeries::one(&self.ctx, prec);
        for col in 0..n {
            let Some(pivot) = (col..n)
                .filter_map(|r| a.get(r, col).v0().map(|v| (r, v)))
                .min_by_key(|(_, v)| *v)
                .map(|(r, _)| r)
            else {
                return LaurentSeries::zero(&self.ctx, prec);
            };
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(pivot, j).clone();
                    a.set(pivot, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                }
                det = det.neg();
            }
            let piv = a.get(col, col).clone();
            det = det.mul(&piv);
            let piv_inv = match piv.invert() {
                Ok(p) => p,
                Err(_) => return LaurentSeries::zero(&self.ctx, prec),
            };
            for r in col + 1..n {
                let factor = a.get(r, col).mul(&piv_inv);
                if factor.is_zero_to_prec() {
                    continue;
                }
                for j in col..n {
                    a.set(r, j, a.get(r, j).sub(&factor.mul(a.get(col, j))));
                }
            }
        }
        det
    }

    /// Solves `A·x = b` for square `A` invertible to precision.
    pub fn solve(&self, b: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
        Ok(self.inverse()?.mul_vec(b))
    }

    pub fn equals(&self, rhs: &Self) -> bool {
        (self.rows, self.cols) == (rhs.rows, rhs.cols)
            && self.data.iter().zip(&rhs.data).all(|(a, b)| a.equals(b))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}
