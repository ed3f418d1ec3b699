//! Dense matrices over a [`FieldSpec`] with exact Gaussian elimination.
//!
//! Everything downstream (canonical subspace bases, membership tests,
//! certificate extraction, Vandermonde inversion) reduces to RREF here.

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FieldSpec};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>, // row-major
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<u64> = self.row(r).iter().map(|&e| self.field.enc(e)).collect();
            writeln!(f, "  {:?}", row)?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, data: Vec<FieldElem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "matrix {}x{} needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &FieldSpec, rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        let nrows = rows.len();
        Ok(Matrix {
            field: field.clone(),
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElem {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.data[r * self.cols + c] = v;
    }
    #[inline]
    pub fn row(&self, r: usize) -> &[FieldElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        let z = self.field.zero();
        self.data.iter().all(|&e| e == z)
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == f.zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// In-place reduction to the (unique) reduced row echelon form.
    /// Returns the pivot column of each nonzero row.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let zero = f.zero();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, col) != zero) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = f.inv(self.get(row, col));
            for c in col..self.cols {
                let v = self.get(row, c);
                self.set(row, c, f.mul(v, inv));
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == zero {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let tmp = self.get(a, c);
            self.set(a, c, self.get(b, c));
            self.set(b, c, tmp);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Reduces `v` against a matrix already in RREF (with the given pivots);
    /// the result is zero iff `v` lies in the row space.
    pub fn reduce_against_rref(&self, pivots: &[usize], v: &[FieldElem]) -> Vec<FieldElem> {
        let f = &self.field;
        let mut out = v.to_vec();
        for (r, &pc) in pivots.iter().enumerate() {
            let factor = out[pc];
            if factor == f.zero() {
                continue;
            }
            for c in 0..self.cols {
                out[c] = f.sub(out[c], f.mul(factor, self.get(r, c)));
            }
        }
        out
    }

    /// Basis of the right kernel {x : A x = 0}, one basis vector per row,
    /// in the standard free-column construction (deterministic).
    pub fn kernel_basis(&self) -> Matrix {
        let f = self.field.clone();
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|c| pivot_of_col[*c].is_none()).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut x = vec![f.zero(); self.cols];
            x[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = f.neg(m.get(r, fc));
            }
            rows.push(x);
        }
        Matrix::from_rows(&f, rows).expect("kernel rows are uniform")
    }

    /// Particular solution of A x = b with free variables set to zero,
    /// or None if the system is inconsistent.
    pub fn solve(&self, b: &[FieldElem]) -> Option<Vec<FieldElem>> {
        assert_eq!(b.len(), self.rows, "rhs length");
        let f = &self.field;
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols);
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let f = &self.field;
        let n = self.rows;
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, f.one());
        }
        let pivots = aug.rref();
        // invertible iff every pivot lies in the left block
        if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut out = Matrix::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c));
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    fn m(field: &FieldSpec, rows: &[&[u64]]) -> Matrix {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&e| field.elem(e).unwrap()))
            .collect();
        Matrix::new(field.clone(), rows.len(), rows[0].len(), data).unwrap()
    }

    #[test]
    fn rref_examples() {
        let f2 = field_make(2, 1).unwrap();
        let mut a = m(&f2, &[&[1, 1], &[0, 1]]);
        let piv = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(a, Matrix::identity(&f2, 2));

        let f3 = field_make(3, 1).unwrap();
        let mut b = m(&f3, &[&[2, 2]]);
        b.rref();
        assert_eq!(b, m(&f3, &[&[1, 1]])); // scaled by inv(2) = 2
    }

    #[test]
    fn rref_is_canonical_under_row_scrambles() {
        let f3 = field_make(3, 1).unwrap();
        let a = m(&f3, &[&[1, 2, 0], &[0, 1, 1]]);
        let b = m(&f3, &[&[2, 2, 1], &[1, 2, 0]]); // 2*r1+r2, r1
        let mut ra = a.clone();
        let mut rb = b.clone();
        ra.rref();
        rb.rref();
        assert_eq!(ra, rb);
    }

    #[test]
    fn kernel_and_solve() {
        let f2 = field_make(2, 1).unwrap();
        let a = m(&f2, &[&[1, 0, 1], &[0, 1, 1]]);
        let ker = a.kernel_basis();
        assert_eq!(ker.nrows(), 1);
        // A * x = 0 for every kernel row
        for r in 0..ker.nrows() {
            let x = ker.row(r).to_vec();
            for i in 0..a.nrows() {
                let mut acc = f2.zero();
                for j in 0..a.ncols() {
                    acc = f2.add(acc, f2.mul(a.get(i, j), x[j]));
                }
                assert_eq!(acc, f2.zero());
            }
        }

        let b = vec![f2.one(), f2.one()];
        let x = a.solve(&b).unwrap();
        for i in 0..a.nrows() {
            let mut acc = f2.zero();
            for j in 0..a.ncols() {
                acc = f2.add(acc, f2.mul(a.get(i, j), x[j]));
            }
            assert_eq!(acc, b[i]);
        }

        // inconsistent system
        let c = m(&f2, &[&[1, 1], &[1, 1]]);
        assert!(c.solve(&[f2.zero(), f2.one()]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let f5 = field_make(5, 1).unwrap();
        let a = m(&f5, &[&[1, 2, 0], &[0, 1, 4], &[3, 0, 2]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv).unwrap(), Matrix::identity(&f5, 3));
        let singular = m(&f5, &[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn rank_vs_transpose() {
        let f3 = field_make(3, 1).unwrap();
        let a = m(&f3, &[&[1, 2, 0], &[2, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.transpose().rank(), 2);
    }
}
