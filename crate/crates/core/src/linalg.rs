//! Dense linear algebra over an exact field: reduced row echelon form, rank,
//! particular solutions and null spaces.
//!
//! Over the rational-function field every verdict is generic: it holds away
//! from the zero sets of the pivots, which [`Rref::pivot_values`] exposes.

use crate::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row vectors; all rows must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(columns: &[Vec<F>], rows: usize) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged matrix columns");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Stacks `other` below `self`.
    pub fn stack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_values = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).pivot_cost());
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let pv = m.get(r, c).clone();
            let inv = pv.inverse().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j).clone();
                if !v.is_zero() {
                    m.set(r, j, v * inv.clone());
                }
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rv = m.get(r, j).clone();
                    if rv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).clone() - factor.clone() * rv;
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            pivot_values.push(pv);
            r += 1;
        }
        Rref {
            matrix: m,
            pivots,
            pivot_values,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// A particular solution of `self * x = b` with free variables set to
    /// zero, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        self.solve_with_pivots(b).map(|(x, _)| x)
    }

    /// Like [`Matrix::solve`], also returning the pivot values used.
    pub fn solve_with_pivots(&self, b: &[F]) -> Option<(Vec<F>, Vec<F>)> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, bi.clone());
        }
        let rref = aug.rref();
        if rref.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &c) in rref.pivots.iter().enumerate() {
            x[c] = rref.matrix.get(row, self.cols).clone();
        }
        Some((x, rref.pivot_values))
    }

    /// A basis of `{x : self * x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        self.rref().nullspace()
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Rref<F> {
    pub matrix: Matrix<F>,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
    /// The entry each pivot row was divided by, in elimination order.
    pub pivot_values: Vec<F>,
}

impl<F: Field> Rref<F> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.matrix.cols).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let cols = self.matrix.cols;
        self.free_columns()
            .into_iter()
            .map(|free| {
                let mut v = vec![F::zero(); cols];
                v[free] = F::one();
                for (row, &c) in self.pivots.iter().enumerate() {
                    let e = self.matrix.get(row, free);
                    if !e.is_zero() {
                        v[c] = -e.clone();
                    }
                }
                v
            })
            .collect()
    }
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily from the front.
pub fn independent_subset<F: Field>(vectors: &[Vec<F>], len: usize) -> Vec<usize> {
    let m = Matrix::from_columns(vectors, len);
    m.rref().pivots
}
