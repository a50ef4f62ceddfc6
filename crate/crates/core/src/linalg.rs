//! Dense exact matrices and row reduction.

use crate::error::{Error, Result};
use crate::field::Field;
use std::fmt;

/// Row-major dense matrix over an exact field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!("ragged rows: {} vs {}", row.len(), c)));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_columns(rows: usize, cols: &[Vec<F>]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::ShapeMismatch(format!("column {j} has length {}, expected {rows}", col.len())));
            }
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(F::zero(), |acc, (&a, &b)| if a.is_zero() { acc } else { acc + a * b })
            })
            .collect())
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            for j in c..self.cols {
                let v = self[(r, j)];
                self[(r, j)] = v * inv;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let v = self[(r, j)];
                    if !v.is_zero() {
                        self[(i, j)] -= f * v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right null space `{ v : A v = 0 }`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, free)];
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `A x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[F]) -> Result<Option<Vec<F>>> {
        if b.len() != self.rows {
            return Err(Error::ShapeMismatch(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let cols: Vec<Vec<F>> = vec![b.to_vec()];
        let rhs = Matrix::from_columns(self.rows, &cols)?;
        Ok(self.solve_many(&rhs)?.map(|x| x.column(0)))
    }

    /// Solves `A X = B` column by column; `None` if any column is inconsistent.
    pub fn solve_many(&self, b: &Matrix<F>) -> Result<Option<Matrix<F>>> {
        if b.rows != self.rows {
            return Err(Error::ShapeMismatch(format!("right-hand side has {} rows, matrix has {}", b.rows, self.rows)));
        }
        let n = self.cols;
        let mut aug = Matrix::zeros(self.rows, n + b.cols);
        for i in 0..self.rows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            for j in 0..b.cols {
                aug[(i, n + j)] = b[(i, j)];
            }
        }
        // reduce on the coefficient columns only
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            if r == aug.rows {
                break;
            }
            let Some(p) = (r..aug.rows).find(|&i| !aug[(i, c)].is_zero()) else {
                continue;
            };
            aug.swap_rows(r, p);
            let inv = aug[(r, c)].inv().expect("nonzero pivot");
            for j in c..aug.cols {
                let v = aug[(r, j)];
                aug[(r, j)] = v * inv;
            }
            for i in 0..aug.rows {
                if i == r {
                    continue;
                }
                let f = aug[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for j in c..aug.cols {
                    let v = aug[(r, j)];
                    if !v.is_zero() {
                        aug[(i, j)] -= f * v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        for i in r..aug.rows {
            if (n..aug.cols).any(|j| !aug[(i, j)].is_zero()) {
                return Ok(None);
            }
        }
        let mut x = Matrix::zeros(n, b.cols);
        for (row, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = aug[(row, n + j)];
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve_many(&Matrix::identity(self.rows)).ok()??;
        // a singular matrix may still give a consistent system for some columns
        if self.mul(&x).ok()? == Matrix::identity(self.rows) {
            Some(x)
        } else {
            None
        }
    }
}

impl<F: Field> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Column echelon helper: indices of a maximal independent subset of `vectors`,
/// scanning in order.
pub fn independent_subset<F: Field>(dim: usize, vectors: &[Vec<F>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<F>)> = Vec::new(); // (pivot, reduced row)
    let mut chosen = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        debug_assert_eq!(w.len(), dim);
        for (p, row) in &basis {
            let f = w[*p];
            if !f.is_zero() {
                for (wi, &ri) in w.iter_mut().zip(row) {
                    *wi -= f * ri;
                }
            }
        }
        if let Some(p) = w.iter().position(|x| !x.is_zero()) {
            let inv = w[p].inv().unwrap();
            for x in w.iter_mut() {
                *x *= inv;
            }
            for (_, row) in basis.iter_mut() {
                let f = row[p];
                if !f.is_zero() {
                    for (ri, &wi) in row.iter_mut().zip(&w) {
                        *ri -= f * wi;
                    }
                }
            }
            basis.push((p, w));
            chosen.push(idx);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rational};
    use proptest::prelude::*;

    fn q(n: i128) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn identity_solves_to_rhs() {
        let a = Matrix::<Rational>::identity(3);
        let b = vec![q(1), q(-2), Rational::new(1, 3)];
        assert_eq!(a.solve(&b).unwrap().unwrap(), b);
    }

    #[test]
    fn zero_matrix_inconsistent() {
        let a = Matrix::<Rational>::zeros(2, 2);
        assert!(a.solve(&[q(1), q(0)]).unwrap().is_none());
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let a = Matrix::from_rows(&[vec![q(1), q(1)]]).unwrap();
        assert_eq!(a.kernel(), vec![vec![q(-1), q(1)]]);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn shape_mismatch_reported() {
        let a = Matrix::<Rational>::identity(2);
        assert!(matches!(a.solve(&[q(1)]), Err(Error::ShapeMismatch(_))));
        assert!(a.mul(&Matrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let a = Matrix::from_rows(&[vec![q(2), q(1)], vec![q(1), q(1)]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
        let s = Matrix::from_rows(&[vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert!(s.inverse().is_none());
    }

    #[test]
    fn independent_subset_skips_dependent() {
        let v = vec![vec![q(1), q(0)], vec![q(2), q(0)], vec![q(1), q(1)]];
        assert_eq!(independent_subset(2, &v), vec![0, 2]);
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(entries in proptest::collection::vec(-5i64..5, 12)) {
            let rows: Vec<Vec<Rational>> = entries.chunks(4).map(|c| c.iter().map(|&x| Rational::integer(x as i128)).collect()).collect();
            let a = Matrix::from_rows(&rows).unwrap();
            let ker = a.kernel();
            prop_assert_eq!(ker.len() + a.rank(), 4);
            for v in ker {
                prop_assert!(a.mul_vec(&v).unwrap().iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn solve_finds_preimage(entries in proptest::collection::vec(-4i64..4, 9), x in proptest::collection::vec(-3i64..3, 3)) {
            let rows: Vec<Vec<Fp>> = entries.chunks(3).map(|c| c.iter().map(|&v| Fp::new(v)).collect()).collect();
            let a = Matrix::from_rows(&rows).unwrap();
            let x: Vec<Fp> = x.into_iter().map(Fp::new).collect();
            let b = a.mul_vec(&x).unwrap();
            let sol = a.solve(&b).unwrap().expect("consistent by construction");
            prop_assert_eq!(a.mul_vec(&sol).unwrap(), b);
        }
    }
}
