//! Dense matrices over a [`GaloisField`] and Gaussian elimination.

use crate::field::{Elem, GaloisField};

/// Row-major dense matrix with entries in `0..q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl GfMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GfMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = GfMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        GfMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data: Vec<Elem> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        GfMatrix::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, f: &GaloisField, rhs: &GfMatrix) -> GfMatrix {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes");
        let mut out = GfMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = f.add(out.get(i, j), f.mul(a, rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, f: &GaloisField, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self, f: &GaloisField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in 0..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self, f: &GaloisField) -> (GfMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(f);
        (m, pivots)
    }

    pub fn rank(&self, f: &GaloisField) -> usize {
        self.clone().rref_in_place(f).len()
    }

    /// `cols − rank`.
    pub fn nullspace_dim(&self, f: &GaloisField) -> usize {
        self.cols - self.rank(f)
    }

    pub fn transpose(&self) -> GfMatrix {
        let mut t = GfMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}
