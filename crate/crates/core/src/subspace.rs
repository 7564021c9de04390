//! Enumeration of `I`-graded subspaces by their reduced-row-echelon bases.

use crate::error::{HallError, Result};
use crate::field::{Elem, GaloisField};
use crate::matrix::GfMatrix;
use crate::quiver::DimVector;

/// An `I`-graded subspace: at every vertex a full-rank RREF basis (rows).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSubspace {
    bases: Vec<GfMatrix>,
    pivots: Vec<Vec<usize>>,
}

impl GradedSubspace {
    /// Wraps per-vertex RREF bases. The caller guarantees canonical form.
    pub fn from_rref(bases: Vec<GfMatrix>) -> Self {
        let pivots = bases
            .iter()
            .map(|b| {
                (0..b.rows())
                    .map(|r| (0..b.cols()).find(|&c| b.get(r, c) != 0).expect("full row rank"))
                    .collect()
            })
            .collect();
        GradedSubspace { bases, pivots }
    }

    /// The span of arbitrary generators, brought to canonical form.
    pub fn span(f: &GaloisField, generators: Vec<GfMatrix>) -> Self {
        let bases = generators
            .into_iter()
            .map(|g| {
                let (r, piv) = g.rref(f);
                let mut rows = Vec::new();
                for i in 0..piv.len() {
                    rows.push(r.row(i).to_vec());
                }
                if rows.is_empty() {
                    GfMatrix::zeros(0, g.cols())
                } else {
                    GfMatrix::from_rows(&rows)
                }
            })
            .collect();
        GradedSubspace::from_rref(bases)
    }

    pub fn basis(&self, vertex: usize) -> &GfMatrix {
        &self.bases[vertex]
    }

    pub fn pivots(&self, vertex: usize) -> &[usize] {
        &self.pivots[vertex]
    }

    pub fn dim(&self) -> DimVector {
        DimVector::new(self.bases.iter().map(|b| b.rows() as u32).collect())
    }

    /// `v − Σ_r v[pivot_r]·basis_r`; zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, f: &GaloisField, vertex: usize, v: &[Elem]) -> Vec<Elem> {
        let mut out = v.to_vec();
        let basis = &self.bases[vertex];
        for (r, &p) in self.pivots[vertex].iter().enumerate() {
            let c = v[p];
            if c == 0 {
                continue;
            }
            for (j, x) in out.iter_mut().enumerate() {
                *x = f.sub(*x, f.mul(c, basis.get(r, j)));
            }
        }
        out
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is outside.
    pub fn coordinates(&self, f: &GaloisField, vertex: usize, v: &[Elem]) -> Option<Vec<Elem>> {
        if self.reduce(f, vertex, v).iter().any(|&x| x != 0) {
            return None;
        }
        Some(self.pivots[vertex].iter().map(|&p| v[p]).collect())
    }

    /// Indices of the unit vectors spanning the chosen complement (non-pivot columns).
    pub fn complement_columns(&self, vertex: usize) -> Vec<usize> {
        let n = self.bases[vertex].cols();
        (0..n).filter(|c| !self.pivots[vertex].contains(c)).collect()
    }
}

/// All `k`-dimensional subspaces of `GF(q)^n` as RREF `k × n` matrices.
pub fn rref_subspaces(f: &GaloisField, n: usize, k: usize) -> Vec<GfMatrix> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    for pivots in combinations(n, k) {
        // free slots: row r, column c > pivot_r with c not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| ((p + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let q = f.order() as usize;
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut m = GfMatrix::zeros(k, n);
            for (r, &p) in pivots.iter().enumerate() {
                m.set(r, p, 1);
            }
            for (&(r, c), &d) in free.iter().zip(&digits) {
                m.set(r, c, d as Elem);
            }
            out.push(m);
            let mut i = digits.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
            }
            if i == 0 && digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    out
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Iterator over all graded subspaces of given per-vertex dimensions.
pub struct GradedSubspaces {
    choices: Vec<Vec<GfMatrix>>,
    index: Vec<usize>,
    done: bool,
}

impl Iterator for GradedSubspaces {
    type Item = GradedSubspace;

    fn next(&mut self) -> Option<GradedSubspace> {
        if self.done {
            return None;
        }
        let item = GradedSubspace::from_rref(
            self.choices
                .iter()
                .zip(&self.index)
                .map(|(c, &i)| c[i].clone())
                .collect(),
        );
        let mut k = self.index.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.index[k] += 1;
            if self.index[k] < self.choices[k].len() {
                break;
            }
            self.index[k] = 0;
        }
        Some(item)
    }
}

/// Every `I`-graded subspace of `⊕_i GF(q)^{dims_i}` of dimension vector `subdims`,
/// one canonical representative each.
pub fn enumerate_graded_subspaces(
    f: &GaloisField,
    dims: &DimVector,
    subdims: &DimVector,
) -> Result<GradedSubspaces> {
    if !subdims.le(dims) {
        return Err(HallError::DimensionMismatch(format!(
            "subspace dimension {subdims} exceeds {dims}"
        )));
    }
    let choices: Vec<Vec<GfMatrix>> = dims
        .iter()
        .zip(subdims.iter())
        .map(|(n, k)| rref_subspaces(f, n as usize, k as usize))
        .collect();
    Ok(GradedSubspaces {
        index: vec![0; choices.len()],
        done: choices.iter().any(|c| c.is_empty()),
        choices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Π_{j<k} (q^{n−j} − 1)/(q^{j+1} − 1)`, independent of the enumeration.
    fn q_binomial(n: u32, k: u32, q: u128) -> u128 {
        let mut num = 1u128;
        let mut den = 1u128;
        for j in 0..k {
            num *= q.pow(n - j) - 1;
            den *= q.pow(j + 1) - 1;
        }
        num / den
    }

    #[test]
    fn grassmannian_examples() {
        let f2 = GaloisField::new(2).unwrap();
        let f3 = GaloisField::new(3).unwrap();
        let dv = |v: &[u32]| DimVector::new(v.to_vec());
        assert_eq!(enumerate_graded_subspaces(&f2, &dv(&[2]), &dv(&[1])).unwrap().count(), 3);
        assert_eq!(enumerate_graded_subspaces(&f3, &dv(&[2]), &dv(&[1])).unwrap().count(), 4);
        let whole: Vec<_> = enumerate_graded_subspaces(&f3, &dv(&[2, 1]), &dv(&[2, 1])).unwrap().collect();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].basis(0), &GfMatrix::identity(2));
        assert!(enumerate_graded_subspaces(&f3, &dv(&[1]), &dv(&[2])).is_err());
        assert_eq!(enumerate_graded_subspaces(&f3, &dv(&[0, 0]), &dv(&[0, 0])).unwrap().count(), 1);
    }

    #[test]
    fn grassmannian_counts_are_q_binomials() {
        for q in [2u64, 3, 4] {
            let f = GaloisField::new(q).unwrap();
            for n in 0..=4u32 {
                for k in 0..=n {
                    let subs = rref_subspaces(&f, n as usize, k as usize);
                    assert_eq!(subs.len() as u128, q_binomial(n, k, q as u128), "q={q} n={n} k={k}");
                    // distinct and canonical
                    let mut seen = std::collections::HashSet::new();
                    for s in &subs {
                        assert_eq!(&s.rref(&f).0, s);
                        assert!(seen.insert(s.clone()));
                    }
                }
            }
        }
    }

    #[test]
    fn graded_count_is_product() {
        let f = GaloisField::new(2).unwrap();
        let dims = DimVector::new(vec![3, 2]);
        let sub = DimVector::new(vec![1, 1]);
        assert_eq!(enumerate_graded_subspaces(&f, &dims, &sub).unwrap().count() as u128, 7 * 3);
    }

    #[test]
    fn coordinates_and_reduction() {
        let f = GaloisField::new(3).unwrap();
        let w = GradedSubspace::span(&f, vec![GfMatrix::from_rows(&[vec![2, 1, 0]])]);
        assert_eq!(w.basis(0), &GfMatrix::from_rows(&[vec![1, 2, 0]]));
        assert_eq!(w.coordinates(&f, 0, &[2, 1, 0]), Some(vec![2]));
        assert_eq!(w.coordinates(&f, 0, &[0, 1, 0]), None);
        assert_eq!(w.complement_columns(0), vec![1, 2]);
        assert_eq!(w.reduce(&f, 0, &[1, 0, 1]), vec![0, 1, 1]);
    }
}
