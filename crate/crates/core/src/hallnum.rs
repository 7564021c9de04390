//! Counting stable graded subspaces and extension fibres by direct enumeration.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::field::{Elem, GaloisField};
use crate::quiver::{DimVector, Quiver};
use crate::rep::Rep;
use crate::subspace::{enumerate_graded_subspaces, GradedSubspace};
use crate::table::IsoClassTable;

/// Restriction `x|_W` and quotient `x̄^W` of `x` along a graded subspace, as flat
/// encodings, or `None` if `W` is not `x`-stable.
///
/// The sub representation is written in the echelon basis of `W`, the quotient
/// in the basis given by the non-pivot unit vectors.
pub fn sub_and_quotient(quiver: &Quiver, f: &GaloisField, x: &Rep, w: &GradedSubspace) -> Option<(Vec<Elem>, Vec<Elem>)> {
    let mut sub = Vec::new();
    let mut quot = Vec::new();
    for (h, a) in quiver.arrows().iter().enumerate() {
        let m = x.matrix(h);
        let (ws, wt) = (w.basis(a.src), w.basis(a.tgt));
        // columns of the restricted map, one per basis vector of W_s
        let mut cols = Vec::with_capacity(ws.rows());
        for r in 0..ws.rows() {
            let image = m.apply(f, ws.row(r));
            cols.push(w.coordinates(f, a.tgt, &image)?);
        }
        for i in 0..wt.rows() {
            for col in &cols {
                sub.push(col[i]);
            }
        }
        let comp_s = w.complement_columns(a.src);
        let comp_t = w.complement_columns(a.tgt);
        let reduced: Vec<Vec<Elem>> = comp_s
            .iter()
            .map(|&j| {
                let column: Vec<Elem> = (0..m.rows()).map(|i| m.get(i, j)).collect();
                w.reduce(f, a.tgt, &column)
            })
            .collect();
        for &k in &comp_t {
            for red in &reduced {
                quot.push(red[k]);
            }
        }
    }
    Some((sub, quot))
}

/// For one point `x`: the number of `x`-stable graded subspaces `W` with
/// `dim W = sub_dim`, bucketed by (class of `x̄^W`, class of `x|_W`).
pub fn split_counts(
    quiver: &Quiver,
    f: &GaloisField,
    x: &Rep,
    sub_dim: &DimVector,
    quot_table: &IsoClassTable,
    sub_table: &IsoClassTable,
) -> Result<BTreeMap<(usize, usize), u64>> {
    let mut counts = BTreeMap::new();
    for w in enumerate_graded_subspaces(f, x.dim(), sub_dim)? {
        if let Some((sub, quot)) = sub_and_quotient(quiver, f, x, &w) {
            let key = (quot_table.classify_flat(&quot), sub_table.classify_flat(&sub));
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Block lower-triangular assembly `[[x′, 0], [y, x″]]` with the quotient
/// coordinates first; `y` supplies the lower-left block of every arrow.
pub fn assemble_extension(quiver: &Quiver, quot: &Rep, sub: &Rep, y: &[Elem]) -> Vec<Elem> {
    let (d1, d2) = (quot.dim(), sub.dim());
    let mut out = Vec::new();
    let mut offset = 0;
    for (h, a) in quiver.arrows().iter().enumerate() {
        let (x1, x2) = (quot.matrix(h), sub.matrix(h));
        let (s1, t1) = (d1[a.src] as usize, d1[a.tgt] as usize);
        let (s2, t2) = (d2[a.src] as usize, d2[a.tgt] as usize);
        for i in 0..t1 + t2 {
            for j in 0..s1 + s2 {
                let v = match (i < t1, j < s1) {
                    (true, true) => x1.get(i, j),
                    (true, false) => 0,
                    (false, true) => y[offset + (i - t1) * s1 + j],
                    (false, false) => x2.get(i - t1, j - s1),
                };
                out.push(v);
            }
        }
        offset += t2 * s1;
    }
    out
}

/// For fixed `(x′, x″)`: how many `y ∈ ⊕_h Hom(V′_{s(h)}, V″_{t(h)})` give an
/// assembled point in each class of `table` (dimension `dim x′ + dim x″`).
pub fn extension_counts(quiver: &Quiver, f: &GaloisField, quot: &Rep, sub: &Rep, table: &IsoClassTable) -> BTreeMap<usize, u64> {
    let fibre = quiver.arrow_pairing(quot.dim(), sub.dim()) as usize;
    let q = f.order() as u64;
    let total = q.pow(fibre as u32);
    let mut y = vec![0 as Elem; fibre];
    let mut counts = BTreeMap::new();
    for k in 0..total {
        let mut rest = k;
        for slot in y.iter_mut().rev() {
            *slot = (rest % q) as Elem;
            rest /= q;
        }
        let flat = assemble_extension(quiver, quot, sub, &y);
        *counts.entry(table.classify_flat(&flat)).or_insert(0) += 1;
    }
    counts
}
