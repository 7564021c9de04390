//! Representations as points of `E_V`, their flat encoding, and Hom/Ext¹.

use crate::error::{HallError, Result};
use crate::field::{Elem, GaloisField};
use crate::matrix::GfMatrix;
use crate::quiver::{DimVector, Quiver};

/// A representation: one `dim[t(h)] × dim[s(h)]` matrix per arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rep {
    dim: DimVector,
    matrices: Vec<GfMatrix>,
}

impl Rep {
    pub fn new(quiver: &Quiver, dim: DimVector, matrices: Vec<GfMatrix>) -> Result<Self> {
        if dim.len() != quiver.vertex_count() {
            return Err(HallError::DimensionLength {
                expected: quiver.vertex_count(),
                got: dim.len(),
            });
        }
        if matrices.len() != quiver.arrows().len() {
            return Err(HallError::DimensionMismatch(format!(
                "{} matrices for {} arrows",
                matrices.len(),
                quiver.arrows().len()
            )));
        }
        for (a, m) in quiver.arrows().iter().zip(&matrices) {
            if m.rows() != dim[a.tgt] as usize || m.cols() != dim[a.src] as usize {
                return Err(HallError::DimensionMismatch(format!(
                    "arrow matrix is {}×{}, expected {}×{}",
                    m.rows(),
                    m.cols(),
                    dim[a.tgt],
                    dim[a.src]
                )));
            }
        }
        Ok(Rep { dim, matrices })
    }

    pub fn zero(quiver: &Quiver, dim: DimVector) -> Self {
        let matrices = quiver
            .arrows()
            .iter()
            .map(|a| GfMatrix::zeros(dim[a.tgt] as usize, dim[a.src] as usize))
            .collect();
        Rep { dim, matrices }
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    pub fn matrices(&self) -> &[GfMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, arrow: usize) -> &GfMatrix {
        &self.matrices[arrow]
    }

    /// Concatenated row-major entries in arrow order; the canonical key.
    pub fn flat(&self) -> Vec<Elem> {
        self.matrices.iter().flat_map(|m| m.data().iter().copied()).collect()
    }

    /// Acts by `g ∈ Π_i GL(V_i)`: `x_h ↦ g_{t(h)} x_h g_{s(h)}^{-1}`.
    pub fn act(&self, quiver: &Quiver, f: &GaloisField, g: &[GfMatrix], g_inv: &[GfMatrix]) -> Rep {
        let matrices = quiver
            .arrows()
            .iter()
            .zip(&self.matrices)
            .map(|(a, m)| g[a.tgt].mul(f, m).mul(f, &g_inv[a.src]))
            .collect();
        Rep {
            dim: self.dim.clone(),
            matrices,
        }
    }

    /// Direct sum, with `self` on the first block of coordinates.
    pub fn direct_sum(&self, quiver: &Quiver, other: &Rep) -> Rep {
        let dim = self.dim.checked_add(&other.dim).expect("same vertex count");
        let matrices = quiver
            .arrows()
            .iter()
            .zip(self.matrices.iter().zip(&other.matrices))
            .map(|(a, (x, y))| {
                let mut m = GfMatrix::zeros(dim[a.tgt] as usize, dim[a.src] as usize);
                for i in 0..x.rows() {
                    for j in 0..x.cols() {
                        m.set(i, j, x.get(i, j));
                    }
                }
                for i in 0..y.rows() {
                    for j in 0..y.cols() {
                        m.set(x.rows() + i, x.cols() + j, y.get(i, j));
                    }
                }
                m
            })
            .collect();
        Rep { dim, matrices }
    }
}

/// Shape bookkeeping for the flat encoding of `E_V` at one dimension vector.
#[derive(Clone, Debug)]
pub struct RepLayout {
    dim: DimVector,
    shapes: Vec<(usize, usize)>,
    len: usize,
}

impl RepLayout {
    pub fn new(quiver: &Quiver, dim: &DimVector) -> Self {
        let shapes: Vec<(usize, usize)> = quiver
            .arrows()
            .iter()
            .map(|a| (dim[a.tgt] as usize, dim[a.src] as usize))
            .collect();
        let len = shapes.iter().map(|(r, c)| r * c).sum();
        RepLayout {
            dim: dim.clone(),
            shapes,
            len,
        }
    }

    /// Number of field entries in a point.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn rep_from_flat(&self, flat: &[Elem]) -> Rep {
        let mut offset = 0;
        let matrices = self
            .shapes
            .iter()
            .map(|&(r, c)| {
                let m = GfMatrix::from_vec(r, c, flat[offset..offset + r * c].to_vec());
                offset += r * c;
                m
            })
            .collect();
        Rep {
            dim: self.dim.clone(),
            matrices,
        }
    }

    /// Big-endian base-`q` index, so integer order equals lexicographic order.
    pub fn index_of(&self, q: u32, flat: &[Elem]) -> u64 {
        flat.iter().fold(0u64, |acc, &d| acc * q as u64 + d as u64)
    }

    pub fn flat_of(&self, q: u32, mut index: u64, out: &mut [Elem]) {
        for slot in out.iter_mut().rev() {
            *slot = (index % q as u64) as Elem;
            index /= q as u64;
        }
    }
}

fn check_pair(quiver: &Quiver, m: &Rep, n: &Rep) -> Result<()> {
    for r in [m, n] {
        if r.dim.len() != quiver.vertex_count() || r.matrices.len() != quiver.arrows().len() {
            return Err(HallError::DimensionMismatch("representation does not match quiver".into()));
        }
    }
    Ok(())
}

/// `dim Hom(M, N)`: solutions `(f_i)` of `f_{t(h)} x_h = y_h f_{s(h)}` for all arrows.
///
/// Unknowns are ordered vertex by vertex, each `f_i` row-major; equations arrow by arrow.
pub fn hom_dim(quiver: &Quiver, f: &GaloisField, m: &Rep, n: &Rep) -> Result<usize> {
    check_pair(quiver, m, n)?;
    let (md, nd) = (&m.dim, &n.dim);
    let mut offsets = Vec::with_capacity(md.len());
    let mut unknowns = 0;
    for i in 0..md.len() {
        offsets.push(unknowns);
        unknowns += md[i] as usize * nd[i] as usize;
    }
    let rows: usize = quiver
        .arrows()
        .iter()
        .map(|a| nd[a.tgt] as usize * md[a.src] as usize)
        .sum();
    let mut sys = GfMatrix::zeros(rows, unknowns);
    let mut row = 0;
    for (h, a) in quiver.arrows().iter().enumerate() {
        let (x, y) = (&m.matrices[h], &n.matrices[h]);
        let (s, t) = (a.src, a.tgt);
        let (ms, mt, ns) = (md[s] as usize, md[t] as usize, nd[s] as usize);
        for i in 0..nd[t] as usize {
            for j in 0..ms {
                // (f_t x)[i][j] = Σ_c f_t[i][c] x[c][j]
                for c in 0..mt {
                    let col = offsets[t] + i * mt + c;
                    let v = f.add(sys.get(row, col), x.get(c, j));
                    sys.set(row, col, v);
                }
                // − (y f_s)[i][j] = − Σ_c y[i][c] f_s[c][j]
                for c in 0..ns {
                    let col = offsets[s] + c * ms + j;
                    let v = f.sub(sys.get(row, col), y.get(i, c));
                    sys.set(row, col, v);
                }
                row += 1;
            }
        }
    }
    Ok(sys.nullspace_dim(f))
}

/// The same Hom dimension from an independently assembled system: unknowns are
/// `f_i` column-major in reverse vertex order, equations grouped by target vertex.
pub fn hom_dim_vertex_major(quiver: &Quiver, f: &GaloisField, m: &Rep, n: &Rep) -> Result<usize> {
    check_pair(quiver, m, n)?;
    let (md, nd) = (&m.dim, &n.dim);
    let nv = md.len();
    let mut offsets = vec![0; nv];
    let mut unknowns = 0;
    for i in (0..nv).rev() {
        offsets[i] = unknowns;
        unknowns += md[i] as usize * nd[i] as usize;
    }
    // unknown f_i[r][c] lives at offsets[i] + c * n_i + r
    let var = |i: usize, r: usize, c: usize| offsets[i] + c * nd[i] as usize + r;
    let mut equations: Vec<Vec<Elem>> = Vec::new();
    for target in 0..nv {
        for (h, a) in quiver.arrows().iter().enumerate().filter(|(_, a)| a.tgt == target) {
            let (x, y) = (&m.matrices[h], &n.matrices[h]);
            for j in 0..md[a.src] as usize {
                for i in 0..nd[a.tgt] as usize {
                    let mut eq = vec![0 as Elem; unknowns];
                    for c in 0..md[a.tgt] as usize {
                        let k = var(a.tgt, i, c);
                        eq[k] = f.add(eq[k], x.get(c, j));
                    }
                    for c in 0..nd[a.src] as usize {
                        let k = var(a.src, c, j);
                        eq[k] = f.sub(eq[k], y.get(i, c));
                    }
                    equations.push(eq);
                }
            }
        }
    }
    if equations.is_empty() {
        return Ok(unknowns);
    }
    Ok(GfMatrix::from_rows(&equations).nullspace_dim(f))
}

/// `dim Ext¹(M, N) = dim Hom(M, N) − ⟨dim M, dim N⟩` for the hereditary path algebra.
pub fn ext1_dim(quiver: &Quiver, f: &GaloisField, m: &Rep, n: &Rep) -> Result<usize> {
    let hom = hom_dim(quiver, f, m, n)? as i64;
    let euler = quiver.euler_form(&m.dim, &n.dim)?;
    let ext = hom - euler;
    assert!(ext >= 0, "negative Ext dimension {ext}: Hom/Euler inconsistency");
    Ok(ext as usize)
}
