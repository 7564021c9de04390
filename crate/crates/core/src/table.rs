//! Orbit enumeration: the isomorphism-class table of `E_V(GF(q))` under `G_V(GF(q))`.
//!
//! Orbits are found by breadth-first closure under a generating set of
//! `Π_i GL(V_i)`: the elementary transvections `I + E_ab` and one
//! `diag(ω, 1, …, 1)` per vertex, `ω` primitive. Points are scanned in
//! lexicographic order of their flat encoding, so the first point of each
//! orbit reached is its lexicographically minimal element and serves as
//! the canonical representative. Class ids follow that order.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{HallError, Result};
use crate::field::{Elem, GaloisField};
use crate::matrix::GfMatrix;
use crate::quiver::{DimVector, Quiver};
use crate::rep::{Rep, RepLayout};

/// Default cap on `|E_V(GF(q))|`.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `|GL_n(GF(q))| = Π_{k<n} (q^n − q^k)`.
pub fn gl_order(n: u32, q: u64) -> Option<u128> {
    let q = q as u128;
    let qn = q.checked_pow(n)?;
    (0..n).try_fold(1u128, |acc, k| acc.checked_mul(qn - q.pow(k)))
}

/// `|G_V| = Π_i |GL_{ν_i}(GF(q))|`.
pub fn group_order(dim: &DimVector, q: u64) -> Result<u128> {
    dim.iter()
        .try_fold(1u128, |acc, n| gl_order(n, q).and_then(|g| acc.checked_mul(g)))
        .ok_or_else(|| HallError::Overflow(dim.to_string()))
}

/// `q^{Σ_h ν_{s(h)} ν_{t(h)}}`, or `None` past 128 bits.
pub fn space_size(quiver: &Quiver, dim: &DimVector, q: u64) -> Option<u128> {
    (q as u128).checked_pow(quiver.entry_count(dim) as u32)
}

/// One group generator acting at a single vertex.
#[derive(Clone, Debug)]
pub struct Generator {
    pub vertex: usize,
    pub matrix: GfMatrix,
    pub inverse: GfMatrix,
}

/// Generating set of `Π_i GL_{ν_i}(GF(q))`.
pub fn group_generators(f: &GaloisField, dim: &DimVector) -> Vec<Generator> {
    let mut gens = Vec::new();
    for (vertex, n) in dim.iter().enumerate() {
        let n = n as usize;
        if n == 0 {
            continue;
        }
        let omega = f.primitive_element();
        if omega != 1 {
            let mut d = GfMatrix::identity(n);
            d.set(0, 0, omega);
            let mut di = GfMatrix::identity(n);
            di.set(0, 0, f.inv(omega).expect("primitive element is nonzero"));
            gens.push(Generator {
                vertex,
                matrix: d,
                inverse: di,
            });
        }
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut t = GfMatrix::identity(n);
                t.set(a, b, 1);
                let mut ti = GfMatrix::identity(n);
                ti.set(a, b, f.neg(1));
                gens.push(Generator {
                    vertex,
                    matrix: t,
                    inverse: ti,
                });
            }
        }
    }
    gens
}

/// Applies one generator to a flat point in place of `out`.
fn apply_generator(quiver: &Quiver, f: &GaloisField, layout: &RepLayout, gen: &Generator, flat: &[Elem]) -> Vec<Elem> {
    let rep = layout.rep_from_flat(flat);
    let mut out = Vec::with_capacity(flat.len());
    for (a, m) in quiver.arrows().iter().zip(rep.matrices()) {
        let mut m = m.clone();
        if a.tgt == gen.vertex {
            m = gen.matrix.mul(f, &m);
        }
        if a.src == gen.vertex {
            m = m.mul(f, &gen.inverse);
        }
        out.extend_from_slice(m.data());
    }
    out
}

/// One isomorphism class: canonical representative, orbit size and `|Aut|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoClass {
    pub id: usize,
    pub rep: Rep,
    pub orbit_size: u64,
    pub aut_order: u128,
}

/// All `G_V`-orbits on `E_V(GF(q))` for one dimension vector.
#[derive(Debug)]
pub struct IsoClassTable {
    quiver: Quiver,
    field: GaloisField,
    dim: DimVector,
    layout: RepLayout,
    classes: Vec<IsoClass>,
    index: HashMap<Vec<Elem>, usize>,
    point_class: OnceLock<Vec<u32>>,
}

impl PartialEq for IsoClassTable {
    fn eq(&self, other: &Self) -> bool {
        self.quiver == other.quiver
            && self.field.order() == other.field.order()
            && self.dim == other.dim
            && self.classes == other.classes
    }
}

impl IsoClassTable {
    /// Enumerates every orbit. Fails when `|E_V|` exceeds `budget`.
    pub fn build(quiver: &Quiver, f: &GaloisField, dim: &DimVector, budget: u64) -> Result<Self> {
        if dim.len() != quiver.vertex_count() {
            return Err(HallError::DimensionLength {
                expected: quiver.vertex_count(),
                got: dim.len(),
            });
        }
        let q = f.order() as u64;
        let points = space_size(quiver, dim, q).unwrap_or(u128::MAX);
        if points > budget as u128 {
            return Err(HallError::BudgetExceeded { points, budget });
        }
        let group = group_order(dim, q)?;
        let layout = RepLayout::new(quiver, dim);
        let gens = group_generators(f, dim);
        let total = points as usize;
        let mut point_class = vec![u32::MAX; total];
        let mut classes = Vec::new();
        let mut flat = vec![0 as Elem; layout.len()];
        let mut queue = VecDeque::new();
        for start in 0..total {
            if point_class[start] != u32::MAX {
                continue;
            }
            let id = classes.len();
            point_class[start] = id as u32;
            queue.push_back(start as u64);
            let mut size = 0u64;
            while let Some(p) = queue.pop_front() {
                size += 1;
                layout.flat_of(q as u32, p, &mut flat);
                for g in &gens {
                    let image = apply_generator(quiver, f, &layout, g, &flat);
                    let k = layout.index_of(q as u32, &image) as usize;
                    if point_class[k] == u32::MAX {
                        point_class[k] = id as u32;
                        queue.push_back(k as u64);
                    }
                }
            }
            layout.flat_of(q as u32, start as u64, &mut flat);
            let rep = layout.rep_from_flat(&flat);
            classes.push(IsoClass {
                id,
                rep,
                orbit_size: size,
                aut_order: group / size as u128,
            });
        }
        let table = IsoClassTable::assemble(quiver.clone(), f.clone(), dim.clone(), classes);
        table.point_class.set(point_class).expect("fresh cell");
        Ok(table)
    }

    fn assemble(quiver: Quiver, field: GaloisField, dim: DimVector, classes: Vec<IsoClass>) -> Self {
        let layout = RepLayout::new(&quiver, &dim);
        let index = classes.iter().map(|c| (c.rep.flat(), c.id)).collect();
        IsoClassTable {
            quiver,
            field,
            dim,
            layout,
            classes,
            index,
            point_class: OnceLock::new(),
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn dim(&self) -> &DimVector {
        &self.dim
    }

    pub fn layout(&self) -> &RepLayout {
        &self.layout
    }

    pub fn classes(&self) -> &[IsoClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, id: usize) -> Result<&IsoClass> {
        self.classes.get(id).ok_or_else(|| HallError::UnknownClass {
            dim: self.dim.to_string(),
            id,
        })
    }

    /// Class id of a canonical representative, if `flat` is one.
    pub fn id_of_canonical(&self, flat: &[Elem]) -> Option<usize> {
        self.index.get(flat).copied()
    }

    /// Orbit membership for every point, rebuilt from the representatives on demand.
    fn point_classes(&self) -> &[u32] {
        self.point_class.get_or_init(|| {
            let q = self.q();
            let total = q.pow(self.layout.len() as u32) as usize;
            let gens = group_generators(&self.field, &self.dim);
            let mut point_class = vec![u32::MAX; total];
            let mut queue = VecDeque::new();
            let mut flat = vec![0 as Elem; self.layout.len()];
            for c in &self.classes {
                let start = self.layout.index_of(q, &c.rep.flat());
                point_class[start as usize] = c.id as u32;
                queue.push_back(start);
                while let Some(p) = queue.pop_front() {
                    self.layout.flat_of(q, p, &mut flat);
                    for g in &gens {
                        let image = apply_generator(&self.quiver, &self.field, &self.layout, g, &flat);
                        let k = self.layout.index_of(q, &image) as usize;
                        if point_class[k] == u32::MAX {
                            point_class[k] = c.id as u32;
                            queue.push_back(k as u64);
                        }
                    }
                }
            }
            point_class
        })
    }

    /// Class of a point given by its flat encoding (no shape checks).
    #[inline]
    pub fn classify_flat(&self, flat: &[Elem]) -> usize {
        let k = self.layout.index_of(self.q(), flat) as usize;
        self.point_classes()[k] as usize
    }

    /// Id of the orbit containing `x`.
    pub fn classify(&self, x: &Rep) -> Result<usize> {
        if x.dim() != &self.dim {
            return Err(HallError::DimensionMismatch(format!(
                "representation of dimension {} classified in table for {}",
                x.dim(),
                self.dim
            )));
        }
        let flat = x.flat();
        if flat.iter().any(|&e| e as u32 >= self.q()) {
            return Err(HallError::FieldMismatch(self.q() as u64, 0));
        }
        Ok(self.classify_flat(&flat))
    }

    /// All points of an orbit, as flat encodings in lexicographic order.
    pub fn orbit_points(&self, id: usize) -> Vec<Vec<Elem>> {
        let q = self.q();
        self.point_classes()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c as usize == id)
            .map(|(k, _)| {
                let mut flat = vec![0; self.layout.len()];
                self.layout.flat_of(q, k as u64, &mut flat);
                flat
            })
            .collect()
    }

    /// A second point of the orbit of `id`: the representative moved by every
    /// generator in turn.
    pub fn orbit_sample(&self, id: usize) -> Result<Rep> {
        let mut flat = self.class(id)?.rep.flat();
        for g in group_generators(&self.field, &self.dim) {
            flat = apply_generator(&self.quiver, &self.field, &self.layout, &g, &flat);
        }
        Ok(self.layout.rep_from_flat(&flat))
    }

    /// Orbit-sum and orbit-stabilizer checks.
    pub fn validate(&self) -> Result<()> {
        let q = self.q() as u64;
        let points = space_size(&self.quiver, &self.dim, q)
            .ok_or_else(|| HallError::InvalidTable("space size overflows".into()))?;
        let sum: u128 = self.classes.iter().map(|c| c.orbit_size as u128).sum();
        if sum != points {
            return Err(HallError::InvalidTable(format!("orbit sizes sum to {sum}, expected {points}")));
        }
        let group = group_order(&self.dim, q)?;
        for (k, c) in self.classes.iter().enumerate() {
            if c.id != k {
                return Err(HallError::InvalidTable(format!("class {k} carries id {}", c.id)));
            }
            if c.aut_order.checked_mul(c.orbit_size as u128) != Some(group) {
                return Err(HallError::InvalidTable(format!(
                    "class {k}: |Aut| {} · orbit {} ≠ |G| {group}",
                    c.aut_order, c.orbit_size
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = TableJson {
            format: 1,
            quiver: self.quiver.clone(),
            q: self.q(),
            dim: self.dim.as_slice().to_vec(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    id: c.id,
                    rep: c.rep.matrices().iter().map(|m| m.data().to_vec()).collect(),
                    orbit: c.orbit_size,
                    aut: c.aut_order,
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("table serialises")
    }

    /// Parses a table and checks its invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TableJson = serde_json::from_str(text)?;
        if doc.format != 1 {
            return Err(HallError::InvalidTable(format!("unsupported format {}", doc.format)));
        }
        let field = GaloisField::new(doc.q as u64)?;
        let dim = DimVector::new(doc.dim);
        if dim.len() != doc.quiver.vertex_count() {
            return Err(HallError::InvalidTable("dimension vector length".into()));
        }
        let layout = RepLayout::new(&doc.quiver, &dim);
        let mut classes = Vec::with_capacity(doc.classes.len());
        for c in doc.classes {
            let flat: Vec<Elem> = c.rep.into_iter().flatten().collect();
            if flat.len() != layout.len() || flat.iter().any(|&e| e as u32 >= doc.q) {
                return Err(HallError::InvalidTable(format!("class {} has a malformed representative", c.id)));
            }
            let rep = layout.rep_from_flat(&flat);
            let rep = Rep::new(&doc.quiver, dim.clone(), rep.matrices().to_vec())
                .map_err(|e| HallError::InvalidTable(e.to_string()))?;
            classes.push(IsoClass {
                id: c.id,
                rep,
                orbit_size: c.orbit,
                aut_order: c.aut,
            });
        }
        let table = IsoClassTable::assemble(doc.quiver, field, dim, classes);
        table.validate()?;
        Ok(table)
    }
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    id: usize,
    rep: Vec<Vec<Elem>>,
    orbit: u64,
    aut: u128,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    format: u32,
    quiver: Quiver,
    q: u32,
    dim: Vec<u32>,
    classes: Vec<ClassJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(name: &str, q: u64, dim: &[u32]) -> IsoClassTable {
        let quiver = Quiver::preset(name).unwrap();
        let f = GaloisField::new(q).unwrap();
        IsoClassTable::build(&quiver, &f, &DimVector::new(dim.to_vec()), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn group_order_examples() {
        let dv = |v: &[u32]| DimVector::new(v.to_vec());
        assert_eq!(group_order(&dv(&[1, 1]), 2).unwrap(), 1);
        assert_eq!(group_order(&dv(&[2]), 2).unwrap(), 6);
        assert_eq!(group_order(&dv(&[1]), 3).unwrap(), 2);
        assert_eq!(group_order(&dv(&[3]), 3).unwrap(), 11232);
        assert!(group_order(&dv(&[40]), 65536).is_err());
    }

    #[test]
    fn a2_tables() {
        let t = table("a2", 2, &[1, 1]);
        let got: Vec<_> = t.classes().iter().map(|c| (c.rep.flat(), c.orbit_size, c.aut_order)).collect();
        assert_eq!(got, vec![(vec![0], 1, 1), (vec![1], 1, 1)]);
        let t = table("a2", 3, &[1, 1]);
        let got: Vec<_> = t.classes().iter().map(|c| (c.rep.flat(), c.orbit_size, c.aut_order)).collect();
        assert_eq!(got, vec![(vec![0], 1, 4), (vec![1], 2, 2)]);
    }

    #[test]
    fn kronecker_and_jordan_tables() {
        let t = table("kronecker", 2, &[1, 1]);
        assert_eq!(t.len(), 4);
        assert!(t.classes().iter().all(|c| c.orbit_size == 1));
        let t = table("jordan", 2, &[1]);
        assert_eq!(t.len(), 2);
        // conjugacy classes of GL-action on 2×2 matrices over GF(2): q² + q = 6
        assert_eq!(table("jordan", 2, &[2]).len(), 6);
        assert_eq!(table("jordan", 3, &[2]).len(), 12);
    }

    #[test]
    fn invariants_hold_on_sweep() {
        for (name, q, dims) in [
            ("a2", 2, vec![vec![2, 1], vec![1, 2], vec![2, 2]]),
            ("kronecker", 2, vec![vec![2, 2], vec![1, 2]]),
            ("jordan", 3, vec![vec![3]]),
            ("a3", 3, vec![vec![1, 1, 1]]),
        ] {
            for d in dims {
                let t = table(name, q, &d);
                t.validate().unwrap();
                for c in t.classes() {
                    assert_eq!(t.classify(&c.rep).unwrap(), c.id);
                    // canonical = lexicographically smallest point of its orbit
                    assert_eq!(t.orbit_points(c.id)[0], c.rep.flat());
                }
            }
        }
    }

    #[test]
    fn classify_is_orbit_invariant() {
        let t = table("kronecker", 3, &[2, 1]);
        let gens = group_generators(t.field(), t.dim());
        for c in t.classes() {
            for g in &gens {
                let image = apply_generator(t.quiver(), t.field(), t.layout(), g, &c.rep.flat());
                assert_eq!(t.classify_flat(&image), c.id);
            }
        }
        let wrong = Rep::zero(t.quiver(), DimVector::new(vec![1, 1]));
        assert!(t.classify(&wrong).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let quiver = Quiver::preset("kronecker").unwrap();
        let f = GaloisField::new(2).unwrap();
        let err = IsoClassTable::build(&quiver, &f, &DimVector::new(vec![2, 2]), 100).unwrap_err();
        assert!(matches!(err, HallError::BudgetExceeded { points: 256, budget: 100 }));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let t = table("kronecker", 3, &[1, 1]);
        let text = t.to_json();
        let back = IsoClassTable::from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), text);
        for c in t.classes() {
            assert_eq!(back.classify(&c.rep).unwrap(), c.id);
        }
        assert!(text.starts_with(r#"{"format":1,"quiver":{"vertices":["1","2"]"#));
    }

    #[test]
    fn tampered_json_is_rejected() {
        let t = table("a2", 3, &[1, 1]);
        let text = t.to_json().replace(r#""orbit":2"#, r#""orbit":3"#);
        assert!(matches!(IsoClassTable::from_json(&text), Err(HallError::InvalidTable(_))));
    }
}
