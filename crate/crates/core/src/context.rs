//! Shared, memoized state for one (quiver, q): iso-class tables per dimension
//! vector and the derived counting tables that every algebra operation reads.
//!
//! Each memo key has its own cell; concurrent requests for the same key wait
//! for a single build, and reads after the build only take the short map lock.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cache::{cache_load, cache_store, CacheKey};
use crate::error::{HallError, Result};
use crate::field::GaloisField;
use crate::hallnum::{extension_counts, split_counts};
use crate::quiver::{DimVector, Quiver};
use crate::rep::hom_dim;
use crate::table::{IsoClassTable, DEFAULT_BUDGET};

/// An isomorphism class, addressed by dimension vector and table id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassKey {
    pub dim: DimVector,
    pub id: usize,
}

impl ClassKey {
    pub fn new(dim: DimVector, id: usize) -> Self {
        ClassKey { dim, id }
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dim, self.id)
    }
}

impl FromStr for ClassKey {
    type Err = HallError;
    fn from_str(s: &str) -> Result<Self> {
        let (dim, id) = s
            .rsplit_once(':')
            .ok_or_else(|| HallError::InvalidArgument(format!("class key `{s}` is not of the form DIM:ID")))?;
        let id = id
            .trim()
            .parse()
            .map_err(|_| HallError::InvalidArgument(format!("bad class id in `{s}`")))?;
        Ok(ClassKey { dim: dim.parse()?, id })
    }
}

/// `(quotient class, sub class) → number of stable subspaces` for one point.
pub type Splitting = BTreeMap<(usize, usize), u64>;
/// `(a, b) → [(c, g^c_{ab})]` for fixed dimensions of `a` and `b`.
pub type ProductTable = BTreeMap<(usize, usize), Vec<(usize, u64)>>;
/// `(x′, x″) → [(c, #{y : [[x′,0],[y,x″]] ∈ c})]`.
pub type ExtensionTable = BTreeMap<(usize, usize), Vec<(usize, u64)>>;

/// Build lock plus the value once built.
type Cell<V> = Arc<(Mutex<()>, OnceLock<V>)>;

struct Memo<K, V> {
    cells: Mutex<HashMap<K, Cell<V>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    fn new() -> Self {
        Memo {
            cells: Mutex::new(HashMap::new()),
        }
    }

    fn get_or_try(&self, key: &K, build: impl FnOnce() -> Result<V>) -> Result<V> {
        let cell = {
            let mut cells = self.cells.lock().expect("memo lock poisoned");
            cells.entry(key.clone()).or_default().clone()
        };
        if let Some(v) = cell.1.get() {
            return Ok(v.clone());
        }
        let _guard = cell.0.lock().expect("memo build lock poisoned");
        if let Some(v) = cell.1.get() {
            return Ok(v.clone());
        }
        let v = build()?;
        let _ = cell.1.set(v.clone());
        Ok(v)
    }

    fn len(&self) -> usize {
        self.built().len()
    }

    fn built(&self) -> Vec<V> {
        let cells = self.cells.lock().expect("memo lock poisoned");
        cells.values().filter_map(|c| c.1.get().cloned()).collect()
    }
}

/// Memoized tables for one quiver over one field.
pub struct HallContext {
    quiver: Quiver,
    field: GaloisField,
    budget: u64,
    cache_dir: Option<PathBuf>,
    tables: Memo<DimVector, Arc<IsoClassTable>>,
    splits: Memo<(DimVector, usize, DimVector), Arc<Splitting>>,
    products: Memo<(DimVector, DimVector), Arc<ProductTable>>,
    extensions: Memo<(DimVector, DimVector), Arc<ExtensionTable>>,
    homs: Memo<(ClassKey, ClassKey), usize>,
}

impl fmt::Debug for HallContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HallContext")
            .field("quiver", &self.quiver)
            .field("q", &self.field.order())
            .field("budget", &self.budget)
            .field("tables", &self.tables.len())
            .finish()
    }
}

impl HallContext {
    pub fn new(quiver: Quiver, q: u64) -> Result<Self> {
        Ok(HallContext {
            quiver,
            field: GaloisField::new(q)?,
            budget: DEFAULT_BUDGET,
            cache_dir: None,
            tables: Memo::new(),
            splits: Memo::new(),
            products: Memo::new(),
            extensions: Memo::new(),
            homs: Memo::new(),
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Persist and reuse iso-class tables under `dir`.
    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.cache_dir = dir;
        self
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Number of iso-class tables built or loaded so far.
    pub fn tables_built(&self) -> usize {
        self.tables.len()
    }

    /// Every table built or loaded so far, ordered by dimension vector.
    pub fn built_tables(&self) -> Vec<Arc<IsoClassTable>> {
        let mut tables = self.tables.built();
        tables.sort_by(|a, b| a.dim().cmp(b.dim()));
        tables
    }

    fn check_dim(&self, dim: &DimVector) -> Result<()> {
        if dim.len() != self.quiver.vertex_count() {
            return Err(HallError::DimensionLength {
                expected: self.quiver.vertex_count(),
                got: dim.len(),
            });
        }
        Ok(())
    }

    pub fn table(&self, dim: &DimVector) -> Result<Arc<IsoClassTable>> {
        self.check_dim(dim)?;
        self.tables.get_or_try(dim, || {
            let key = CacheKey::new(&self.quiver, self.q(), dim);
            if let Some(dir) = &self.cache_dir {
                if let Some(t) = cache_load(dir, &key) {
                    return Ok(Arc::new(t));
                }
            }
            let t = IsoClassTable::build(&self.quiver, &self.field, dim, self.budget)?;
            if let Some(dir) = &self.cache_dir {
                if let Err(e) = cache_store(dir, &key, &t) {
                    log::warn!("could not write cache entry {}: {e}", key.file_name());
                }
            }
            Ok(Arc::new(t))
        })
    }

    /// Every class of dimension `dim`, in id order.
    pub fn classes(&self, dim: &DimVector) -> Result<Vec<ClassKey>> {
        let t = self.table(dim)?;
        Ok((0..t.len()).map(|id| ClassKey::new(dim.clone(), id)).collect())
    }

    /// Every class of total dimension at most `bound`, grade by grade.
    pub fn classes_up_to(&self, bound: u32) -> Result<Vec<ClassKey>> {
        let mut out = Vec::new();
        for total in 0..=bound {
            for dim in DimVector::with_total(self.quiver.vertex_count(), total) {
                out.extend(self.classes(&dim)?);
            }
        }
        Ok(out)
    }

    /// The class of the zero representation.
    pub fn empty_class(&self) -> ClassKey {
        ClassKey::new(self.quiver.zero(), 0)
    }

    pub fn check_key(&self, key: &ClassKey) -> Result<()> {
        self.table(&key.dim)?.class(key.id).map(|_| ())
    }

    /// `a_α = |Aut(M_α)|`.
    pub fn aut(&self, key: &ClassKey) -> Result<u128> {
        Ok(self.table(&key.dim)?.class(key.id)?.aut_order)
    }

    pub fn orbit_size(&self, key: &ClassKey) -> Result<u64> {
        Ok(self.table(&key.dim)?.class(key.id)?.orbit_size)
    }

    /// Stable subspaces of dimension `sub_dim` in the representative of `gamma`,
    /// bucketed by (quotient class, sub class).
    pub fn splitting(&self, gamma: &ClassKey, sub_dim: &DimVector) -> Result<Arc<Splitting>> {
        let quot_dim = gamma.dim.checked_sub(sub_dim)?;
        let key = (gamma.dim.clone(), gamma.id, sub_dim.clone());
        self.splits.get_or_try(&key, || {
            let gt = self.table(&gamma.dim)?;
            let x = &gt.class(gamma.id)?.rep;
            let qt = self.table(&quot_dim)?;
            let st = self.table(sub_dim)?;
            let counts = split_counts(&self.quiver, &self.field, x, sub_dim, &qt, &st)?;
            if cfg!(debug_assertions) {
                let y = gt.orbit_sample(gamma.id)?;
                let again = split_counts(&self.quiver, &self.field, &y, sub_dim, &qt, &st)?;
                assert_eq!(counts, again, "splitting of {gamma} depends on the representative");
            }
            Ok(Arc::new(counts))
        })
    }

    /// `g^γ_{αβ}`: submodules of `M_γ` isomorphic to `M_β` with quotient `M_α`.
    pub fn hall_number(&self, gamma: &ClassKey, alpha: &ClassKey, beta: &ClassKey) -> Result<u64> {
        if alpha.dim.checked_add(&beta.dim)? != gamma.dim {
            return Err(HallError::DimensionMismatch(format!(
                "{} + {} ≠ {}",
                alpha.dim, beta.dim, gamma.dim
            )));
        }
        self.check_key(alpha)?;
        self.check_key(beta)?;
        let s = self.splitting(gamma, &beta.dim)?;
        Ok(s.get(&(alpha.id, beta.id)).copied().unwrap_or(0))
    }

    /// All nonzero `g^c_{ab}` with `dim a = da`, `dim b = db`.
    pub fn products(&self, da: &DimVector, db: &DimVector) -> Result<Arc<ProductTable>> {
        let key = (da.clone(), db.clone());
        self.products.get_or_try(&key, || {
            let dc = da.checked_add(db)?;
            let mut table = ProductTable::new();
            for c in self.classes(&dc)? {
                for (&(a, b), &n) in self.splitting(&c, db)?.iter() {
                    table.entry((a, b)).or_default().push((c.id, n));
                }
            }
            Ok(Arc::new(table))
        })
    }

    /// Fibre counts of the extension assembly from quotient dimension `d_quot`
    /// and sub dimension `d_sub`.
    pub fn extensions(&self, d_quot: &DimVector, d_sub: &DimVector) -> Result<Arc<ExtensionTable>> {
        let key = (d_quot.clone(), d_sub.clone());
        self.extensions.get_or_try(&key, || {
            let total = d_quot.checked_add(d_sub)?;
            let tt = self.table(&total)?;
            let qt = self.table(d_quot)?;
            let st = self.table(d_sub)?;
            let fibre = self.quiver.arrow_pairing(d_quot, d_sub) as u32;
            let points = (self.q() as u128).checked_pow(fibre).unwrap_or(u128::MAX);
            if points > self.budget as u128 {
                return Err(HallError::BudgetExceeded {
                    points,
                    budget: self.budget,
                });
            }
            let mut table = ExtensionTable::new();
            for a in qt.classes() {
                for b in st.classes() {
                    let counts = extension_counts(&self.quiver, &self.field, &a.rep, &b.rep, &tt);
                    if cfg!(debug_assertions) {
                        let (a2, b2) = (qt.orbit_sample(a.id)?, st.orbit_sample(b.id)?);
                        let again = extension_counts(&self.quiver, &self.field, &a2, &b2, &tt);
                        assert_eq!(counts, again, "extension fibre depends on the representatives");
                    }
                    table.insert((a.id, b.id), counts.into_iter().collect());
                }
            }
            Ok(Arc::new(table))
        })
    }

    pub fn hom_dim(&self, m: &ClassKey, n: &ClassKey) -> Result<usize> {
        let key = (m.clone(), n.clone());
        self.homs.get_or_try(&key, || {
            let tm = self.table(&m.dim)?;
            let tn = self.table(&n.dim)?;
            hom_dim(&self.quiver, &self.field, &tm.class(m.id)?.rep, &tn.class(n.id)?.rep)
        })
    }

    /// `dim Ext¹ = dim Hom − ⟨dim m, dim n⟩`, from the cached Hom dimension.
    pub fn ext1_dim(&self, m: &ClassKey, n: &ClassKey) -> Result<usize> {
        let hom = self.hom_dim(m, n)? as i64;
        let ext = hom - self.quiver.euler_form(&m.dim, &n.dim)?;
        assert!(ext >= 0, "negative Ext dimension {ext} for ({m}, {n})");
        Ok(ext as usize)
    }

    /// Finds a class by a representation given as one row-major matrix per arrow.
    pub fn classify_matrices(&self, dim: &DimVector, matrices: &[Vec<u16>]) -> Result<ClassKey> {
        let t = self.table(dim)?;
        let flat: Vec<u16> = matrices.iter().flatten().copied().collect();
        if flat.len() != t.layout().len() {
            return Err(HallError::DimensionMismatch(format!(
                "{} entries given, dimension {dim} needs {}",
                flat.len(),
                t.layout().len()
            )));
        }
        let rep = t.layout().rep_from_flat(&flat);
        Ok(ClassKey::new(dim.clone(), t.classify(&rep)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    fn key(ctx: &HallContext, dim: &[u32], mats: &[Vec<u16>]) -> ClassKey {
        ctx.classify_matrices(&dv(dim), mats).unwrap()
    }

    #[test]
    fn class_key_text() {
        let k: ClassKey = "1,0:3".parse().unwrap();
        assert_eq!(k, ClassKey::new(dv(&[1, 0]), 3));
        assert_eq!(k.to_string(), "1,0:3");
        assert!("1,0".parse::<ClassKey>().is_err());
    }

    #[test]
    fn a2_hall_numbers() {
        for q in [2, 3] {
            let ctx = HallContext::new(Quiver::preset("a2").unwrap(), q).unwrap();
            let s1 = key(&ctx, &[1, 0], &[vec![]]);
            let s2 = key(&ctx, &[0, 1], &[vec![]]);
            let p = key(&ctx, &[1, 1], &[vec![1]]);
            let split = key(&ctx, &[1, 1], &[vec![0]]);
            assert_eq!(ctx.hall_number(&p, &s1, &s2).unwrap(), 1);
            assert_eq!(ctx.hall_number(&p, &s2, &s1).unwrap(), 0);
            assert_eq!(ctx.hall_number(&split, &s1, &s2).unwrap(), 1);
            assert_eq!(ctx.hall_number(&split, &s2, &s1).unwrap(), 1);
            assert!(ctx.hall_number(&p, &s1, &s1).is_err());
        }
    }

    #[test]
    fn jordan_hall_numbers() {
        for q in [2u64, 3, 4] {
            let ctx = HallContext::new(Quiver::preset("jordan").unwrap(), q).unwrap();
            let j1 = key(&ctx, &[1], &[vec![0]]);
            let j1j1 = key(&ctx, &[2], &[vec![0, 0, 0, 0]]);
            let j2 = key(&ctx, &[2], &[vec![0, 1, 0, 0]]);
            assert_eq!(ctx.hall_number(&j1j1, &j1, &j1).unwrap(), q + 1);
            assert_eq!(ctx.hall_number(&j2, &j1, &j1).unwrap(), 1);
        }
    }

    #[test]
    fn extension_fibres_a2() {
        let ctx = HallContext::new(Quiver::preset("a2").unwrap(), 2).unwrap();
        let ext = ctx.extensions(&dv(&[1, 0]), &dv(&[0, 1])).unwrap();
        let p = key(&ctx, &[1, 1], &[vec![1]]);
        let split = key(&ctx, &[1, 1], &[vec![0]]);
        let fib = &ext[&(0, 0)];
        assert!(fib.contains(&(p.id, 1)));
        assert!(fib.contains(&(split.id, 1)));
        // the other order has no arrow between the blocks
        let ext = ctx.extensions(&dv(&[0, 1]), &dv(&[1, 0])).unwrap();
        assert_eq!(ext[&(0, 0)], vec![(split.id, 1)]);
    }

    #[test]
    fn concurrent_requests_share_one_table() {
        let ctx = HallContext::new(Quiver::preset("kronecker").unwrap(), 2).unwrap();
        let tables: Vec<_> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..8).map(|_| s.spawn(|| ctx.table(&dv(&[2, 2])).unwrap())).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(tables.windows(2).all(|w| Arc::ptr_eq(&w[0], &w[1])));
        assert_eq!(ctx.tables_built(), 1);
    }

    #[test]
    fn budget_errors_propagate() {
        let ctx = HallContext::new(Quiver::preset("kronecker").unwrap(), 2).unwrap().with_budget(100);
        assert!(matches!(ctx.table(&dv(&[2, 2])), Err(HallError::BudgetExceeded { .. })));
        assert!(ctx.table(&dv(&[1, 1])).is_ok());
    }
}
