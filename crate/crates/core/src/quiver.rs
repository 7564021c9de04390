//! Quivers, dimension vectors, Euler forms and the quadruple set indexing
//! the restriction-of-induction decomposition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HallError, Result};

/// An arrow between two vertices, stored by dense vertex index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub src: usize,
    pub tgt: usize,
}

/// A finite quiver. Multi-arrows and loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

#[derive(Serialize, Deserialize)]
struct RawArrow {
    src: String,
    tgt: String,
}

#[derive(Serialize, Deserialize)]
struct RawQuiver {
    vertices: Vec<String>,
    arrows: Vec<RawArrow>,
}

impl Quiver {
    /// Builds a quiver from named vertices and arrows given as `(source, target)` names.
    pub fn new<S: AsRef<str>>(vertices: Vec<String>, arrows: &[(S, S)]) -> Result<Self> {
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(HallError::InvalidQuiver(format!("duplicate vertex id `{v}`")));
            }
        }
        let lookup = |name: &str| {
            vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| HallError::InvalidQuiver(format!("arrow endpoint `{name}` is not a vertex")))
        };
        let arrows = arrows
            .iter()
            .map(|(s, t)| {
                Ok(Arrow {
                    src: lookup(s.as_ref())?,
                    tgt: lookup(t.as_ref())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Quiver { vertices, arrows })
    }

    /// Standard orientations of the small quivers used throughout the test sweeps.
    pub fn preset(name: &str) -> Result<Self> {
        let names = |n: usize| (1..=n).map(|i| i.to_string()).collect::<Vec<_>>();
        match name.to_ascii_lowercase().as_str() {
            "a2" => Quiver::new(names(2), &[("1", "2")]),
            "a3" => Quiver::new(names(3), &[("1", "2"), ("2", "3")]),
            "kronecker" => Quiver::new(names(2), &[("1", "2"), ("1", "2")]),
            "jordan" => Quiver::new(names(1), &[("1", "1")]),
            // subspace orientation: three outer vertices map into the centre
            "d4" => Quiver::new(names(4), &[("1", "4"), ("2", "4"), ("3", "4")]),
            _ => Err(HallError::UnknownPreset(name.to_string())),
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn has_loop_at(&self, vertex: usize) -> bool {
        self.arrows.iter().any(|a| a.src == vertex && a.tgt == vertex)
    }

    fn check(&self, v: &DimVector) -> Result<()> {
        if v.len() != self.vertex_count() {
            return Err(HallError::DimensionLength {
                expected: self.vertex_count(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `Σ_h v_{s(h)} w_{t(h)}`.
    pub fn arrow_pairing(&self, v: &DimVector, w: &DimVector) -> i64 {
        self.arrows
            .iter()
            .map(|a| v[a.src] as i64 * w[a.tgt] as i64)
            .sum()
    }

    /// Number of matrix entries of a representation of dimension `v`.
    pub fn entry_count(&self, v: &DimVector) -> usize {
        self.arrows.iter().map(|a| v[a.src] as usize * v[a.tgt] as usize).sum()
    }

    /// Euler form `Σ_i v_i w_i − Σ_h v_{s(h)} w_{t(h)}`.
    pub fn euler_form(&self, v: &DimVector, w: &DimVector) -> Result<i64> {
        self.check(v)?;
        self.check(w)?;
        Ok(v.dot(w) - self.arrow_pairing(v, w))
    }

    /// Symmetrised Euler form `⟨v,w⟩ + ⟨w,v⟩`.
    pub fn symmetric_euler_form(&self, v: &DimVector, w: &DimVector) -> Result<i64> {
        Ok(self.euler_form(v, w)? + self.euler_form(w, v)?)
    }

    /// Stable content hash, independent of platform and run.
    pub fn content_hash(&self) -> String {
        let json = self.to_json_string();
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(&digest[..8])
    }

    fn to_raw(&self) -> RawQuiver {
        RawQuiver {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| RawArrow {
                    src: self.vertices[a.src].clone(),
                    tgt: self.vertices[a.tgt].clone(),
                })
                .collect(),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("quiver serialises")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("quiver serialises")
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let raw: RawQuiver = serde_json::from_value(value)?;
        let arrows: Vec<(String, String)> = raw.arrows.into_iter().map(|a| (a.src, a.tgt)).collect();
        Quiver::new(raw.vertices, &arrows)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Quiver::from_json_value(serde_json::from_str(text)?)
    }

    /// Parses a comma-separated dimension vector in vertex order.
    pub fn parse_dim(&self, text: &str) -> Result<DimVector> {
        let v: DimVector = text.parse()?;
        self.check(&v)?;
        Ok(v)
    }

    pub fn unit(&self, vertex: usize) -> DimVector {
        DimVector::unit(self.vertex_count(), vertex)
    }

    pub fn zero(&self) -> DimVector {
        DimVector::zeros(self.vertex_count())
    }
}

impl Serialize for Quiver {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Quiver {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawQuiver::deserialize(deserializer)?;
        let arrows: Vec<(String, String)> = raw.arrows.into_iter().map(|a| (a.src, a.tgt)).collect();
        Quiver::new(raw.vertices, &arrows).map_err(serde::de::Error::custom)
    }
}

/// An element of `ℕ^I`, indexed by dense vertex index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimVector(Vec<u32>);

impl DimVector {
    pub fn new(counts: Vec<u32>) -> Self {
        DimVector(counts)
    }

    pub fn zeros(n: usize) -> Self {
        DimVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        DimVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    /// Sum of all components.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &DimVector) -> i64 {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a as i64 * b as i64).sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &DimVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_add(&self, other: &DimVector) -> Result<DimVector> {
        if self.len() != other.len() {
            return Err(HallError::DimensionLength {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(DimVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn checked_sub(&self, other: &DimVector) -> Result<DimVector> {
        if self.len() != other.len() {
            return Err(HallError::DimensionLength {
                expected: self.len(),
                got: other.len(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(DimVector)
            .ok_or_else(|| HallError::DimensionMismatch(format!("{self} − {other} is negative")))
    }

    /// All vectors `w` with `0 ≤ w ≤ self`, in lexicographic order.
    pub fn sub_vectors(&self) -> Vec<DimVector> {
        box_vectors(&DimVector::zeros(self.len()), self)
    }

    /// All vectors with `len` components summing to `total`, lexicographic order.
    pub fn with_total(len: usize, total: u32) -> Vec<DimVector> {
        box_vectors(&DimVector::zeros(len), &DimVector(vec![total; len]))
            .into_iter()
            .filter(|v| v.total() == total)
            .collect()
    }
}

/// Lexicographic enumeration of the integer box `lo ≤ w ≤ hi`.
fn box_vectors(lo: &DimVector, hi: &DimVector) -> Vec<DimVector> {
    if !lo.le(hi) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.0.clone();
    loop {
        out.push(DimVector(cur.clone()));
        // odometer with the last component varying fastest
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < hi.0[k] {
                cur[k] += 1;
                cur[k + 1..].copy_from_slice(&lo.0[k + 1..]);
                break;
            }
        }
    }
}

impl std::ops::Index<usize> for DimVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Display for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for DimVector {
    type Err = HallError;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| HallError::InvalidArgument(format!("bad dimension vector `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(DimVector)
    }
}

/// A point `(α₁, α₂, β₁, β₂)` of the quadruple set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Quadruple {
    pub a1: DimVector,
    pub a2: DimVector,
    pub b1: DimVector,
    pub b2: DimVector,
}

/// All `(α₁,α₂,β₁,β₂)` with `α₁+α₂ = α`, `β₁+β₂ = β`, `α₁+β₁ = α′`, `α₂+β₂ = β′`,
/// ordered lexicographically by `α₁` (which determines the rest).
pub fn enumerate_quadruples(
    alpha: &DimVector,
    beta: &DimVector,
    alphap: &DimVector,
    betap: &DimVector,
) -> Result<Vec<Quadruple>> {
    let gamma = alpha.checked_add(beta)?;
    if gamma != alphap.checked_add(betap)? {
        return Err(HallError::DimensionMismatch(format!(
            "α+β = {gamma} differs from α′+β′ = {}",
            alphap.checked_add(betap)?
        )));
    }
    // α₁ ≤ min(α, α′) and α₁ ≥ max(0, α − β′, α′ − β)
    let n = alpha.len();
    let lo = DimVector(
        (0..n)
            .map(|i| {
                let a = alpha[i] as i64 - betap[i] as i64;
                let b = alphap[i] as i64 - beta[i] as i64;
                a.max(b).max(0) as u32
            })
            .collect(),
    );
    let hi = DimVector((0..n).map(|i| alpha[i].min(alphap[i])).collect());
    box_vectors(&lo, &hi)
        .into_iter()
        .map(|a1| {
            let a2 = alpha.checked_sub(&a1)?;
            let b1 = alphap.checked_sub(&a1)?;
            let b2 = betap.checked_sub(&a2)?;
            Ok(Quadruple { a1, a2, b1, b2 })
        })
        .collect()
}
