//! Class functions with induction and restriction, the integer shift
//! constants of the restriction-of-induction decomposition, and its check as
//! an identity of class functions.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{basis_product, integer};
use crate::context::{ClassKey, HallContext};
use crate::error::{HallError, Result};
use crate::exec::{map_ordered, Execution};
use crate::quiver::{enumerate_quadruples, DimVector, Quadruple, Quiver};
use crate::scalar::SqrtQScalar;

/// A function on tuples of iso-classes, one class per factor; absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    q: u64,
    dims: Vec<DimVector>,
    values: BTreeMap<Vec<usize>, SqrtQScalar>,
}

impl ClassFunction {
    pub fn zero(dims: Vec<DimVector>, q: u64) -> Self {
        ClassFunction {
            q,
            dims,
            values: BTreeMap::new(),
        }
    }

    /// The indicator of one tuple of classes.
    pub fn delta(keys: &[ClassKey], q: u64) -> Self {
        let mut f = ClassFunction::zero(keys.iter().map(|k| k.dim.clone()).collect(), q);
        f.add(keys.iter().map(|k| k.id).collect(), SqrtQScalar::one(q));
        f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dims(&self) -> &[DimVector] {
        &self.dims
    }

    pub fn values(&self) -> &BTreeMap<Vec<usize>, SqrtQScalar> {
        &self.values
    }

    pub fn value(&self, classes: &[usize]) -> SqrtQScalar {
        self.values.get(classes).cloned().unwrap_or_else(|| SqrtQScalar::zero(self.q))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&mut self, classes: Vec<usize>, c: SqrtQScalar) {
        debug_assert_eq!(classes.len(), self.dims.len());
        if c.is_zero() {
            return;
        }
        let sum = match self.values.remove(&classes) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.values.insert(classes, sum);
        }
    }

    pub fn add_function(&mut self, other: &ClassFunction) -> Result<()> {
        if self.dims != other.dims {
            return Err(HallError::DimensionMismatch("adding class functions on different factors".into()));
        }
        for (k, v) in &other.values {
            self.add(k.clone(), v.clone());
        }
        Ok(())
    }

    pub fn scale(&self, c: &SqrtQScalar) -> Self {
        let mut out = ClassFunction::zero(self.dims.clone(), self.q);
        for (k, v) in &self.values {
            out.add(k.clone(), v * c);
        }
        out
    }

    /// `(f ⊗ g)(x, y) = f(x) g(y)`.
    pub fn tensor(&self, other: &ClassFunction) -> Self {
        let mut dims = self.dims.clone();
        dims.extend(other.dims.iter().cloned());
        let mut out = ClassFunction::zero(dims, self.q);
        for (k1, v1) in &self.values {
            for (k2, v2) in &other.values {
                let mut k = k1.clone();
                k.extend_from_slice(k2);
                out.add(k, v1 * v2);
            }
        }
        out
    }

    /// Reorders factors: factor `i` of the result is factor `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dims.len()];
        if perm.len() != self.dims.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(HallError::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        let dims = perm.iter().map(|&p| self.dims[p].clone()).collect();
        let mut out = ClassFunction::zero(dims, self.q);
        for (k, v) in &self.values {
            out.add(perm.iter().map(|&p| k[p]).collect(), v.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for ClassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return write!(f, "0");
        }
        let dims: Vec<String> = self.dims.iter().map(|d| format!("({d})")).collect();
        writeln!(f, "on {}", dims.join(" × "))?;
        for (k, v) in &self.values {
            writeln!(f, "  {k:?} ↦ {v}")?;
        }
        Ok(())
    }
}

/// `d₁ − d₂ = Σ_h ν′_{s(h)} ν″_{t(h)} + Σ_i ν′_i ν″_i`.
pub fn ind_twist(quiver: &Quiver, quot: &DimVector, sub: &DimVector) -> i64 {
    quiver.arrow_pairing(quot, sub) + quot.dot(sub)
}

/// Induction on factors `pos` (quotient) and `pos + 1` (sub), which merge into
/// one factor of their total dimension.
pub fn ind_at(ctx: &HallContext, f: &ClassFunction, pos: usize, v_unit: &SqrtQScalar) -> Result<ClassFunction> {
    if pos + 1 >= f.dims.len() {
        return Err(HallError::InvalidArgument(format!("no adjacent factors at {pos}")));
    }
    let (quot, sub) = (&f.dims[pos], &f.dims[pos + 1]);
    let total = quot.checked_add(sub)?;
    let twist = v_unit.pow(ind_twist(ctx.quiver(), quot, sub));
    type Entries<'a> = Vec<(Vec<usize>, &'a SqrtQScalar)>;
    let mut by_pair: BTreeMap<(usize, usize), Entries> = BTreeMap::new();
    for (k, v) in &f.values {
        let mut rest = k.clone();
        let pair = (rest.remove(pos), rest.remove(pos));
        by_pair.entry(pair).or_default().push((rest, v));
    }
    let mut dims = f.dims.clone();
    dims.splice(pos..pos + 2, [total.clone()]);
    let mut out = ClassFunction::zero(dims, f.q);
    for c in ctx.classes(&total)? {
        for (pair, &n) in ctx.splitting(&c, sub)?.iter() {
            let Some(entries) = by_pair.get(pair) else { continue };
            let weight = &twist * &integer(n as u128, f.q);
            for (rest, v) in entries {
                let mut k = rest.clone();
                k.insert(pos, c.id);
                out.add(k, &weight * v);
            }
        }
    }
    Ok(out)
}

/// Restriction of factor `pos` to quotient dimension `quot` and sub dimension `sub`.
pub fn res_at(ctx: &HallContext, f: &ClassFunction, pos: usize, quot: &DimVector, sub: &DimVector, v_unit: &SqrtQScalar) -> Result<ClassFunction> {
    if pos >= f.dims.len() {
        return Err(HallError::InvalidArgument(format!("no factor at {pos}")));
    }
    if quot.checked_add(sub)? != f.dims[pos] {
        return Err(HallError::DimensionMismatch(format!("{quot} + {sub} ≠ {}", f.dims[pos])));
    }
    let twist = v_unit.pow(-ctx.quiver().euler_form(quot, sub)?);
    let mut by_class: BTreeMap<usize, Vec<(&Vec<usize>, &SqrtQScalar)>> = BTreeMap::new();
    for (k, v) in &f.values {
        by_class.entry(k[pos]).or_default().push((k, v));
    }
    let mut dims = f.dims.clone();
    dims.splice(pos..pos + 1, [quot.clone(), sub.clone()]);
    let mut out = ClassFunction::zero(dims, f.q);
    if by_class.is_empty() {
        return Ok(out);
    }
    for (&(a, b), fibre) in ctx.extensions(quot, sub)?.iter() {
        for &(c, n) in fibre {
            let Some(entries) = by_class.get(&c) else { continue };
            let weight = &twist * &integer(n as u128, f.q);
            for (k, v) in entries {
                let mut k = (*k).clone();
                k.splice(pos..pos + 1, [a, b]);
                out.add(k, &weight * v);
            }
        }
    }
    Ok(out)
}

/// Induction `E_{ν′} × E_{ν″} → E_{ν′+ν″}` of a two-factor function.
pub fn ind_fn(ctx: &HallContext, fg: &ClassFunction, v_unit: &SqrtQScalar) -> Result<ClassFunction> {
    if fg.dims.len() != 2 {
        return Err(HallError::InvalidArgument("induction takes a function of two factors".into()));
    }
    ind_at(ctx, fg, 0, v_unit)
}

/// Restriction `E_ν → E_{ν′} × E_{ν″}` of a one-factor function.
pub fn res_fn(ctx: &HallContext, f: &ClassFunction, quot: &DimVector, sub: &DimVector, v_unit: &SqrtQScalar) -> Result<ClassFunction> {
    if f.dims.len() != 1 {
        return Err(HallError::InvalidArgument("restriction takes a function of one factor".into()));
    }
    res_at(ctx, f, 0, quot, sub, v_unit)
}

/// `ind(δ_a ⊗ δ_b)(c) · v_q^{⟨a,b⟩} = v_unit^{d₁−d₂} · [u_c](u_a ∗ u_b)` for every `c`.
pub fn ind_matches_product(ctx: &HallContext, a: &ClassKey, b: &ClassKey, v_unit: &SqrtQScalar) -> Result<bool> {
    let q = ctx.q();
    let ind = ind_fn(ctx, &ClassFunction::delta(&[a.clone(), b.clone()], q), v_unit)?;
    let prod = basis_product(ctx, a, b)?;
    let lhs_scale = SqrtQScalar::v_pow(ctx.quiver().euler_form(&a.dim, &b.dim)?, q);
    let rhs_scale = v_unit.pow(ind_twist(ctx.quiver(), &a.dim, &b.dim));
    for c in ctx.classes(&a.dim.checked_add(&b.dim)?)? {
        let lhs = &ind.value(&[c.id]) * &lhs_scale;
        let rhs = &prod.coeff(&c) * &rhs_scale;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which form of the last vertex term of `N_λ` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NTerm {
    /// `Σ_i (α₁_i β₁_i + α₂_i β₂_i)`.
    Balanced,
    /// `Σ_i (α₁_i β₁_i + α₂_i α₂_i)`.
    Printed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaShift {
    pub lambda: Quadruple,
    pub n: i64,
    pub l: i64,
    pub k: i64,
    /// `(α₂, β₁)`.
    pub pairing: i64,
}

impl LambdaShift {
    pub fn holds(&self, m: i64) -> bool {
        m - 2 * self.k == self.n - self.pairing
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftConstants {
    pub m: i64,
    pub lambdas: Vec<LambdaShift>,
}

impl ShiftConstants {
    /// Whether `M − 2K_λ = N_λ − (α₂, β₁)` for every `λ`.
    pub fn identity_holds(&self) -> bool {
        self.lambdas.iter().all(|l| l.holds(self.m))
    }
}

pub fn shift_constants(quiver: &Quiver, alpha: &DimVector, beta: &DimVector, alphap: &DimVector, betap: &DimVector) -> Result<ShiftConstants> {
    shift_constants_with(quiver, alpha, beta, alphap, betap, NTerm::Balanced)
}

pub fn shift_constants_with(
    quiver: &Quiver,
    alpha: &DimVector,
    beta: &DimVector,
    alphap: &DimVector,
    betap: &DimVector,
    n_term: NTerm,
) -> Result<ShiftConstants> {
    let h = |v: &DimVector, w: &DimVector| quiver.arrow_pairing(v, w);
    let m = h(alpha, beta) + alpha.dot(beta) - quiver.euler_form(alphap, betap)?;
    let mut lambdas = Vec::new();
    for lam in enumerate_quadruples(alpha, beta, alphap, betap)? {
        let Quadruple { a1, a2, b1, b2 } = &lam;
        let l = h(a1, a2) + h(a1, b2) + h(b1, b2) + a2.dot(b1);
        let k = l - h(a1, a2) - h(b1, b2);
        let last = match n_term {
            NTerm::Balanced => a2.dot(b2),
            NTerm::Printed => a2.dot(a2),
        };
        let n = -quiver.euler_form(a1, a2)? - quiver.euler_form(b1, b2)? + h(a1, b1) + h(a2, b2) + a1.dot(b1) + last;
        let pairing = quiver.symmetric_euler_form(a2, b1)?;
        lambdas.push(LambdaShift { lambda: lam, n, l, k, pairing });
    }
    Ok(ShiftConstants { m, lambdas })
}

pub fn verify_shift_identity(quiver: &Quiver, alpha: &DimVector, beta: &DimVector, alphap: &DimVector, betap: &DimVector) -> Result<bool> {
    Ok(shift_constants(quiver, alpha, beta, alphap, betap)?.identity_holds())
}

pub fn verify_shift_identity_with(
    quiver: &Quiver,
    alpha: &DimVector,
    beta: &DimVector,
    alphap: &DimVector,
    betap: &DimVector,
    n_term: NTerm,
) -> Result<bool> {
    Ok(shift_constants_with(quiver, alpha, beta, alphap, betap, n_term)?.identity_holds())
}

/// Random `(α, β, α′, β′)` with `α + β = α′ + β′` and every entry at most `max_entry`.
pub fn random_dimension_quadruples(n: usize, samples: usize, seed: u64, max_entry: u32) -> Vec<[DimVector; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let alpha: Vec<u32> = (0..n).map(|_| rng.random_range(0..=max_entry)).collect();
            let beta: Vec<u32> = (0..n).map(|_| rng.random_range(0..=max_entry)).collect();
            let alphap: Vec<u32> = (0..n)
                .map(|i| {
                    let g = alpha[i] + beta[i];
                    rng.random_range(g.saturating_sub(max_entry)..=g.min(max_entry))
                })
                .collect();
            let betap: Vec<u32> = (0..n).map(|i| alpha[i] + beta[i] - alphap[i]).collect();
            [alpha, beta, alphap, betap].map(DimVector::new)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftFuzzReport {
    pub quiver: Quiver,
    pub samples: usize,
    pub seed: u64,
    pub n_term: NTerm,
    pub lambdas: u64,
    /// Samples with at least one failing `λ`, as `[α, β, α′, β′]`.
    pub failures: Vec<[DimVector; 4]>,
}

impl ShiftFuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn shift_fuzz(quiver: &Quiver, samples: usize, seed: u64, max_entry: u32, n_term: NTerm, exec: Execution) -> Result<ShiftFuzzReport> {
    let work = random_dimension_quadruples(quiver.vertex_count(), samples, seed, max_entry);
    let results = map_ordered(exec, &work, |[a, b, ap, bp]| -> Result<(u64, bool)> {
        let c = shift_constants_with(quiver, a, b, ap, bp, n_term)?;
        Ok((c.lambdas.len() as u64, c.identity_holds()))
    });
    let mut lambdas = 0;
    let mut failures = Vec::new();
    for (inst, r) in work.into_iter().zip(results) {
        let (n, ok) = r?;
        lambdas += n;
        if !ok {
            failures.push(inst);
        }
    }
    Ok(ShiftFuzzReport {
        quiver: quiver.clone(),
        samples,
        seed,
        n_term,
        lambdas,
        failures,
    })
}

/// One input of the decomposition check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremInput {
    pub a: ClassKey,
    pub b: ClassKey,
    pub alphap: DimVector,
    pub betap: DimVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremCheck {
    pub lhs: ClassFunction,
    pub rhs: ClassFunction,
    pub equal: bool,
}

/// Compares `res_{α′,β′}(ind(δ_A ⊗ δ_B))` with
/// `Σ_λ v^{−(α₂,β₁)} (ind ⊗ ind) τ_λ (res δ_A ⊗ res δ_B)`, all twists taken in `v_unit`.
pub fn verify_main_theorem(ctx: &HallContext, input: &TheoremInput, v_unit: &SqrtQScalar) -> Result<TheoremCheck> {
    let q = ctx.q();
    if v_unit.q() != q || v_unit.is_zero() {
        return Err(HallError::InvalidArgument(format!("unit {v_unit} is not a nonzero scalar over q = {q}")));
    }
    let TheoremInput { a, b, alphap, betap } = input;
    ctx.check_key(a)?;
    ctx.check_key(b)?;
    let induced = ind_fn(ctx, &ClassFunction::delta(&[a.clone(), b.clone()], q), v_unit)?;
    let lhs = res_fn(ctx, &induced, alphap, betap, v_unit)?;

    let mut rhs = ClassFunction::zero(vec![alphap.clone(), betap.clone()], q);
    for lam in enumerate_quadruples(&a.dim, &b.dim, alphap, betap)? {
        let ra = res_fn(ctx, &ClassFunction::delta(std::slice::from_ref(a), q), &lam.a1, &lam.a2, v_unit)?;
        if ra.is_zero() {
            continue;
        }
        let rb = res_fn(ctx, &ClassFunction::delta(std::slice::from_ref(b), q), &lam.b1, &lam.b2, v_unit)?;
        if rb.is_zero() {
            continue;
        }
        // (α₁, α₂, β₁, β₂) → (α₁, β₁, α₂, β₂)
        let swapped = ra.tensor(&rb).permute(&[0, 2, 1, 3])?;
        let first = ind_at(ctx, &swapped, 0, v_unit)?;
        let both = ind_at(ctx, &first, 1, v_unit)?;
        let pairing = ctx.quiver().symmetric_euler_form(&lam.a2, &lam.b1)?;
        rhs.add_function(&both.scale(&v_unit.pow(-pairing)))?;
    }
    let equal = lhs == rhs;
    Ok(TheoremCheck { lhs, rhs, equal })
}

/// Every `(A, B, α′, β′)` with `|dim A + dim B| ≤ bound`.
pub fn theorem_instances(ctx: &HallContext, bound: u32) -> Result<Vec<TheoremInput>> {
    let classes = ctx.classes_up_to(bound)?;
    let mut out = Vec::new();
    for a in &classes {
        for b in &classes {
            if a.dim.total() + b.dim.total() > bound {
                continue;
            }
            let gamma = a.dim.checked_add(&b.dim)?;
            for alphap in gamma.sub_vectors() {
                let betap = gamma.checked_sub(&alphap)?;
                out.push(TheoremInput {
                    a: a.clone(),
                    b: b.clone(),
                    alphap,
                    betap,
                });
            }
        }
    }
    Ok(out)
}

/// The instances where every twist exponent vanishes: `A` or `B` empty with
/// `(α′, β′) = (α, β)`.
pub fn degenerate_theorem_instances(ctx: &HallContext, bound: u32) -> Result<Vec<TheoremInput>> {
    Ok(theorem_instances(ctx, bound)?
        .into_iter()
        .filter(|t| (t.a.dim.is_zero() || t.b.dim.is_zero()) && t.alphap == t.a.dim && t.betap == t.b.dim)
        .collect())
}

/// The four candidate units `±√q`, `±1/√q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VUnit {
    PlusSqrtQ,
    MinusSqrtQ,
    PlusInvSqrtQ,
    MinusInvSqrtQ,
}

impl VUnit {
    pub const ALL: [VUnit; 4] = [VUnit::PlusSqrtQ, VUnit::MinusSqrtQ, VUnit::PlusInvSqrtQ, VUnit::MinusInvSqrtQ];

    pub fn value(self, q: u64) -> SqrtQScalar {
        let v = SqrtQScalar::sqrt_q(q);
        match self {
            VUnit::PlusSqrtQ => v,
            VUnit::MinusSqrtQ => -v,
            VUnit::PlusInvSqrtQ => v.inv().expect("√q ≠ 0"),
            VUnit::MinusInvSqrtQ => -v.inv().expect("√q ≠ 0"),
        }
    }
}

impl fmt::Display for VUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VUnit::PlusSqrtQ => "+sqrt(q)",
            VUnit::MinusSqrtQ => "-sqrt(q)",
            VUnit::PlusInvSqrtQ => "+1/sqrt(q)",
            VUnit::MinusInvSqrtQ => "-1/sqrt(q)",
        })
    }
}

impl std::str::FromStr for VUnit {
    type Err = HallError;
    fn from_str(s: &str) -> Result<Self> {
        VUnit::ALL
            .into_iter()
            .find(|u| u.to_string() == s)
            .ok_or_else(|| HallError::InvalidArgument(format!("unknown unit `{s}` (expected one of +sqrt(q), -sqrt(q), +1/sqrt(q), -1/sqrt(q))")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VUnitReport {
    pub instances: usize,
    /// For each candidate, the number of instances where the two sides differ.
    pub failures: BTreeMap<VUnit, usize>,
    pub survivors: Vec<VUnit>,
}

impl VUnitReport {
    pub fn unique(&self) -> Result<VUnit> {
        match self.survivors.as_slice() {
            [u] => Ok(*u),
            other => Err(HallError::NoConsistentConvention(format!(
                "{} candidate units survive: {}",
                other.len(),
                other.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }
}

/// Checks every instance against every candidate unit.
pub fn v_unit_sweep(jobs: &[(&HallContext, Vec<TheoremInput>)], exec: Execution) -> Result<VUnitReport> {
    let mut failures: BTreeMap<VUnit, usize> = VUnit::ALL.iter().map(|&u| (u, 0)).collect();
    let mut instances = 0;
    for (ctx, work) in jobs {
        instances += work.len();
        let results = map_ordered(exec, work, |input| -> Result<Vec<bool>> {
            VUnit::ALL
                .iter()
                .map(|u| Ok(verify_main_theorem(ctx, input, &u.value(ctx.q()))?.equal))
                .collect()
        });
        for r in results {
            for (u, ok) in VUnit::ALL.iter().zip(r?) {
                if !ok {
                    *failures.get_mut(u).expect("all units present") += 1;
                }
            }
        }
    }
    let survivors = VUnit::ALL.iter().copied().filter(|u| failures[u] == 0).collect();
    Ok(VUnitReport {
        instances,
        failures,
        survivors,
    })
}

/// The unique unit passing every instance; an error unless exactly one survives.
pub fn determine_v_unit(jobs: &[(&HallContext, Vec<TheoremInput>)], exec: Execution) -> Result<VUnit> {
    v_unit_sweep(jobs, exec)?.unique()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremRow {
    pub input: TheoremInput,
    pub support: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub quiver: Quiver,
    pub q: u64,
    pub v_unit: VUnit,
    pub rows: Vec<TheoremRow>,
    pub all_equal: bool,
}

impl TheoremReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("A\tB\talphap\tbetap\tv_unit\tsupport\tequal\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.input.a, r.input.b, r.input.alphap, r.input.betap, self.v_unit, r.support, r.equal
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub fn sweep_theorem(ctx: &HallContext, inputs: &[TheoremInput], v_unit: VUnit, exec: Execution) -> Result<TheoremReport> {
    let value = v_unit.value(ctx.q());
    let rows = map_ordered(exec, inputs, |input| -> Result<TheoremRow> {
        let check = verify_main_theorem(ctx, input, &value)?;
        Ok(TheoremRow {
            input: input.clone(),
            support: check.lhs.values().len().max(check.rhs.values().len()),
            equal: check.equal,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TheoremReport {
        quiver: ctx.quiver().clone(),
        q: ctx.q(),
        v_unit,
        all_equal: rows.iter().all(|r| r.equal),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    fn a2(q: u64) -> (HallContext, ClassKey, ClassKey, ClassKey, ClassKey) {
        let ctx = HallContext::new(Quiver::preset("a2").unwrap(), q).unwrap();
        let s1 = ctx.classify_matrices(&dv(&[1, 0]), &[vec![]]).unwrap();
        let s2 = ctx.classify_matrices(&dv(&[0, 1]), &[vec![]]).unwrap();
        let p = ctx.classify_matrices(&dv(&[1, 1]), &[vec![1]]).unwrap();
        let split = ctx.classify_matrices(&dv(&[1, 1]), &[vec![0]]).unwrap();
        (ctx, s1, s2, p, split)
    }

    #[test]
    fn ind_example() {
        let (ctx, s1, s2, p, split) = a2(2);
        let v = SqrtQScalar::sqrt_q(2);
        let f = ind_fn(&ctx, &ClassFunction::delta(&[s1, s2], 2), &v).unwrap();
        assert_eq!(f.value(&[p.id]), v);
        assert_eq!(f.value(&[split.id]), v);
        assert_eq!(f.values().len(), 2);
    }

    #[test]
    fn res_example() {
        let (ctx, s1, s2, p, split) = a2(2);
        let v = SqrtQScalar::sqrt_q(2);
        for c in [p, split] {
            let f = res_fn(&ctx, &ClassFunction::delta(&[c], 2), &dv(&[1, 0]), &dv(&[0, 1]), &v).unwrap();
            assert_eq!(f.value(&[s1.id, s2.id]), v);
        }
    }

    #[test]
    fn unit_degenerations_are_identities() {
        let ctx = HallContext::new(Quiver::preset("kronecker").unwrap(), 2).unwrap();
        let v = SqrtQScalar::sqrt_q(2);
        let e = ctx.empty_class();
        for c in ctx.classes(&dv(&[1, 1])).unwrap() {
            let f = ClassFunction::delta(std::slice::from_ref(&c), 2);
            let with_empty = ind_fn(&ctx, &ClassFunction::delta(&[c.clone(), e.clone()], 2), &v).unwrap();
            assert_eq!(with_empty, f);
            let empty_first = ind_fn(&ctx, &ClassFunction::delta(&[e.clone(), c.clone()], 2), &v).unwrap();
            assert_eq!(empty_first, f);
            let r = res_fn(&ctx, &f, &c.dim, &e.dim, &v).unwrap();
            assert_eq!(r, ClassFunction::delta(&[c.clone(), e.clone()], 2));
            let back = ind_fn(&ctx, &r, &v).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn permute_and_tensor() {
        let f = ClassFunction::delta(&[ClassKey::new(dv(&[1]), 1), ClassKey::new(dv(&[2]), 3)], 2);
        let g = f.permute(&[1, 0]).unwrap();
        assert_eq!(g.dims(), &[dv(&[2]), dv(&[1])]);
        assert_eq!(g.value(&[3, 1]), SqrtQScalar::one(2));
        assert!(f.permute(&[0, 0]).is_err());
        let t = f.tensor(&g);
        assert_eq!(t.value(&[1, 3, 3, 1]), SqrtQScalar::one(2));
    }

    #[test]
    fn ind_tracks_the_hall_product() {
        for q in [2, 3] {
            let ctx = HallContext::new(Quiver::preset("a2").unwrap(), q).unwrap();
            let classes = ctx.classes_up_to(2).unwrap();
            for a in &classes {
                for b in &classes {
                    if a.dim.total() + b.dim.total() <= 2 {
                        for u in VUnit::ALL {
                            assert!(ind_matches_product(&ctx, a, b, &u.value(q)).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn shift_examples() {
        let a2 = Quiver::preset("a2").unwrap();
        let z = dv(&[0, 0]);
        let c = shift_constants(&a2, &z, &z, &z, &z).unwrap();
        assert_eq!(c.m, 0);
        assert_eq!(c.lambdas.len(), 1);
        assert_eq!((c.lambdas[0].n, c.lambdas[0].l, c.lambdas[0].k), (0, 0, 0));
        let (a, b, ap, bp) = (dv(&[1, 0]), dv(&[0, 1]), dv(&[0, 1]), dv(&[1, 0]));
        let c = shift_constants(&a2, &a, &b, &ap, &bp).unwrap();
        assert_eq!(c.m, 1);
        assert!(c.identity_holds());
        assert!(verify_shift_identity(&a2, &a, &b, &ap, &bp).unwrap());
        assert!(shift_constants(&a2, &a, &b, &a, &a).is_err());
    }

    /// `M − 2K_λ − N_λ + (α₂,β₁)` evaluated by hand from the definitions.
    fn residual(quiver: &Quiver, a: &[i64], b: &[i64], ap: &[i64], bp: &[i64], a1: &[i64]) -> i64 {
        let n = a.len();
        let a2: Vec<i64> = (0..n).map(|i| a[i] - a1[i]).collect();
        let b1: Vec<i64> = (0..n).map(|i| ap[i] - a1[i]).collect();
        let b2: Vec<i64> = (0..n).map(|i| bp[i] - a2[i]).collect();
        let h = |v: &[i64], w: &[i64]| -> i64 { quiver.arrows().iter().map(|x| v[x.src] * w[x.tgt]).sum() };
        let d = |v: &[i64], w: &[i64]| -> i64 { (0..n).map(|i| v[i] * w[i]).sum() };
        let e = |v: &[i64], w: &[i64]| d(v, w) - h(v, w);
        let m = h(a, b) + d(a, b) - e(ap, bp);
        let k = h(a1, &b2) + d(&a2, &b1);
        let nn = -e(a1, &a2) - e(&b1, &b2) + h(a1, &b1) + h(&a2, &b2) + d(a1, &b1) + d(&a2, &b2);
        let pair = e(&a2, &b1) + e(&b1, &a2);
        m - 2 * k - nn + pair
    }

    #[test]
    fn independent_residual_agrees() {
        let quiver = Quiver::preset("d4").unwrap();
        for [a, b, ap, bp] in random_dimension_quadruples(4, 50, 7, 6) {
            let c = shift_constants(&quiver, &a, &b, &ap, &bp).unwrap();
            let conv = |v: &DimVector| v.iter().map(|x| x as i64).collect::<Vec<_>>();
            for l in &c.lambdas {
                let r = residual(&quiver, &conv(&a), &conv(&b), &conv(&ap), &conv(&bp), &conv(&l.lambda.a1));
                assert_eq!(r == 0, l.holds(c.m));
                assert_eq!(r, 0);
            }
        }
    }

    #[test]
    fn fuzz_passes_and_printed_term_fails() {
        for name in ["a2", "kronecker", "jordan", "d4"] {
            let quiver = Quiver::preset(name).unwrap();
            let r = shift_fuzz(&quiver, 100, 42, 20, NTerm::Balanced, Execution::Parallel).unwrap();
            assert!(r.passed(), "{name}");
            let r = shift_fuzz(&quiver, 100, 42, 20, NTerm::Printed, Execution::Parallel).unwrap();
            assert!(r.failures.len() > 50, "{name}: {}", r.failures.len());
        }
    }

    #[test]
    fn fuzz_is_deterministic() {
        let a = random_dimension_quadruples(3, 20, 9, 20);
        assert_eq!(a, random_dimension_quadruples(3, 20, 9, 20));
        assert_ne!(a, random_dimension_quadruples(3, 20, 10, 20));
        for [x, y, xp, yp] in &a {
            assert_eq!(x.checked_add(y).unwrap(), xp.checked_add(yp).unwrap());
            assert!([x, y, xp, yp].iter().all(|v| v.iter().all(|e| e <= 20)));
        }
    }

    #[test]
    fn theorem_on_worked_instance() {
        for q in [2, 3] {
            let (ctx, s1, s2, ..) = a2(q);
            let input = TheoremInput {
                a: s1,
                b: s2,
                alphap: dv(&[0, 1]),
                betap: dv(&[1, 0]),
            };
            let ok: Vec<bool> = VUnit::ALL
                .iter()
                .map(|u| verify_main_theorem(&ctx, &input, &u.value(q)).unwrap().equal)
                .collect();
            assert!(ok.iter().any(|b| *b), "q={q}: {ok:?}");
        }
    }

    #[test]
    fn degenerate_instances_accept_every_unit() {
        let ctx = HallContext::new(Quiver::preset("a2").unwrap(), 2).unwrap();
        let work = degenerate_theorem_instances(&ctx, 2).unwrap();
        assert!(!work.is_empty());
        let r = v_unit_sweep(&[(&ctx, work)], Execution::Sequential).unwrap();
        assert_eq!(r.survivors, VUnit::ALL.to_vec());
        assert!(r.unique().is_err());
    }

    #[test]
    fn v_unit_text() {
        for u in VUnit::ALL {
            assert_eq!(u.to_string().parse::<VUnit>().unwrap(), u);
        }
    }
}
