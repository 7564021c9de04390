//! Green's formula and the bialgebra property, checked exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{basis_coproduct, basis_product, hall_comultiply, twisted_tensor_multiply, Sign, TensorElement};
use crate::context::{ClassKey, HallContext};
use crate::error::{HallError, Result};
use crate::exec::{map_ordered, Execution};
use crate::quiver::{enumerate_quadruples, DimVector, Quiver};

fn big(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn q_power(q: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        num_traits::pow(base.recip(), e.unsigned_abs() as usize)
    }
}

fn check_compatible(a: &ClassKey, b: &ClassKey, ap: &ClassKey, bp: &ClassKey) -> Result<DimVector> {
    let gamma = a.dim.checked_add(&b.dim)?;
    if gamma != ap.dim.checked_add(&bp.dim)? {
        return Err(HallError::DimensionMismatch(format!(
            "{} + {} ≠ {} + {}",
            a.dim, b.dim, ap.dim, bp.dim
        )));
    }
    Ok(gamma)
}

/// `a_α a_β a_α′ a_β′ Σ_γ a_γ^{-1} g^γ_{αβ} g^γ_{α′β′}`.
pub fn green_lhs(ctx: &HallContext, a: &ClassKey, b: &ClassKey, ap: &ClassKey, bp: &ClassKey) -> Result<BigRational> {
    check_compatible(a, b, ap, bp)?;
    for k in [a, b, ap, bp] {
        ctx.check_key(k)?;
    }
    let gamma = a.dim.checked_add(&b.dim)?;
    let first = ctx.products(&a.dim, &b.dim)?;
    let second = ctx.products(&ap.dim, &bp.dim)?;
    let g2: BTreeMap<usize, u64> = second
        .get(&(ap.id, bp.id))
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    let mut sum = BigRational::zero();
    for &(c, g1) in first.get(&(a.id, b.id)).map(Vec::as_slice).unwrap_or(&[]) {
        if let Some(&g2) = g2.get(&c) {
            let a_c = ctx.aut(&ClassKey::new(gamma.clone(), c))?;
            sum += BigRational::new(BigInt::from(g1) * BigInt::from(g2), BigInt::from(a_c));
        }
    }
    let scale = big(ctx.aut(a)?) * big(ctx.aut(b)?) * big(ctx.aut(ap)?) * big(ctx.aut(bp)?);
    let lhs = scale * sum;
    assert!(!lhs.is_negative(), "negative Green lhs");
    Ok(lhs)
}

/// `Σ q^{ext¹(α₁,β₂) − hom(α₁,β₂)} g^α_{α₁α₂} g^β_{β₁β₂} g^{α′}_{α₁β₁} g^{β′}_{α₂β₂} a_{α₁}a_{α₂}a_{β₁}a_{β₂}`
/// over the quadruple set and all classes in each grade.
pub fn green_rhs(ctx: &HallContext, a: &ClassKey, b: &ClassKey, ap: &ClassKey, bp: &ClassKey) -> Result<BigRational> {
    check_compatible(a, b, ap, bp)?;
    for k in [a, b, ap, bp] {
        ctx.check_key(k)?;
    }
    let q = ctx.q();
    let mut total = BigRational::zero();
    for lam in enumerate_quadruples(&a.dim, &b.dim, &ap.dim, &bp.dim)? {
        let split_a = ctx.splitting(a, &lam.a2)?;
        if split_a.is_empty() {
            continue;
        }
        let split_b = ctx.splitting(b, &lam.b2)?;
        if split_b.is_empty() {
            continue;
        }
        let split_ap = ctx.splitting(ap, &lam.b1)?;
        let split_bp = ctx.splitting(bp, &lam.b2)?;
        for (&(a1, a2), &g_a) in split_a.iter() {
            for (&(b1, b2), &g_b) in split_b.iter() {
                let Some(&g_ap) = split_ap.get(&(a1, b1)) else { continue };
                let Some(&g_bp) = split_bp.get(&(a2, b2)) else { continue };
                let k_a1 = ClassKey::new(lam.a1.clone(), a1);
                let k_a2 = ClassKey::new(lam.a2.clone(), a2);
                let k_b1 = ClassKey::new(lam.b1.clone(), b1);
                let k_b2 = ClassKey::new(lam.b2.clone(), b2);
                let e = ctx.ext1_dim(&k_a1, &k_b2)? as i64 - ctx.hom_dim(&k_a1, &k_b2)? as i64;
                let auts = big(ctx.aut(&k_a1)?) * big(ctx.aut(&k_a2)?) * big(ctx.aut(&k_b1)?) * big(ctx.aut(&k_b2)?);
                let gs = big(g_a as u128 * g_b as u128) * big(g_ap as u128 * g_bp as u128);
                let term = q_power(q, e) * gs * auts;
                assert!(!term.is_negative(), "negative Green rhs term");
                total += term;
            }
        }
    }
    Ok(total)
}

/// One Green instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenInstance {
    pub a: ClassKey,
    pub b: ClassKey,
    pub ap: ClassKey,
    pub bp: ClassKey,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: BigRational,
    pub equal: bool,
}

pub(crate) fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::scalar::SqrtQScalar::rational_text(r))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenReport {
    pub quiver: Quiver,
    pub q: u64,
    pub bound: u32,
    pub instances: Vec<GreenInstance>,
    pub all_equal: bool,
    /// Instances with `β = β′ = ∅` all gave `lhs = rhs = a_α·[α = α′]`.
    pub degenerate_ok: bool,
}

impl GreenReport {
    pub fn failures(&self) -> impl Iterator<Item = &GreenInstance> {
        self.instances.iter().filter(|i| !i.equal)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("alpha\tbeta\talphap\tbetap\tlhs\trhs\tequal\n");
        for i in &self.instances {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                i.a,
                i.b,
                i.ap,
                i.bp,
                crate::scalar::SqrtQScalar::rational_text(&i.lhs),
                crate::scalar::SqrtQScalar::rational_text(&i.rhs),
                i.equal
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// All class quadruples `(α, β, α′, β′)` with `dim α + dim β = dim α′ + dim β′`
/// of total dimension at most `bound`: grades first, then classes.
pub fn green_instances(ctx: &HallContext, bound: u32) -> Result<Vec<[ClassKey; 4]>> {
    let n = ctx.quiver().vertex_count();
    let mut out = Vec::new();
    for total in 0..=bound {
        for gamma in DimVector::with_total(n, total) {
            let splits = gamma.sub_vectors();
            for da in &splits {
                let db = gamma.checked_sub(da)?;
                for dap in &splits {
                    let dbp = gamma.checked_sub(dap)?;
                    for a in ctx.classes(da)? {
                        for b in ctx.classes(&db)? {
                            for ap in ctx.classes(dap)? {
                                for bp in ctx.classes(&dbp)? {
                                    out.push([a.clone(), b.clone(), ap.clone(), bp]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn check_green(ctx: &HallContext, a: &ClassKey, b: &ClassKey, ap: &ClassKey, bp: &ClassKey) -> Result<GreenInstance> {
    let lhs = green_lhs(ctx, a, b, ap, bp)?;
    let rhs = green_rhs(ctx, a, b, ap, bp)?;
    Ok(GreenInstance {
        a: a.clone(),
        b: b.clone(),
        ap: ap.clone(),
        bp: bp.clone(),
        equal: lhs == rhs,
        lhs,
        rhs,
    })
}

pub fn sweep_green(ctx: &HallContext, bound: u32, exec: Execution) -> Result<GreenReport> {
    let work = green_instances(ctx, bound)?;
    let results = map_ordered(exec, &work, |[a, b, ap, bp]| check_green(ctx, a, b, ap, bp));
    let instances = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut degenerate_ok = true;
    for i in &instances {
        if i.b.dim.is_zero() && i.bp.dim.is_zero() {
            let expect = if i.a == i.ap { big(ctx.aut(&i.a)?) } else { BigRational::zero() };
            degenerate_ok &= i.lhs == expect && i.rhs == expect;
        }
    }
    Ok(GreenReport {
        quiver: ctx.quiver().clone(),
        q: ctx.q(),
        bound,
        all_equal: instances.iter().all(|i| i.equal),
        instances,
        degenerate_ok,
    })
}

/// `Δ(u_x ∗ u_y) − Δ(u_x) ·_sign Δ(u_y)`.
pub fn bialgebra_defect(ctx: &HallContext, x: &ClassKey, y: &ClassKey, sign: Sign) -> Result<TensorElement> {
    let lhs = hall_comultiply(ctx, &basis_product(ctx, x, y)?)?;
    let rhs = twisted_tensor_multiply(ctx, &basis_coproduct(ctx, x)?, &basis_coproduct(ctx, y)?, sign)?;
    Ok(lhs.sub(&rhs))
}

/// Outcome of the twist-sign sweep over one or more contexts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistSignReport {
    pub pairs: usize,
    /// For each sign, the number of pairs with a nonzero defect.
    pub failures: BTreeMap<Sign, usize>,
    pub survivors: Vec<Sign>,
}

impl TwistSignReport {
    /// The unique sign with no failures.
    pub fn sign(&self) -> Result<Sign> {
        match self.survivors.as_slice() {
            [s] => Ok(*s),
            other => Err(HallError::NoConsistentConvention(format!(
                "{} twist signs survive ({:?})",
                other.len(),
                other
            ))),
        }
    }
}

/// All basis pairs `(x, y)` with `|x| + |y| ≤ bound`.
pub fn product_pairs(ctx: &HallContext, bound: u32) -> Result<Vec<(ClassKey, ClassKey)>> {
    let classes = ctx.classes_up_to(bound)?;
    let mut out = Vec::new();
    for x in &classes {
        for y in &classes {
            if x.dim.total() + y.dim.total() <= bound {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(out)
}

/// Evaluates the bialgebra defect for both signs on every pair within `bound`
/// in every context.
pub fn twist_sign_sweep(contexts: &[&HallContext], bound: u32, exec: Execution) -> Result<TwistSignReport> {
    let mut failures: BTreeMap<Sign, usize> = Sign::BOTH.iter().map(|&s| (s, 0)).collect();
    let mut pairs = 0;
    for ctx in contexts {
        let work = product_pairs(ctx, bound)?;
        pairs += work.len();
        let zero = map_ordered(exec, &work, |(x, y)| -> Result<[bool; 2]> {
            Ok([
                bialgebra_defect(ctx, x, y, Sign::Plus)?.is_zero(),
                bialgebra_defect(ctx, x, y, Sign::Minus)?.is_zero(),
            ])
        });
        for z in zero {
            let z = z?;
            for (k, s) in Sign::BOTH.iter().enumerate() {
                if !z[k] {
                    *failures.get_mut(s).expect("both signs present") += 1;
                }
            }
        }
    }
    let survivors = Sign::BOTH.iter().copied().filter(|s| failures[s] == 0).collect();
    Ok(TwistSignReport {
        pairs,
        failures,
        survivors,
    })
}

/// The unique sign making `Δ` multiplicative across all contexts.
pub fn determine_twist_sign(contexts: &[&HallContext], bound: u32, exec: Execution) -> Result<Sign> {
    twist_sign_sweep(contexts, bound, exec)?.sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[u32]) -> DimVector {
        DimVector::new(v.to_vec())
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn a2_worked_instance() {
        for q in [2u64, 3] {
            let ctx = HallContext::new(Quiver::preset("a2").unwrap(), q).unwrap();
            let s1 = ctx.classify_matrices(&dv(&[1, 0]), &[vec![]]).unwrap();
            let s2 = ctx.classify_matrices(&dv(&[0, 1]), &[vec![]]).unwrap();
            let expect = int((q as i64 - 1).pow(2));
            assert_eq!(green_lhs(&ctx, &s1, &s2, &s2, &s1).unwrap(), expect);
            assert_eq!(green_rhs(&ctx, &s1, &s2, &s2, &s1).unwrap(), expect);
        }
    }

    #[test]
    fn empty_part_degeneration() {
        let ctx = HallContext::new(Quiver::preset("jordan").unwrap(), 2).unwrap();
        let e = ctx.empty_class();
        for a in ctx.classes(&dv(&[2])).unwrap() {
            let aut = int(ctx.aut(&a).unwrap() as i64);
            assert_eq!(green_lhs(&ctx, &a, &e, &a, &e).unwrap(), aut);
            assert_eq!(green_rhs(&ctx, &a, &e, &a, &e).unwrap(), aut);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ctx = HallContext::new(Quiver::preset("a2").unwrap(), 2).unwrap();
        let s1 = ClassKey::new(dv(&[1, 0]), 0);
        let e = ctx.empty_class();
        assert!(green_lhs(&ctx, &s1, &e, &e, &e).is_err());
    }

    #[test]
    fn small_sweeps_agree() {
        for (name, q) in [("a2", 2), ("jordan", 2), ("kronecker", 2)] {
            let ctx = HallContext::new(Quiver::preset(name).unwrap(), q).unwrap();
            let r = sweep_green(&ctx, 2, Execution::Sequential).unwrap();
            assert!(r.all_equal, "{name}: {:?}", r.failures().next());
            assert!(r.degenerate_ok);
        }
    }

    #[test]
    fn unit_pairs_have_no_defect() {
        let ctx = HallContext::new(Quiver::preset("a2").unwrap(), 2).unwrap();
        let e = ctx.empty_class();
        for x in ctx.classes_up_to(2).unwrap() {
            for s in Sign::BOTH {
                assert!(bialgebra_defect(&ctx, &e, &x, s).unwrap().is_zero());
                assert!(bialgebra_defect(&ctx, &x, &e, s).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn exactly_one_sign_on_simple_pair() {
        let ctx = HallContext::new(Quiver::preset("a2").unwrap(), 2).unwrap();
        let s1 = ClassKey::new(dv(&[1, 0]), 0);
        let s2 = ClassKey::new(dv(&[0, 1]), 0);
        let zero: Vec<bool> = Sign::BOTH
            .iter()
            .map(|&s| bialgebra_defect(&ctx, &s1, &s2, s).unwrap().is_zero())
            .collect();
        assert_eq!(zero.iter().filter(|z| **z).count(), 1, "{zero:?}");
    }
}
