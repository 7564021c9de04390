//! Finite fields `GF(p^e)` with table-driven arithmetic.
//!
//! Elements are the integers `0..q`. For `e > 1` the integer `Σ a_k p^k`
//! stands for the residue `Σ a_k x^k` modulo a fixed monic irreducible of
//! degree `e` (the smallest one in the order that compares coefficient lists
//! from the top degree down). Multiplication goes through discrete-log tables;
//! for `q ≤ 256` full addition and multiplication tables are kept as well.

use crate::error::{HallError, Result};

/// Element of a [`GaloisField`].
pub type Elem = u16;

const FULL_TABLE_LIMIT: u32 = 256;
const MAX_Q: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct GaloisField {
    q: u32,
    p: u32,
    e: u32,
    modulus: Vec<u32>,
    primitive: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    add_table: Option<Vec<Elem>>,
    mul_table: Option<Vec<Elem>>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for GaloisField {}

fn factor_prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

/// Dense polynomial arithmetic over `GF(p)`, coefficients low degree first.
mod poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let (mut b, mut k) = (a as u64, p as u64 - 2);
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            k >>= 1;
        }
        r as u32
    }

    /// Remainder of `a` modulo nonzero `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let lead_inv = inv_mod(*m.last().expect("nonzero modulus"), p);
        while r.len() >= m.len() {
            let shift = r.len() - m.len();
            let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
            for (k, &mk) in m.iter().enumerate() {
                let sub = (c as u64 * mk as u64 % p as u64) as u32;
                r[shift + k] = (r[shift + k] + p - sub) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    pub fn from_digits(mut x: u32, p: u32, len: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(len as usize);
        for _ in 0..len {
            out.push(x % p);
            x /= p;
        }
        trim(out)
    }

    pub fn to_digits(a: &[u32], p: u32) -> u32 {
        a.iter().rev().fold(0, |acc, &c| acc * p + c)
    }
}

impl GaloisField {
    /// Builds `GF(q)`; `q` must be a prime power no larger than `2^16`.
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = factor_prime_power(q).ok_or(HallError::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(HallError::FieldTooLarge(q));
        }
        let q = q as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            lowest_irreducible(p, e)
        };
        let mulmod = |a: u32, b: u32| -> u32 {
            let prod = poly::mul(&poly::from_digits(a, p, e), &poly::from_digits(b, p, e), p);
            poly::to_digits(&poly::rem(&prod, &modulus, p), p)
        };
        let order = |g: u32| -> u32 {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = mulmod(x, g);
                k += 1;
            }
            k
        };
        let primitive = (1..q)
            .find(|&g| q == 2 || (g != 1 && order(g) == q - 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0 as Elem; 2 * (q as usize - 1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for k in 0..(q - 1) {
            exp[k as usize] = x as Elem;
            exp[(k + q - 1) as usize] = x as Elem;
            log[x as usize] = k;
            x = mulmod(x, primitive);
        }
        let digit_add = |a: u32, b: u32| -> u32 {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut scale = 1;
            for _ in 0..e {
                out += ((a % p + b % p) % p) * scale;
                a /= p;
                b /= p;
                scale *= p;
            }
            out
        };
        let digit_neg = |a: u32| -> u32 {
            let mut a = a;
            let mut out = 0;
            let mut scale = 1;
            for _ in 0..e {
                out += ((p - a % p) % p) * scale;
                a /= p;
                scale *= p;
            }
            out
        };
        let neg: Vec<Elem> = (0..q).map(|a| digit_neg(a) as Elem).collect();
        let inv: Vec<Elem> = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    exp[((q - 1 - log[a as usize]) % (q - 1)) as usize]
                }
            })
            .collect();
        let mut field = GaloisField {
            q,
            p,
            e,
            modulus,
            primitive: primitive as Elem,
            exp,
            log,
            neg,
            inv,
            add_table: None,
            mul_table: None,
        };
        if q <= FULL_TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0; n * n];
            let mut mul = vec![0; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = digit_add(a, b) as Elem;
                    mul[(a * q + b) as usize] = field.mul_by_log(a as Elem, b as Elem);
                }
            }
            field.add_table = Some(add);
            field.mul_table = Some(mul);
        }
        Ok(field)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Coefficients (low degree first, monic) of the defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> Elem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|x| x as Elem)
    }

    fn mul_by_log(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.add_table {
            Some(t) => t[a as usize * self.q as usize + b as usize],
            None if self.e == 1 => ((a as u32 + b as u32) % self.p) as Elem,
            None if self.p == 2 => a ^ b,
            None => {
                let (mut x, mut y) = (a as u32, b as u32);
                let (mut out, mut scale) = (0u32, 1u32);
                for _ in 0..self.e {
                    out += ((x % self.p + y % self.p) % self.p) * scale;
                    x /= self.p;
                    y /= self.p;
                    scale *= self.p;
                }
                out as Elem
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.mul_table {
            Some(t) => t[a as usize * self.q as usize + b as usize],
            None => self.mul_by_log(a, b),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (a != 0).then(|| self.inv[a as usize])
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let m = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (k % m)) % m) as usize]
    }

    /// The Frobenius `x ↦ x^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }
}

/// Smallest monic irreducible of degree `e` over `GF(p)`, trying candidates by
/// their digit encoding of the non-leading coefficients.
fn lowest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = p.pow(e);
    for c in 0..count {
        let mut f: Vec<u32> = (0..e).map(|k| (c / p.pow(k)) % p).collect();
        f.push(1);
        let irreducible = (1..=e / 2).all(|d| {
            // no monic divisor of degree d
            (0..p.pow(d)).all(|g| {
                let mut div: Vec<u32> = (0..d).map(|k| (g / p.pow(k)) % p).collect();
                div.push(1);
                !poly::rem(&f, &div, p).is_empty()
            })
        });
        if irreducible {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fields() {
        let f2 = GaloisField::new(2).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f4 = GaloisField::new(4).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        // some ω with ω² = ω + 1
        assert!(f4.elements().any(|w| f4.mul(w, w) == f4.add(w, 1)));
        assert!(matches!(GaloisField::new(6), Err(HallError::NotPrimePower(6))));
        assert!(matches!(GaloisField::new(1), Err(HallError::NotPrimePower(1))));
        assert!(matches!(GaloisField::new(131072), Err(HallError::FieldTooLarge(_))));
    }

    #[test]
    fn modulus_choice() {
        // x³ + x + 1 is the first irreducible cubic over GF(2)
        assert_eq!(GaloisField::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        // x² + 1 is irreducible over GF(3)
        assert_eq!(GaloisField::new(9).unwrap().modulus(), &[1, 0, 1]);
    }

    fn check_axioms(f: &GaloisField) {
        let els: Vec<Elem> = f.elements().collect();
        for &a in &els {
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.mul(a, 1), a);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for &b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                for &c in &els {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_exhaustive_up_to_nine() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            check_axioms(&GaloisField::new(q).unwrap());
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = GaloisField::new(625).unwrap();
        let g = f.primitive_element();
        assert_eq!(f.pow(g, 624), 1);
        assert_ne!(f.pow(g, 312), 1);
        for a in [1u16, 7, 99, 600] {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            assert_eq!(f.sub(f.add(a, 17), 17), a);
        }
        let f = GaloisField::new(65536).unwrap();
        assert_eq!(f.add(5, 5), 0);
        assert_eq!(f.mul(12345, f.inv(12345).unwrap()), 1);
    }
}
