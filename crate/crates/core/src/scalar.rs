//! Exact scalars `a + b√q` with rational `a`, `b`.
//!
//! When `q` is a perfect square the `√q` part is folded into `a`, so
//! the representation stays unique and every nonzero value invertible.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqrtQScalar {
    a: BigRational,
    b: BigRational,
    q: u64,
}

fn exact_sqrt(q: u64) -> Option<u64> {
    let r = q.isqrt();
    (r * r == q).then_some(r)
}

impl SqrtQScalar {
    pub fn new(a: BigRational, b: BigRational, q: u64) -> Self {
        assert!(q >= 2, "scalar ring needs q ≥ 2");
        match exact_sqrt(q) {
            Some(r) if !b.is_zero() => SqrtQScalar {
                a: a + b * BigRational::from_integer(BigInt::from(r)),
                b: BigRational::zero(),
                q,
            },
            _ => SqrtQScalar { a, b, q },
        }
    }

    pub fn zero(q: u64) -> Self {
        SqrtQScalar::new(BigRational::zero(), BigRational::zero(), q)
    }

    pub fn one(q: u64) -> Self {
        SqrtQScalar::from_integer(1, q)
    }

    pub fn from_integer(n: i64, q: u64) -> Self {
        SqrtQScalar::new(BigRational::from_integer(n.into()), BigRational::zero(), q)
    }

    pub fn from_bigint(n: BigInt, q: u64) -> Self {
        SqrtQScalar::new(BigRational::from_integer(n), BigRational::zero(), q)
    }

    pub fn from_rational(r: BigRational, q: u64) -> Self {
        SqrtQScalar::new(r, BigRational::zero(), q)
    }

    /// `v_q = √q`.
    pub fn sqrt_q(q: u64) -> Self {
        SqrtQScalar::new(BigRational::zero(), BigRational::one(), q)
    }

    /// `v_q^n` for any integer `n`.
    pub fn v_pow(n: i64, q: u64) -> Self {
        SqrtQScalar::sqrt_q(q).pow(n)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The rational value, if the `√q` part vanishes.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    /// `a² − b²q`.
    pub fn norm(&self) -> BigRational {
        let q = BigRational::from_integer(BigInt::from(self.q));
        &self.a * &self.a - &self.b * &self.b * q
    }

    pub fn conjugate(&self) -> Self {
        SqrtQScalar::new(self.a.clone(), -self.b.clone(), self.q)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        debug_assert!(!n.is_zero(), "nonzero element with zero norm");
        Some(SqrtQScalar::new(&self.a / &n, -(&self.b / &n), self.q))
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 {
            self.inv().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut k = n.unsigned_abs();
        let mut acc = SqrtQScalar::one(self.q);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        SqrtQScalar::new(&self.a * r, &self.b * r, self.q)
    }

    /// `p/q` text for a rational, `p` alone for integers.
    pub fn rational_text(r: &BigRational) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.q, other.q, "scalars over different q");
    }
}

impl fmt::Display for SqrtQScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = SqrtQScalar::rational_text(&self.a);
        if self.b.is_zero() {
            return write!(f, "{a}");
        }
        let b = SqrtQScalar::rational_text(&self.b.abs());
        let sign = if self.b.is_negative() { "-" } else { "+" };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{b}√{}", self.q)
        } else {
            write!(f, "{a} {sign} {b}√{}", self.q)
        }
    }
}

impl<'a> Add<&'a SqrtQScalar> for &'a SqrtQScalar {
    type Output = SqrtQScalar;
    fn add(self, rhs: &SqrtQScalar) -> SqrtQScalar {
        self.check(rhs);
        SqrtQScalar {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            q: self.q,
        }
    }
}

impl<'a> Sub<&'a SqrtQScalar> for &'a SqrtQScalar {
    type Output = SqrtQScalar;
    fn sub(self, rhs: &SqrtQScalar) -> SqrtQScalar {
        self.check(rhs);
        SqrtQScalar {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            q: self.q,
        }
    }
}

impl<'a> Mul<&'a SqrtQScalar> for &'a SqrtQScalar {
    type Output = SqrtQScalar;
    fn mul(self, rhs: &SqrtQScalar) -> SqrtQScalar {
        self.check(rhs);
        let q = BigRational::from_integer(BigInt::from(self.q));
        SqrtQScalar {
            a: &self.a * &rhs.a + &self.b * &rhs.b * q,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
            q: self.q,
        }
    }
}

impl Neg for &SqrtQScalar {
    type Output = SqrtQScalar;
    fn neg(self) -> SqrtQScalar {
        SqrtQScalar {
            a: -self.a.clone(),
            b: -self.b.clone(),
            q: self.q,
        }
    }
}

impl Add for SqrtQScalar {
    type Output = SqrtQScalar;
    fn add(self, rhs: SqrtQScalar) -> SqrtQScalar {
        &self + &rhs
    }
}

impl Sub for SqrtQScalar {
    type Output = SqrtQScalar;
    fn sub(self, rhs: SqrtQScalar) -> SqrtQScalar {
        &self - &rhs
    }
}

impl Mul for SqrtQScalar {
    type Output = SqrtQScalar;
    fn mul(self, rhs: SqrtQScalar) -> SqrtQScalar {
        &self * &rhs
    }
}

impl Neg for SqrtQScalar {
    type Output = SqrtQScalar;
    fn neg(self) -> SqrtQScalar {
        -&self
    }
}
