//! Exact arithmetic in the real quadratic extension `Q(sqrt(c))`, `c > 0`.
//!
//! The real embedding of an indefinite quaternion algebra lands its order
//! basis in matrices with entries `r + s*sqrt(c)`. Carrying those entries
//! exactly keeps the Gram matrix and every census norm comparison free of
//! rounding. Square roots leave the field, so range endpoints that need
//! them are produced as certified outward-rounded rationals instead.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// `rat + irr * sqrt(c)`; the radicand lives in the surrounding context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadVal {
    pub rat: BigRational,
    pub irr: BigRational,
}

impl QuadVal {
    pub fn zero() -> Self {
        Self {
            rat: BigRational::zero(),
            irr: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self {
            rat: r,
            irr: BigRational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(v)))
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            rat: &self.rat + &other.rat,
            irr: &self.irr + &other.irr,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            rat: &self.rat - &other.rat,
            irr: &self.irr - &other.irr,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            rat: -self.rat.clone(),
            irr: -self.irr.clone(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            rat: &self.rat * k,
            irr: &self.irr * k,
        }
    }
}

impl fmt::Display for QuadVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.irr.is_zero() {
            write!(f, "{}", self.rat)
        } else {
            write!(f, "{} + {}*sqrt", self.rat, self.irr)
        }
    }
}

/// Context fixing the radicand `c >= 0` (an integer; `c = 0` or `1`
/// degenerates to rational arithmetic).
#[derive(Clone, Debug)]
pub struct QuadField {
    pub c: BigInt,
}

impl QuadField {
    pub fn new(c: BigInt) -> Self {
        assert!(!c.is_negative(), "radicand must be nonnegative");
        Self { c }
    }

    pub fn rational() -> Self {
        Self { c: BigInt::zero() }
    }

    pub fn mul(&self, a: &QuadVal, b: &QuadVal) -> QuadVal {
        let c = BigRational::from(self.c.clone());
        QuadVal {
            rat: &a.rat * &b.rat + (&a.irr * &b.irr) * &c,
            irr: &a.rat * &b.irr + &a.irr * &b.rat,
        }
    }

    pub fn div(&self, a: &QuadVal, b: &QuadVal) -> QuadVal {
        // multiply by the conjugate; the norm rat^2 - c*irr^2 is nonzero for
        // nonzero b because c is not a rational square in the cases we build
        // (and for c square both components reduce to rationals anyway).
        let c = BigRational::from(self.c.clone());
        let norm = &b.rat * &b.rat - (&b.irr * &b.irr) * &c;
        assert!(!norm.is_zero(), "division by zero in Q(sqrt(c))");
        let conj = QuadVal {
            rat: b.rat.clone(),
            irr: -b.irr.clone(),
        };
        let num = self.mul(a, &conj);
        QuadVal {
            rat: num.rat / &norm,
            irr: num.irr / &norm,
        }
    }

    /// Exact sign of `rat + irr*sqrt(c)`.
    pub fn sign(&self, v: &QuadVal) -> Ordering {
        let c = BigRational::from(self.c.clone());
        if v.irr.is_zero() {
            return v.rat.cmp(&BigRational::zero());
        }
        if v.rat.is_zero() {
            if self.c.is_zero() {
                return Ordering::Equal;
            }
            return v.irr.cmp(&BigRational::zero());
        }
        let rs = v.rat.is_positive();
        let is = v.irr.is_positive();
        if rs == is {
            return if rs { Ordering::Greater } else { Ordering::Less };
        }
        // opposite signs: compare rat^2 against c*irr^2
        let r2 = &v.rat * &v.rat;
        let ci2 = (&v.irr * &v.irr) * &c;
        match r2.cmp(&ci2) {
            Ordering::Equal => Ordering::Equal,
            Ordering::Greater => {
                if rs {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            Ordering::Less => {
                if is {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    pub fn le(&self, a: &QuadVal, b: &QuadVal) -> bool {
        self.sign(&a.sub(b)) != Ordering::Greater
    }

    pub fn is_positive(&self, v: &QuadVal) -> bool {
        self.sign(v) == Ordering::Greater
    }

    /// Rational enclosure `[lo, hi]` of the value, tight to `2^-bits`.
    pub fn rational_bounds(&self, v: &QuadVal, bits: u32) -> (BigRational, BigRational) {
        if v.irr.is_zero() {
            return (v.rat.clone(), v.rat.clone());
        }
        let (slo, shi) = sqrt_bounds_int(&self.c, bits);
        let (a, b) = (&v.rat + &v.irr * &slo, &v.rat + &v.irr * &shi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn to_f64(&self, v: &QuadVal) -> f64 {
        let (lo, hi) = self.rational_bounds(v, 80);
        let mid = (lo + hi) / BigRational::from(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest integer `<= v`.
    pub fn floor(&self, v: &QuadVal) -> BigInt {
        if v.irr.is_zero() {
            return v.rat.floor().to_integer();
        }
        let (lo, hi) = self.rational_bounds(v, 128);
        let fl = lo.floor().to_integer();
        let fh = hi.floor().to_integer();
        if fl == fh {
            return fl;
        }
        // the enclosure straddles an integer; decide exactly
        let cand = QuadVal::from_rational(BigRational::from(fh.clone()));
        if self.le(&cand, v) {
            fh
        } else {
            fl
        }
    }

    pub fn ceil(&self, v: &QuadVal) -> BigInt {
        -self.floor(&v.neg())
    }
}

/// Floor square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    n.sqrt()
}

/// Certified rational bounds `lo <= sqrt(n) <= hi` with `hi - lo <= 2^-bits`.
pub fn sqrt_bounds_int(n: &BigInt, bits: u32) -> (BigRational, BigRational) {
    let scale = BigInt::one() << (2 * bits);
    let r = isqrt(&(n * &scale));
    let denom = BigInt::one() << bits;
    (
        BigRational::new(r.clone(), denom.clone()),
        BigRational::new(r + 1, denom),
    )
}

/// Certified rational bounds on the square root of a nonnegative rational.
pub fn sqrt_bounds_rat(v: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!v.is_negative());
    // sqrt(p/q) = sqrt(p*q)/q
    let p = v.numer();
    let q = v.denom();
    let (lo, hi) = sqrt_bounds_int(&(p * q), bits);
    let qr = BigRational::from(q.clone());
    (lo / &qr, hi / &qr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn arithmetic_and_sign() {
        let f = QuadField::new(BigInt::from(3));
        // (1 + sqrt3)(1 - sqrt3) = -2
        let a = QuadVal {
            rat: rat(1, 1),
            irr: rat(1, 1),
        };
        let b = QuadVal {
            rat: rat(1, 1),
            irr: rat(-1, 1),
        };
        let p = f.mul(&a, &b);
        assert_eq!(p.rat, rat(-2, 1));
        assert!(p.irr.is_zero());
        // 2 - sqrt3 > 0, 3 - 2 sqrt3 < 0
        assert_eq!(
            f.sign(&QuadVal {
                rat: rat(2, 1),
                irr: rat(-1, 1)
            }),
            Ordering::Greater
        );
        assert_eq!(
            f.sign(&QuadVal {
                rat: rat(3, 1),
                irr: rat(-2, 1)
            }),
            Ordering::Less
        );
    }

    #[test]
    fn division_round_trip() {
        let f = QuadField::new(BigInt::from(5));
        let a = QuadVal {
            rat: rat(7, 3),
            irr: rat(-2, 5),
        };
        let b = QuadVal {
            rat: rat(1, 2),
            irr: rat(4, 1),
        };
        let q = f.div(&a, &b);
        let back = f.mul(&q, &b);
        assert_eq!(back, a);
    }

    #[test]
    fn floor_and_bounds() {
        let f = QuadField::new(BigInt::from(2));
        let v = QuadVal {
            rat: rat(0, 1),
            irr: rat(1, 1),
        }; // sqrt(2)
        assert_eq!(f.floor(&v), BigInt::from(1));
        assert_eq!(f.ceil(&v), BigInt::from(2));
        let three = QuadVal::from_int(3);
        assert_eq!(f.floor(&three), BigInt::from(3));
        assert_eq!(f.ceil(&three), BigInt::from(3));
        let neg = v.neg();
        assert_eq!(f.floor(&neg), BigInt::from(-2));
        let (lo, hi) = f.rational_bounds(&v, 100);
        assert!(lo < hi);
        let two = rat(2, 1);
        assert!(&lo * &lo <= two && two <= &hi * &hi);
    }

    #[test]
    fn sqrt_bounds_rational() {
        let (lo, hi) = sqrt_bounds_rat(&rat(9, 4), 64);
        assert!(lo <= rat(3, 2) && rat(3, 2) <= hi);
        let diff = hi - lo;
        assert!(diff < rat(1, 1_000_000_000));
    }
}
