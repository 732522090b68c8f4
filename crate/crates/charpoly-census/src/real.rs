//! Fixed-point arbitrary-precision reals.
//!
//! The asymptotic constant mixes pi, square roots, logarithms of quadratic
//! surds, zeta values and half-integer gamma values. Everything here is
//! carried as a binary fixed-point number with 320 fractional bits (about
//! 96 decimal digits), far beyond the 50-digit internal target, so every
//! 12-digit printed value and every 1e-12 acceptance tolerance has orders
//! of magnitude of headroom. Elementary functions are implemented with
//! explicit truncation control:
//!
//! - `sqrt` is a floor integer square root on the scaled mantissa (error
//!   below one ulp);
//! - `ln` reduces the argument to [1, 2) by powers of two and sums the
//!   atanh series, whose ratio is at most 1/9 after reduction;
//! - `pi` uses Machin's formula with exact rational partial sums;
//! - `zeta_int` runs Euler-Maclaurin entirely over exact rationals with
//!   N = 100 nodes and 25 Bernoulli correction terms (truncation below
//!   1e-80 for the exponents used here);
//! - half-integer gamma values come from the closed forms
//!   `Gamma(k) = (k-1)!` and `Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::qfield::isqrt;

/// Fractional bits carried by every [`Real`].
pub const FRAC_BITS: u32 = 320;

/// Fixed-point real: `mantissa / 2^FRAC_BITS`.
#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    mant: BigInt,
}

impl Real {
    pub fn zero() -> Self {
        Real {
            mant: BigInt::zero(),
        }
    }

    pub fn one() -> Self {
        Real {
            mant: BigInt::one() << FRAC_BITS,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Real {
            mant: BigInt::from(v) << FRAC_BITS,
        }
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Real {
            mant: v.clone() << FRAC_BITS,
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Real {
            mant: (r.numer() << FRAC_BITS) / r.denom(),
        }
    }

    /// Parses a plain decimal literal (sign, digits, optional fraction).
    pub fn from_decimal_str(s: &str) -> Option<Self> {
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let digits: String = format!("{int_part}{frac_part}");
        let num: BigInt = digits.parse().ok()?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let rat = BigRational::new(num * sign, denom);
        Some(Real::from_rational(&rat))
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn abs(&self) -> Self {
        Real {
            mant: self.mant.abs(),
        }
    }

    pub fn powi(&self, mut e: u32) -> Self {
        let mut acc = Real::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Floor square root; input must be nonnegative.
    pub fn sqrt(&self) -> Self {
        assert!(!self.mant.is_negative(), "sqrt of negative value");
        Real {
            mant: isqrt(&(&self.mant << FRAC_BITS)),
        }
    }

    /// Natural logarithm; input must be positive.
    pub fn ln(&self) -> Self {
        assert!(self.mant.is_positive(), "ln of nonpositive value");
        // normalize to m in [1, 2): self = m * 2^k
        let bits = self.mant.bits() as i64 - 1 - FRAC_BITS as i64;
        let m = if bits >= 0 {
            Real {
                mant: &self.mant >> bits as u32,
            }
        } else {
            Real {
                mant: &self.mant << (-bits) as u32,
            }
        };
        let ln_m = ln_atanh_series(&m);
        if bits == 0 {
            ln_m
        } else {
            &ln_m + &(&ln2() * &Real::from_int(bits))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let num = self.mant.to_f64().unwrap_or(f64::NAN);
        num / 2f64.powi(FRAC_BITS as i32)
    }

    /// Decimal rendering with the requested number of fractional digits
    /// (round-to-nearest).
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.mant.is_negative();
        let mag = self.mant.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        // round((mag * 10^digits) / 2^FRAC)
        let scaled = (&mag * &scale + (BigInt::one() << (FRAC_BITS - 1))) >> FRAC_BITS;
        let s = scaled.to_string();
        let (int_part, frac_part) = if s.len() > digits {
            let (a, b) = s.split_at(s.len() - digits);
            (a.to_string(), b.to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", s, width = digits))
        };
        let sign = if neg && (int_part != "0" || frac_part.chars().any(|c| c != '0')) {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self.to_decimal(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(15))
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.mant.cmp(&other.mant))
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real {
            mant: &self.mant + &rhs.mant,
        }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real {
            mant: &self.mant - &rhs.mant,
        }
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        Real {
            mant: (&self.mant * &rhs.mant) >> FRAC_BITS,
        }
    }
}

impl Div for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        assert!(!rhs.mant.is_zero(), "division by zero");
        Real {
            mant: (&self.mant << FRAC_BITS) / &rhs.mant,
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -self.mant.clone(),
        }
    }
}

/// `ln(m)` for `m` in [1, 2) via `2*atanh((m-1)/(m+1))`.
fn ln_atanh_series(m: &Real) -> Real {
    let one = Real::one();
    let t = &(m - &one) / &(m + &one); // in [0, 1/3)
    let t2 = &t * &t;
    let mut term = t.clone();
    let mut acc = Real::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        let denom = Real::from_int((2 * k + 1) as i64);
        acc = &acc + &(&term / &denom);
        term = &term * &t2;
        k += 1;
        assert!(k < 2000, "atanh series failed to converge");
    }
    &acc + &acc
}

/// `ln 2` from the same series at m = 2 (t = 1/3).
pub fn ln2() -> Real {
    ln_atanh_series(&Real::from_int(2))
}

/// Machin's formula: `pi = 16 atan(1/5) - 4 atan(1/239)`.
pub fn pi() -> Real {
    let a5 = atan_recip(5);
    let a239 = atan_recip(239);
    &(&Real::from_int(16) * &a5) - &(&Real::from_int(4) * &a239)
}

/// `atan(1/k)` by the alternating series, summed in fixed point.
fn atan_recip(k: i64) -> Real {
    // term_i = (-1)^i / ((2i+1) k^(2i+1))
    let k2 = BigInt::from(k * k);
    let mut power = BigInt::from(k); // k^(2i+1)
    let mut acc = Real::zero();
    let mut i = 0u32;
    loop {
        let denom = &power * BigInt::from(2 * i as i64 + 1);
        let term = Real {
            mant: (BigInt::one() << FRAC_BITS) / &denom,
        };
        if term.is_zero() {
            break;
        }
        if i % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
        power *= &k2;
        i += 1;
        assert!(i < 2000, "atan series failed to converge");
    }
    acc
}

/// Bernoulli numbers `B_0 .. B_n` (B_1 = -1/2), exact.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (k, bk) in b.iter().enumerate() {
            acc += bk * BigRational::from(binom.clone());
            // C(m+1, k+1) = C(m+1, k) * (m+1-k) / (k+1)
            binom = binom * BigInt::from((m + 1 - k) as u64) / BigInt::from((k + 1) as u64);
        }
        let m1 = BigRational::from(BigInt::from((m + 1) as u64));
        b.push(-acc / m1);
    }
    b
}

/// `zeta(s)` for integer `s >= 2` by Euler-Maclaurin over exact rationals.
pub fn zeta_int(s: u32) -> Real {
    assert!(s >= 2, "zeta_int needs s >= 2");
    let n: i64 = 100; // direct nodes
    let m = 25; // Bernoulli correction pairs
    let mut acc = BigRational::zero();
    for k in 1..n {
        acc += BigRational::new(BigInt::one(), BigInt::from(k).pow(s));
    }
    let nb = BigInt::from(n);
    // N^{-s}/2 + N^{1-s}/(s-1)
    acc += BigRational::new(BigInt::one(), nb.pow(s) * BigInt::from(2));
    acc += BigRational::new(BigInt::one(), nb.pow(s - 1) * BigInt::from(s as i64 - 1));
    // sum_j B_{2j}/(2j)! * (s)_{2j-1} * N^{-s-2j+1}
    let bern = bernoulli(2 * m);
    let mut rising = BigRational::from(BigInt::from(s as i64)); // (s)_1
    let mut fact = BigRational::from(BigInt::from(2)); // (2j)! at j=1
    for j in 1..=m {
        let term = &bern[2 * j] / &fact
            * &rising
            * BigRational::new(BigInt::one(), nb.pow(s + 2 * j as u32 - 1));
        acc += term;
        // advance (s)_{2j-1} -> (s)_{2j+1} and (2j)! -> (2j+2)!
        let sj = s as i64 + 2 * j as i64;
        rising *= BigRational::from(BigInt::from(sj - 1)) * BigRational::from(BigInt::from(sj));
        let f = 2 * j as i64;
        fact *= BigRational::from(BigInt::from(f + 1)) * BigRational::from(BigInt::from(f + 2));
    }
    Real::from_rational(&acc)
}

/// `Gamma(k/2)` for integer `k >= 1`, by the closed half-integer forms.
pub fn gamma_half(k: u32) -> Real {
    assert!(k >= 1);
    if k % 2 == 0 {
        // Gamma(k/2) = (k/2 - 1)!
        let mut acc = BigInt::one();
        for i in 2..(k / 2) {
            acc *= BigInt::from(i);
        }
        Real::from_bigint(&acc)
    } else {
        // Gamma(1/2 + j) = (2j)! / (4^j j!) * sqrt(pi), with j = (k-1)/2
        let j = (k - 1) / 2;
        let mut num = BigInt::one();
        for i in 2..=(2 * j) {
            num *= BigInt::from(i);
        }
        let mut den = BigInt::one();
        for i in 2..=j {
            den *= BigInt::from(i);
        }
        den <<= 2 * j; // times 4^j
        let rat = BigRational::new(num, den);
        &Real::from_rational(&rat) * &pi().sqrt()
    }
}
