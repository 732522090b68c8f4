//! Exact arithmetic on monic integer polynomials.
//!
//! Provides the polynomial-side inputs of the counting problem: resultant
//! discriminants, complete factorization over prime fields (an exhaustive
//! oracle for small moduli, distinct-degree/equal-degree splitting above
//! that), the Dedekind maximality criterion for `Z[x]/(p)` at a prime, a
//! rational-root irreducibility test for degrees 2 and 3, and real root
//! counting by Sturm sequences over exact rationals.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{CensusError, Reason};

/// Monic polynomial over `Z` of degree at least 2, coefficients ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonicIntPolynomial {
    coeffs: Vec<BigInt>,
}

impl MonicIntPolynomial {
    /// Builds from ascending coefficients; the last entry must be exactly 1
    /// and the degree at least 2.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, CensusError> {
        if coeffs.len() < 3 {
            return Err(CensusError::reason(
                Reason::PolynomialDegree,
                format!("degree {} < 2", coeffs.len().saturating_sub(1)),
            ));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(CensusError::reason(
                Reason::PolynomialNotMonic,
                format!("leading coefficient {}", coeffs.last().unwrap()),
            ));
        }
        Ok(Self { coeffs })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(coeffs: &[i64]) -> Result<Self, CensusError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Ascending coefficients, length `degree + 1`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &BigInt {
        &self.coeffs[k]
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Ascending coefficients of the derivative.
    pub fn derivative(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect()
    }

    /// `disc(p) = (-1)^(n(n-1)/2) Res(p, p')`, exact.
    pub fn discriminant(&self) -> BigInt {
        let n = self.degree();
        let res = resultant(&self.coeffs, &self.derivative());
        if (n * (n - 1) / 2) % 2 == 1 {
            -res
        } else {
            res
        }
    }

    /// Rational-root irreducibility test; complete for degrees 2 and 3.
    ///
    /// Degrees >= 4 need an external certificate (see
    /// [`verify_irreducibility_witness`]): a quadratic factor cannot be
    /// excluded by root search alone.
    pub fn is_irreducible_over_q(&self) -> Result<bool, CensusError> {
        let n = self.degree();
        if n > 3 {
            return Err(CensusError::reason(
                Reason::IrreducibilityCertificateRequired,
                format!("degree {n} needs a witness prime"),
            ));
        }
        // A monic integer polynomial of degree 2 or 3 is reducible over Q
        // iff it has an integer root dividing the constant term.
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Ok(false); // root at 0
        }
        for d in divisors(&c0.abs()) {
            for root in [d.clone(), -d] {
                if self.eval(&root).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Number of real roots, by a Sturm chain over exact rationals.
    pub fn real_root_count(&self) -> usize {
        let to_rat = |v: &[BigInt]| -> Vec<BigRational> {
            v.iter().map(|c| BigRational::from(c.clone())).collect()
        };
        let mut chain: Vec<Vec<BigRational>> = vec![to_rat(&self.coeffs), to_rat(&self.derivative())];
        loop {
            let last = &chain[chain.len() - 1];
            let prev = &chain[chain.len() - 2];
            let mut rem = rat_rem(prev, last);
            for c in rem.iter_mut() {
                *c = -c.clone();
            }
            if rem.iter().all(|c| c.is_zero()) {
                break;
            }
            rat_trim(&mut rem);
            chain.push(rem);
        }
        // sign of the chain member at +inf / -inf from leading coefficients
        let sign_at = |poly: &[BigRational], neg: bool| -> i8 {
            let lead = poly.last().unwrap();
            let mut s = if lead.is_negative() { -1i8 } else { 1 };
            if neg && (poly.len() - 1) % 2 == 1 {
                s = -s;
            }
            s
        };
        let variations = |neg: bool| -> usize {
            let signs: Vec<i8> = chain.iter().map(|f| sign_at(f, neg)).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        variations(true) - variations(false)
    }

    /// Dedekind criterion: true iff `Z[x]/(p)` is maximal (integrally
    /// closed) at `q`.
    pub fn dedekind_maximal_at(&self, q: u64) -> Result<bool, CensusError> {
        let fac = self.factor_mod_q(q)?;
        // g = prod g_i, h = prod g_i^(e_i - 1); both lifted to Z with
        // coefficients in [0, q).
        let ring = ModRing::new(q);
        let mut g = vec![1u64];
        let mut h = vec![1u64];
        for (f, e) in &fac.factors {
            g = ring.mul(&g, f);
            for _ in 1..*e {
                h = ring.mul(&h, f);
            }
        }
        // F = (g*h - p)/q over Z
        let gh_lift = poly_mul_z(&lift(&g), &lift(&h));
        let qi = BigInt::from(q);
        let mut f_over_q: Vec<BigInt> = Vec::new();
        let m = gh_lift.len().max(self.coeffs.len());
        for k in 0..m {
            let a = gh_lift.get(k).cloned().unwrap_or_else(BigInt::zero);
            let b = self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero);
            let diff = a - b;
            debug_assert!((&diff % &qi).is_zero());
            f_over_q.push(diff / &qi);
        }
        let fb = ring.reduce_bigint(&f_over_q);
        let d1 = ring.gcd(&fb, &g);
        let d2 = ring.gcd(&d1, &h);
        Ok(d2.len() == 1)
    }

    /// Complete factorization into monic irreducibles over `Z/q`.
    ///
    /// Small moduli go through exhaustive trial division (which doubles as
    /// the oracle for the fast path); larger ones through squarefree +
    /// distinct-degree + equal-degree splitting.
    pub fn factor_mod_q(&self, q: u64) -> Result<FactorizationModQ, CensusError> {
        if !is_prime_u64(q) {
            return Err(CensusError::reason(
                Reason::NotPrime,
                format!("modulus {q} is not prime"),
            ));
        }
        let ring = ModRing::new(q);
        let fbar = ring.reduce_bigint(&self.coeffs);
        let n = self.degree();
        // number of monic polynomials of degree <= n/2 is q + ... + q^(n/2)
        let mut trial_count = 0u128;
        let mut pw = 1u128;
        for _ in 0..(n / 2) {
            pw = pw.saturating_mul(q as u128);
            trial_count = trial_count.saturating_add(pw);
        }
        let factors = if (q as u128).saturating_mul(trial_count) < 1_000_000 {
            ring.factor_exhaustive(&fbar)
        } else {
            ring.factor_ddf_edf(&fbar)
        };
        let fac = FactorizationModQ { q, factors };
        fac.check_consistency(&fbar, &ring, n);
        Ok(fac)
    }
}

impl fmt::Display for MonicIntPolynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(out, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            match k {
                0 => write!(out, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(out, "{mag}")?;
                    }
                    if k == 1 {
                        write!(out, "x")?;
                    } else {
                        write!(out, "x^{k}")?;
                    }
                }
            }
        }
        if first {
            write!(out, "0")?;
        }
        Ok(())
    }
}

/// Verifies an irreducibility certificate for degree >= 4: checks that the
/// polynomial is irreducible modulo the claimed witness prime.
pub fn verify_irreducibility_witness(
    p: &MonicIntPolynomial,
    witness: u64,
) -> Result<(), CensusError> {
    let fac = p.factor_mod_q(witness)?;
    if fac.is_irreducible() {
        Ok(())
    } else {
        Err(CensusError::reason(
            Reason::ReduciblePolynomial,
            format!("witness prime {witness} does not certify irreducibility"),
        ))
    }
}

/// Factorization of a monic polynomial over `Z/q`: monic irreducible
/// factors (ascending coefficients, canonically sorted) with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationModQ {
    pub q: u64,
    pub factors: Vec<(Vec<u64>, u32)>,
}

impl FactorizationModQ {
    /// `(e_i, f_i)` pairs: multiplicity and residue degree per factor.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.factors
            .iter()
            .map(|(f, e)| (*e, (f.len() - 1) as u32))
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    fn check_consistency(&self, fbar: &[u64], ring: &ModRing, n: usize) {
        let total: usize = self
            .factors
            .iter()
            .map(|(f, e)| (f.len() - 1) * (*e as usize))
            .sum();
        assert_eq!(total, n, "sum of e_i * f_i must equal the degree");
        let mut prod = vec![1u64];
        for (f, e) in &self.factors {
            for _ in 0..*e {
                prod = ring.mul(&prod, f);
            }
        }
        assert_eq!(prod, fbar, "factor product must reduce to p mod q");
        for w in self.factors.windows(2) {
            assert!(w[0].0 != w[1].0, "factors must be pairwise distinct");
        }
    }
}

fn lift(f: &[u64]) -> Vec<BigInt> {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

fn poly_mul_z(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// All positive divisors of `n` (n > 0) by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            small.push(d.clone());
            let e = n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Resultant of two integer polynomials (ascending coefficients) via
/// fraction-free Bareiss elimination on the Sylvester matrix.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let n = a.len() - 1;
    let m = b.len() - 1;
    let size = n + m;
    if size == 0 {
        return BigInt::one();
    }
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for row in 0..m {
        for (k, c) in a.iter().rev().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..n {
        for (k, c) in b.iter().rev().enumerate() {
            mat[m + row][row + k] = c.clone();
        }
    }
    bareiss_det(mat)
}

/// Fraction-free determinant; exact over `Z`.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    if sign < 0 {
        -m[n - 1][n - 1].clone()
    } else {
        m[n - 1][n - 1].clone()
    }
}

fn rat_trim(f: &mut Vec<BigRational>) {
    while f.last().map(|c| c.is_zero()).unwrap_or(false) {
        f.pop();
    }
}

/// Remainder of `a` by `b` over `Q`; `b` nonzero.
fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    rat_trim(&mut r);
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let factor = r.last().unwrap() / &lb;
        let shift = dr - db;
        for (k, c) in b.iter().enumerate() {
            let idx = k + shift;
            let v = &r[idx] - &factor * c;
            r[idx] = v;
        }
        debug_assert!(r[dr].is_zero());
        rat_trim(&mut r);
    }
    r
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    acc
}

/// Dense polynomial arithmetic over `Z/q`, coefficients ascending and
/// trailing zeros trimmed (the zero polynomial is the empty vector).
pub struct ModRing {
    pub q: u64,
}

impl ModRing {
    pub fn new(q: u64) -> Self {
        Self { q }
    }

    pub fn reduce_bigint(&self, f: &[BigInt]) -> Vec<u64> {
        let qi = BigInt::from(self.q);
        let mut out: Vec<u64> = f
            .iter()
            .map(|c| {
                let mut r = c % &qi;
                if r.sign() == Sign::Minus {
                    r += &qi;
                }
                let (_, digits) = r.to_u64_digits();
                digits.first().copied().unwrap_or(0)
            })
            .collect();
        Self::trim(&mut out);
        out
    }

    fn trim(f: &mut Vec<u64>) {
        while f.last() == Some(&0) {
            f.pop();
        }
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let q = self.q as u128;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                let v = (out[i + j] as u128 + ai as u128 * bj as u128) % q;
                out[i + j] = v as u64;
            }
        }
        Self::trim(&mut out);
        out
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len().max(b.len())];
        for (k, o) in out.iter_mut().enumerate() {
            let av = a.get(k).copied().unwrap_or(0);
            let bv = b.get(k).copied().unwrap_or(0);
            *o = (av + self.q - bv) % self.q;
        }
        Self::trim(&mut out);
        out
    }

    fn inv_scalar(&self, a: u64) -> u64 {
        pow_mod_u64(a, self.q - 2, self.q)
    }

    pub fn make_monic(&self, f: &[u64]) -> Vec<u64> {
        match f.last() {
            None => Vec::new(),
            Some(&lc) if lc == 1 => f.to_vec(),
            Some(&lc) => {
                let inv = self.inv_scalar(lc);
                let mut out: Vec<u64> = f.iter().map(|&c| mul_mod_u64(c, inv, self.q)).collect();
                Self::trim(&mut out);
                out
            }
        }
    }

    /// Remainder of `a` mod `b`, `b` nonzero.
    pub fn rem(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        Self::trim(&mut r);
        let db = b.len() - 1;
        let lb_inv = self.inv_scalar(*b.last().unwrap());
        while r.len() > db {
            let factor = mul_mod_u64(*r.last().unwrap(), lb_inv, self.q);
            let shift = r.len() - 1 - db;
            for (k, &c) in b.iter().enumerate() {
                let sub = mul_mod_u64(factor, c, self.q);
                let idx = k + shift;
                r[idx] = (r[idx] + self.q - sub) % self.q;
            }
            Self::trim(&mut r);
        }
        r
    }

    /// Exact quotient when `b` divides `a`.
    pub fn div_exact(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        Self::trim(&mut r);
        if r.is_empty() {
            return Vec::new();
        }
        let db = b.len() - 1;
        let lb_inv = self.inv_scalar(*b.last().unwrap());
        let mut quot = vec![0u64; r.len() - db];
        while r.len() > db {
            let factor = mul_mod_u64(*r.last().unwrap(), lb_inv, self.q);
            let shift = r.len() - 1 - db;
            quot[shift] = factor;
            for (k, &c) in b.iter().enumerate() {
                let sub = mul_mod_u64(factor, c, self.q);
                let idx = k + shift;
                r[idx] = (r[idx] + self.q - sub) % self.q;
            }
            Self::trim(&mut r);
        }
        assert!(r.is_empty(), "division was not exact");
        Self::trim(&mut quot);
        quot
    }

    pub fn gcd(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut x = self.make_monic(a);
        let mut y = self.make_monic(b);
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = self.make_monic(&r);
        }
        if x.is_empty() {
            x
        } else {
            self.make_monic(&x)
        }
    }

    pub fn derivative(&self, f: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = f
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| mul_mod_u64(c, (k as u64) % self.q, self.q))
            .collect();
        Self::trim(&mut out);
        out
    }

    pub fn pow_mod(&self, base: &[u64], exp: &BigInt, modulus: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = self.rem(base, modulus);
        let (_, bits) = exp.to_radix_le(2);
        for bit in bits {
            if bit == 1 {
                acc = self.rem(&self.mul(&acc, &b), modulus);
            }
            b = self.rem(&self.mul(&b, &b), modulus);
        }
        acc
    }

    /// Exhaustive trial division by monic polynomials in lexicographic
    /// order, smallest degree first. Trivially correct; used as the oracle
    /// and for small moduli.
    pub fn factor_exhaustive(&self, f: &[u64]) -> Vec<(Vec<u64>, u32)> {
        let mut rest = f.to_vec();
        let mut out: Vec<(Vec<u64>, u32)> = Vec::new();
        let mut deg = 1usize;
        while rest.len() - 1 >= 2 * deg {
            // candidates: monic of degree `deg`, coefficients counted in base q
            let mut counter = vec![0u64; deg];
            loop {
                let mut cand = counter.clone();
                cand.push(1);
                let mut mult = 0u32;
                while self.rem(&rest, &cand).is_empty() {
                    rest = self.div_exact(&rest, &cand);
                    mult += 1;
                }
                if mult > 0 {
                    out.push((cand, mult));
                }
                if rest.len() - 1 < 2 * deg {
                    break;
                }
                // increment base-q counter
                let mut k = 0;
                loop {
                    if k == deg {
                        break;
                    }
                    counter[k] += 1;
                    if counter[k] < self.q {
                        break;
                    }
                    counter[k] = 0;
                    k += 1;
                }
                if k == deg {
                    break;
                }
            }
            deg += 1;
        }
        if rest.len() > 1 {
            out.push((rest, 1));
        }
        out.sort_by(sort_key);
        out
    }

    /// Squarefree decomposition, then distinct-degree and equal-degree
    /// splitting (Cantor-Zassenhaus; trace map at q = 2).
    pub fn factor_ddf_edf(&self, f: &[u64]) -> Vec<(Vec<u64>, u32)> {
        let mut out: Vec<(Vec<u64>, u32)> = Vec::new();
        self.squarefree_parts(f, 1, &mut out);
        out.sort_by(sort_key);
        // merge equal factors (can arise from the p-th power recursion)
        let mut merged: Vec<(Vec<u64>, u32)> = Vec::new();
        for (poly, e) in out {
            match merged.last_mut() {
                Some((prev, pe)) if *prev == poly => *pe += e,
                _ => merged.push((poly, e)),
            }
        }
        merged
    }

    fn squarefree_parts(&self, f: &[u64], mult: u32, out: &mut Vec<(Vec<u64>, u32)>) {
        if f.len() <= 1 {
            return;
        }
        let deriv = self.derivative(f);
        if deriv.is_empty() {
            // f = g(x^q); over the prime field the q-th root keeps the
            // coefficients at indices divisible by q
            let q = self.q as usize;
            let mut g = Vec::new();
            for (k, &c) in f.iter().enumerate() {
                if k % q == 0 {
                    g.push(c);
                } else {
                    assert_eq!(c, 0);
                }
            }
            self.squarefree_parts(&g, mult * self.q as u32, out);
            return;
        }
        // characteristic-q squarefree decomposition: peel multiplicity layers
        let mut c = self.gcd(f, &deriv);
        let mut w = self.div_exact(f, &c);
        let mut i = 1u32;
        while w.len() > 1 {
            let y = self.gcd(&w, &c);
            let z = self.div_exact(&w, &y);
            if z.len() > 1 {
                for (poly, d) in self.distinct_degree(&z) {
                    for irr in self.equal_degree(&poly, d) {
                        out.push((irr, mult * i));
                    }
                }
            }
            c = self.div_exact(&c, &y);
            w = y;
            i += 1;
        }
        // what is left of c has all multiplicities divisible by q
        if c.len() > 1 {
            self.squarefree_parts(&c, mult, out);
        }
    }

    fn distinct_degree(&self, f: &[u64]) -> Vec<(Vec<u64>, usize)> {
        let mut out = Vec::new();
        let mut h = f.to_vec();
        let x = vec![0u64, 1];
        let mut xq = x.clone();
        let mut d = 0usize;
        while h.len() > 1 {
            d += 1;
            if (h.len() - 1) < 2 * d {
                out.push((h.clone(), h.len() - 1));
                break;
            }
            xq = self.pow_mod(&xq, &BigInt::from(self.q), &h);
            let diff = self.sub(&xq, &x);
            let g = self.gcd(&h, &diff);
            if g.len() > 1 {
                out.push((g.clone(), d));
                h = self.div_exact(&h, &g);
                xq = self.rem(&xq, &h);
            }
        }
        out
    }

    fn equal_degree(&self, f: &[u64], d: usize) -> Vec<Vec<u64>> {
        let n = f.len() - 1;
        if n == d {
            return vec![self.make_monic(f)];
        }
        let mut stack = vec![f.to_vec()];
        let mut out = Vec::new();
        // deterministic sequence of split attempts
        let mut seed = 0x9e3779b97f4a7c15u64;
        while let Some(g) = stack.pop() {
            if g.len() - 1 == d {
                out.push(self.make_monic(&g));
                continue;
            }
            loop {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = self.random_poly(g.len() - 1, seed);
                if a.len() <= 1 {
                    continue;
                }
                let split = if self.q == 2 {
                    self.trace_split(&a, &g, d)
                } else {
                    // gcd(a^((q^d-1)/2) - 1, g)
                    let e = (BigInt::from(self.q).pow(d as u32) - 1) / 2;
                    let b = self.pow_mod(&a, &e, &g);
                    let bm1 = self.sub(&b, &[1]);
                    self.gcd(&g, &bm1)
                };
                if split.len() > 1 && split.len() < g.len() {
                    let other = self.div_exact(&g, &split);
                    stack.push(split);
                    stack.push(other);
                    break;
                }
            }
        }
        out
    }

    fn trace_split(&self, a: &[u64], g: &[u64], d: usize) -> Vec<u64> {
        // T(a) = a + a^2 + a^4 + ... + a^(2^(d-1)) mod g, over F_2
        let mut term = self.rem(a, g);
        let mut acc = term.clone();
        for _ in 1..d {
            term = self.rem(&self.mul(&term, &term), g);
            acc = self.sub(&acc, &term); // char 2: sub == add
        }
        self.gcd(g, &acc)
    }

    fn random_poly(&self, max_deg: usize, seed: u64) -> Vec<u64> {
        let mut s = seed;
        let mut out = Vec::with_capacity(max_deg);
        for _ in 0..max_deg {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            out.push(s % self.q);
        }
        Self::trim(&mut out);
        out
    }
}

fn sort_key(a: &(Vec<u64>, u32), b: &(Vec<u64>, u32)) -> std::cmp::Ordering {
    a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MonicIntPolynomial {
        MonicIntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(poly(&[-1, -1, 1]).discriminant(), BigInt::from(5));
        assert_eq!(poly(&[1, 0, 1]).discriminant(), BigInt::from(-4));
        assert_eq!(poly(&[-2, 0, 0, 1]).discriminant(), BigInt::from(-108));
    }

    #[test]
    fn discriminant_matches_modular_oracle() {
        // independent route: Sylvester determinant mod several primes + CRT
        for c in [
            vec![-1i64, -1, 1],
            vec![7, -3, 2, 1],
            vec![-2, 0, 0, 1],
            vec![3, 1, 4, 1, 5, 1],
        ] {
            let p = poly(&c);
            let d = p.discriminant();
            for q in [1_000_003u64, 999_983, 65_537] {
                let got = det_mod_oracle(&p, q);
                let want = ((&d % q) + q) % q;
                let (_, ds) = want.to_u64_digits();
                assert_eq!(got, ds.first().copied().unwrap_or(0), "poly {c:?} mod {q}");
            }
        }
    }

    fn det_mod_oracle(p: &MonicIntPolynomial, q: u64) -> u64 {
        // discriminant mod q by Gaussian elimination on the Sylvester matrix
        let n = p.degree();
        let a: Vec<u64> = ModRing::new(q).reduce_bigint(p.coeffs());
        let b: Vec<u64> = ModRing::new(q).reduce_bigint(&p.derivative());
        let size = 2 * n - 1;
        let mut m = vec![vec![0u64; size]; size];
        for row in 0..n - 1 {
            for (k, &c) in a.iter().rev().enumerate() {
                m[row][row + k] = c;
            }
        }
        let mut brow = b.clone();
        brow.reverse();
        for row in 0..n {
            for (k, &c) in brow.iter().enumerate() {
                m[n - 1 + row][row + k] = c;
            }
        }
        let mut det = 1u64;
        for k in 0..size {
            let piv = (k..size).find(|&r| m[r][k] != 0);
            let piv = match piv {
                Some(r) => r,
                None => return 0,
            };
            if piv != k {
                m.swap(piv, k);
                det = (q - det) % q;
            }
            det = mul_mod_u64(det, m[k][k], q);
            let inv = pow_mod_u64(m[k][k], q - 2, q);
            for r in k + 1..size {
                let factor = mul_mod_u64(m[r][k], inv, q);
                if factor == 0 {
                    continue;
                }
                for c in k..size {
                    let sub = mul_mod_u64(factor, m[k][c], q);
                    m[r][c] = (m[r][c] + q - sub) % q;
                }
            }
        }
        if (n * (n - 1) / 2) % 2 == 1 {
            det = (q - det) % q;
        }
        det
    }

    #[test]
    fn factorization_examples() {
        let f = poly(&[-1, -1, 1]).factor_mod_q(2).unwrap();
        assert_eq!(f.factors, vec![(vec![1, 1, 1], 1)]);
        assert!(f.is_irreducible());

        let f = poly(&[-2, 0, 1]).factor_mod_q(2).unwrap();
        assert_eq!(f.factors, vec![(vec![0, 1], 2)]);

        let f = poly(&[-1, -1, 1]).factor_mod_q(5).unwrap();
        assert_eq!(f.factors, vec![(vec![2, 1], 2)]); // (x - 3)^2 = (x + 2)^2
    }

    #[test]
    fn factorization_rejects_composite_modulus() {
        assert!(poly(&[-1, -1, 1]).factor_mod_q(6).is_err());
    }

    #[test]
    fn ddf_edf_agrees_with_exhaustive() {
        // drive the fast path explicitly and compare with the oracle
        let ring = ModRing::new(5);
        let mut seed = 12345u64;
        for _ in 0..200 {
            let mut coeffs = Vec::new();
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let deg = 2 + (seed >> 33) % 5;
            for _ in 0..deg {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                coeffs.push(seed >> 40);
            }
            coeffs.push(1);
            let f = ring.reduce_bigint(
                &coeffs.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
            );
            if f.len() < 3 {
                continue;
            }
            assert_eq!(
                ring.factor_ddf_edf(&f),
                ring.factor_exhaustive(&f),
                "disagreement on {f:?}"
            );
        }
    }

    #[test]
    fn ddf_edf_large_prime_quadratics() {
        for q in [100_003u64, 999_983] {
            let ring = ModRing::new(q);
            // x^2 - 2 splits iff 2 is a QR mod q
            let f = ring.reduce_bigint(&[BigInt::from(-2), BigInt::zero(), BigInt::one()]);
            let fac = ring.factor_ddf_edf(&f);
            let split = pow_mod_u64(2, (q - 1) / 2, q) == 1;
            if split {
                assert_eq!(fac.len(), 2);
                assert!(fac.iter().all(|(p, e)| p.len() == 2 && *e == 1));
                let mut prod = vec![1u64];
                for (p, _) in &fac {
                    prod = ring.mul(&prod, p);
                }
                assert_eq!(prod, f);
            } else {
                assert_eq!(fac.len(), 1);
                assert_eq!(fac[0].0.len(), 3);
            }
        }
    }

    #[test]
    fn dedekind_examples() {
        assert!(poly(&[-2, 0, 1]).dedekind_maximal_at(2).unwrap());
        assert!(!poly(&[-8, 0, 1]).dedekind_maximal_at(2).unwrap());
        assert!(poly(&[-1, -1, 1]).dedekind_maximal_at(5).unwrap());
    }

    #[test]
    fn dedekind_quadratic_rule_sweep() {
        // for squarefree d, Z[sqrt(d)] is maximal at 2 iff d = 2, 3 mod 4
        for d in -200i64..=200 {
            if d == 0 || d == 1 || !squarefree(d) {
                continue;
            }
            let p = poly(&[-d, 0, 1]);
            let expect = d.rem_euclid(4) == 2 || d.rem_euclid(4) == 3;
            assert_eq!(
                p.dedekind_maximal_at(2).unwrap(),
                expect,
                "d = {d}"
            );
        }
    }

    #[test]
    fn dedekind_true_when_disc_not_divisible_by_q_squared() {
        let mut seed = 7u64;
        let mut checked = 0;
        while checked < 100 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let c0 = ((seed >> 20) % 41) as i64 - 20;
            let c1 = ((seed >> 40) % 41) as i64 - 20;
            let p = poly(&[c0, c1, 1]);
            let q = [2u64, 3, 5, 7, 11][(seed % 5) as usize];
            let disc = p.discriminant();
            let q2 = BigInt::from(q) * BigInt::from(q);
            if (&disc % &q2).is_zero() || disc.is_zero() {
                continue;
            }
            assert!(p.dedekind_maximal_at(q).unwrap(), "p = {p}, q = {q}");
            checked += 1;
        }
    }

    fn squarefree(d: i64) -> bool {
        let mut m = d.unsigned_abs();
        let mut f = 2u64;
        while f * f <= m {
            if m % f == 0 {
                m /= f;
                if m % f == 0 {
                    return false;
                }
            }
            f += 1;
        }
        true
    }

    #[test]
    fn irreducibility_examples() {
        assert!(poly(&[-1, -1, 1]).is_irreducible_over_q().unwrap());
        assert!(!poly(&[-4, 0, 1]).is_irreducible_over_q().unwrap());
        assert!(poly(&[-2, 0, 0, 1]).is_irreducible_over_q().unwrap());
        assert!(!poly(&[0, 0, 1]).is_irreducible_over_q().unwrap());
        // degree 4 requires a certificate
        assert!(poly(&[1, 0, 0, 0, 1]).is_irreducible_over_q().is_err());
    }

    #[test]
    fn witness_verification() {
        // x^4 - x - 1 is irreducible mod 2 (no roots and not the one
        // irreducible quadratic squared)
        let p = poly(&[-1, -1, 0, 0, 1]);
        assert!(verify_irreducibility_witness(&p, 2).is_ok());
        // x^4 - 1 factors everywhere
        let r = poly(&[-1, 0, 0, 0, 1]);
        assert!(verify_irreducibility_witness(&r, 7).is_err());
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(poly(&[-1, -1, 1]).real_root_count(), 2);
        assert_eq!(poly(&[1, 0, 1]).real_root_count(), 0);
        assert_eq!(poly(&[-2, 0, 0, 1]).real_root_count(), 1);
        assert_eq!(poly(&[0, -1, 0, 1]).real_root_count(), 3); // x(x-1)(x+1)... x^3 - x
    }

    #[test]
    fn sturm_odd_degree_has_a_real_root() {
        let mut seed = 99u64;
        for _ in 0..50 {
            let mut c = Vec::new();
            for _ in 0..3 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
                c.push(((seed >> 30) % 21) as i64 - 10);
            }
            c.push(1);
            let p = poly(&c);
            if p.discriminant().is_zero() {
                continue; // Sturm chain needs squarefree input
            }
            assert!(p.real_root_count() >= 1, "cubic {c:?}");
            assert_eq!(p.real_root_count() % 2, 1, "cubic {c:?}");
        }
    }
}
