//! Invariants of the number field `K = Q[x]/(p(x))`.
//!
//! For quadratic fields everything is computed: the class number by
//! reduced-form counting (negative discriminant) or reduced-form cycle
//! counting plus the norm of the fundamental unit (positive discriminant),
//! the regulator from the continued-fraction fundamental unit, and the
//! torsion count by the standard case split. Higher degrees load their
//! class number and regulator from a fixture and every recomputable field
//! is cross-validated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::kronecker;
use crate::error::{CensusError, Reason};
use crate::poly::MonicIntPolynomial;
use crate::qfield::isqrt;
use crate::real::{pi, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Fixture,
}

/// Where the regulator value comes from.
#[derive(Clone, Debug)]
pub enum RegulatorSource {
    /// Unit rank zero (`r1 + r2 = 1`): empty-product regulator 1.
    RankZero,
    /// Fundamental unit `(x + y sqrt(d)) / 2`, exact coordinates.
    FundamentalUnit { x: BigInt, y: BigInt },
    /// Decimal supplied by the problem spec (degree >= 3).
    Fixture(Real),
}

/// The invariants of `K` consumed by the asymptotic constant.
#[derive(Clone, Debug)]
pub struct FieldInvariants {
    pub r1: u32,
    pub r2: u32,
    pub w: u32,
    pub d: BigInt,
    pub h: BigInt,
    pub regulator: RegulatorSource,
    pub provenance: Provenance,
}

impl FieldInvariants {
    pub fn degree(&self) -> u32 {
        self.r1 + 2 * self.r2
    }

    /// Regulator as a high-precision real.
    pub fn regulator_value(&self) -> Real {
        match &self.regulator {
            RegulatorSource::RankZero => Real::one(),
            RegulatorSource::FundamentalUnit { x, y } => {
                // log((x + y sqrt(d)) / 2)
                let sd = Real::from_bigint(&self.d).sqrt();
                let v = &(&Real::from_bigint(x) + &(&Real::from_bigint(y) * &sd))
                    / &Real::from_int(2);
                v.ln()
            }
            RegulatorSource::Fixture(r) => r.clone(),
        }
    }

    /// Residue of the Dedekind zeta function at `s = 1`:
    /// `2^r1 (2pi)^r2 h R / (w sqrt(|d|))`.
    pub fn zeta_residue(&self) -> Real {
        let two_pow = Real::from_int(1i64 << self.r1);
        let two_pi_pow = (&pi() * &Real::from_int(2)).powi(self.r2);
        let num = &(&(&two_pow * &two_pi_pow) * &Real::from_bigint(&self.h))
            * &self.regulator_value();
        let den = &Real::from_int(self.w as i64) * &Real::from_bigint(&self.d.abs()).sqrt();
        &num / &den
    }

    fn check_structure(&self) -> Result<(), CensusError> {
        if self.w == 0 || self.w % 2 != 0 {
            return Err(CensusError::reason(
                Reason::FixtureMismatch,
                format!("w = {} is not a positive even count", self.w),
            ));
        }
        if self.r1 > 0 && self.w != 2 {
            return Err(CensusError::reason(
                Reason::FixtureMismatch,
                "w must be 2 when r1 > 0",
            ));
        }
        if self.h < BigInt::one() {
            return Err(CensusError::reason(
                Reason::FixtureMismatch,
                format!("h = {} must be >= 1", self.h),
            ));
        }
        Ok(())
    }
}

/// Computes all invariants for an irreducible quadratic with `Z[x]/(p)`
/// integrally closed.
pub fn compute_invariants_quadratic(
    p: &MonicIntPolynomial,
) -> Result<FieldInvariants, CensusError> {
    if p.degree() != 2 {
        return Err(CensusError::reason(
            Reason::UnsupportedDegree,
            format!(
                "degree {} field invariants must be supplied as a fixture",
                p.degree()
            ),
        ));
    }
    let d = p.discriminant();
    if d.is_zero() || isqrt(&d.abs()).pow(2) == d {
        return Err(CensusError::reason(
            Reason::ReduciblePolynomial,
            "square discriminant",
        ));
    }
    let inv = if d.is_negative() {
        let h = BigInt::from(count_reduced_forms_imaginary(&d));
        let w = if d == BigInt::from(-3) {
            6
        } else if d == BigInt::from(-4) {
            4
        } else {
            2
        };
        FieldInvariants {
            r1: 0,
            r2: 1,
            w,
            d,
            h,
            regulator: RegulatorSource::RankZero,
            provenance: Provenance::Computed,
        }
    } else {
        let (x, y) = fundamental_unit(&d);
        let h = class_number_real(&d, &x, &y);
        // consistency against the Minkowski/principality route when it
        // applies (primes of norm up to sqrt(d)/2, unit small enough to scan)
        if let Some(hm) = class_number_real_minkowski(&d, &x, &y) {
            assert_eq!(h, hm, "class-number routes disagree for d = {d}");
        }
        FieldInvariants {
            r1: 2,
            r2: 0,
            w: 2,
            d,
            h,
            regulator: RegulatorSource::FundamentalUnit { x, y },
            provenance: Provenance::Computed,
        }
    };
    inv.check_structure()?;
    Ok(inv)
}

/// Raw fixture record as read from the problem-spec file.
#[derive(Clone, Debug)]
pub struct FixtureRecord {
    pub r1: u32,
    pub r2: u32,
    pub w: u32,
    pub d: BigInt,
    pub h: BigInt,
    pub regulator: Real,
}

/// Validates a fixture for degree >= 3 against everything recomputable:
/// `r1` against the Sturm count, `r2` against the degree, `d` against the
/// discriminant, `w` against `r1 > 0`, positivity of `h` and `R`.
pub fn load_invariants_fixture(
    fixture: &FixtureRecord,
    p: &MonicIntPolynomial,
) -> Result<FieldInvariants, CensusError> {
    let n = p.degree() as u32;
    let r1 = p.real_root_count() as u32;
    if fixture.r1 != r1 {
        return Err(CensusError::reason(
            Reason::FixtureMismatch,
            format!("r1 mismatch: fixture {} vs computed {}", fixture.r1, r1),
        ));
    }
    if fixture.r1 + 2 * fixture.r2 != n {
        return Err(CensusError::reason(
            Reason::FixtureMismatch,
            format!(
                "r2 mismatch: r1 + 2 r2 = {} vs degree {}",
                fixture.r1 + 2 * fixture.r2,
                n
            ),
        ));
    }
    let d = p.discriminant();
    if fixture.d != d {
        return Err(CensusError::reason(
            Reason::FixtureMismatch,
            format!("d mismatch: fixture {} vs computed {}", fixture.d, d),
        ));
    }
    if !fixture.regulator.is_positive() {
        return Err(CensusError::reason(
            Reason::FixtureMismatch,
            "regulator must be positive",
        ));
    }
    let rank = fixture.r1 + fixture.r2;
    let regulator = if rank == 1 {
        // empty product convention; reject fixtures that disagree
        let one = Real::one();
        let diff = (&fixture.regulator - &one).abs();
        if diff > Real::from_decimal_str("0.000000000001").unwrap() {
            return Err(CensusError::reason(
                Reason::FixtureMismatch,
                "regulator must be 1 when r1 + r2 = 1",
            ));
        }
        RegulatorSource::RankZero
    } else {
        RegulatorSource::Fixture(fixture.regulator.clone())
    };
    let inv = FieldInvariants {
        r1: fixture.r1,
        r2: fixture.r2,
        w: fixture.w,
        d,
        h: fixture.h.clone(),
        regulator,
        provenance: Provenance::Fixture,
    };
    inv.check_structure()?;
    Ok(inv)
}

/// Number of reduced positive-definite forms of discriminant `d < 0`:
/// `(a, b, c)` with `b^2 - 4ac = d`, `|b| <= a <= c`, and `b >= 0` when
/// `|b| = a` or `a = c`. This count is the class number.
pub fn count_reduced_forms_imaginary(d: &BigInt) -> u64 {
    assert!(d.is_negative());
    let dm4: BigInt = ((d % 4) + 4) % 4;
    assert!(dm4.is_zero() || dm4.is_one(), "not a discriminant: {d}");
    let mut count = 0u64;
    let abs_d = d.abs();
    // |b| <= sqrt(|d|/3)
    let bmax = isqrt(&(&abs_d / 3));
    let mut b: BigInt = if (&abs_d % 2i32).is_zero() {
        BigInt::zero()
    } else {
        BigInt::one()
    };
    while b <= bmax {
        let num = (&b * &b) - d; // b^2 - d = 4ac > 0
        let num_rem: BigInt = &num % 4i32;
        if num_rem.is_zero() {
            let ac = num / 4;
            // a runs over divisors of ac with b <= a <= sqrt(ac)
            let mut a = if b.is_zero() { BigInt::one() } else { b.clone() };
            while &a * &a <= ac {
                let rem: BigInt = &ac % &a;
                if rem.is_zero() {
                    let c = &ac / &a;
                    // (a, b, c) and (a, -b, c)
                    if b.is_zero() || a == b || a == c {
                        count += 1;
                    } else {
                        count += 2;
                    }
                }
                a += 1;
            }
        }
        b += 2;
    }
    count
}

/// Independent oracle for imaginary class numbers: the finite character sum
/// `h = w/(2|d|) |sum_{k=1}^{|d|-1} chi_d(k) k|` (Dirichlet).
pub fn class_number_imaginary_dirichlet(d: &BigInt) -> u64 {
    assert!(d.is_negative());
    let w: i64 = if *d == BigInt::from(-3) {
        6
    } else if *d == BigInt::from(-4) {
        4
    } else {
        2
    };
    let abs_d = d.abs();
    let mut acc = BigInt::zero();
    let mut k = BigInt::one();
    while k < abs_d {
        let chi = kronecker(d, &k);
        if chi == 1 {
            acc += &k;
        } else if chi == -1 {
            acc -= &k;
        }
        k += 1;
    }
    let num = acc.abs() * BigInt::from(w);
    let den = BigInt::from(2) * &abs_d;
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "character sum not divisible for d = {d}");
    q.to_u64().unwrap()
}

/// Fundamental unit `(x + y sqrt(d))/2 > 1` of the real quadratic order of
/// discriminant `d`, by the continued fraction of `sqrt(D)` (`D` the
/// radicand) plus a cube-root refinement for `d = 1 mod 4`, where the
/// maximal order can contain units of index 3 over `Z[sqrt(D)]`.
pub fn fundamental_unit(d: &BigInt) -> (BigInt, BigInt) {
    assert!(d.is_positive());
    let dm4: BigInt = d % 4;
    let (radicand, half_allowed) = if dm4.is_one() {
        (d.clone(), true)
    } else {
        assert!(dm4.is_zero(), "not a discriminant: {d}");
        (d / 4, false)
    };
    let (p, q) = pell_minimal(&radicand);
    // unit in Z[sqrt(D)]: p + q sqrt(D); as (x + y sqrt(d))/2 coordinates:
    let (mut x, mut y) = if dm4.is_one() {
        (&p * 2, &q * 2)
    } else {
        // sqrt(d) = 2 sqrt(D)
        (&p * 2, q.clone())
    };
    if half_allowed {
        // try eps = (a + b sqrt(d))/2 with eps^3 = x/2 + (y/2) sqrt(d)
        if let Some((a, b)) = unit_cube_root(d, &x, &y) {
            x = a;
            y = b;
        }
    }
    debug_assert!({
        let n = (&x * &x) - d * (&y * &y);
        n == BigInt::from(4) || n == BigInt::from(-4)
    });
    (x, y)
}

/// Minimal `(p, q)`, `q >= 1`, with `p^2 - D q^2 = +-1`, from the continued
/// fraction of `sqrt(D)` (D positive, not a square).
fn pell_minimal(big_d: &BigInt) -> (BigInt, BigInt) {
    let a0 = isqrt(big_d);
    assert!(&a0 * &a0 != *big_d, "radicand is a square: {big_d}");
    let mut m = BigInt::zero();
    let mut den = BigInt::one();
    let mut a = a0.clone();
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    loop {
        let lhs = &p * &p - big_d * (&q * &q);
        if lhs == BigInt::one() || lhs == BigInt::from(-1) {
            return (p, q);
        }
        m = &den * &a - &m;
        den = (big_d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
    }
}

/// Looks for `(a + b sqrt(d))/2` whose cube is `(x + y sqrt(d))/2`;
/// coordinates found numerically at high precision, then verified exactly.
fn unit_cube_root(d: &BigInt, x: &BigInt, y: &BigInt) -> Option<(BigInt, BigInt)> {
    // value of the unit, scaled: v = (x + y sqrt(d)) / 2, compute v^(1/3)
    let shift = 240u32;
    let sd = isqrt(&(d << (2 * shift))); // sqrt(d) * 2^shift, floor
    let v_scaled = ((x << shift) + y * &sd) >> 1; // v * 2^shift
    let shifted: BigInt = &v_scaled << (2 * shift);
    let root = shifted.nth_root(3); // v^(1/3) * 2^shift
    // a = eps + conj(eps) = eps +- 1/eps lies within 1 of eps (eps > 1),
    // so scan a small window around floor(eps); each candidate is verified
    // exactly, so the window only needs to be wide enough.
    let base: BigInt = &root >> shift;
    for da in [-2i64, -1, 0, 1, 2] {
        let a = &base + BigInt::from(da);
        for sign in [1i64, -1] {
            // b^2 = (a^2 -+ 4)/d
            let num = &a * &a - BigInt::from(4 * sign);
            if num.is_negative() || !(&num % d).is_zero() {
                continue;
            }
            let b2 = num / d;
            let b = isqrt(&b2);
            if &b * &b != b2 || b.is_zero() {
                continue;
            }
            // verify ((a + b sqrt d)/2)^3 = (x + y sqrt d)/2 exactly:
            // rational part: (a^3 + 3 a b^2 d) / 8 = x / 2
            // irrational:   (3 a^2 b + b^3 d) / 8 = y / 2
            let rat = &a * &a * &a + BigInt::from(3) * &a * &b * &b * d;
            let irr = BigInt::from(3) * &a * &a * &b + &b * &b * &b * d;
            if rat == x * 4 && irr == y * 4 {
                return Some((a, b));
            }
        }
    }
    None
}

/// Class number of the real quadratic field of discriminant `d > 0`:
/// the number of cycles of reduced indefinite forms (the narrow class
/// number), divided by 2 when the fundamental unit has norm +1.
pub fn class_number_real(d: &BigInt, ux: &BigInt, uy: &BigInt) -> BigInt {
    let h_narrow = count_form_cycles(d);
    let unit_norm = (ux * ux - d * (uy * uy)) / 4;
    if unit_norm == BigInt::from(-1) {
        BigInt::from(h_narrow)
    } else {
        assert!(h_narrow % 2 == 0, "narrow class number parity for d = {d}");
        BigInt::from(h_narrow / 2)
    }
}

/// Number of cycles of reduced indefinite binary quadratic forms of
/// discriminant `d > 0` under the reduction operator.
fn count_form_cycles(d: &BigInt) -> u64 {
    use std::collections::HashSet;
    let sq = isqrt(d);
    // reduced: 0 < b < sqrt(d), |sqrt(d) - 2|a|| < b  (then c determined)
    let mut forms: HashSet<(BigInt, BigInt)> = HashSet::new(); // (a, b)
    let mut b = BigInt::one();
    while b <= sq {
        if (((&b * &b) - d) % 4i32).is_zero() {
            let ac = ((&b * &b) - d) / 4; // negative
            let mut a = BigInt::one();
            // |a| between (sqrt(d)-b)/2 and (sqrt(d)+b)/2, a | ac
            let hi = (&sq + &b) / 2;
            while a <= hi {
                let arem: BigInt = &ac % &a;
                if arem.is_zero() {
                    // check the reduction inequality exactly:
                    // (sqrt(d) - 2|a|)^2 < b^2  <=>  reduced (both signs of a)
                    let t = &b * &b - (d + 4 * (&a * &a));
                    let lhs_ok = {
                        // sqrt(d) - 2a < b and 2a - sqrt(d) < b
                        // <=> |2a - sqrt(d)| < b <=> (2a)^2 - 4a b ... do it
                        // exactly: 2a < b + sqrt(d) and sqrt(d) < b + 2a
                        let two_a = &a * 2;
                        let c1 = {
                            let lhs: BigInt = &two_a - &b;
                            lhs.is_negative() || &lhs * &lhs < *d
                        };
                        let c2 = {
                            let lhs: BigInt = &two_a + &b;
                            &lhs * &lhs > *d
                        };
                        let _ = t;
                        c1 && c2
                    };
                    if lhs_ok {
                        forms.insert((a.clone(), b.clone()));
                        forms.insert((-a.clone(), b.clone()));
                    }
                }
                a += 1;
            }
        }
        b += 1;
    }
    // walk cycles with the reduction operator rho
    let mut seen: HashSet<(BigInt, BigInt)> = HashSet::new();
    let mut cycles = 0u64;
    for start in forms.iter() {
        if seen.contains(start) {
            continue;
        }
        cycles += 1;
        let mut cycle: HashSet<(BigInt, BigInt)> = HashSet::new();
        let mut cur = start.clone();
        loop {
            if !cycle.insert(cur.clone()) {
                break;
            }
            assert!(
                !seen.contains(&cur),
                "rho cycles are not disjoint at d = {d}"
            );
            cur = rho(d, &cur.0, &cur.1);
            assert!(forms.contains(&cur), "rho left the reduced set at d = {d}");
        }
        seen.extend(cycle);
    }
    cycles
}

/// Reduction operator on indefinite forms `(a, b, c) -> (c, r, *)` where
/// `r = -b mod 2c` is chosen in the reduced window for `c`.
fn rho(d: &BigInt, a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let c: BigInt = ((b * b) - d) / (a * 4i32);
    let two_c: BigInt = (&c + &c).abs();
    let sq = isqrt(d);
    // r = -b mod 2|c|, shifted into (sqrt(d) - 2|c|, sqrt(d))
    let target_low = &sq - &two_c; // want r > this and r <= sq (r ~ sqrt d)
    let mut r = ((-b) % &two_c + &two_c) % &two_c;
    while r <= target_low {
        r += &two_c;
    }
    assert!(r <= sq, "reduction window miss for d = {d}");
    (c, r)
}

/// Class number by the Minkowski-bound / principality route; `None` when
/// the route does not apply cleanly (a nonprincipal prime below the bound,
/// or a fundamental unit too large to scan).
pub fn class_number_real_minkowski(d: &BigInt, ux: &BigInt, uy: &BigInt) -> Option<BigInt> {
    let bound: BigInt = isqrt(d) / 2i32; // Minkowski bound sqrt(d)/2 for r1 = 2
    let bound = bound.to_u64()?;
    // epsilon as a float for the scan bound
    let eps = {
        let sd = isqrt(&(d << 64)).to_f64()? / 2f64.powi(32);
        (ux.to_f64()? + uy.to_f64()? * sd) / 2.0
    };
    if !(1.0..1e6).contains(&eps) {
        return None;
    }
    for q in crate::arith::primes_up_to(bound) {
        let chi = kronecker(d, &BigInt::from(q));
        if chi == -1 {
            continue; // inert: principal
        }
        if !prime_ideal_principal(d, q, eps)? {
            return None; // group structure needed; this route gives up
        }
    }
    Some(BigInt::one())
}

/// Does some element of norm `+-q` exist? Scans `y` up to the standard
/// bound `eps * sqrt(4q/d)` (plus margin) in `x^2 - d y^2 = +-4q`.
fn prime_ideal_principal(d: &BigInt, q: u64, eps: f64) -> Option<bool> {
    let df = d.to_f64()?;
    let ymax = (eps * (4.0 * q as f64 / df).sqrt()).ceil() as i64 + 2;
    let four_q = BigInt::from(4 * q as i64);
    for y in 0..=ymax {
        let dy2 = d * BigInt::from(y * y);
        for sign in [1i32, -1] {
            let x2 = if sign == 1 {
                &dy2 + &four_q
            } else {
                &dy2 - &four_q
            };
            if x2.is_negative() {
                continue;
            }
            let x = isqrt(&x2);
            if &x * &x == x2 {
                return Some(true);
            }
        }
    }
    Some(false)
}
