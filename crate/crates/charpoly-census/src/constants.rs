//! Special functions and the assembled asymptotic constant.
//!
//! The counting prediction is `C * T^m` with `m = n(n-1)/2` and
//!
//! `C = prod_{q in S} n/(e_q prod_{i<n}(1 - q^-i))
//!      * 2^r1 (2pi)^r2 h R / (w |d|^(1/2))
//!      * omega_m / prod_{i=2}^n Lambda(i/2)`
//!
//! where `Lambda(s) = pi^-s Gamma(s) zeta(2s)` and `omega_m` is the unit
//! ball volume in dimension `m`. All factors are carried at full internal
//! precision and the exact rational correction factors are kept alongside.

use num_rational::BigRational;

use crate::error::{CensusError, Reason};
use crate::field::FieldInvariants;
use crate::local::{check_feasibility, LocalProfile};
use crate::real::{gamma_half, pi, zeta_int, Real};

/// `pi^(k/2)` for nonnegative integer `k`.
fn pi_half_pow(k: u32) -> Real {
    let whole = pi().powi(k / 2);
    if k % 2 == 1 {
        &whole * &pi().sqrt()
    } else {
        whole
    }
}

/// `Lambda(k/2) = pi^(-k/2) Gamma(k/2) zeta(k)` for integer `k >= 2`
/// (the argument `s = k/2` must exceed 1/2 for the zeta factor to
/// converge).
pub fn lambda_half(k: u32) -> Result<Real, CensusError> {
    if k < 2 {
        return Err(CensusError::reason(
            Reason::SpecSchema,
            format!("Lambda({k}/2) diverges: need s > 1/2"),
        ));
    }
    Ok(&(&gamma_half(k) * &zeta_int(k)) / &pi_half_pow(k))
}

/// Volume of the unit ball in dimension `m >= 1`:
/// `pi^(m/2) / Gamma(m/2 + 1)`.
pub fn unit_ball_volume(m: u32) -> Real {
    assert!(m >= 1);
    &pi_half_pow(m) / &gamma_half(m + 2)
}

/// `vol(O(n)) = 2^n pi^(n(n+1)/4) prod_{i=1}^n Gamma(i/2)^{-1}`.
///
/// Audit quantity only: it cancels out of the final constant.
pub fn orthogonal_group_volume(n: u32) -> Real {
    assert!(n >= 1);
    let e = n * (n + 1); // exponent of pi is e/4; e is even iff e/2 is the half-power index
    assert!(e % 2 == 0);
    let mut acc = &Real::from_int(1i64 << n) * &pi_half_pow(e / 2);
    for i in 1..=n {
        acc = &acc / &gamma_half(i);
    }
    acc
}

/// The assembled constant with its component breakdown.
#[derive(Clone, Debug)]
pub struct AsymptoticConstant {
    /// The constant `C`.
    pub value: Real,
    /// Exponent of `T` in the prediction: `m = n(n-1)/2`.
    pub exponent: u32,
    /// Exact `(q, n/(e_q prod(1-q^-i)))` correction factors, one per
    /// division prime.
    pub corrections: Vec<(u64, BigRational)>,
    pub zeta_residue: Real,
    pub unit_ball: Real,
    /// `prod_{i=2}^n Lambda(i/2)`.
    pub lambda_product: Real,
}

impl AsymptoticConstant {
    pub fn predicted(&self, t: f64) -> f64 {
        self.value.to_f64() * t.powi(self.exponent as i32)
    }
}

/// Multiplies the pieces together; every division prime must be feasible.
pub fn assemble_constant(
    inv: &FieldInvariants,
    profiles: &[LocalProfile],
    n: u32,
) -> Result<AsymptoticConstant, CensusError> {
    check_feasibility(profiles)?;
    let m = n * (n - 1) / 2;
    let mut corrections = Vec::new();
    let mut corr_product = Real::one();
    for prof in profiles {
        if let Some(c) = &prof.correction_factor {
            corrections.push((prof.q, c.clone()));
            corr_product = &corr_product * &Real::from_rational(c);
        }
    }
    let residue = inv.zeta_residue();
    let ball = unit_ball_volume(m);
    let mut lambda_product = Real::one();
    for i in 2..=n {
        lambda_product = &lambda_product * &lambda_half(i)?;
    }
    let value = &(&(&corr_product * &residue) * &ball) / &lambda_product;
    Ok(AsymptoticConstant {
        value,
        exponent: m,
        corrections,
        zeta_residue: residue,
        unit_ball: ball,
        lambda_product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::compute_invariants_quadratic;
    use crate::local::relevant_profiles;
    use crate::poly::MonicIntPolynomial;
    use crate::quaternion::{minus_one_three_spec, AlgebraKind, AlgebraSpec};

    fn tol(s: &str) -> Real {
        Real::from_decimal_str(s).unwrap()
    }

    fn assert_close(v: &Real, want: &str, tolerance: &str) {
        let w = Real::from_decimal_str(want).unwrap();
        assert!(
            (v - &w).abs() < tol(tolerance),
            "got {} want {want}",
            v.to_decimal(30)
        );
    }

    #[test]
    fn lambda_closed_forms() {
        // Lambda(1) = pi/6, Lambda(2) = pi^2/90, Lambda(3) = pi^3/945
        let l1 = lambda_half(2).unwrap();
        let want = &pi() / &Real::from_int(6);
        assert!((&l1 - &want).abs() < tol("0.0000000000000000000000000000000000000001"));
        let l2 = lambda_half(4).unwrap();
        let want = &pi().powi(2) / &Real::from_int(90);
        assert!((&l2 - &want).abs() < tol("0.0000000000000000000000000000000000000001"));
        // Lambda(3) = pi^-3 Gamma(3) zeta(6) = 2 pi^3 / 945
        let l3 = lambda_half(6).unwrap();
        let want = &(&pi().powi(3) * &Real::from_int(2)) / &Real::from_int(945);
        assert!((&l3 - &want).abs() < tol("0.0000000000000000000000000000000000000001"));
        // Lambda(3/2) = zeta(3)/(2 pi)
        assert_close(
            &lambda_half(3).unwrap(),
            "0.191313298015585171125076570120433068512991864275233353541",
            "0.000000000000000000000000000000000000000000000001",
        );
        assert!(lambda_half(1).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert_close(&unit_ball_volume(1), "2.0", "0.0000000000000000000000000000000001");
        let v2 = unit_ball_volume(2);
        assert!((&v2 - &pi()).abs() < tol("0.0000000000000000000000000000000001"));
        let v3 = unit_ball_volume(3);
        let want = &(&pi() * &Real::from_int(4)) / &Real::from_int(3);
        assert!((&v3 - &want).abs() < tol("0.0000000000000000000000000000000001"));
    }

    #[test]
    fn orthogonal_volumes() {
        assert_close(&orthogonal_group_volume(1), "2.0", "0.000000000000000000000000000001");
        // vol O(2) = 4 pi
        let want = &pi() * &Real::from_int(4);
        assert!((&orthogonal_group_volume(2) - &want).abs() < tol("0.000000000000000000000000000001"));
        // vol O(3) = 16 pi^2
        let want = &pi().powi(2) * &Real::from_int(16);
        assert!((&orthogonal_group_volume(3) - &want).abs() < tol("0.000000000000000000000000000001"));
    }

    #[test]
    fn split_constant_golden_ratio() {
        let p = MonicIntPolynomial::from_i64(&[-1, -1, 1]).unwrap();
        let inv = compute_invariants_quadratic(&p).unwrap();
        let spec = AlgebraSpec {
            n: 2,
            kind: AlgebraKind::Split,
        };
        let profiles = relevant_profiles(&p, &spec).unwrap();
        let c = assemble_constant(&inv, &profiles, 2).unwrap();
        assert_eq!(c.exponent, 1);
        assert!(c.corrections.is_empty());
        assert_close(
            &c.value,
            "1.644041052128856048216824397725726597440952544747874803517",
            "0.0000000000000000000000000000000000000001",
        );
    }

    #[test]
    fn quaternion_constant_is_split_times_corrections() {
        let p = MonicIntPolynomial::from_i64(&[-1, -1, 1]).unwrap();
        let inv = compute_invariants_quadratic(&p).unwrap();
        let spec = minus_one_three_spec();
        let profiles = relevant_profiles(&p, &spec).unwrap();
        let c = assemble_constant(&inv, &profiles, 2).unwrap();
        assert_eq!(c.corrections.len(), 2);
        assert_close(
            &c.value,
            "19.728492625546272578601892772708719169291430536974497642208",
            "0.000000000000000000000000000000000001",
        );
        // multiplicative in each correction: value / corr(3) = split * corr(2)
        let split_profiles = relevant_profiles(
            &p,
            &AlgebraSpec {
                n: 2,
                kind: AlgebraKind::Split,
            },
        )
        .unwrap();
        let base = assemble_constant(&inv, &split_profiles, 2).unwrap();
        let ratio = &c.value / &base.value;
        assert_close(&ratio, "12.0", "0.00000000000000000000000000000001");
        // linear in h R: doubling h doubles C
        let mut inv2 = inv.clone();
        inv2.h = num_bigint::BigInt::from(2);
        let c2 = assemble_constant(&inv2, &profiles, 2).unwrap();
        let ratio = &c2.value / &c.value;
        assert_close(&ratio, "2.0", "0.00000000000000000000000000000001");
    }

    #[test]
    fn infeasible_prime_blocks_assembly() {
        // x^2 - 2 splits mod 7: a division algebra ramified at {2, 7}
        // cannot contain it
        let p = MonicIntPolynomial::from_i64(&[-2, 0, 1]).unwrap();
        let inv = compute_invariants_quadratic(&p).unwrap();
        let prof = crate::local::build_profile(&p, &[7], 7).unwrap();
        let err = assemble_constant(&inv, &[prof], 2).unwrap_err();
        assert_eq!(err.reason_code().code(), "infeasible-division-prime");
    }
}
