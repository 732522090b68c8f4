//! Per-prime analysis: ramification data read off mod-q factorization,
//! feasibility at division primes, orbit counts, and the local density and
//! correction factors entering the constant.
//!
//! Everything rational is carried exactly; products over many primes are
//! accumulated in high-precision reals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::primes_up_to;
use crate::error::{CensusError, Reason};
use crate::poly::MonicIntPolynomial;
use crate::quaternion::{ramified_set, AlgebraKind, AlgebraSpec};
use crate::real::Real;

/// Per-prime record consumed by the constant assembly and the reports.
#[derive(Clone, Debug)]
pub struct LocalProfile {
    pub q: u64,
    /// `(e_i, f_i)` pairs of the primes above `q`.
    pub pairs: Vec<(u32, u32)>,
    pub is_division_prime: bool,
    pub irreducible_over_qq: bool,
    pub feasible: bool,
    /// `n / e_q`, defined at feasible division primes.
    pub orbit_count: Option<u32>,
    /// `n / (e_q prod_{i<n} (1 - q^-i))`, defined at feasible division primes.
    pub correction_factor: Option<BigRational>,
    /// `(1 - 1/q) / prod(1 - 1/Np) * mu_q(SL_n(Z_q))`, defined off `S`.
    pub split_density: Option<BigRational>,
}

/// `(e_i, f_i)` pairs at `q`, valid only because `Z[x]/(p)` is maximal at
/// `q`; refuses otherwise, naming the failed hypothesis.
pub fn ramification_data(
    p: &MonicIntPolynomial,
    q: u64,
) -> Result<Vec<(u32, u32)>, CensusError> {
    if !p.dedekind_maximal_at(q)? {
        return Err(CensusError::reason(
            Reason::NotIntegrallyClosed,
            format!("Z[x]/(p) is not maximal at {q}; mod-{q} factorization does not mirror splitting"),
        ));
    }
    Ok(p.factor_mod_q(q)?.pairs())
}

/// At a division prime the integral points exist iff `p` stays irreducible
/// over `Q_q`; at split primes the companion matrix always works.
pub fn local_feasibility(pairs: &[(u32, u32)], in_division_set: bool) -> bool {
    !in_division_set || pairs.len() == 1
}

/// Lemma-predicted orbit count `n / e_q` at a feasible division prime.
pub fn division_orbit_count(n: u32, e_q: u32) -> u32 {
    assert!(n % e_q == 0, "e_q = {e_q} must divide n = {n}");
    n / e_q
}

/// `n / (e_q * prod_{i=1}^{n-1} (1 - q^-i))`, exact.
pub fn division_correction_factor(n: u32, q: u64, e_q: u32) -> BigRational {
    let mut denom = BigRational::from(BigInt::from(e_q));
    for i in 1..n {
        denom *= one_minus_q_pow(q, i);
    }
    BigRational::from(BigInt::from(n)) / denom
}

/// `(1 - 1/q) / prod_{p|q} (1 - 1/Np) * prod_{i=2}^n (1 - q^-i)`, exact.
pub fn split_local_density(pairs: &[(u32, u32)], q: u64, n: u32) -> BigRational {
    let mut density = one_minus_q_pow(q, 1);
    for &(_, f) in pairs {
        density /= one_minus_q_pow(q, f);
    }
    density * sl_local_measure(q, n)
}

/// `mu_q(SL_n(Z_q)) = prod_{i=2}^n (1 - q^-i)`, exact.
pub fn sl_local_measure(q: u64, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 2..=n {
        acc *= one_minus_q_pow(q, i);
    }
    acc
}

/// Partial product of `mu_q(SL_n(Z_q))` over primes `q <= cutoff`,
/// approaching `prod_{i=2}^n zeta(i)^{-1}`.
pub fn sl_measure_product(n: u32, cutoff: u64) -> Real {
    let mut acc = Real::one();
    for q in primes_up_to(cutoff) {
        acc = &acc * &Real::from_rational(&sl_local_measure(q, n));
    }
    acc
}

fn one_minus_q_pow(q: u64, i: u32) -> BigRational {
    let qi = BigInt::from(q).pow(i);
    BigRational::new(&qi - BigInt::one(), qi)
}

/// Builds the profile of one prime for the given problem.
pub fn build_profile(
    p: &MonicIntPolynomial,
    division_primes: &[u64],
    q: u64,
) -> Result<LocalProfile, CensusError> {
    let n = p.degree() as u32;
    let pairs = ramification_data(p, q)?;
    let is_division = division_primes.contains(&q);
    let irreducible = pairs.len() == 1;
    let feasible = local_feasibility(&pairs, is_division);
    let (orbit_count, correction_factor, split_density) = if is_division {
        if feasible {
            let e = pairs[0].0;
            (
                Some(division_orbit_count(n, e)),
                Some(division_correction_factor(n, q, e)),
                None,
            )
        } else {
            (None, None, None)
        }
    } else {
        (None, None, Some(split_local_density(&pairs, q, n)))
    };
    Ok(LocalProfile {
        q,
        pairs,
        is_division_prime: is_division,
        irreducible_over_qq: irreducible,
        feasible,
        orbit_count,
        correction_factor,
        split_density,
    })
}

/// Profiles for every relevant prime: divisors of `disc(p)` plus the
/// division set, sorted.
pub fn relevant_profiles(
    p: &MonicIntPolynomial,
    spec: &AlgebraSpec,
) -> Result<Vec<LocalProfile>, CensusError> {
    let division = division_primes(spec)?;
    let mut qs: Vec<u64> = division.clone();
    let mut m = p.discriminant().abs();
    let mut f = BigInt::from(2);
    while &f * &f <= m {
        if (&m % &f).is_zero() {
            qs.push(f.to_string().parse().unwrap());
            while (&m % &f).is_zero() {
                m /= &f;
            }
        }
        f += 1i32;
    }
    if m > BigInt::one() {
        qs.push(m.to_string().parse().unwrap());
    }
    qs.sort_unstable();
    qs.dedup();
    qs.iter().map(|&q| build_profile(p, &division, q)).collect()
}

/// The division (ramified) primes of the algebra.
pub fn division_primes(spec: &AlgebraSpec) -> Result<Vec<u64>, CensusError> {
    match &spec.kind {
        AlgebraKind::Split => Ok(Vec::new()),
        AlgebraKind::Quaternion { a, b, .. } => ramified_set(a, b),
    }
}

/// Errors out with the witness prime when any division prime is infeasible.
pub fn check_feasibility(profiles: &[LocalProfile]) -> Result<(), CensusError> {
    for prof in profiles {
        if prof.is_division_prime && !prof.feasible {
            return Err(CensusError::reason(
                Reason::InfeasibleDivisionPrime,
                format!(
                    "p(x) factors over Q_{}, so the division algebra at {} admits no integral point",
                    prof.q, prof.q
                ),
            ));
        }
    }
    Ok(())
}
