//! Small shared number-theoretic utilities.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Kronecker symbol `(a/n)`, fully general (n may be even, zero or negative).
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.clone();
    let mut n = n.clone();
    if n.is_zero() {
        return if a.abs() == BigInt::from(1) { 1 } else { 0 };
    }
    let mut result = 1i32;
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    // factor out twos from n
    let two = BigInt::from(2);
    let mut twos = 0u32;
    while (&n % &two).is_zero() {
        n /= &two;
        twos += 1;
    }
    if twos > 0 {
        if (&a % &two).is_zero() {
            return 0;
        }
        // (a/2) = 1 if a = +-1 mod 8 else -1, applied `twos` times
        if twos % 2 == 1 {
            let m8 = ((&a % 8i32) + 8i32) % 8i32;
            let m8: i32 = m8.try_into().unwrap();
            if m8 == 3 || m8 == 5 {
                result = -result;
            }
        }
    }
    // now n odd positive: Jacobi with reciprocity
    a = ((&a % &n) + &n) % &n;
    while !a.is_zero() {
        let mut t = 0u32;
        while (&a % &two).is_zero() {
            a /= &two;
            t += 1;
        }
        if t % 2 == 1 {
            let m8: i32 = ((&n % 8i32) + 8i32 as i32).try_into().unwrap();
            let m8 = m8 % 8;
            if m8 == 3 || m8 == 5 {
                result = -result;
            }
        }
        // reciprocity
        let a4: i32 = (((&a % 4i32) + 4i32) % 4i32).try_into().unwrap();
        let n4: i32 = (((&n % 4i32) + 4i32) % 4i32).try_into().unwrap();
        if a4 == 3 && n4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = ((&a % &n) + &n) % &n;
    }
    if n == BigInt::from(1) {
        result
    } else {
        0
    }
}

pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    kronecker(&BigInt::from(a), &BigInt::from(n))
}

/// Primes up to `n` inclusive, by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; (n + 1) as usize];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n as usize {
        if sieve[p] {
            let mut k = p * p;
            while k <= n as usize {
                sieve[k] = false;
                k += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &is_p)| if is_p { Some(k as u64) } else { None })
        .collect()
}

/// Floor square root for u128.
pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    // correct the float seed exactly
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact square test for i128; returns the nonnegative root when square.
pub fn perfect_square_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt_u128(n as u128) as i128;
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        for q in [3i64, 5, 7, 11, 13, 97] {
            for a in -20..20i64 {
                let want = legendre(a, q);
                assert_eq!(kronecker_i64(a, q), want, "({a}/{q})");
            }
        }
    }

    fn legendre(a: i64, q: i64) -> i32 {
        let am = a.rem_euclid(q);
        if am == 0 {
            return 0;
        }
        let mut acc = 1i64;
        let mut b = am;
        let mut e = (q - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % q;
            }
            b = b * b % q;
            e >>= 1;
        }
        if acc == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_at_two() {
        assert_eq!(kronecker_i64(1, 2), 1);
        assert_eq!(kronecker_i64(7, 2), 1);
        assert_eq!(kronecker_i64(3, 2), -1);
        assert_eq!(kronecker_i64(5, 2), -1);
        assert_eq!(kronecker_i64(4, 2), 0);
        // (-4/k) character values: period 4 pattern 1,0,-1,0
        assert_eq!(kronecker_i64(-4, 1), 1);
        assert_eq!(kronecker_i64(-4, 3), -1);
        assert_eq!(kronecker_i64(-4, 5), 1);
        assert_eq!(kronecker_i64(-4, 7), -1);
    }

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_up_to(1).len(), 0);
    }

    #[test]
    fn square_tests() {
        assert_eq!(perfect_square_i128(49), Some(7));
        assert_eq!(perfect_square_i128(48), None);
        assert_eq!(perfect_square_i128(0), Some(0));
        assert_eq!(perfect_square_i128(-4), None);
        assert_eq!(isqrt_u128((1u128 << 100) - 1), (1u128 << 50) - 1);
    }
}
