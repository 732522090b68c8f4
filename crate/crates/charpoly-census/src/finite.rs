//! Brute-force finite-quotient orbit censuses.
//!
//! Two oracles check the local orbit-count statements on finite quotients:
//!
//! - [`matrix_conjugacy_census_mod`]: matrices over `Z/q^k` with a given
//!   charpoly, orbits under `GL_n(Z/q^k)` conjugation;
//! - [`division_orbit_census_mod`]: elements of the standard division-order
//!   model with a given reduced charpoly, orbits under unit conjugation.
//!
//! The division model realizes the maximal order of the ramified quaternion
//! algebra over `Q_q` inside `M_2(W)`, `W` the unramified quadratic
//! extension of `Z/q^k`: pairs `(u, v)` standing for `u + v pi` with
//! `pi^2 = q` and `pi u = sigma(u) pi` (sigma the Frobenius, `y -> -y` on
//! `W = (Z/q^k)[y]/(y^2 - r)` with `r` the least nonresidue).
//!
//! Reduction mod `q^k` is lossy: elements of the finite fiber need not lift
//! to the q-adic points, and non-liftable elements can sit in orbits of
//! their own (at a ramified prime they always do, in every modulus). The
//! division census therefore counts orbits among the elements that extend
//! to the mod-`q^(k+1)` fiber, one Hensel step of evidence; both the raw
//! fiber and the filtered set are reported. The matrix census reports the
//! raw fiber orbits, whose stabilization in `k` is itself the observable
//! of interest.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{CensusError, Reason};
use crate::poly::{is_prime_u64, MonicIntPolynomial};

const CANDIDATE_GUARD: u128 = 100_000_000;

/// Result of a matrix conjugacy census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixOrbitReport {
    pub element_count: u64,
    pub orbit_count: u64,
}

/// Result of a division-model census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionOrbitReport {
    pub fiber_size: u64,
    pub liftable_size: u64,
    pub orbit_count: u64,
    pub orbit_sizes: Vec<u64>,
}

fn reduce_coeffs(p: &MonicIntPolynomial, m: u64) -> Vec<u64> {
    let mb = BigInt::from(m);
    p.coeffs()
        .iter()
        .map(|c| (((c % &mb) + &mb) % &mb).to_u64().unwrap())
        .collect()
}

/// Matrices over `Z/q^k` with charpoly congruent to `p`, and their orbit
/// count under conjugation by `GL_n(Z/q^k)` (elementary matrices plus unit
/// diagonals as generators).
pub fn matrix_conjugacy_census_mod(
    p: &MonicIntPolynomial,
    n: usize,
    q: u64,
    k: u32,
) -> Result<MatrixOrbitReport, CensusError> {
    if !is_prime_u64(q) {
        return Err(CensusError::reason(Reason::NotPrime, format!("q = {q}")));
    }
    if p.degree() != n {
        return Err(CensusError::reason(
            Reason::SpecSchema,
            "polynomial degree must match the matrix size",
        ));
    }
    let m = q.pow(k);
    let cells = n * n;
    let total = (m as u128).pow(cells as u32);
    if total > CANDIDATE_GUARD {
        return Err(CensusError::reason(
            Reason::EnumerationGuard,
            format!("{total} candidate matrices exceed the guard"),
        ));
    }
    let target = reduce_coeffs(p, m);
    // enumerate the fiber
    let mut fiber: Vec<Vec<u64>> = Vec::new();
    let mut values = vec![0u64; cells];
    loop {
        if charpoly_mod_matches(&values, n, m, &target) {
            fiber.push(values.clone());
        }
        let mut idx = 0;
        loop {
            if idx == cells {
                break;
            }
            values[idx] += 1;
            if values[idx] < m {
                break;
            }
            values[idx] = 0;
            idx += 1;
        }
        if values.iter().all(|&v| v == 0) {
            break;
        }
    }
    let gens = gl_generators(n, m, q);
    let orbit_count = orbit_count_under(&fiber, None, &gens, |g, x| conjugate_matrix(g, x, n, m))
        .0;
    Ok(MatrixOrbitReport {
        element_count: fiber.len() as u64,
        orbit_count,
    })
}

/// Charpoly of the matrix (entries in `[0, m)`) reduced mod `m`, compared
/// against ascending target coefficients. Coefficients come from signed
/// sums of principal minors, computed exactly in i128 (no division, so the
/// composite modulus is harmless).
fn charpoly_mod_matches(values: &[u64], n: usize, m: u64, target: &[u64]) -> bool {
    let entry = |r: usize, c: usize| values[r * n + c] as i128;
    // coefficient of x^(n-j) is (-1)^j * (sum of j x j principal minors)
    for j in 1..=n {
        let mut sum = 0i128;
        // subsets of {0..n} of size j
        let mut subset: Vec<usize> = (0..j).collect();
        loop {
            sum += minor_det(&entry, &subset);
            if !next_combination(&mut subset, n) {
                break;
            }
        }
        let signed = if j % 2 == 1 { -sum } else { sum };
        let want = target[n - j] as i128;
        if (signed - want).rem_euclid(m as i128) != 0 {
            return false;
        }
    }
    true
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let j = subset.len();
    let mut i = j;
    while i > 0 {
        i -= 1;
        if subset[i] < i + n - j {
            subset[i] += 1;
            for l in i + 1..j {
                subset[l] = subset[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn minor_det(entry: &dyn Fn(usize, usize) -> i128, rows: &[usize]) -> i128 {
    match rows.len() {
        1 => entry(rows[0], rows[0]),
        2 => {
            entry(rows[0], rows[0]) * entry(rows[1], rows[1])
                - entry(rows[0], rows[1]) * entry(rows[1], rows[0])
        }
        3 => {
            let a = |r: usize, c: usize| entry(rows[r], rows[c]);
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        len => panic!("principal minors implemented for size <= 3, got {len}"),
    }
}

/// Generators of `GL_n(Z/q^k)`: all transvections `E_ij(1)` and diagonal
/// unit matrices `diag(1,..,u,..,1)`.
fn gl_generators(n: usize, m: u64, q: u64) -> Vec<(Vec<u64>, Vec<u64>)> {
    let mut gens = Vec::new();
    let ident: Vec<u64> = {
        let mut e = vec![0u64; n * n];
        for i in 0..n {
            e[i * n + i] = 1;
        }
        e
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut g = ident.clone();
            g[i * n + j] = 1;
            let mut ginv = ident.clone();
            ginv[i * n + j] = m - 1;
            gens.push((g, ginv));
        }
    }
    for u in 2..m {
        if u % q == 0 {
            continue;
        }
        let uinv = mod_inverse(u, m);
        for pos in 0..n {
            let mut g = ident.clone();
            g[pos * n + pos] = u;
            let mut ginv = ident.clone();
            ginv[pos * n + pos] = uinv;
            gens.push((g, ginv));
        }
    }
    gens
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid; a must be a unit mod m
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    assert_eq!(old_r, 1, "{a} is not a unit mod {m}");
    old_s.rem_euclid(m as i128) as u64
}

fn mat_mul_mod(a: &[u64], b: &[u64], n: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for r in 0..n {
        for c in 0..n {
            let mut acc = 0u128;
            for l in 0..n {
                acc += a[r * n + l] as u128 * b[l * n + c] as u128;
            }
            out[r * n + c] = (acc % m as u128) as u64;
        }
    }
    out
}

fn conjugate_matrix(g: &(Vec<u64>, Vec<u64>), x: &[u64], n: usize, m: u64) -> Vec<u64> {
    mat_mul_mod(&mat_mul_mod(&g.0, x, n, m), &g.1, n, m)
}

/// BFS orbit partition of `universe` (optionally restricted to `keep`)
/// under the generator action; returns (orbit count, orbit sizes sorted).
fn orbit_count_under<G, A>(
    universe: &[Vec<u64>],
    keep: Option<&HashSet<Vec<u64>>>,
    gens: &[G],
    act: A,
) -> (u64, Vec<u64>)
where
    A: Fn(&G, &[u64]) -> Vec<u64>,
{
    let members: HashSet<Vec<u64>> = match keep {
        Some(k) => universe.iter().filter(|x| k.contains(*x)).cloned().collect(),
        None => universe.iter().cloned().collect(),
    };
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut orbit_sizes = Vec::new();
    for start in universe {
        if !members.contains(start) || seen.contains(start) {
            continue;
        }
        let mut size = 0u64;
        let mut queue = VecDeque::new();
        queue.push_back(start.clone());
        seen.insert(start.clone());
        while let Some(x) = queue.pop_front() {
            size += 1;
            for g in gens {
                let y = act(g, &x);
                // conjugation preserves the charpoly and (for the filtered
                // case) liftability, so the set is closed under the action
                debug_assert!(members.contains(&y), "conjugation left the census set");
                if members.contains(&y) && !seen.contains(&y) {
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        orbit_sizes.push(size);
    }
    orbit_sizes.sort_unstable();
    (orbit_sizes.len() as u64, orbit_sizes)
}

/// Arithmetic of `W = (Z/m)[y]/(y^2 - r)` and the division model over it.
#[derive(Clone, Copy, Debug)]
pub struct DivisionModel {
    pub q: u64,
    pub k: u32,
    pub m: u64,
    /// least quadratic nonresidue mod q, the radicand of W
    pub r: u64,
}

pub type WElem = (u64, u64);
/// `(u, v)` standing for `u + v pi`.
pub type ModelElem = (WElem, WElem);

impl DivisionModel {
    pub fn new(q: u64, k: u32) -> Result<Self, CensusError> {
        if !is_prime_u64(q) || q == 2 {
            return Err(CensusError::reason(
                Reason::NotPrime,
                format!("division model needs an odd prime, got {q}"),
            ));
        }
        let r = (2..q)
            .find(|&x| mod_pow(x, (q - 1) / 2, q) == q - 1)
            .expect("every odd prime has a nonresidue");
        Ok(DivisionModel {
            q,
            k,
            m: q.pow(k),
            r,
        })
    }

    fn wmul(&self, a: WElem, b: WElem) -> WElem {
        let m = self.m as u128;
        (
            ((a.0 as u128 * b.0 as u128 + self.r as u128 * a.1 as u128 * b.1 as u128) % m) as u64,
            ((a.0 as u128 * b.1 as u128 + a.1 as u128 * b.0 as u128) % m) as u64,
        )
    }

    fn wadd(&self, a: WElem, b: WElem) -> WElem {
        ((a.0 + b.0) % self.m, (a.1 + b.1) % self.m)
    }

    fn sigma(&self, a: WElem) -> WElem {
        (a.0, (self.m - a.1) % self.m)
    }

    fn wscale(&self, c: u64, a: WElem) -> WElem {
        (
            ((c as u128 * a.0 as u128) % self.m as u128) as u64,
            ((c as u128 * a.1 as u128) % self.m as u128) as u64,
        )
    }

    /// `(u1 + v1 pi)(u2 + v2 pi) = (u1 u2 + q sigma(v1) v2) + (v1 u2 + sigma(u1) v2) pi`.
    pub fn mul(&self, x: ModelElem, y: ModelElem) -> ModelElem {
        let (u1, v1) = x;
        let (u2, v2) = y;
        let u3 = self.wadd(
            self.wmul(u1, u2),
            self.wscale(self.q % self.m, self.wmul(self.sigma(v1), v2)),
        );
        let v3 = self.wadd(self.wmul(v1, u2), self.wmul(self.sigma(u1), v2));
        (u3, v3)
    }

    pub fn one(&self) -> ModelElem {
        ((1, 0), (0, 0))
    }

    pub fn pi(&self) -> ModelElem {
        ((0, 0), (1, 0))
    }

    pub fn trd(&self, x: ModelElem) -> u64 {
        (2 * x.0 .0) % self.m
    }

    pub fn nrd(&self, x: ModelElem) -> u64 {
        // u sigma(u) - q sigma(v) v; both products are scalars
        let nu = self.wmul(x.0, self.sigma(x.0));
        let nv = self.wmul(x.1, self.sigma(x.1));
        debug_assert!(nu.1 == 0 && nv.1 == 0);
        let qnv = (self.q as u128 * nv.0 as u128) % self.m as u128;
        ((nu.0 as u128 + self.m as u128 - qnv) % self.m as u128) as u64
    }

    pub fn is_unit(&self, x: ModelElem) -> bool {
        self.nrd(x) % self.q != 0
    }

    pub fn inverse(&self, x: ModelElem) -> ModelElem {
        // x^{-1} = conj(x)/nrd(x), conj(u, v) = (sigma(u), -v)
        let ninv = mod_inverse(self.nrd(x), self.m);
        let cu = self.sigma(x.0);
        let cv = ((self.m - x.1 .0) % self.m, (self.m - x.1 .1) % self.m);
        (self.wscale(ninv, cu), self.wscale(ninv, cv))
    }

    fn pack(x: ModelElem) -> Vec<u64> {
        vec![x.0 .0, x.0 .1, x.1 .0, x.1 .1]
    }

    fn unpack(v: &[u64]) -> ModelElem {
        ((v[0], v[1]), (v[2], v[3]))
    }

    /// All model elements with `trd = t`, `nrd = d` mod `q^k`. The trace
    /// pins the rational part of `u`, so only three coordinates are
    /// scanned.
    pub fn fiber(&self, t: u64, d: u64) -> Vec<ModelElem> {
        let inv2 = mod_inverse(2, self.m);
        let u0 = (t as u128 * inv2 as u128 % self.m as u128) as u64;
        let mut out = Vec::new();
        for u1 in 0..self.m {
            for v0 in 0..self.m {
                for v1 in 0..self.m {
                    let x = ((u0, u1), (v0, v1));
                    if self.nrd(x) == d {
                        debug_assert_eq!(self.trd(x), t % self.m);
                        out.push(x);
                    }
                }
            }
        }
        out
    }

    /// Unit generators: every unit factors as `(a, 0) * (1, w)`, so these
    /// two families generate the whole unit group.
    pub fn unit_generators(&self) -> Vec<(ModelElem, ModelElem)> {
        let mut gens = Vec::new();
        for a0 in 0..self.m {
            for a1 in 0..self.m {
                let a = ((a0, a1), (0, 0));
                if self.is_unit(a) {
                    gens.push((a, self.inverse(a)));
                }
            }
        }
        for w0 in 0..self.m {
            for w1 in 0..self.m {
                let g = ((1, 0), (w0, w1));
                debug_assert!(self.is_unit(g));
                gens.push((g, self.inverse(g)));
            }
        }
        gens
    }

    /// The full unit group, usable as a generating set at small moduli.
    pub fn all_units(&self) -> Vec<(ModelElem, ModelElem)> {
        let mut units = Vec::new();
        for u0 in 0..self.m {
            for u1 in 0..self.m {
                for v0 in 0..self.m {
                    for v1 in 0..self.m {
                        let x = ((u0, u1), (v0, v1));
                        if self.is_unit(x) {
                            units.push((x, self.inverse(x)));
                        }
                    }
                }
            }
        }
        units
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Division-model orbit census: enumerates the mod-`q^k` fiber of the
/// reduced charpoly, keeps the elements with a preimage in the
/// mod-`q^(k+1)` fiber (one Hensel step of liftability), and counts unit
/// conjugation orbits among them.
pub fn division_orbit_census_mod(
    p: &MonicIntPolynomial,
    q: u64,
    k: u32,
) -> Result<DivisionOrbitReport, CensusError> {
    if p.degree() != 2 {
        return Err(CensusError::reason(
            Reason::UnsupportedDegree,
            "division model censuses take quadratic charpolys",
        ));
    }
    if q > 7 || k > 2 {
        return Err(CensusError::reason(
            Reason::EnumerationGuard,
            format!("division census guard: q <= 7, k <= 2 (got q = {q}, k = {k})"),
        ));
    }
    let model = DivisionModel::new(q, k)?;
    let target = reduce_coeffs(p, model.m);
    let (d, t) = (target[0], (model.m - target[1]) % model.m);
    let fiber = model.fiber(t, d);

    // one Hensel step: reductions of the mod-q^(k+1) fiber
    let up = DivisionModel::new(q, k + 1)?;
    let tgt_up = reduce_coeffs(p, up.m);
    let (d_up, t_up) = (tgt_up[0], (up.m - tgt_up[1]) % up.m);
    let mut liftable: HashSet<Vec<u64>> = HashSet::new();
    for x in up.fiber(t_up, d_up) {
        let red = (
            (x.0 .0 % model.m, x.0 .1 % model.m),
            (x.1 .0 % model.m, x.1 .1 % model.m),
        );
        liftable.insert(DivisionModel::pack(red));
    }
    let fiber_packed: Vec<Vec<u64>> = fiber.iter().map(|&x| DivisionModel::pack(x)).collect();
    for l in &liftable {
        assert!(
            fiber_packed.contains(l),
            "reduction of a lifted point left the fiber"
        );
    }

    let gens = model.unit_generators();
    let (orbit_count, orbit_sizes) =
        orbit_count_under(&fiber_packed, Some(&liftable), &gens, |g, x| {
            let y = model.mul(model.mul(g.0, DivisionModel::unpack(x)), g.1);
            DivisionModel::pack(y)
        });
    Ok(DivisionOrbitReport {
        fiber_size: fiber.len() as u64,
        liftable_size: liftable.len() as u64,
        orbit_count,
        orbit_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> MonicIntPolynomial {
        MonicIntPolynomial::from_i64(c).unwrap()
    }

    #[test]
    fn model_structure() {
        let model = DivisionModel::new(5, 2).unwrap();
        // pi^2 = q
        let pi2 = model.mul(model.pi(), model.pi());
        assert_eq!(pi2, ((5, 0), (0, 0)));
        // identity
        let x = ((3, 7), (11, 2));
        assert_eq!(model.mul(model.one(), x), x);
        assert_eq!(model.mul(x, model.one()), x);
        // associativity on pseudo-random triples
        let mut seed = 42u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            (
                ((seed >> 10) % 25, (seed >> 20) % 25),
                ((seed >> 30) % 25, (seed >> 40) % 25),
            )
        };
        for _ in 0..50 {
            let (a, b, c) = (next(), next(), next());
            assert_eq!(
                model.mul(model.mul(a, b), c),
                model.mul(a, model.mul(b, c))
            );
        }
        // Cayley-Hamilton in the model: x^2 - trd(x) x + nrd(x) = 0
        for _ in 0..20 {
            let x = next();
            let x2 = model.mul(x, x);
            let t = model.trd(x);
            let n = model.nrd(x);
            let tx = (model.wscale(t, x.0), model.wscale(t, x.1));
            let lhs = (
                model.wadd(
                    model.wadd(x2.0, ((model.m - tx.0 .0) % model.m, (model.m - tx.0 .1) % model.m)),
                    (n % model.m, 0),
                ),
                model.wadd(
                    x2.1,
                    ((model.m - tx.1 .0) % model.m, (model.m - tx.1 .1) % model.m),
                ),
            );
            assert_eq!(lhs, ((0, 0), (0, 0)), "Cayley-Hamilton fails at {x:?}");
        }
    }

    #[test]
    fn matrix_census_examples() {
        let golden = poly(&[-1, -1, 1]);
        assert_eq!(
            matrix_conjugacy_census_mod(&golden, 2, 2, 1).unwrap(),
            MatrixOrbitReport {
                element_count: 2,
                orbit_count: 1
            }
        );
        assert_eq!(
            matrix_conjugacy_census_mod(&golden, 2, 3, 1).unwrap(),
            MatrixOrbitReport {
                element_count: 6,
                orbit_count: 1
            }
        );
        // x^2 + 1 mod 3 is irreducible
        assert_eq!(
            matrix_conjugacy_census_mod(&poly(&[1, 0, 1]), 2, 3, 1).unwrap(),
            MatrixOrbitReport {
                element_count: 6,
                orbit_count: 1
            }
        );
        // ramified prime 5: two orbits at k = 1, one at k = 2
        assert_eq!(
            matrix_conjugacy_census_mod(&golden, 2, 5, 1).unwrap(),
            MatrixOrbitReport {
                element_count: 25,
                orbit_count: 2
            }
        );
        assert_eq!(
            matrix_conjugacy_census_mod(&golden, 2, 5, 2).unwrap(),
            MatrixOrbitReport {
                element_count: 600,
                orbit_count: 1
            }
        );
        assert_eq!(
            matrix_conjugacy_census_mod(&golden, 2, 2, 2).unwrap(),
            MatrixOrbitReport {
                element_count: 8,
                orbit_count: 1
            }
        );
    }

    #[test]
    fn matrix_census_guard() {
        let err = matrix_conjugacy_census_mod(&poly(&[-1, -1, 1]), 2, 101, 2).unwrap_err();
        assert_eq!(err.reason_code().code(), "enumeration-guard");
    }

    #[test]
    fn matrix_orbits_match_full_group_sweep() {
        // independent generating strategy: every invertible matrix mod q
        let golden = poly(&[-1, -1, 1]);
        for q in [2u64, 3, 5] {
            let fast = matrix_conjugacy_census_mod(&golden, 2, q, 1).unwrap();
            let slow = full_sweep_orbits(&golden, q);
            assert_eq!(fast.orbit_count, slow, "q = {q}");
        }
    }

    fn full_sweep_orbits(p: &MonicIntPolynomial, q: u64) -> u64 {
        let m = q;
        let target = reduce_coeffs(p, m);
        let mut fiber = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let mat = vec![a, b, c, d];
                        if charpoly_mod_matches(&mat, 2, m, &target) {
                            fiber.push(mat);
                        }
                    }
                }
            }
        }
        let mut group = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let det = (a as i128 * d as i128 - b as i128 * c as i128)
                            .rem_euclid(m as i128) as u64;
                        if det % q != 0 {
                            let g = vec![a, b, c, d];
                            let di = mod_inverse(det, m);
                            let ginv = vec![
                                (d as u128 * di as u128 % m as u128) as u64,
                                ((m - b) as u128 * di as u128 % m as u128) as u64,
                                ((m - c) as u128 * di as u128 % m as u128) as u64,
                                (a as u128 * di as u128 % m as u128) as u64,
                            ];
                            group.push((g, ginv));
                        }
                    }
                }
            }
        }
        orbit_count_under(&fiber, None, &group, |g, x| conjugate_matrix(g, x, 2, m)).0
    }

    #[test]
    fn division_census_unramified() {
        // x^2 - x - 1 is irreducible mod 3: e = 1, two orbits, stable in k
        let golden = poly(&[-1, -1, 1]);
        let r1 = division_orbit_census_mod(&golden, 3, 1).unwrap();
        assert_eq!(
            (r1.fiber_size, r1.liftable_size, r1.orbit_count),
            (18, 18, 2)
        );
        assert_eq!(r1.orbit_sizes, vec![9, 9]);
        let r2 = division_orbit_census_mod(&golden, 3, 2).unwrap();
        assert_eq!(
            (r2.fiber_size, r2.liftable_size, r2.orbit_count),
            (162, 162, 2)
        );
    }

    #[test]
    fn division_census_ramified() {
        // x^2 - 5 is Eisenstein at 5: e = 2, a single orbit among liftable
        // elements; the raw fiber carries non-lifting junk in every modulus
        let p = poly(&[-5, 0, 1]);
        let r1 = division_orbit_census_mod(&p, 5, 1).unwrap();
        assert_eq!((r1.fiber_size, r1.liftable_size, r1.orbit_count), (25, 6, 1));
        let r2 = division_orbit_census_mod(&p, 5, 2).unwrap();
        assert_eq!(
            (r2.fiber_size, r2.liftable_size, r2.orbit_count),
            (750, 150, 1)
        );
    }

    #[test]
    fn division_orbits_match_full_unit_sweep_at_k1() {
        let golden = poly(&[-1, -1, 1]);
        for (p, q) in [(&golden, 3u64), (&golden, 5), (&poly(&[-5, 0, 1]), 5)] {
            let fast = division_orbit_census_mod(p, q, 1).unwrap();
            // strategy B: the full unit group as generators
            let model = DivisionModel::new(q, 1).unwrap();
            let target = reduce_coeffs(p, model.m);
            let (d, t) = (target[0], (model.m - target[1]) % model.m);
            let fiber: Vec<Vec<u64>> = model
                .fiber(t, d)
                .iter()
                .map(|&x| DivisionModel::pack(x))
                .collect();
            let up = DivisionModel::new(q, 2).unwrap();
            let tgt_up = reduce_coeffs(p, up.m);
            let mut liftable: HashSet<Vec<u64>> = HashSet::new();
            for x in up.fiber((up.m - tgt_up[1]) % up.m, tgt_up[0]) {
                liftable.insert(DivisionModel::pack((
                    (x.0 .0 % model.m, x.0 .1 % model.m),
                    (x.1 .0 % model.m, x.1 .1 % model.m),
                )));
            }
            let units = model.all_units();
            let (slow, _) = orbit_count_under(&fiber, Some(&liftable), &units, |g, x| {
                DivisionModel::pack(model.mul(model.mul(g.0, DivisionModel::unpack(x)), g.1))
            });
            assert_eq!(fast.orbit_count, slow, "q = {q}");
        }
    }

    #[test]
    fn orbit_counts_never_drop_below_lemma_value() {
        // n/e = 2 at the unramified prime 3, 1 at the ramified prime 5
        let golden = poly(&[-1, -1, 1]);
        for k in [1u32, 2] {
            assert!(division_orbit_census_mod(&golden, 3, k).unwrap().orbit_count >= 2);
        }
        let eis = poly(&[-5, 0, 1]);
        for k in [1u32, 2] {
            assert!(division_orbit_census_mod(&eis, 5, k).unwrap().orbit_count >= 1);
        }
    }

    #[test]
    fn division_census_guard() {
        let err = division_orbit_census_mod(&poly(&[-1, -1, 1]), 11, 1).unwrap_err();
        assert_eq!(err.reason_code().code(), "enumeration-guard");
        let err = division_orbit_census_mod(&poly(&[-1, -1, 1]), 2, 1).unwrap_err();
        assert_eq!(err.reason_code().code(), "not-prime");
    }
}
