//! Rational quaternion algebras `B = (a, b)` and their maximal orders.
//!
//! Elements are coordinate vectors over the basis `1, i, j, k` with
//! `i^2 = a`, `j^2 = b`, `ij = -ji = k`. The module computes Hilbert
//! symbols and the ramified set, verifies a supplied maximal-order basis
//! (ring, integrality, reduced discriminant), embeds the algebra into
//! `M_2(R)` with exact `Q(sqrt(c))` entries, and produces the Frobenius
//! Gram matrix that drives the census enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::kronecker;
use crate::error::{CensusError, Reason};
use crate::poly::MonicIntPolynomial;
use crate::qfield::{QuadField, QuadVal};

/// Coordinates in the `1, i, j, k` basis.
pub type Quat = [BigRational; 4];

#[derive(Clone, Debug)]
pub enum AlgebraKind {
    /// Full matrix algebra over `Q` (counted with the matrix engines).
    Split,
    /// Quaternion algebra `(a, b)` with a maximal-order basis, rows in
    /// `1, i, j, k` coordinates.
    Quaternion {
        a: BigInt,
        b: BigInt,
        basis: [Quat; 4],
    },
}

#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub n: u32,
    pub kind: AlgebraKind,
}

pub fn rat(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

pub fn quat_zero() -> Quat {
    [rat(0), rat(0), rat(0), rat(0)]
}

/// Quaternion product in `1, i, j, k` coordinates.
pub fn quat_mul(a: &BigInt, b: &BigInt, x: &Quat, y: &Quat) -> Quat {
    let ar = BigRational::from(a.clone());
    let br = BigRational::from(b.clone());
    let ab = &ar * &br;
    [
        &x[0] * &y[0] + &ar * &x[1] * &y[1] + &br * &x[2] * &y[2] - &ab * &x[3] * &y[3],
        &x[0] * &y[1] + &x[1] * &y[0] - &br * &x[2] * &y[3] + &br * &x[3] * &y[2],
        &x[0] * &y[2] + &x[2] * &y[0] + &ar * &x[1] * &y[3] - &ar * &x[3] * &y[1],
        &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
    ]
}

pub fn quat_add(x: &Quat, y: &Quat) -> Quat {
    [&x[0] + &y[0], &x[1] + &y[1], &x[2] + &y[2], &x[3] + &y[3]]
}

pub fn quat_scale(x: &Quat, k: &BigRational) -> Quat {
    [&x[0] * k, &x[1] * k, &x[2] * k, &x[3] * k]
}

pub fn trd(x: &Quat) -> BigRational {
    &x[0] + &x[0]
}

pub fn nrd(a: &BigInt, b: &BigInt, x: &Quat) -> BigRational {
    let ar = BigRational::from(a.clone());
    let br = BigRational::from(b.clone());
    &x[0] * &x[0] - &ar * &x[1] * &x[1] - &br * &x[2] * &x[2] + &(&ar * &br) * &x[3] * &x[3]
}

/// Hilbert symbol `(a, b)_q` at a finite prime `q`.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, q: u64) -> i32 {
    assert!(!a.is_zero() && !b.is_zero());
    let qb = BigInt::from(q);
    let (alpha, u) = split_valuation(a, &qb);
    let (beta, v) = split_valuation(b, &qb);
    if q == 2 {
        // (-1)^(eps(u) eps(v) + alpha omega(v) + beta omega(u))
        let e = eps2(&u) * eps2(&v) + (alpha as i64) * omega2(&v) + (beta as i64) * omega2(&u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        // (-1)^(alpha beta (q-1)/2) (u/q)^beta (v/q)^alpha
        let mut sign = 1i32;
        if (alpha * beta) % 2 == 1 && (q - 1) / 2 % 2 == 1 {
            sign = -sign;
        }
        if beta % 2 == 1 && kronecker(&u, &qb) == -1 {
            sign = -sign;
        }
        if alpha % 2 == 1 && kronecker(&v, &qb) == -1 {
            sign = -sign;
        }
        sign
    }
}

/// Hilbert symbol at the real place: `-1` iff both arguments are negative.
pub fn hilbert_symbol_inf(a: &BigInt, b: &BigInt) -> i32 {
    if a.is_negative() && b.is_negative() {
        -1
    } else {
        1
    }
}

fn split_valuation(a: &BigInt, q: &BigInt) -> (u32, BigInt) {
    let mut val = 0u32;
    let mut u = a.clone();
    while (&u % q).is_zero() {
        u /= q;
        val += 1;
    }
    (val, u)
}

fn eps2(u: &BigInt) -> i64 {
    // (u - 1)/2 mod 2 for odd u
    let m: BigInt = ((u - 1u32) / 2u32) % 2u32;
    if m.is_zero() {
        0
    } else {
        1
    }
}

fn omega2(u: &BigInt) -> i64 {
    // (u^2 - 1)/8 mod 2 for odd u
    let m: BigInt = ((u * u - 1u32) / 8u32) % 2u32;
    if m.is_zero() {
        0
    } else {
        1
    }
}

/// Ramified primes of `(a, b)`: finite `q` with symbol `-1`. Indefinite
/// algebras only; the set is checked to have even size.
pub fn ramified_set(a: &BigInt, b: &BigInt) -> Result<Vec<u64>, CensusError> {
    if hilbert_symbol_inf(a, b) == -1 {
        return Err(CensusError::reason(
            Reason::DefiniteAlgebra,
            format!("({a}, {b}) is ramified at the real place"),
        ));
    }
    let mut candidates = vec![2u64];
    let mut m = (a * b).abs();
    while (&m % 2i32).is_zero() {
        m /= 2i32;
    }
    let mut f = BigInt::from(3);
    while &f * &f <= m {
        if (&m % &f).is_zero() {
            candidates.push(f.to_string().parse().unwrap());
            while (&m % &f).is_zero() {
                m /= &f;
            }
        }
        f += 2i32;
    }
    if m > BigInt::one() {
        candidates.push(m.to_string().parse().unwrap());
    }
    candidates.sort_unstable();
    candidates.dedup();
    let s: Vec<u64> = candidates
        .into_iter()
        .filter(|&q| hilbert_symbol(a, b, q) == -1)
        .collect();
    assert!(s.len() % 2 == 0, "ramified set has odd size: {s:?}");
    Ok(s)
}

/// Outcome of verifying an order basis.
#[derive(Clone, Debug)]
pub struct OrderCheck {
    pub reduced_discriminant: BigInt,
    pub ramified: Vec<u64>,
}

/// Checks that the basis spans a ring containing 1 with integral reduced
/// trace and norm, then computes the reduced discriminant and enforces
/// maximality (`= prod of ramified primes`).
pub fn verify_order(spec: &AlgebraSpec) -> Result<OrderCheck, CensusError> {
    match &spec.kind {
        AlgebraKind::Split => Ok(OrderCheck {
            reduced_discriminant: BigInt::one(),
            ramified: Vec::new(),
        }),
        AlgebraKind::Quaternion { a, b, basis } => {
            let ramified = ramified_set(a, b)?;
            // 1 must have integer coordinates in the basis
            let one = [rat(1), rat(0), rat(0), rat(0)];
            let coords = solve_in_basis(basis, &one).ok_or_else(|| {
                CensusError::reason(Reason::OrderNotRing, "basis is singular")
            })?;
            if !coords.iter().all(|c| c.is_integer()) {
                return Err(CensusError::reason(
                    Reason::OrderNotRing,
                    "1 is not an integral combination of the basis",
                ));
            }
            // closure under multiplication
            for x in basis {
                for y in basis {
                    let prod = quat_mul(a, b, x, y);
                    let c = solve_in_basis(basis, &prod)
                        .ok_or_else(|| CensusError::reason(Reason::OrderNotRing, "singular"))?;
                    if !c.iter().all(|v| v.is_integer()) {
                        return Err(CensusError::reason(
                            Reason::OrderNotRing,
                            format!("product of basis vectors leaves the lattice: {prod:?}"),
                        ));
                    }
                }
            }
            // integrality of trd, nrd on the basis
            for x in basis {
                if !trd(x).is_integer() || !nrd(a, b, x).is_integer() {
                    return Err(CensusError::reason(
                        Reason::OrderNotIntegral,
                        format!("basis vector {x:?} has nonintegral trd or nrd"),
                    ));
                }
            }
            // reduced discriminant: |det(trd(e_i e_j))| = rd^2
            let mut g: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); 4]; 4];
            for (i, x) in basis.iter().enumerate() {
                for (j, y) in basis.iter().enumerate() {
                    g[i][j] = trd(&quat_mul(a, b, x, y));
                }
            }
            let det = det4(&g);
            let det_int = det.abs().to_integer();
            debug_assert!(det.is_integer());
            let rd = crate::qfield::isqrt(&det_int);
            if &rd * &rd != det_int {
                return Err(CensusError::reason(
                    Reason::OrderNotMaximal,
                    format!("trace-form determinant {det_int} is not a square"),
                ));
            }
            let expected: BigInt = ramified
                .iter()
                .fold(BigInt::one(), |acc, &q| acc * BigInt::from(q));
            if rd != expected {
                return Err(CensusError::reason(
                    Reason::OrderNotMaximal,
                    format!("reduced discriminant {rd} != product of ramified primes {expected}"),
                ));
            }
            Ok(OrderCheck {
                reduced_discriminant: rd,
                ramified,
            })
        }
    }
}

/// Coordinates of `target` in the given basis (rows), or `None` when the
/// basis is singular.
pub fn solve_in_basis(basis: &[Quat; 4], target: &Quat) -> Option<[BigRational; 4]> {
    // solve x * B = target with B rows = basis vectors
    let mut m: Vec<Vec<BigRational>> = (0..4)
        .map(|col| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b[col].clone()).collect();
            row.push(target[col].clone());
            row
        })
        .collect();
    // Gaussian elimination on the 4x5 system
    for k in 0..4 {
        let piv = (k..4).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, piv);
        let inv = m[k][k].clone();
        for c in k..5 {
            let v = &m[k][c] / &inv;
            m[k][c] = v;
        }
        for r in 0..4 {
            if r == k || m[r][k].is_zero() {
                continue;
            }
            let f = m[r][k].clone();
            for c in k..5 {
                let v = &m[r][c] - &f * &m[k][c];
                m[r][c] = v;
            }
        }
    }
    Some([
        m[0][4].clone(),
        m[1][4].clone(),
        m[2][4].clone(),
        m[3][4].clone(),
    ])
}

fn det4(m: &[Vec<BigRational>]) -> BigRational {
    // Laplace on the first row of a 4x4
    fn det3(m: &[Vec<BigRational>], rows: [usize; 3], cols: [usize; 3]) -> BigRational {
        let a = |r: usize, c: usize| m[rows[r]][cols[c]].clone();
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    }
    let cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    let mut det = BigRational::zero();
    for (k, c) in cols.iter().enumerate() {
        let minor = det3(m, [1, 2, 3], *c);
        let term = &m[0][k] * &minor;
        if k % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// 2x2 matrix over `Q(sqrt(c))`, row major.
pub type Mat2 = [QuadVal; 4];

/// Real embedding of the algebra: images of the four order basis vectors
/// as exact `Q(sqrt(c))` matrices, plus the field context.
#[derive(Clone, Debug)]
pub struct RealEmbedding {
    pub field: QuadField,
    pub images: [Mat2; 4],
}

impl RealEmbedding {
    pub fn image_of(&self, coords: &[BigRational; 4]) -> Mat2 {
        let mut out = [
            QuadVal::zero(),
            QuadVal::zero(),
            QuadVal::zero(),
            QuadVal::zero(),
        ];
        for (img, c) in self.images.iter().zip(coords.iter()) {
            for (o, e) in out.iter_mut().zip(img.iter()) {
                *o = o.add(&e.scale(c));
            }
        }
        out
    }
}

/// Embeds an indefinite `(a, b)` into `M_2(R)`: the positive structure
/// constant becomes `diag(sqrt(c), -sqrt(c))`, the other generator the
/// off-diagonal companion.
pub fn real_embedding(spec: &AlgebraSpec) -> Result<RealEmbedding, CensusError> {
    match &spec.kind {
        AlgebraKind::Split => {
            // matrix units: identity embedding of M_2
            let f = QuadField::rational();
            let e = |k: usize| -> Mat2 {
                let mut m = [
                    QuadVal::zero(),
                    QuadVal::zero(),
                    QuadVal::zero(),
                    QuadVal::zero(),
                ];
                m[k] = QuadVal::from_int(1);
                m
            };
            Ok(RealEmbedding {
                field: f,
                images: [e(0), e(1), e(2), e(3)],
            })
        }
        AlgebraKind::Quaternion { a, b, basis } => {
            let (c, i_img, j_img) = if a.is_positive() {
                // i -> diag(sqrt a, -sqrt a), j -> [[0,1],[b,0]]
                let sq = QuadVal {
                    rat: BigRational::zero(),
                    irr: BigRational::one(),
                };
                let i_img = [sq.clone(), QuadVal::zero(), QuadVal::zero(), sq.neg()];
                let j_img = [
                    QuadVal::zero(),
                    QuadVal::from_int(1),
                    QuadVal::from_rational(BigRational::from(b.clone())),
                    QuadVal::zero(),
                ];
                (a.clone(), i_img, j_img)
            } else if b.is_positive() {
                let sq = QuadVal {
                    rat: BigRational::zero(),
                    irr: BigRational::one(),
                };
                let j_img = [sq.clone(), QuadVal::zero(), QuadVal::zero(), sq.neg()];
                let i_img = [
                    QuadVal::zero(),
                    QuadVal::from_int(1),
                    QuadVal::from_rational(BigRational::from(a.clone())),
                    QuadVal::zero(),
                ];
                (b.clone(), i_img, j_img)
            } else {
                return Err(CensusError::reason(
                    Reason::DefiniteAlgebra,
                    "no positive structure constant",
                ));
            };
            let field = QuadField::new(c);
            let one_img = [
                QuadVal::from_int(1),
                QuadVal::zero(),
                QuadVal::zero(),
                QuadVal::from_int(1),
            ];
            let k_img = mat2_mul(&field, &i_img, &j_img);
            // generator images in 1,i,j,k coordinates -> basis images
            let gens = [one_img, i_img, j_img, k_img];
            let mut images: Vec<Mat2> = Vec::with_capacity(4);
            for e in basis {
                let mut m = [
                    QuadVal::zero(),
                    QuadVal::zero(),
                    QuadVal::zero(),
                    QuadVal::zero(),
                ];
                for (g, coef) in gens.iter().zip(e.iter()) {
                    for (o, v) in m.iter_mut().zip(g.iter()) {
                        *o = o.add(&v.scale(coef));
                    }
                }
                images.push(m);
            }
            // defining relations hold exactly by construction; assert them
            let fi = &field;
            let sq_i = mat2_mul(fi, &gens[1], &gens[1]);
            let sq_j = mat2_mul(fi, &gens[2], &gens[2]);
            let anti = {
                let ij = mat2_mul(fi, &gens[1], &gens[2]);
                let ji = mat2_mul(fi, &gens[2], &gens[1]);
                ij.iter()
                    .zip(ji.iter())
                    .all(|(x, y)| fi.sign(&x.add(y)) == std::cmp::Ordering::Equal)
            };
            assert!(anti, "ij != -ji in the embedding");
            for (k, m) in [(a, &sq_i), (b, &sq_j)] {
                let scalar = BigRational::from(k.clone());
                assert_eq!(m[0].rat, scalar, "generator square mismatch");
                assert!(m[0].irr.is_zero() && m[1].rat.is_zero() && m[2].rat.is_zero());
            }
            Ok(RealEmbedding {
                field,
                images: [
                    images[0].clone(),
                    images[1].clone(),
                    images[2].clone(),
                    images[3].clone(),
                ],
            })
        }
    }
}

pub fn mat2_mul(f: &QuadField, x: &Mat2, y: &Mat2) -> Mat2 {
    [
        f.mul(&x[0], &y[0]).add(&f.mul(&x[1], &y[2])),
        f.mul(&x[0], &y[1]).add(&f.mul(&x[1], &y[3])),
        f.mul(&x[2], &y[0]).add(&f.mul(&x[3], &y[2])),
        f.mul(&x[2], &y[1]).add(&f.mul(&x[3], &y[3])),
    ]
}

pub fn mat2_trace(m: &Mat2) -> QuadVal {
    m[0].add(&m[3])
}

pub fn mat2_det(f: &QuadField, m: &Mat2) -> QuadVal {
    f.mul(&m[0], &m[3]).sub(&f.mul(&m[1], &m[2]))
}

/// Reduced characteristic polynomial `x^2 - trd x + nrd` of an order
/// element given by integer coordinates in the order basis.
pub fn reduced_charpoly(
    spec: &AlgebraSpec,
    coords: &[BigInt; 4],
) -> Result<MonicIntPolynomial, CensusError> {
    let (a, b, basis) = match &spec.kind {
        AlgebraKind::Quaternion { a, b, basis } => (a, b, basis),
        AlgebraKind::Split => {
            return Err(CensusError::reason(
                Reason::UnsupportedDegree,
                "reduced_charpoly needs the quaternion kind",
            ))
        }
    };
    let mut x = quat_zero();
    for (e, c) in basis.iter().zip(coords.iter()) {
        x = quat_add(&x, &quat_scale(e, &BigRational::from(c.clone())));
    }
    let t = trd(&x);
    let n = nrd(a, b, &x);
    assert!(t.is_integer() && n.is_integer(), "order element not integral");
    MonicIntPolynomial::new(vec![n.to_integer(), -t.to_integer(), BigInt::one()])
}

/// Frobenius Gram matrix of the order basis under the real embedding:
/// `G[k][l] = <iota(e_k), iota(e_l)>` entrywise, exact in `Q(sqrt(c))`.
pub fn frobenius_gram(emb: &RealEmbedding) -> [[QuadVal; 4]; 4] {
    let mut g: Vec<Vec<QuadVal>> = vec![vec![QuadVal::zero(); 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            let mut acc = QuadVal::zero();
            for t in 0..4 {
                acc = acc.add(&emb.field.mul(&emb.images[k][t], &emb.images[l][t]));
            }
            g[k][l] = acc;
        }
    }
    // positive definiteness: leading principal minors > 0
    for size in 1..=4 {
        let sub: Vec<Vec<QuadVal>> = (0..size)
            .map(|r| (0..size).map(|c| g[r][c].clone()).collect())
            .collect();
        let det = quad_det(&emb.field, &sub);
        assert!(
            emb.field.is_positive(&det),
            "Gram matrix is not positive definite (minor {size})"
        );
    }
    let row = |r: usize| -> [QuadVal; 4] {
        [
            g[r][0].clone(),
            g[r][1].clone(),
            g[r][2].clone(),
            g[r][3].clone(),
        ]
    };
    [row(0), row(1), row(2), row(3)]
}

/// Determinant over `Q(sqrt(c))` by fraction-full Gaussian elimination.
pub fn quad_det(f: &QuadField, m: &[Vec<QuadVal>]) -> QuadVal {
    let n = m.len();
    let mut a: Vec<Vec<QuadVal>> = m.to_vec();
    let mut det = QuadVal::from_int(1);
    let mut neg = false;
    for k in 0..n {
        let piv = (k..n).find(|&r| f.sign(&a[r][k]) != std::cmp::Ordering::Equal);
        let piv = match piv {
            Some(p) => p,
            None => return QuadVal::zero(),
        };
        if piv != k {
            a.swap(k, piv);
            neg = !neg;
        }
        det = f.mul(&det, &a[k][k]);
        for r in k + 1..n {
            let factor = f.div(&a[r][k], &a[k][k]);
            for c in k..n {
                let v = a[r][c].sub(&f.mul(&factor, &a[k][c]));
                a[r][c] = v;
            }
        }
    }
    if neg {
        det.neg()
    } else {
        det
    }
}

/// The standard maximal order `{1, i, j, (1 + i + j + ij)/2}` of `(-1, 3)`
/// used throughout the tests.
#[cfg(test)]
pub fn minus_one_three_spec() -> AlgebraSpec {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    AlgebraSpec {
        n: 2,
        kind: AlgebraKind::Quaternion {
            a: BigInt::from(-1),
            b: BigInt::from(3),
            basis: [
                [rat(1), rat(0), rat(0), rat(0)],
                [rat(0), rat(1), rat(0), rat(0)],
                [rat(0), rat(0), rat(1), rat(0)],
                [half.clone(), half.clone(), half.clone(), half],
            ],
        },
    }
}
