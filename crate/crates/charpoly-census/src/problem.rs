//! Problem-spec ingestion and pipeline orchestration.
//!
//! The problem file is JSON with exact integers; rationals (order basis
//! entries, grid maxima) and high-precision decimals (fixture regulator)
//! travel as strings to avoid floating ambiguity:
//!
//! ```json
//! {
//!   "polynomial": [-1, -1, 1],
//!   "algebra": {
//!     "type": "quaternion", "a": -1, "b": 3,
//!     "order_basis": [["1","0","0","0"], ["0","1","0","0"],
//!                     ["0","0","1","0"], ["1/2","1/2","1/2","1/2"]]
//!   },
//!   "census": { "t_max": 3000, "grid_points": 4, "threads": 1 }
//! }
//! ```
//!
//! Degree >= 3 additionally requires a `field_invariants` fixture block
//! and degree >= 4 an `irreducibility_certificate` witness prime.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use crate::census::{
    convergence_table, geometric_grid, matrix_census_generic, matrix_census_n2,
    order_census_quaternion, CensusSeries,
};
use crate::constants::{assemble_constant, orthogonal_group_volume, AsymptoticConstant};
use crate::error::{CensusError, Reason};
use crate::field::{
    compute_invariants_quadratic, load_invariants_fixture, FieldInvariants, FixtureRecord,
    Provenance, RegulatorSource,
};
use crate::local::{check_feasibility, relevant_profiles, LocalProfile};
use crate::poly::{verify_irreducibility_witness, MonicIntPolynomial};
use crate::quaternion::{
    frobenius_gram, quad_det, real_embedding, verify_order, AlgebraKind, AlgebraSpec, Quat,
};
use crate::real::Real;

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum IntLike {
    Num(i64),
    Big(String),
}

impl IntLike {
    fn to_bigint(&self) -> Result<BigInt, CensusError> {
        match self {
            IntLike::Num(v) => Ok(BigInt::from(*v)),
            IntLike::Big(s) => s
                .trim()
                .parse()
                .map_err(|_| CensusError::reason(Reason::SpecParse, format!("bad integer {s:?}"))),
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, CensusError> {
    let bad = || CensusError::reason(Reason::SpecParse, format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(BigRational::from(n))
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum RatLike {
    Num(i64),
    Str(String),
}

impl RatLike {
    fn to_rational(&self) -> Result<BigRational, CensusError> {
        match self {
            RatLike::Num(v) => Ok(BigRational::from(BigInt::from(*v))),
            RatLike::Str(s) => parse_rational(s),
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(tag = "type")]
enum AlgebraBlock {
    #[serde(rename = "matrix")]
    Matrix {},
    #[serde(rename = "quaternion")]
    Quaternion {
        a: i64,
        b: i64,
        #[serde(default)]
        order_basis: Option<Vec<Vec<RatLike>>>,
    },
}

#[derive(Deserialize, Debug)]
struct FixtureBlock {
    r1: u32,
    r2: u32,
    w: u32,
    d: IntLike,
    h: IntLike,
    #[serde(rename = "R")]
    regulator: serde_json::Value,
}

#[derive(Deserialize, Debug)]
struct CensusBlock {
    #[serde(default)]
    t_max: Option<RatLike>,
    #[serde(default)]
    grid_points: Option<u32>,
    #[serde(default)]
    threads: Option<usize>,
}

#[derive(Deserialize, Debug)]
struct CertificateBlock {
    witness_prime: u64,
}

#[derive(Deserialize, Debug)]
struct ProblemFile {
    polynomial: Vec<IntLike>,
    algebra: AlgebraBlock,
    #[serde(default)]
    field_invariants: Option<FixtureBlock>,
    #[serde(default)]
    census: Option<CensusBlock>,
    #[serde(default)]
    irreducibility_certificate: Option<CertificateBlock>,
}

/// Census run parameters after merging file defaults and CLI overrides.
#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub t_max: BigRational,
    pub grid_points: u32,
    pub threads: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            t_max: BigRational::from(BigInt::from(1000)),
            grid_points: 6,
            threads: 1,
        }
    }
}

/// A fully validated problem, ready to run.
#[derive(Debug)]
pub struct Problem {
    pub poly: MonicIntPolynomial,
    pub algebra: AlgebraSpec,
    pub invariants: FieldInvariants,
    pub profiles: Vec<LocalProfile>,
    pub census_cfg: CensusConfig,
}

/// Parses and validates a problem file: polynomial shape, irreducibility,
/// the integrally-closed hypothesis, order verification, invariants
/// (computed or fixture) and the local profiles.
pub fn load_problem(json: &str) -> Result<Problem, CensusError> {
    let file: ProblemFile = serde_json::from_str(json)?;
    let coeffs = file
        .polynomial
        .iter()
        .map(|c| c.to_bigint())
        .collect::<Result<Vec<_>, _>>()?;
    let poly = MonicIntPolynomial::new(coeffs)?;
    let n = poly.degree();

    // irreducibility: computed through degree 3, certified beyond
    if n <= 3 {
        if !poly.is_irreducible_over_q()? {
            return Err(CensusError::reason(
                Reason::ReduciblePolynomial,
                format!("{poly} is reducible over Q"),
            ));
        }
    } else {
        match &file.irreducibility_certificate {
            Some(cert) => verify_irreducibility_witness(&poly, cert.witness_prime)?,
            None => {
                return Err(CensusError::reason(
                    Reason::IrreducibilityCertificateRequired,
                    format!("degree {n} requires irreducibility_certificate.witness_prime"),
                ))
            }
        }
    }

    // the integrally-closed hypothesis at every prime where it could fail
    for q in disc_prime_divisors(&poly) {
        if !poly.dedekind_maximal_at(q)? {
            return Err(CensusError::reason(
                Reason::NotIntegrallyClosed,
                format!("Z[x]/(p) is not maximal at {q}"),
            ));
        }
    }

    let algebra = match file.algebra {
        AlgebraBlock::Matrix {} => AlgebraSpec {
            n: n as u32,
            kind: AlgebraKind::Split,
        },
        AlgebraBlock::Quaternion { a, b, order_basis } => {
            if n != 2 {
                return Err(CensusError::reason(
                    Reason::UnsupportedDegree,
                    "quaternion algebras have degree 2",
                ));
            }
            if a == 0 || b == 0 {
                return Err(CensusError::reason(
                    Reason::SpecSchema,
                    "structure constants must be nonzero",
                ));
            }
            let basis_rows = order_basis.ok_or_else(|| {
                CensusError::reason(Reason::OrderBasisRequired, "order_basis required")
            })?;
            if basis_rows.len() != 4 || basis_rows.iter().any(|r| r.len() != 4) {
                return Err(CensusError::reason(
                    Reason::SpecSchema,
                    "order_basis must be a 4x4 matrix",
                ));
            }
            let mut basis: Vec<Quat> = Vec::with_capacity(4);
            for row in &basis_rows {
                let mut q = crate::quaternion::quat_zero();
                for (slot, v) in q.iter_mut().zip(row.iter()) {
                    *slot = v.to_rational()?;
                }
                basis.push(q);
            }
            AlgebraSpec {
                n: 2,
                kind: AlgebraKind::Quaternion {
                    a: BigInt::from(a),
                    b: BigInt::from(b),
                    basis: [
                        basis[0].clone(),
                        basis[1].clone(),
                        basis[2].clone(),
                        basis[3].clone(),
                    ],
                },
            }
        }
    };
    verify_order(&algebra)?;

    let invariants = if n == 2 {
        compute_invariants_quadratic(&poly)?
    } else {
        let fx = file.field_invariants.as_ref().ok_or_else(|| {
            CensusError::reason(
                Reason::SpecSchema,
                format!("degree {n} requires a field_invariants fixture"),
            )
        })?;
        let reg_str = match &fx.regulator {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(v) => v.to_string(),
            other => {
                return Err(CensusError::reason(
                    Reason::SpecParse,
                    format!("bad regulator value {other}"),
                ))
            }
        };
        let regulator = Real::from_decimal_str(&reg_str).ok_or_else(|| {
            CensusError::reason(Reason::SpecParse, format!("bad regulator {reg_str:?}"))
        })?;
        let record = FixtureRecord {
            r1: fx.r1,
            r2: fx.r2,
            w: fx.w,
            d: fx.d.to_bigint()?,
            h: fx.h.to_bigint()?,
            regulator,
        };
        load_invariants_fixture(&record, &poly)?
    };

    let profiles = relevant_profiles(&poly, &algebra)?;

    let mut census_cfg = CensusConfig::default();
    if let Some(block) = &file.census {
        if let Some(t) = &block.t_max {
            census_cfg.t_max = t.to_rational()?;
            if !census_cfg.t_max.is_positive() {
                return Err(CensusError::reason(Reason::SpecSchema, "t_max must be positive"));
            }
        }
        if let Some(g) = block.grid_points {
            if g == 0 {
                return Err(CensusError::reason(Reason::SpecSchema, "grid_points must be >= 1"));
            }
            census_cfg.grid_points = g;
        }
        if let Some(t) = block.threads {
            census_cfg.threads = t.max(1);
        }
    }

    Ok(Problem {
        poly,
        algebra,
        invariants,
        profiles,
        census_cfg,
    })
}

fn disc_prime_divisors(p: &MonicIntPolynomial) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = p.discriminant().abs();
    let mut f = BigInt::from(2);
    while &f * &f <= m {
        if (&m % &f).is_zero() {
            out.push(f.to_string().parse().unwrap());
            while (&m % &f).is_zero() {
                m /= &f;
            }
        }
        f += 1i32;
    }
    if m > BigInt::one() {
        out.push(m.to_string().parse().unwrap());
    }
    out
}

/// Runs the census appropriate to the algebra; an infeasible division
/// prime short-circuits to exact zero counts.
pub fn run_census(problem: &Problem) -> Result<(CensusSeries, Option<AsymptoticConstant>), CensusError> {
    let cfg = &problem.census_cfg;
    let grid = geometric_grid(&cfg.t_max, cfg.grid_points);
    if check_feasibility(&problem.profiles).is_err() {
        let series = CensusSeries {
            grid: grid.clone(),
            counts: vec![0; grid.len()],
            mode: match problem.algebra.kind {
                AlgebraKind::Split => crate::census::CensusMode::MatrixGeneric,
                AlgebraKind::Quaternion { .. } => crate::census::CensusMode::QuaternionOrder,
            },
        };
        return Ok((series, None));
    }
    let constant = assemble_constant(
        &problem.invariants,
        &problem.profiles,
        problem.poly.degree() as u32,
    )?;
    let series = match &problem.algebra.kind {
        AlgebraKind::Split => {
            if problem.poly.degree() == 2 {
                matrix_census_n2(&problem.poly, &grid, cfg.threads)?
            } else {
                matrix_census_generic(&problem.poly, &grid, cfg.threads)?
            }
        }
        AlgebraKind::Quaternion { .. } => {
            order_census_quaternion(&problem.algebra, &problem.poly, &grid, cfg.threads)?
        }
    };
    Ok((series, Some(constant)))
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt12(v: f64) -> String {
    format!("{v:.12}")
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `invariants` command text.
pub fn render_invariants(problem: &Problem) -> String {
    let inv = &problem.invariants;
    let mut out = String::new();
    let _ = writeln!(out, "polynomial: {}", problem.poly);
    let _ = writeln!(out, "degree: {}", problem.poly.degree());
    let _ = writeln!(out, "r1: {}  r2: {}  w: {}", inv.r1, inv.r2, inv.w);
    let _ = writeln!(out, "d_K: {}", inv.d);
    let _ = writeln!(out, "h_K: {}", inv.h);
    let prov = match inv.provenance {
        Provenance::Computed => "computed",
        Provenance::Fixture => "fixture",
    };
    let _ = writeln!(
        out,
        "R_K: {} ({})",
        fmt6(inv.regulator_value().to_f64()),
        prov
    );
    if let RegulatorSource::FundamentalUnit { x, y } = &inv.regulator {
        let _ = writeln!(out, "fundamental unit: ({x} + {y} sqrt({})) / 2", inv.d);
    }
    let _ = writeln!(out, "zeta residue: {}", fmt6(inv.zeta_residue().to_f64()));
    out
}

/// `local` command text: one line per relevant prime.
pub fn render_local(problem: &Problem) -> String {
    let mut out = String::new();
    for prof in &problem.profiles {
        let pairs: Vec<String> = prof
            .pairs
            .iter()
            .map(|(e, f)| format!("(e={e},f={f})"))
            .collect();
        let mut line = format!(
            "q={}  pairs=[{}]  division={}  feasible={}",
            prof.q,
            pairs.join(" "),
            if prof.is_division_prime { "yes" } else { "no" },
            if prof.feasible { "yes" } else { "no" },
        );
        if let Some(oc) = prof.orbit_count {
            let _ = write!(line, "  orbits={oc}");
        }
        if let Some(c) = &prof.correction_factor {
            let _ = write!(line, "  correction={c} ({})", fmt6(rational_to_f64(c)));
        }
        if let Some(s) = &prof.split_density {
            let _ = write!(line, "  split_density={s} ({})", fmt6(rational_to_f64(s)));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// `constant` command text with the component breakdown and audit lines.
pub fn render_constant(problem: &Problem) -> Result<String, CensusError> {
    check_feasibility(&problem.profiles)?;
    let n = problem.poly.degree() as u32;
    let c = assemble_constant(&problem.invariants, &problem.profiles, n)?;
    let mut out = String::new();
    let _ = writeln!(out, "n: {n}  exponent m = n(n-1)/2: {}", c.exponent);
    if c.corrections.is_empty() {
        let _ = writeln!(out, "division corrections: none (split everywhere)");
    } else {
        for (q, corr) in &c.corrections {
            let _ = writeln!(
                out,
                "division correction q={q}: {corr} ({})",
                fmt6(rational_to_f64(corr))
            );
        }
    }
    let _ = writeln!(out, "zeta residue: {}", fmt6(c.zeta_residue.to_f64()));
    let _ = writeln!(
        out,
        "unit ball volume omega_{}: {}",
        c.exponent,
        fmt6(c.unit_ball.to_f64())
    );
    let _ = writeln!(out, "Lambda product: {}", fmt6(c.lambda_product.to_f64()));
    let _ = writeln!(out, "C = {}", fmt6(c.value.to_f64()));
    let _ = writeln!(
        out,
        "audit: vol O({n}) = {}",
        fmt6(orthogonal_group_volume(n).to_f64())
    );
    if let AlgebraKind::Quaternion { .. } = problem.algebra.kind {
        let emb = real_embedding(&problem.algebra)?;
        let g = frobenius_gram(&emb);
        let rows: Vec<Vec<_>> = (0..4).map(|r| g[r].to_vec()).collect();
        let det = quad_det(&emb.field, &rows);
        let covol = emb.field.to_f64(&det).sqrt();
        let _ = writeln!(out, "audit: order lattice covolume = {}", fmt6(covol));
    }
    Ok(out)
}

/// CSV for the census: `T,count,count_over_Tm,predicted_C,ratio`, LF only,
/// floats at 12 digits.
pub fn census_csv(series: &CensusSeries, constant: Option<&AsymptoticConstant>) -> String {
    let mut out = String::from("T,count,count_over_Tm,predicted_C,ratio\n");
    for row in convergence_table(series, constant) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt12(rational_to_f64(&row.t)),
            row.count,
            fmt12(row.count_over_tm),
            fmt12(row.predicted_c),
            fmt12(row.ratio),
        );
    }
    out
}

/// `verify` command: convergence table at 6 digits.
pub fn render_verify(series: &CensusSeries, constant: Option<&AsymptoticConstant>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>14}  {:>10}  {:>12}  {:>12}",
        "T", "N(T)", "N/T^m", "ratio"
    );
    for row in convergence_table(series, constant) {
        let _ = writeln!(
            out,
            "{:>14}  {:>10}  {:>12}  {:>12}",
            fmt6(rational_to_f64(&row.t)),
            row.count,
            fmt6(row.count_over_tm),
            fmt6(row.ratio),
        );
    }
    out
}
