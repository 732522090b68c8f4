//! Error type shared across the crate.
//!
//! Every failure carries one [`Reason`] from a closed set so the CLI can
//! emit a single machine-parsable line and a stable exit code.

use std::fmt;
use thiserror::Error;

/// Closed set of failure reason codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    // problem-spec / input errors (exit code 2)
    SpecParse,
    SpecSchema,
    OrderBasisRequired,
    PolynomialDegree,
    PolynomialNotMonic,
    NotPrime,
    UnsupportedDegree,
    // hypothesis violations (exit code 3)
    ReduciblePolynomial,
    IrreducibilityCertificateRequired,
    NotIntegrallyClosed,
    DefiniteAlgebra,
    OrderNotRing,
    OrderNotIntegral,
    OrderNotUnimodular,
    OrderNotMaximal,
    FixtureMismatch,
    // infeasible problem (exit code 4)
    InfeasibleDivisionPrime,
    // internal guards
    EnumerationGuard,
}

impl Reason {
    /// Stable machine-parsable code.
    pub fn code(self) -> &'static str {
        match self {
            Reason::SpecParse => "spec-parse",
            Reason::SpecSchema => "spec-schema",
            Reason::OrderBasisRequired => "order-basis-required",
            Reason::PolynomialDegree => "polynomial-degree",
            Reason::PolynomialNotMonic => "polynomial-not-monic",
            Reason::NotPrime => "not-prime",
            Reason::UnsupportedDegree => "unsupported-degree",
            Reason::ReduciblePolynomial => "reducible-polynomial",
            Reason::IrreducibilityCertificateRequired => "irreducibility-certificate-required",
            Reason::NotIntegrallyClosed => "not-integrally-closed",
            Reason::DefiniteAlgebra => "definite-algebra",
            Reason::OrderNotRing => "order-not-ring",
            Reason::OrderNotIntegral => "order-not-integral",
            Reason::OrderNotUnimodular => "order-not-unimodular",
            Reason::OrderNotMaximal => "order-not-maximal",
            Reason::FixtureMismatch => "fixture-mismatch",
            Reason::InfeasibleDivisionPrime => "infeasible-division-prime",
            Reason::EnumerationGuard => "enumeration-guard",
        }
    }

    /// CLI exit code class: 2 spec error, 3 hypothesis violation,
    /// 4 infeasible problem.
    pub fn exit_code(self) -> i32 {
        match self {
            Reason::SpecParse
            | Reason::SpecSchema
            | Reason::OrderBasisRequired
            | Reason::PolynomialDegree
            | Reason::PolynomialNotMonic
            | Reason::NotPrime
            | Reason::UnsupportedDegree => 2,
            Reason::ReduciblePolynomial
            | Reason::IrreducibilityCertificateRequired
            | Reason::NotIntegrallyClosed
            | Reason::DefiniteAlgebra
            | Reason::OrderNotRing
            | Reason::OrderNotIntegral
            | Reason::OrderNotUnimodular
            | Reason::OrderNotMaximal
            | Reason::FixtureMismatch => 3,
            Reason::InfeasibleDivisionPrime => 4,
            Reason::EnumerationGuard => 2,
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Error, Debug)]
pub enum CensusError {
    #[error("{reason}: {detail}")]
    Tagged { reason: Reason, detail: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("spec-parse: {0}")]
    Json(#[from] serde_json::Error),
}

impl CensusError {
    pub fn reason(reason: Reason, detail: impl Into<String>) -> Self {
        CensusError::Tagged {
            reason,
            detail: detail.into(),
        }
    }

    pub fn reason_code(&self) -> Reason {
        match self {
            CensusError::Tagged { reason, .. } => *reason,
            CensusError::Io(_) | CensusError::Json(_) => Reason::SpecParse,
        }
    }
}
