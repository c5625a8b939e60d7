use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

/// Which pseudometric axiom failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomKind {
    Asymmetry,
    Negative,
    NonzeroDiagonal,
    Triangle,
    /// Only raised for base metrics: two distinct points at distance zero.
    NotSeparating,
}

impl fmt::Display for AxiomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            AxiomKind::Asymmetry => "asymmetry",
            AxiomKind::Negative => "negative",
            AxiomKind::NonzeroDiagonal => "nonzero-diagonal",
            AxiomKind::Triangle => "triangle",
            AxiomKind::NotSeparating => "not-separating",
        };
        f.write_str(name)
    }
}

/// A failed axiom together with the labels that witness it.
///
/// For the triangle axiom the witness is `(x, y, z)` with
/// `d(x, z) > d(x, y) + d(y, z)`; for the pairwise axioms it is `(x, y, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub kind: AxiomKind,
    pub witness: (String, String, String),
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y, z) = &self.witness;
        match self.kind {
            AxiomKind::Triangle => write!(f, "triangle violation at ({x}, {y}, {z})"),
            kind => write!(f, "{kind} violation at ({x}, {y})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    Axiom(AxiomViolation),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("space must contain at least one point")]
    EmptySpace,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown point label `{0}`")]
    UnknownPoint(String),
    #[error("pseudometrics live on different spaces")]
    SpaceMismatch,
    #[error("Lipschitz constant undefined on a one-point space")]
    DegenerateSpace,
    #[error("operation undefined for the zero pseudometric")]
    ZeroPseudometric,
    #[error("function family is empty")]
    EmptyFamily,
    #[error("lip(d) = {lip} is not below k = {k}")]
    NotInLpmk { lip: Rational, k: Rational },
    #[error("lip(d) = {lip} does not exceed k = {k}")]
    InClosure { lip: Rational, k: Rational },
    #[error("target pair must consist of distinct points, got `{0}` twice")]
    DegeneratePair(String),
    #[error("{what} must be positive, got {value}")]
    NotPositive { what: &'static str, value: Rational },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("not a bijection: {0}")]
    NotBijection(String),
}

impl From<AxiomViolation> for Error {
    fn from(v: AxiomViolation) -> Self {
        Error::Axiom(v)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
