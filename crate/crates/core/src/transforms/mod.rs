//! Blow-up charts, graph encoding, `D`-elimination rewrites, and the
//! finite-centre elimination pipeline.

pub mod blowup;
pub mod delim;
pub mod graph;
pub mod pipeline;

use thiserror::Error;

use crate::flat::FlatError;
use crate::semantics::EvalError;

pub use blowup::{chart_map, chart_witness_terms, image_off_center, pullback_to_chart, BlowupSpec, Chart};
pub use delim::{d_eliminate_phq, d_eliminate_qhp};
pub use graph::{graph_encode, GraphEncoding};
pub use pipeline::{qe_pipeline, CenterPoint, DatumNode, FinalMap, FlatteningDatum, PipelineConfig, PipelineResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unsupported centre: {0}")]
    UnsupportedCenter(String),
    #[error("formula must be quantifier-free")]
    QuantifierPresent,
    #[error("atom is not a polynomial norm comparison: {0}")]
    NonPolynomialAtom(String),
    #[error("divisibility witness rejected: {0}")]
    WitnessInvalid(String),
    #[error("quotient {0} is not integral, so it is not the value of D on the unit polydisc")]
    WitnessNotIntegral(String),
    #[error("hole occurs non-polynomially in {0}")]
    NonPolynomialHole(String),
    #[error("centre is not given as a finite point set")]
    NonFiniteCenter,
    #[error("no witness found over centre point {point}")]
    WitnessSearchFailed { point: String },
    #[error("unsupported flattening datum: {0}")]
    UnsupportedDatum(String),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<crate::grobner::GbError> for TransformError {
    fn from(e: crate::grobner::GbError) -> Self {
        TransformError::Flat(FlatError::Grobner(e))
    }
}
