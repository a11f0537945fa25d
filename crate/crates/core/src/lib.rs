//! Symbolic engine for D-semianalytic formulas over the valued field `Q((w))`.
//!
//! Formulas compare norms of D-function terms; every transformation in
//! [`transforms`] and [`flat`] is cross-checked by the sampling oracle in
//! [`semantics`].

pub mod flat;
pub mod formats;
pub mod formula;
pub mod grobner;
pub mod normal;
pub mod osgood;
pub mod parse;
pub mod poly;
pub mod semantics;
pub mod scalar;
pub mod series;
pub mod term;
pub mod transforms;

pub use flat::{
    chevalley_image, flat_image, AdmissibleMap, ChevalleyBudget, FlatError, FlatImage, Model, ResidueConstructible,
    Sign, SpecialSet,
};
pub use formats::FormatError;
pub use formula::Formula;
pub use grobner::{GbBudget, GbError, MPoly, MonomialOrder};
pub use normal::NormalError;
pub use osgood::OsgoodError;
pub use semantics::{EvalError, OracleConfig, Report, Verdict, ZariskiError};
pub use series::SeriesError;
pub use transforms::{FlatteningDatum, PipelineConfig, TransformError};
pub use normal::{CoveredFormula, CoveredPiece};
pub use parse::{parse_formula, parse_point, parse_term, ParseError};
pub use poly::KPoly;
pub use scalar::{ddiv, NormValue, Precision, Scalar, ScalarError};
pub use series::{SeriesRegistry, StrictSeries};
pub use term::Term;

/// Any failure of the engine, for callers that do not care which stage failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Normal(#[from] NormalError),
    #[error(transparent)]
    Grobner(#[from] GbError),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Zariski(#[from] ZariskiError),
    #[error(transparent)]
    Osgood(#[from] OsgoodError),
}
