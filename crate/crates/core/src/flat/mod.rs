//! Images of special sets under flat maps of integral models, computed over
//! the residue field and lifted back through the reduction map.

pub mod chevalley;
pub mod hensel;
pub mod model;
pub mod residue;

use thiserror::Error;

use crate::formula::Formula;
use crate::grobner::GbError;

pub use chevalley::{chevalley_image, ChevalleyBudget, ResidueMorphism};
pub use hensel::{fibre_witness, lift_residue_point, univariate_roots, FibreWitness};
pub use model::{AdmissibleMap, Model, Sign, SpecialSet};
pub use residue::{
    reduce, reduce_point, residue_to_formula, special_to_residue, ResidueConstructible, ResiduePiece,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlatError {
    #[error("coefficient of negative order in {0}")]
    NonIntegralCoefficient(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no image given for target generator `{0}`")]
    MissingImage(String),
    #[error("flatness of the map is not asserted")]
    FlatnessNotAsserted,
    #[error("point coordinate {0} is not integral")]
    PointNotIntegral(String),
    #[error("residue point does not satisfy relation {0}")]
    PointNotOnModel(String),
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("not liftable in the supported fragment: {0}")]
    NotLiftableInFragment(String),
    #[error("constructible image not certified within budget; unresolved: {}", unresolved.join(" | "))]
    UnsupportedFragment {
        partial: ResidueConstructible,
        unresolved: Vec<String>,
    },
    #[error(transparent)]
    Grobner(#[from] GbError),
}

/// Image data: the residue-level image and its lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatImage {
    pub source_residue: ResidueConstructible,
    pub residue: ResidueConstructible,
    pub formula: Formula,
}

/// Reduced morphism of an admissible map.
pub fn residue_morphism(f: &AdmissibleMap) -> Result<ResidueMorphism, FlatError> {
    let images = f
        .target
        .vars
        .iter()
        .map(|v| reduce(&f.morphism[v], &f.source.vars))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResidueMorphism {
        source_vars: f.source.vars.clone(),
        target_vars: f.target.vars.clone(),
        images,
    })
}

/// `f(Σ)` as a formula on the target: `ξ⁻¹` of the Chevalley image of `Σ°`.
pub fn flat_image(f: &AdmissibleMap, sigma: &SpecialSet, budget: ChevalleyBudget) -> Result<FlatImage, FlatError> {
    if !f.flat_asserted {
        return Err(FlatError::FlatnessNotAsserted);
    }
    f.validate()?;
    let source_residue = special_to_residue(sigma, &f.source)?.normalize(budget.gb)?;
    let map = residue_morphism(f)?;
    let residue = chevalley_image(&source_residue, &map, budget)?;
    let formula = residue_to_formula(&residue);
    Ok(FlatImage {
        source_residue,
        residue,
        formula,
    })
}
