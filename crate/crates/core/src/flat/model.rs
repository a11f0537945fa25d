use std::collections::BTreeMap;
use std::fmt;

use crate::formula::Formula;
use crate::poly::KPoly;
use crate::scalar::Scalar;
use crate::semantics::{eval_formula, Env, EvalError, Verdict};
use crate::term::Term;

use super::FlatError;

/// `R<vars>/(rels)`: an integral model presented by generators and relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub vars: Vec<String>,
    pub rels: Vec<KPoly>,
}

impl Model {
    pub fn free(vars: &[&str]) -> Self {
        Model {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            rels: Vec::new(),
        }
    }

    pub fn with_rels(vars: &[&str], rels: Vec<KPoly>) -> Self {
        Model {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            rels,
        }
    }

    /// The relations as a formula (`rel = 0` for each).
    pub fn equations(&self) -> Formula {
        Formula::and(
            self.rels
                .iter()
                .map(|r| Formula::is_zero(r.to_term()))
                .collect(),
        )
    }

    fn check(&self, what: &str) -> Result<(), FlatError> {
        for r in &self.rels {
            if !r.is_integral() {
                return Err(FlatError::NonIntegralCoefficient(format!("{what} relation {r}")));
            }
            if let Some(v) = r.vars().into_iter().find(|v| !self.vars.contains(v)) {
                return Err(FlatError::UnknownVariable(v));
            }
        }
        Ok(())
    }
}

/// A morphism of integral models `A° -> B°`, read geometrically as a map
/// from the source `Sp B` to the target `Sp A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleMap {
    pub source: Model,
    pub target: Model,
    /// Image of each target generator, as an integral polynomial in the source generators.
    pub morphism: BTreeMap<String, KPoly>,
    pub flat_asserted: bool,
    pub provenance: String,
}

impl AdmissibleMap {
    pub fn new(source: Model, target: Model, morphism: BTreeMap<String, KPoly>) -> Self {
        AdmissibleMap {
            source,
            target,
            morphism,
            flat_asserted: false,
            provenance: String::new(),
        }
    }

    pub fn assert_flat(mut self, provenance: &str) -> Self {
        self.flat_asserted = true;
        self.provenance = provenance.to_string();
        self
    }

    pub fn validate(&self) -> Result<(), FlatError> {
        self.source.check("source")?;
        self.target.check("target")?;
        for v in &self.target.vars {
            let Some(p) = self.morphism.get(v) else {
                return Err(FlatError::MissingImage(v.clone()));
            };
            if !p.is_integral() {
                return Err(FlatError::NonIntegralCoefficient(format!("image of {v}: {p}")));
            }
            if let Some(u) = p.vars().into_iter().find(|u| !self.source.vars.contains(u)) {
                return Err(FlatError::UnknownVariable(u));
            }
        }
        if let Some(v) = self.morphism.keys().find(|v| !self.target.vars.contains(v)) {
            return Err(FlatError::UnknownVariable(v.clone()));
        }
        Ok(())
    }

    /// Images of a source point.
    pub fn apply(&self, point: &[Scalar]) -> Vec<Scalar> {
        let env: BTreeMap<&str, &Scalar> = self
            .source
            .vars
            .iter()
            .map(String::as_str)
            .zip(point)
            .collect();
        self.target
            .vars
            .iter()
            .map(|v| {
                self.morphism[v]
                    .eval(&|name| env.get(name).map(|s| (*s).clone()))
                    .expect("morphism only mentions source variables")
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `|h| < 1`
    Lt,
    /// `|h| >= 1`
    Ge,
}

/// Conditions `|h_i| < 1` / `|h_i| >= 1` with Gauss-norm-bounded `h_i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecialSet {
    pub conditions: Vec<(KPoly, Sign)>,
}

impl SpecialSet {
    pub fn new(conditions: Vec<(KPoly, Sign)>) -> Result<Self, FlatError> {
        for (h, _) in &conditions {
            if !h.is_integral() {
                return Err(FlatError::NonIntegralCoefficient(h.to_string()));
            }
        }
        Ok(SpecialSet { conditions })
    }

    pub fn whole() -> Self {
        SpecialSet::default()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(
            self.conditions
                .iter()
                .map(|(h, s)| match s {
                    Sign::Lt => Formula::lt(h.to_term(), Term::one()),
                    Sign::Ge => Formula::le(Term::one(), h.to_term()),
                })
                .collect(),
        )
    }

    pub fn contains(&self, vars: &[String], point: &[Scalar], n: i64) -> Result<Verdict, EvalError> {
        let env: Env = vars.iter().cloned().zip(point.iter().cloned()).collect();
        eval_formula(&self.to_formula(), &env, n)
    }
}

impl fmt::Display for SpecialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}
