//! Reduction to the residue field `Q` and constructible sets over it.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::formula::Formula;
use crate::grobner::{buchberger, normal_form, saturate, GbBudget, MPoly, MonomialOrder};
use crate::poly::KPoly;
use crate::scalar::Scalar;
use crate::term::Term;

use super::model::{Model, Sign, SpecialSet};
use super::FlatError;

/// Reduces an integral polynomial modulo the maximal ideal, in the variable order `vars`.
pub fn reduce(p: &KPoly, vars: &[String]) -> Result<MPoly, FlatError> {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let r = c
            .residue()
            .map_err(|_| FlatError::NonIntegralCoefficient(p.to_string()))?;
        if r.is_zero() {
            continue;
        }
        let mut e = vec![0u32; vars.len()];
        for (v, k) in m {
            let i = vars
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| FlatError::UnknownVariable(v.clone()))?;
            e[i] = *k;
        }
        terms.push((e, r));
    }
    Ok(MPoly::new(vars.len(), MonomialOrder::GrevLex, terms))
}

/// Residues of the coordinates of an integral point.
pub fn reduce_point(point: &[Scalar]) -> Result<Vec<BigRational>, FlatError> {
    point
        .iter()
        .map(|x| x.residue().map_err(|_| FlatError::PointNotIntegral(x.to_string())))
        .collect()
}

/// `V(ideal) \ V(g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduePiece {
    pub ideal: Vec<MPoly>,
    pub g: MPoly,
}

impl ResiduePiece {
    pub fn contains(&self, a: &[BigRational]) -> bool {
        self.ideal.iter().all(|p| p.eval(a).is_zero()) && !self.g.eval(a).is_zero()
    }

    fn render(&self, vars: &[String]) -> String {
        let ideal = if self.ideal.is_empty() {
            "0".to_string()
        } else {
            self.ideal
                .iter()
                .map(|p| p.display_with(vars))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("I = ({ideal})  g = {}", self.g.display_with(vars))
    }
}

/// Finite union of locally closed sets over the residue field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueConstructible {
    pub vars: Vec<String>,
    pub pieces: Vec<ResiduePiece>,
}

impl ResidueConstructible {
    pub fn empty(vars: Vec<String>) -> Self {
        ResidueConstructible {
            vars,
            pieces: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, a: &[BigRational]) -> bool {
        self.pieces.iter().any(|p| p.contains(a))
    }

    /// Canonical form: reduced grevlex bases, `g` reduced and monic, empty
    /// pieces (`g` nilpotent modulo `I`) dropped, pieces sorted and deduplicated.
    pub fn normalize(&self, budget: GbBudget) -> Result<Self, FlatError> {
        let n = self.vars.len();
        let mut pieces = Vec::new();
        for piece in &self.pieces {
            let ideal: Vec<MPoly> = if piece.ideal.iter().all(MPoly::is_zero) {
                Vec::new()
            } else {
                buchberger(&piece.ideal, MonomialOrder::GrevLex, budget)?
            };
            let g = if ideal.is_empty() {
                piece.g.with_order(MonomialOrder::GrevLex)
            } else {
                normal_form(&piece.g, &ideal)
            };
            if g.is_zero() {
                continue;
            }
            let g = g.monic();
            if !ideal.is_empty() && !g.is_constant() {
                let sat = saturate(&ideal, &g, budget)?;
                if sat.len() == 1 && sat[0].is_one() {
                    continue;
                }
            }
            pieces.push(ResiduePiece { ideal, g });
        }
        let key = |p: &ResiduePiece| p.render(&self.vars);
        pieces.sort_by_key(key);
        pieces.dedup();
        debug_assert!(pieces.iter().all(|p| p.g.nvars() == n));
        Ok(ResidueConstructible {
            vars: self.vars.clone(),
            pieces,
        })
    }
}

impl fmt::Display for ResidueConstructible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.vars.join(" "))?;
        if self.pieces.is_empty() {
            return writeln!(f, "empty");
        }
        for p in &self.pieces {
            writeln!(f, "piece {}", p.render(&self.vars))?;
        }
        Ok(())
    }
}

/// `Σ°`: the relations and the `< 1` functions vanish, the `>= 1` functions do not.
pub fn special_to_residue(sigma: &SpecialSet, model: &Model) -> Result<ResidueConstructible, FlatError> {
    let vars = model.vars.clone();
    let mut ideal = Vec::new();
    for r in &model.rels {
        ideal.push(reduce(r, &vars)?);
    }
    let mut g = MPoly::one(vars.len(), MonomialOrder::GrevLex);
    for (h, sign) in &sigma.conditions {
        let hb = reduce(h, &vars)?;
        match sign {
            Sign::Lt => ideal.push(hb),
            Sign::Ge => g = g.mul(&hb),
        }
    }
    ideal.retain(|p| !p.is_zero());
    Ok(ResidueConstructible {
        vars,
        pieces: vec![ResiduePiece { ideal, g }],
    })
}

/// Lifts `Ω°` to `ξ⁻¹(Ω°)`: each piece becomes `|p| < 1` for its generators and `|g| >= 1`.
pub fn residue_to_formula(omega: &ResidueConstructible) -> Formula {
    let vars = &omega.vars;
    Formula::or(
        omega
            .pieces
            .iter()
            .map(|piece| {
                let mut parts: Vec<Formula> = piece
                    .ideal
                    .iter()
                    .map(|p| Formula::lt(p.to_term(vars), Term::one()))
                    .collect();
                if !piece.g.is_constant() {
                    parts.push(Formula::le(Term::one(), piece.g.to_term(vars)));
                } else if piece.g.is_zero() {
                    parts.push(Formula::falsity());
                }
                Formula::and(parts)
            })
            .collect(),
    )
}

/// Rational constant as an exact scalar.
pub fn lift_rational(c: &BigRational) -> Scalar {
    if c.is_one() {
        Scalar::one()
    } else {
        Scalar::from_rational(c.clone())
    }
}
