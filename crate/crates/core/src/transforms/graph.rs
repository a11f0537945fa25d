//! Encoding a basic set as a special set on a graph.

use std::collections::BTreeSet;

use crate::formula::Formula;
use crate::normal::fresh_name;
use crate::term::Term;

use super::TransformError;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEncoding {
    /// One new coordinate per atom.
    pub z_vars: Vec<String>,
    /// `p_i - z_i q_i`, cutting out `Y`.
    pub equations: Vec<Term>,
    /// `|z_i| < 1` for the strict atoms.
    pub constraint: Formula,
    /// Product of the `q_i` of the strict atoms; `Ω ∩ {q != 0}` maps onto the basic set.
    pub q: Term,
}

impl GraphEncoding {
    /// `Y ∧ Ω ∧ q != 0` as one formula in the original and the `z` variables.
    pub fn to_formula(&self) -> Formula {
        let mut parts: Vec<Formula> = self.equations.iter().map(|e| Formula::is_zero(e.clone())).collect();
        parts.push(self.constraint.clone());
        if !self.q.is_one_const() {
            parts.push(Formula::nonzero(self.q.clone()));
        }
        Formula::and(parts)
    }

    /// `z_i = D(p_i, q_i)`: the witness over a point of the basic set.
    pub fn witnesses(&self, atoms: &[Formula]) -> Vec<(String, Term)> {
        self.z_vars
            .iter()
            .zip(atoms)
            .map(|(z, a)| {
                let (p, q) = atom_sides(a).expect("validated by graph_encode");
                (z.clone(), Term::d(p.clone(), q.clone()))
            })
            .collect()
    }
}

fn atom_sides(a: &Formula) -> Option<(&Term, &Term)> {
    match a {
        Formula::Le(p, q) | Formula::Lt(p, q) => Some((p, q)),
        _ => None,
    }
}

/// Non-strict atoms contribute `p - z q = 0`; strict atoms additionally `|z| < 1`.
pub fn graph_encode(atoms: &[Formula]) -> Result<GraphEncoding, TransformError> {
    let mut avoid: BTreeSet<String> = BTreeSet::new();
    for a in atoms {
        avoid.extend(a.free_vars());
    }
    let mut z_vars = Vec::new();
    let mut equations = Vec::new();
    let mut strict = Vec::new();
    let mut qs = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        let (p, q) = atom_sides(a).ok_or_else(|| TransformError::NonPolynomialAtom(a.to_string()))?;
        if !p.is_polynomial() || !q.is_polynomial() {
            return Err(TransformError::NonPolynomialAtom(a.to_string()));
        }
        let z = fresh_name(&format!("z{}", i + 1), &avoid);
        avoid.insert(z.clone());
        equations.push(Term::sub(p.clone(), Term::mul(Term::var(z.clone()), q.clone())));
        if matches!(a, Formula::Lt(..)) {
            strict.push(Formula::lt(Term::var(z.clone()), Term::one()));
            qs.push(q.clone());
        }
        z_vars.push(z);
    }
    Ok(GraphEncoding {
        z_vars,
        equations,
        constraint: Formula::and(strict),
        q: Term::product(qs),
    })
}
