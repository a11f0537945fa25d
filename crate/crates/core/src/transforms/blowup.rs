//! Charts of a local blowing up and the image formula away from the centre.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::Formula;
use crate::normal::{fresh_name, substitute};
use crate::term::Term;

use super::TransformError;

/// Blowing up of the ambient space along `V(center)`, restricted to `guard`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSpec {
    pub ambient: Vec<String>,
    pub center: Vec<Term>,
    pub guard: Formula,
    /// Equations of a closed subvariety carrying the points of interest;
    /// informational for callers that sample on it.
    pub equations: Vec<Term>,
}

impl BlowupSpec {
    pub fn new(ambient: &[&str], center: Vec<Term>) -> Result<Self, TransformError> {
        let spec = BlowupSpec {
            ambient: ambient.iter().map(|s| s.to_string()).collect(),
            center,
            guard: Formula::truth(),
            equations: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_guard(mut self, guard: Formula) -> Self {
        self.guard = guard;
        self
    }

    pub fn validate(&self) -> Result<(), TransformError> {
        if self.center.is_empty() {
            return Err(TransformError::UnsupportedCenter("empty centre".into()));
        }
        for g in &self.center {
            if !g.is_polynomial() {
                return Err(TransformError::UnsupportedCenter(format!("{g} is not a polynomial")));
            }
            if let Some(v) = g.free_vars().into_iter().find(|v| !self.ambient.contains(v)) {
                return Err(TransformError::UnknownVariable(v));
            }
        }
        if !self.guard.is_quantifier_free() || self.guard.contains_d() {
            return Err(TransformError::UnsupportedCenter(
                "guard must be quantifier-free and D-free".into(),
            ));
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.center.len()
    }

    /// Name of chart variable `u_k` (1-based), avoiding the ambient names.
    pub fn chart_var(&self, k: usize) -> String {
        let avoid: BTreeSet<String> = self.ambient.iter().cloned().collect();
        fresh_name(&format!("u{k}"), &avoid)
    }
}

/// Chart `j` (1-based): coordinates `u_k`, `k != j`, with `g_k = g_j * u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub index: usize,
    pub chart_vars: Vec<String>,
    /// `(k, u_k)` for `k != j`, 1-based.
    pub slots: Vec<(usize, String)>,
    /// `g_k = g_j * u_k` for each slot.
    pub relations: Vec<Formula>,
    /// Ambient coordinates eliminated by the relations (coordinate centres only).
    pub solved: BTreeMap<String, Term>,
    /// Coordinates of the chart: surviving ambient variables then the `u_k`.
    pub coordinates: Vec<String>,
}

pub fn chart_map(spec: &BlowupSpec, j: usize) -> Result<Chart, TransformError> {
    let n = spec.arity();
    if j == 0 || j > n {
        return Err(TransformError::ArityMismatch { expected: n, got: j });
    }
    let gj = spec.center[j - 1].clone();
    let mut slots = Vec::new();
    let mut relations = Vec::new();
    let mut solved = BTreeMap::new();
    for k in (1..=n).filter(|k| *k != j) {
        let u = spec.chart_var(k);
        let gk = &spec.center[k - 1];
        let image = Term::mul(gj.clone(), Term::var(u.clone()));
        relations.push(Formula::eq(gk.clone(), image.clone()));
        // a coordinate generator not occurring in g_j is solved for
        if let Term::Var(v) = gk {
            if !gj.mentions(v) && !solved.contains_key(v) {
                solved.insert(v.clone(), image);
            }
        }
        slots.push((k, u));
    }
    let mut coordinates: Vec<String> = spec
        .ambient
        .iter()
        .filter(|v| !solved.contains_key(*v))
        .cloned()
        .collect();
    let chart_vars: Vec<String> = slots.iter().map(|(_, u)| u.clone()).collect();
    coordinates.extend(chart_vars.iter().cloned());
    Ok(Chart {
        index: j,
        chart_vars,
        slots,
        relations,
        solved,
        coordinates,
    })
}

/// `θ⁻¹(φ)` on chart `j`: solved coordinates are substituted, the remaining
/// relations and the pulled-back guard are conjoined.
pub fn pullback_to_chart(phi: &Formula, spec: &BlowupSpec, j: usize) -> Result<Formula, TransformError> {
    if !phi.is_quantifier_free() {
        return Err(TransformError::QuantifierPresent);
    }
    let chart = chart_map(spec, j)?;
    let mut parts = Vec::new();
    for ((k, _), rel) in chart.slots.iter().zip(&chart.relations) {
        let gk = &spec.center[k - 1];
        let solved_here = matches!(gk, Term::Var(v) if chart.solved.get(v).is_some_and(|t| *t == rel_rhs(rel)));
        if !solved_here {
            if phi.contains_d() {
                return Err(TransformError::UnsupportedCenter(format!(
                    "generator {gk} is not coordinate-wise rewritable"
                )));
            }
            parts.push(substitute(rel, &chart.solved));
        }
    }
    parts.push(substitute(&spec.guard, &chart.solved));
    parts.push(substitute(phi, &chart.solved));
    Ok(Formula::and(parts))
}

fn rel_rhs(rel: &Formula) -> Term {
    match rel {
        Formula::Eq(_, b) => b.clone(),
        _ => unreachable!("chart relations are equations"),
    }
}

/// The image off the centre of the chart sets `φ_j`:
/// `⋁_j (⋀_k |g_k| <= |g_j|) ∧ g_j != 0 ∧ guard ∧ φ_j[u_k := D(g_k, g_j)]`.
pub fn image_off_center(spec: &BlowupSpec, chart_formulas: &[Formula]) -> Result<Formula, TransformError> {
    let n = spec.arity();
    if chart_formulas.len() != n {
        return Err(TransformError::ArityMismatch {
            expected: n,
            got: chart_formulas.len(),
        });
    }
    let mut disjuncts = Vec::new();
    for (j, phi) in (1..=n).zip(chart_formulas) {
        if !phi.is_quantifier_free() {
            return Err(TransformError::QuantifierPresent);
        }
        let chart = chart_map(spec, j)?;
        let gj = &spec.center[j - 1];
        let mut parts: Vec<Formula> = chart
            .slots
            .iter()
            .map(|(k, _)| Formula::le(spec.center[k - 1].clone(), gj.clone()))
            .collect();
        parts.push(Formula::nonzero(gj.clone()));
        parts.push(spec.guard.clone());
        let bindings: BTreeMap<String, Term> = chart
            .slots
            .iter()
            .map(|(k, u)| (u.clone(), Term::d(spec.center[k - 1].clone(), gj.clone())))
            .collect();
        parts.push(substitute(phi, &bindings));
        disjuncts.push(Formula::and(parts));
    }
    Ok(Formula::or(disjuncts))
}

/// Backward witness for chart `j` at an ambient point: `u_k = D(g_k, g_j)`.
pub fn chart_witness_terms(spec: &BlowupSpec, j: usize) -> Result<Vec<(String, Term)>, TransformError> {
    let chart = chart_map(spec, j)?;
    let gj = &spec.center[j - 1];
    Ok(chart
        .slots
        .iter()
        .map(|(k, u)| (u.clone(), Term::d(spec.center[k - 1].clone(), gj.clone())))
        .collect())
}
