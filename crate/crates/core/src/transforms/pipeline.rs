//! Elimination along a flattening datum with finite centres.
//!
//! The image is assembled bottom-up: flat final maps give the chart images,
//! [`image_off_center`] pushes them down off the centre, and the finitely many
//! centre points are added back one by one after a witnessed membership check.

use std::collections::BTreeMap;

use crate::flat::{flat_image, special_to_residue, AdmissibleMap, ChevalleyBudget, Model, SpecialSet};
use crate::formula::Formula;
use crate::parse::format_point;
use crate::poly::KPoly;
use crate::scalar::Scalar;
use crate::semantics::{exists_check, Env, ExistsOutcome, OracleConfig};
use crate::term::Term;

use super::blowup::{chart_map, image_off_center, BlowupSpec};
use super::TransformError;

/// A flat final map together with its map `θ` to the original source `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalMap {
    pub map: AdmissibleMap,
    /// `Y`-coordinate to polynomial in the final source coordinates.
    pub theta: BTreeMap<String, KPoly>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterPoint {
    pub point: Vec<Scalar>,
    /// A source point of `Ω` over the centre point, supplied with the datum.
    pub witness: Option<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatumNode {
    Final(FinalMap),
    Blowup {
        spec: BlowupSpec,
        /// The centre as an explicit point set; `None` when not finite.
        centers: Option<Vec<CenterPoint>>,
        /// One node per chart, in chart order.
        charts: Vec<DatumNode>,
    },
}

/// Local blow-ups of the target of `f: Y -> X` ending in flat maps.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningDatum {
    /// `f: Y -> X`; flatness is not required of it.
    pub map: AdmissibleMap,
    pub root: DatumNode,
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub chevalley: ChevalleyBudget,
    pub oracle: OracleConfig,
    pub witness_budget: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            chevalley: ChevalleyBudget::default(),
            oracle: OracleConfig::default(),
            witness_budget: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub formula: Formula,
    /// Region `W_0` covered by the datum; `formula` is already restricted to it.
    pub covered: Formula,
    pub notes: Vec<String>,
}

/// `f(Ω)` for a special set `Ω` on `Y`, following the datum.
pub fn qe_pipeline(omega: &SpecialSet, datum: &FlatteningDatum, cfg: &PipelineConfig) -> Result<PipelineResult, TransformError> {
    let mut notes = Vec::new();
    let y = &datum.map.source;
    // Ω° empty means Ω has no points at all
    if special_to_residue(omega, y)?.normalize(cfg.chevalley.gb)?.is_empty() {
        notes.push("source set is empty".into());
        return Ok(PipelineResult {
            formula: Formula::falsity(),
            covered: Formula::truth(),
            notes,
        });
    }
    let covered = match &datum.root {
        DatumNode::Final(_) => Formula::truth(),
        DatumNode::Blowup { spec, .. } => spec.guard.clone(),
    };
    if !covered.is_truth() {
        notes.push(format!("covered region is a proper subdomain: {covered}"));
    }
    let gamma = node_image(omega, datum, &datum.root, &datum.map.target.vars, 0, cfg, &mut notes)?;
    Ok(PipelineResult {
        formula: Formula::and(vec![gamma, covered.clone()]),
        covered,
        notes,
    })
}

fn node_image(
    omega: &SpecialSet,
    datum: &FlatteningDatum,
    node: &DatumNode,
    ambient: &[String],
    depth: usize,
    cfg: &PipelineConfig,
    notes: &mut Vec<String>,
) -> Result<Formula, TransformError> {
    match node {
        DatumNode::Final(fm) => {
            let mut want: Vec<&String> = ambient.iter().collect();
            let mut have: Vec<&String> = fm.map.target.vars.iter().collect();
            want.sort();
            have.sort();
            if want != have {
                return Err(TransformError::UnsupportedDatum(format!(
                    "final map targets ({}) but the chart has coordinates ({})",
                    fm.map.target.vars.join(" "),
                    ambient.join(" ")
                )));
            }
            let sigma = SpecialSet::new(
                omega
                    .conditions
                    .iter()
                    .map(|(h, s)| (h.compose(&fm.theta), *s))
                    .collect(),
            )?;
            Ok(flat_image(&fm.map, &sigma, cfg.chevalley)?.formula)
        }
        DatumNode::Blowup { spec, centers, charts } => {
            if spec.ambient != ambient {
                return Err(TransformError::UnsupportedDatum(format!(
                    "blow-up declared on ({}) inside a chart with coordinates ({})",
                    spec.ambient.join(" "),
                    ambient.join(" ")
                )));
            }
            if charts.len() != spec.arity() {
                return Err(TransformError::ArityMismatch {
                    expected: spec.arity(),
                    got: charts.len(),
                });
            }
            let centers = centers.as_ref().ok_or(TransformError::NonFiniteCenter)?;
            let mut chart_images = Vec::new();
            for (j, child) in (1..=spec.arity()).zip(charts) {
                let chart = chart_map(spec, j)?;
                chart_images.push(node_image(omega, datum, child, &chart.coordinates, depth + 1, cfg, notes)?);
            }
            let mut parts = vec![image_off_center(spec, &chart_images)?];
            if !centers.is_empty() && depth > 0 {
                return Err(TransformError::UnsupportedDatum(
                    "centre points below the first blow-up need witnesses in intermediate sources".into(),
                ));
            }
            for c in centers {
                if center_in_image(omega, datum, spec, c, cfg)? {
                    parts.push(point_formula(ambient, &c.point));
                } else {
                    notes.push(format!("centre point {} is not in the image", format_point(&c.point)));
                }
            }
            Ok(Formula::or(parts))
        }
    }
}

fn point_formula(vars: &[String], point: &[Scalar]) -> Formula {
    Formula::and(
        vars.iter()
            .zip(point)
            .map(|(v, c)| Formula::eq(Term::var(v.clone()), Term::constant(c.clone())))
            .collect(),
    )
}

/// Witnessed membership of a centre point in `f(Ω)`.
fn center_in_image(
    omega: &SpecialSet,
    datum: &FlatteningDatum,
    spec: &BlowupSpec,
    c: &CenterPoint,
    cfg: &PipelineConfig,
) -> Result<bool, TransformError> {
    let x = &datum.map.target.vars;
    if c.point.len() != x.len() {
        return Err(TransformError::ArityMismatch {
            expected: x.len(),
            got: c.point.len(),
        });
    }
    let at: BTreeMap<String, KPoly> = x
        .iter()
        .cloned()
        .zip(c.point.iter().map(|s| KPoly::constant(s.clone())))
        .collect();
    for g in &spec.center {
        let value = KPoly::from_term(g)
            .expect("centre generators are polynomial")
            .compose(&at);
        if !value.is_zero() {
            return Err(TransformError::NonFiniteCenter);
        }
    }
    let y: &Model = &datum.map.source;
    let body = Formula::and(vec![
        y.equations(),
        Formula::and(
            x.iter()
                .zip(&c.point)
                .map(|(v, s)| Formula::eq(datum.map.morphism[v].to_term(), Term::constant(s.clone())))
                .collect(),
        ),
        omega.to_formula(),
    ]);
    let hints: Vec<Vec<Term>> = c
        .witness
        .iter()
        .map(|w| w.iter().map(|s| Term::constant(s.clone())).collect())
        .collect();
    match exists_check(&y.vars, &body, &Env::new(), &hints, cfg.witness_budget, &cfg.oracle)? {
        ExistsOutcome::Witnessed(_) => Ok(true),
        _ => Err(TransformError::WitnessSearchFailed {
            point: format_point(&c.point),
        }),
    }
}
