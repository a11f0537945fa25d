//! Inputs shared by the benchmarks.

use dsemi_core::flat::{AdmissibleMap, Model, Sign, SpecialSet};
use dsemi_core::semantics::{sample_point, SampleParams};
use dsemi_core::{parse_formula, parse_term, Formula, KPoly, MPoly, MonomialOrder, Scalar, SeriesRegistry};
use num_rational::BigRational;

pub fn formula(text: &str) -> Formula {
    parse_formula(text, &SeriesRegistry::with_builtins()).expect("bench input parses")
}

fn kpoly(text: &str) -> KPoly {
    KPoly::from_term(&parse_term(text, &SeriesRegistry::empty()).expect("bench input parses")).expect("polynomial")
}

/// Deterministic sample points in `dims` coordinates.
pub fn points(dims: usize, count: u64) -> Vec<Vec<Scalar>> {
    (0..count).map(|i| sample_point(dims, 0, i, &SampleParams::default())).collect()
}

/// Cyclic-3 generators over Q, grevlex.
pub fn cyclic3() -> Vec<MPoly> {
    let order = MonomialOrder::GrevLex;
    let one = || BigRational::from_integer(1.into());
    let m = |e: [u32; 3]| (e.to_vec(), one());
    vec![
        MPoly::new(3, order, vec![m([1, 0, 0]), m([0, 1, 0]), m([0, 0, 1])]),
        MPoly::new(3, order, vec![m([1, 1, 0]), m([0, 1, 1]), m([1, 0, 1])]),
        MPoly::new(3, order, vec![m([1, 1, 1]), (vec![0, 0, 0], -one())]),
    ]
}

/// `V(y^2 - x) -> x` with `|y| < 1`.
pub fn parabola() -> (AdmissibleMap, SpecialSet) {
    let source = Model::with_rels(&["x", "y"], vec![kpoly("(+ (* y y) (neg x))")]);
    let mut morphism = std::collections::BTreeMap::new();
    morphism.insert("x".to_string(), kpoly("x"));
    let map = AdmissibleMap::new(source, Model::free(&["x"]), morphism).assert_flat("finite free of rank 2");
    let sigma = SpecialSet::new(vec![(kpoly("y"), Sign::Lt)]).expect("integral");
    (map, sigma)
}
