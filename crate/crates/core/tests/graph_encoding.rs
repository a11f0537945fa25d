//! Graph encoding against the basic set it encodes, evaluated exactly over Q(w).

mod common;

use std::collections::HashMap;

use common::{frac_formula, frac_term, names, rng, Frac};
use dsemi_core::semantics::sample::point_rng;
use dsemi_core::semantics::{sample_point, sample_scalar, SampleParams};
use dsemi_core::transforms::graph_encode;
use dsemi_core::{Formula, Scalar};
use rand::Rng;

fn random_basic(r: &mut impl Rng, vars: &[String]) -> Vec<Formula> {
    (0..r.gen_range(1..=3))
        .map(|_| {
            let p = common::random_term(r, vars, 2, false);
            let q = common::random_term(r, vars, 2, false);
            if r.gen_bool(0.5) {
                Formula::Le(p, q)
            } else {
                Formula::Lt(p, q)
            }
        })
        .collect()
}

#[test]
fn encoding_projects_onto_the_basic_set_off_q() {
    let xy = names(&["x", "y"]);
    let params = SampleParams::default();
    let mut r = rng(11);
    let (mut inside, mut outside) = (0, 0);
    for inst in 0..40u64 {
        let atoms = random_basic(&mut r, &xy);
        let enc = graph_encode(&atoms).unwrap();
        let witnesses = enc.witnesses(&atoms);
        let basic = Formula::And(atoms.clone());
        let encoded = enc.to_formula();
        for i in 0..100u64 {
            let p = sample_point(2, inst, i, &params);
            let mut env: HashMap<String, Frac> = xy.iter().cloned().zip(p.iter().map(Frac::exact)).collect();
            let in_sigma = frac_formula(&basic, &env);
            let q_nonzero = frac_formula(&Formula::nonzero(enc.q.clone()), &env);
            for (z, t) in &witnesses {
                let v = frac_term(t, &env);
                env.insert(z.clone(), v);
            }
            if in_sigma {
                inside += 1;
                assert!(frac_formula(&encoded, &env), "witness misses {basic} at {p:?}");
            } else if q_nonzero {
                outside += 1;
                assert!(!frac_formula(&encoded, &env), "{encoded} holds off {basic} at {p:?}");
                // no other fibre point either, among random integral z
                let mut zr = point_rng(inst ^ 0xabc, i);
                for z in &enc.z_vars {
                    let s: Scalar = sample_scalar(&mut zr, &params);
                    env.insert(z.clone(), Frac::exact(&s));
                }
                assert!(!frac_formula(&encoded, &env), "random fibre point of {encoded} off {basic}");
            }
        }
    }
    assert!(inside > 200 && outside > 200, "{inside} inside, {outside} outside");
}
