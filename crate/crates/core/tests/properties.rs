//! Invariants of the engine as proptest properties.
//!
//! Generators draw a `u64` seed and expand it with the shared ChaCha
//! generators, so shrinking walks the seed rather than the structure.

mod common;

use std::collections::HashMap;

use common::{names, rng, Frac};
use dsemi_core::formats::parse_registry;
use dsemi_core::grobner::{buchberger, contains_all, spoly_check};
use dsemi_core::normal::{basic_union_formula, is_basic_union, positivize, to_basic_union};
use dsemi_core::semantics::{env_from, eval_formula, sample_point, SampleParams, Verdict};
use dsemi_core::{ddiv, parse_formula, GbBudget, MPoly, MonomialOrder, Scalar, SeriesRegistry};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

fn exact_pair(seed: u64) -> (Scalar, Scalar, Scalar) {
    let mut r = rng(seed);
    (common::laurent(&mut r, -2, 4), common::laurent(&mut r, -2, 4), common::laurent(&mut r, -2, 4))
}

fn formula(seed: u64, depth: u32) -> dsemi_core::Formula {
    common::random_formula(&mut rng(seed), &names(&["x", "y"]), depth, true, true)
}

fn point(seed: u64) -> Vec<Scalar> {
    sample_point(2, seed, 0, &SampleParams::default())
}

fn exact_truth(f: &dsemi_core::Formula, p: &[Scalar]) -> bool {
    let env: HashMap<_, _> = ["x", "y"].iter().map(|v| v.to_string()).zip(p.iter().map(Frac::exact)).collect();
    common::frac_formula(f, &env)
}

fn random_mpoly(r: &mut impl Rng, order: MonomialOrder) -> MPoly {
    let terms = (0..r.gen_range(1..=3))
        .map(|_| {
            let e = vec![r.gen_range(0..=2u32), r.gen_range(0..=2u32)];
            (e, BigRational::from_integer(r.gen_range(-3..=3i64).into()))
        })
        .collect();
    MPoly::new(2, order, terms)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn scalar_ring_laws(seed in any::<u64>()) {
        let (a, b, c) = exact_pair(seed);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert!((&a - &a).is_exact_zero());
    }

    #[test]
    fn ddiv_is_integral_and_divides_back(seed in any::<u64>(), n in 1i64..24) {
        let (a, b, _) = exact_pair(seed);
        let q = ddiv(&a, &b, n).unwrap();
        prop_assert!(q.norm_le(&Scalar::one()).unwrap());
        prop_assert_eq!(common::ddiv_definition_holds(&a, &b, &q, n), Ok(()));
    }

    #[test]
    fn formulas_print_and_reparse(seed in any::<u64>()) {
        let f = formula(seed, 4);
        let text = f.to_string();
        let g = parse_formula(&text, &SeriesRegistry::with_builtins()).unwrap();
        prop_assert_eq!(g.to_string(), text);
    }

    #[test]
    fn decided_verdicts_survive_more_precision(seed in any::<u64>(), n in 4i64..32) {
        let f = formula(seed, 3);
        let p = point(seed);
        let env = env_from(&names(&["x", "y"]), &p);
        let v = eval_formula(&f, &env, n).unwrap();
        if v != Verdict::NeedsPrecision {
            prop_assert_eq!(eval_formula(&f, &env, 2 * n).unwrap(), v);
            prop_assert_eq!(v == Verdict::True, exact_truth(&f, &p));
        }
    }

    #[test]
    fn positivize_keeps_truth_and_drops_negation(seed in any::<u64>(), pseed in any::<u64>()) {
        let f = formula(seed, 4);
        let g = positivize(&f).unwrap();
        prop_assert!(!g.contains_not());
        let p = point(pseed);
        prop_assert_eq!(exact_truth(&f, &p), exact_truth(&g, &p));
    }

    #[test]
    fn basic_unions_are_basic_and_equivalent(seed in any::<u64>(), pseed in any::<u64>()) {
        let f = formula(seed, 3);
        let u = basic_union_formula(&to_basic_union(&f, 4096).unwrap());
        prop_assert!(is_basic_union(&u));
        let p = point(pseed);
        prop_assert_eq!(exact_truth(&f, &p), exact_truth(&u, &p));
    }

    #[test]
    fn positivize_is_idempotent(seed in any::<u64>()) {
        let g = positivize(&formula(seed, 4)).unwrap();
        prop_assert_eq!(positivize(&g).unwrap(), g);
    }

    #[test]
    fn groebner_bases_pass_post_pass(seed in any::<u64>(), lex in any::<bool>()) {
        let order = if lex { MonomialOrder::Lex } else { MonomialOrder::GrevLex };
        let mut r = rng(seed);
        let gens: Vec<MPoly> = (0..r.gen_range(1..=3)).map(|_| random_mpoly(&mut r, order)).collect();
        let gb = buchberger(&gens, order, GbBudget::default()).unwrap();
        prop_assert!(spoly_check(&gb));
        prop_assert!(contains_all(&gb, &gens));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn registry_text_round_trips(d0 in 1i64..4, slope in 1i64..3, tau0 in 0i64..3, c in 1i64..4) {
        // degree-2 coefficient placed deep enough to respect the certificate
        let k = 2 * slope + tau0;
        let text = format!("series g 2 {{ (0, 0) : 1; (1, 1) : -{c}*w^{k}; tail {d0} {slope} {tau0} }}");
        let g = parse_registry(&text).unwrap().get("g").unwrap();
        let again = parse_registry(&g.to_string()).unwrap();
        prop_assert_eq!(again.get("g").unwrap(), g);
    }
}
