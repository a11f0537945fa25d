//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

use std::path::PathBuf;

use dsemi_core::semantics::{eval_formula, Env, Verdict};
use dsemi_core::{Formula, Scalar, Term};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Exact Laurent scalar with exponents in `[lo, hi]`, zero with probability 1/8.
pub fn laurent(rng: &mut impl Rng, lo: i64, hi: i64) -> Scalar {
    if rng.gen_ratio(1, 8) {
        return Scalar::zero();
    }
    let v = rng.gen_range(lo..=hi);
    let mut terms = vec![(v, BigRational::from_integer(pick_nonzero(rng).into()))];
    for k in v + 1..=hi {
        if rng.gen_bool(0.5) {
            let c: i64 = rng.gen_range(-3..=3);
            terms.push((k, BigRational::new(c.into(), rng.gen_range(1..=2i64).into())));
        }
    }
    Scalar::from_terms(terms, dsemi_core::Precision::Exact)
}

fn pick_nonzero(rng: &mut impl Rng) -> i64 {
    let c: i64 = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

/// Order read directly off the stored terms of an exact scalar.
pub fn order_of(s: &Scalar) -> Option<i64> {
    s.terms().filter(|(_, c)| *c != &BigRational::from_integer(0.into())).map(|(k, _)| k).min()
}

/// Definitional check of `q = D(a, b)`: zero unless `0 < |a| <= |b|`, in
/// which case `q * b` reproduces `a` to the requested relative order.
pub fn ddiv_definition_holds(a: &Scalar, b: &Scalar, q: &Scalar, n: i64) -> Result<(), String> {
    let (oa, ob) = (order_of(a), order_of(b));
    let in_domain = match (oa, ob) {
        (_, None) => false,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x >= y,
    };
    if !in_domain {
        return if q.is_exact_zero() {
            Ok(())
        } else {
            Err(format!("D({a}, {b}) should be 0, got {q}"))
        };
    }
    let (oa, ob) = (oa.unwrap(), ob.unwrap());
    let back = &(q * b) - a;
    let need = oa + n;
    if !back.order_lower_bound().map_or(true, |k| k >= need) {
        return Err(format!("D({a}, {b}) = {q}: q*b - a = {back} is not O(w^{need})"));
    }
    match q.order() {
        Ok(Some(k)) if k == oa - ob => Ok(()),
        _ => Err(format!("D({a}, {b}) = {q} should have order {}", oa - ob)),
    }
}

const CONSTANTS: &[&str] = &["0", "1", "-1", "2", "w", "1+w", "w^2", "1/2"];

pub fn random_term(rng: &mut impl Rng, vars: &[String], depth: u32, allow_d: bool) -> Term {
    if depth == 0 || rng.gen_ratio(2, 5) {
        return if rng.gen_ratio(3, 4) {
            Term::var(vars[rng.gen_range(0..vars.len())].clone())
        } else {
            Term::constant(CONSTANTS[rng.gen_range(0..CONSTANTS.len())].parse().unwrap())
        };
    }
    match rng.gen_range(0..if allow_d { 4 } else { 3 }) {
        0 => Term::Sum(vec![random_term(rng, vars, depth - 1, allow_d), random_term(rng, vars, depth - 1, allow_d)]),
        1 => Term::Prod(vec![random_term(rng, vars, depth - 1, allow_d), random_term(rng, vars, depth - 1, allow_d)]),
        2 => Term::Neg(Box::new(random_term(rng, vars, depth - 1, allow_d))),
        _ => Term::d(random_term(rng, vars, depth - 1, false), random_term(rng, vars, depth - 1, false)),
    }
}

pub fn random_atom(rng: &mut impl Rng, vars: &[String], allow_d: bool) -> Formula {
    let a = random_term(rng, vars, 2, allow_d);
    let b = random_term(rng, vars, 2, allow_d);
    match rng.gen_range(0..3) {
        0 => Formula::Le(a, b),
        1 => Formula::Lt(a, b),
        _ => Formula::Eq(a, b),
    }
}

/// Quantifier-free formula of nesting depth at most `depth` (atoms count as 1).
pub fn random_formula(rng: &mut impl Rng, vars: &[String], depth: u32, allow_not: bool, allow_d: bool) -> Formula {
    if depth <= 1 || rng.gen_ratio(1, 4) {
        return random_atom(rng, vars, allow_d);
    }
    let choice = rng.gen_range(0..if allow_not { 3 } else { 2 });
    if choice == 2 {
        return Formula::Not(Box::new(random_formula(rng, vars, depth - 1, allow_not, allow_d)));
    }
    let k = rng.gen_range(2..=3);
    let kids = (0..k).map(|_| random_formula(rng, vars, depth - 1, allow_not, allow_d)).collect();
    if choice == 0 {
        Formula::And(kids)
    } else {
        Formula::Or(kids)
    }
}

/// Evaluation with precision doubling up to `max_n`.
pub fn decide(f: &Formula, env: &Env, start: i64, max_n: i64) -> Verdict {
    let mut n = start;
    loop {
        let v = eval_formula(f, env, n).expect("evaluation succeeds");
        if v != Verdict::NeedsPrecision || n >= max_n {
            return v;
        }
        n = (2 * n).min(max_n);
    }
}

/// Element of ℚ(w) as `num / den` with exact Laurent parts, `den != 0`.
#[derive(Clone, Debug)]
pub struct Frac {
    pub num: Scalar,
    pub den: Scalar,
}

impl Frac {
    pub fn exact(s: &Scalar) -> Frac {
        assert!(s.is_exact(), "fraction oracle needs exact inputs");
        Frac { num: s.clone(), den: Scalar::one() }
    }

    pub fn ratio(num: &Scalar, den: &Scalar) -> Frac {
        assert!(!den.is_exact_zero());
        Frac { num: num.clone(), den: den.clone() }
    }

    /// Valuation, `None` for zero.
    fn ord(&self) -> Option<i64> {
        Some(order_of(&self.num)? - order_of(&self.den).expect("nonzero denominator"))
    }

    fn is_zero(&self) -> bool {
        order_of(&self.num).is_none()
    }
}

/// `|a| <= |b|` (or `<` when `strict`) by valuations.
fn norm_cmp(a: &Frac, b: &Frac, strict: bool) -> bool {
    match (a.ord(), b.ord()) {
        (None, None) => !strict,
        (None, Some(_)) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => if strict { x > y } else { x >= y },
    }
}

/// Exact value of a series-free term over ℚ(w).
pub fn frac_term(t: &Term, env: &std::collections::HashMap<String, Frac>) -> Frac {
    match t {
        Term::Var(v) => env.get(v).unwrap_or_else(|| panic!("unbound {v}")).clone(),
        Term::Const(c) => Frac::exact(c),
        Term::Neg(a) => {
            let a = frac_term(a, env);
            Frac { num: -&a.num, den: a.den }
        }
        Term::Sum(ts) => ts.iter().fold(Frac::exact(&Scalar::zero()), |acc, s| {
            let s = frac_term(s, env);
            Frac { num: &(&acc.num * &s.den) + &(&s.num * &acc.den), den: &acc.den * &s.den }
        }),
        Term::Prod(ts) => ts.iter().fold(Frac::exact(&Scalar::one()), |acc, s| {
            let s = frac_term(s, env);
            Frac { num: &acc.num * &s.num, den: &acc.den * &s.den }
        }),
        Term::D(a, b) => {
            let (a, b) = (frac_term(a, env), frac_term(b, env));
            if b.is_zero() || !norm_cmp(&a, &b, false) {
                Frac::exact(&Scalar::zero())
            } else {
                Frac { num: &a.num * &b.den, den: &a.den * &b.num }
            }
        }
        Term::Series(..) => panic!("fraction oracle does not evaluate series"),
    }
}

/// Exact truth of a quantifier-free, series-free formula over ℚ(w).
pub fn frac_formula(f: &Formula, env: &std::collections::HashMap<String, Frac>) -> bool {
    match f {
        Formula::Le(a, b) => norm_cmp(&frac_term(a, env), &frac_term(b, env), false),
        Formula::Lt(a, b) => norm_cmp(&frac_term(a, env), &frac_term(b, env), true),
        Formula::Eq(a, b) => {
            let (a, b) = (frac_term(a, env), frac_term(b, env));
            order_of(&(&(&a.num * &b.den) - &(&b.num * &a.den))).is_none()
        }
        Formula::And(fs) => fs.iter().all(|g| frac_formula(g, env)),
        Formula::Or(fs) => fs.iter().any(|g| frac_formula(g, env)),
        Formula::Not(g) => !frac_formula(g, env),
        Formula::Exists(..) => panic!("fraction oracle is quantifier-free"),
    }
}
