//! The surface `(s, st, s·exptau(t))`: a subanalytic set that is semianalytic
//! only off the origin.
//!
//! Members are produced from the parametrization, so the third coordinate is
//! only known to the working precision; a member therefore passes when the
//! description is not refuted and the residual `u3 - exptau(u2/u1)·u1`
//! vanishes to that precision. Non-members must be decided `False`.

use rand::Rng;
use thiserror::Error;

use crate::formula::Formula;
use crate::parse::{format_point, parse_formula, parse_term};
use crate::scalar::Scalar;
use crate::semantics::sample::{point_rng, sample_scalar, SampleParams};
use crate::semantics::{env_from, eval_formula, eval_term_at, zariski_independence, EvalError, Verdict, ZariskiError};
use crate::series::SeriesRegistry;

pub const MEMBERSHIP: &str = "(and (le u2 u1) (eq u3 (* (ps exptau (D u2 u1)) u1)))";
const RESIDUAL: &str = "(+ u3 (neg (* (ps exptau (D u2 u1)) u1)))";
const PARAMETRIZATION: &str = "(* s (ps exptau t))";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OsgoodError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Zariski(#[from] ZariskiError),
}

pub fn vars() -> Vec<String> {
    vec!["u1".into(), "u2".into(), "u3".into()]
}

pub fn membership_formula() -> Formula {
    parse_formula(MEMBERSHIP, &SeriesRegistry::with_builtins()).expect("fixture parses")
}

/// `(s, st, s·exptau(t))` to precision `n`.
pub fn parametric_point(s: &Scalar, t: &Scalar, n: i64) -> Result<Vec<Scalar>, EvalError> {
    let reg = SeriesRegistry::with_builtins();
    let env = env_from(&["s".into(), "t".into()], &[s.clone(), t.clone()]);
    let u3 = eval_term_at(&parse_term(PARAMETRIZATION, &reg).expect("fixture parses"), &env, n)?;
    Ok(vec![s.clone(), s * t, u3])
}

/// Parameters `(s, t)` of sample `index`, with `s != 0`.
pub fn sample_parameters(seed: u64, index: u64, params: &SampleParams) -> (Scalar, Scalar) {
    let mut rng = point_rng(seed, index);
    let s = loop {
        let s = sample_scalar(&mut rng, params);
        if !s.is_exact_zero() {
            break s;
        }
    };
    let t = sample_scalar(&mut rng, params);
    (s, t)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MembershipReport {
    pub members: usize,
    /// Members decided `True` outright (e.g. exactly representable values).
    pub members_true: usize,
    /// Members left undecided with residual order at least the precision used.
    pub members_not_refuted: usize,
    /// Smallest certified residual order among undecided members.
    pub min_residual_order: Option<i64>,
    pub non_members: usize,
    pub non_members_rejected: usize,
    /// Human-readable description of every failed check.
    pub failures: Vec<String>,
}

impl MembershipReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.members_true + self.members_not_refuted == self.members
            && self.non_members_rejected == self.non_members
    }
}

/// Members `(s, st, s·exptau(t))` against the description at precision `n`,
/// plus perturbed non-members decided with precision doubling up to `n`.
pub fn check_membership(count: usize, seed: u64, n: i64) -> Result<MembershipReport, OsgoodError> {
    let reg = SeriesRegistry::with_builtins();
    let phi = membership_formula();
    let residual = parse_term(RESIDUAL, &reg).expect("fixture parses");
    let vs = vars();
    let params = SampleParams::default();
    let mut rep = MembershipReport::default();
    for i in 0..count as u64 {
        let (s, t) = sample_parameters(seed, i, &params);
        let p = parametric_point(&s, &t, n)?;
        let env = env_from(&vs, &p);
        rep.members += 1;
        match eval_formula(&phi, &env, n)? {
            Verdict::True => rep.members_true += 1,
            Verdict::NeedsPrecision => {
                let r = eval_term_at(&residual, &env, n)?;
                let ord = r.order_lower_bound().unwrap_or(i64::MAX);
                if ord >= n {
                    rep.members_not_refuted += 1;
                    rep.min_residual_order = Some(rep.min_residual_order.map_or(ord, |m| m.min(ord)));
                } else {
                    rep.failures.push(format!("member {} has residual order {ord}", format_point(&p)));
                }
            }
            Verdict::False => rep.failures.push(format!("member {} refuted", format_point(&p))),
        }

        let q = perturb(&p, i, seed);
        rep.non_members += 1;
        match decide_doubling(&phi, &vs, &q, n)? {
            Verdict::False => rep.non_members_rejected += 1,
            v => rep
                .failures
                .push(format!("non-member {} evaluated to {v:?}", format_point(&q))),
        }
    }
    Ok(rep)
}

/// Moves a member off the surface: alternately shifts `u3` or `u2` by `c·w^k`.
fn perturb(p: &[Scalar], i: u64, seed: u64) -> Vec<Scalar> {
    let mut rng = point_rng(seed ^ 0x5eed_0ff5, i);
    let k = rng.gen_range(0..=3);
    let c = if rng.gen_bool(0.5) { 1 } else { -1 };
    let bump = Scalar::uniformizer_pow(k).scale(&num_rational::BigRational::from_integer(c.into()));
    let mut q = p.to_vec();
    let slot = if i % 2 == 0 { 2 } else { 1 };
    q[slot] = &q[slot] + &bump;
    q
}

fn decide_doubling(phi: &Formula, vs: &[String], p: &[Scalar], max_n: i64) -> Result<Verdict, EvalError> {
    let env = env_from(vs, p);
    let mut n = 16.min(max_n);
    loop {
        let v = eval_formula(phi, &env, n)?;
        if v != Verdict::NeedsPrecision || n >= max_n {
            return Ok(v);
        }
        n = (2 * n).min(max_n);
    }
}

/// `count` surface points, `n`-adically approximated.
pub fn surface_points(count: usize, seed: u64, n: i64) -> Result<Vec<Vec<Scalar>>, EvalError> {
    let params = SampleParams::default();
    (0..count as u64)
        .map(|i| {
            let (s, t) = sample_parameters(seed, i, &params);
            parametric_point(&s, &t, n)
        })
        .collect()
}

/// No polynomial of degree `<= d` vanishes on `count` surface points.
pub fn zariski_evidence(count: usize, d: u32, seed: u64, n: i64) -> Result<bool, OsgoodError> {
    Ok(zariski_independence(&surface_points(count, seed, n)?, d)?)
}
