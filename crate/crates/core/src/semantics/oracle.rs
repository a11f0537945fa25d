use std::fmt;

use crate::formula::Formula;
use crate::parse::format_point;
use crate::scalar::Scalar;
use crate::semantics::eval::{env_from, eval_formula, eval_term_at, Env, EvalError, Verdict};
use crate::semantics::sample::{point_rng, sample_point, sample_scalar, SampleParams};
use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
    pub start_precision: i64,
    pub max_precision: i64,
    pub params: SampleParams,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            samples: 500,
            seed: 0,
            start_precision: 16,
            max_precision: 256,
            params: SampleParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub point: Vec<Scalar>,
    pub left: bool,
    pub right: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Counterexample,
    PrecisionExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub vars: Vec<String>,
    pub samples: usize,
    pub agree_true: usize,
    pub agree_false: usize,
    pub undecided: usize,
    pub first_undecided: Option<Vec<Scalar>>,
    pub counterexample: Option<Counterexample>,
}

impl Report {
    pub fn status(&self) -> Status {
        if self.counterexample.is_some() {
            Status::Counterexample
        } else if self.undecided > 0 {
            Status::PrecisionExhausted
        } else {
            Status::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }

    /// Combines reports over disjoint sample ranges (order-independent counts).
    pub fn merge(mut self, other: Report) -> Report {
        self.samples += other.samples;
        self.agree_true += other.agree_true;
        self.agree_false += other.agree_false;
        self.undecided += other.undecided;
        self.first_undecided = self.first_undecided.or(other.first_undecided);
        self.counterexample = self.counterexample.or(other.counterexample);
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.vars.join(" "))?;
        writeln!(f, "samples {}", self.samples)?;
        writeln!(f, "agree-true {}", self.agree_true)?;
        writeln!(f, "agree-false {}", self.agree_false)?;
        writeln!(f, "undecided {}", self.undecided)?;
        if let Some(p) = &self.first_undecided {
            writeln!(f, "first-undecided {}", format_point(p))?;
        }
        match (&self.counterexample, self.status()) {
            (Some(c), _) => {
                writeln!(f, "counterexample {}", format_point(&c.point))?;
                writeln!(f, "left {}", c.left)?;
                writeln!(f, "right {}", c.right)?;
                write!(f, "verdict counterexample")
            }
            (None, Status::PrecisionExhausted) => write!(f, "verdict precision-exhausted"),
            (None, _) => write!(f, "verdict pass"),
        }
    }
}

/// Deterministic sample stream used by every oracle run.
pub fn sampled_points(dims: usize, cfg: &OracleConfig) -> impl Iterator<Item = Vec<Scalar>> + '_ {
    (0..cfg.samples as u64).map(move |i| sample_point(dims, cfg.seed, i, &cfg.params))
}

/// Core agreement loop over explicit points. `decide` evaluates both sides at a
/// given precision; undecided points are retried at doubled precision up to the
/// maximum. A disagreement is re-checked at maximum precision before it is reported.
pub fn agreement_over<I, F>(vars: &[String], points: I, cfg: &OracleConfig, mut decide: F) -> Result<Report, EvalError>
where
    I: IntoIterator<Item = Vec<Scalar>>,
    F: FnMut(&Env, i64) -> Result<(Verdict, Verdict), EvalError>,
{
    let mut report = Report {
        vars: vars.to_vec(),
        ..Report::default()
    };
    for point in points {
        report.samples += 1;
        let env = env_from(vars, &point);
        let mut n = cfg.start_precision.max(1);
        loop {
            let (a, b) = decide(&env, n)?;
            match (a.decided(), b.decided()) {
                (Some(x), Some(y)) if x == y => {
                    if x {
                        report.agree_true += 1;
                    } else {
                        report.agree_false += 1;
                    }
                    break;
                }
                (Some(x), Some(y)) => {
                    let (a2, b2) = decide(&env, cfg.max_precision)?;
                    if a2.decided() == Some(x) && b2.decided() == Some(y) {
                        report.counterexample = Some(Counterexample {
                            point,
                            left: x,
                            right: y,
                        });
                        return Ok(report);
                    }
                    report.undecided += 1;
                    report.first_undecided.get_or_insert(point);
                    break;
                }
                _ if n >= cfg.max_precision => {
                    report.undecided += 1;
                    report.first_undecided.get_or_insert(point);
                    break;
                }
                _ => n = (n * 2).min(cfg.max_precision),
            }
        }
    }
    Ok(report)
}

/// Random-sample agreement of two quantifier-free formulas over the union of their free variables.
pub fn check_agreement(phi: &Formula, psi: &Formula, cfg: &OracleConfig) -> Result<Report, EvalError> {
    let mut vars: Vec<String> = phi.free_vars().into_iter().collect();
    for v in psi.free_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.sort();
    agreement_over(&vars, sampled_points(vars.len(), cfg), cfg, |env, n| {
        Ok((eval_formula(phi, env, n)?, eval_formula(psi, env, n)?))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExistsOutcome {
    Witnessed(Vec<Scalar>),
    /// One-sided: no witness among the candidates tried.
    NoWitnessFound,
    /// Some candidate could not be decided within the precision limit.
    NeedsPrecision,
}

/// Bounded witness search for `exists vars. body` at `env`. Candidate witnesses
/// given as terms over the free variables are tried first, then `0`, `1`, and
/// `budget` random elements of the unit disk.
pub fn exists_check(
    vars: &[String],
    body: &Formula,
    env: &Env,
    hints: &[Vec<Term>],
    budget: usize,
    cfg: &OracleConfig,
) -> Result<ExistsOutcome, EvalError> {
    let mut pending = false;
    let mut try_values = |values: &dyn Fn(i64) -> Result<Vec<Scalar>, EvalError>| -> Result<Option<Vec<Scalar>>, EvalError> {
        let mut n = cfg.start_precision.max(1);
        loop {
            let vals = match values(n) {
                Ok(v) => v,
                Err(EvalError::InsufficientPrecision) if n < cfg.max_precision => {
                    n = (n * 2).min(cfg.max_precision);
                    continue;
                }
                Err(EvalError::InsufficientPrecision) => {
                    pending = true;
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let mut full = env.clone();
            for (v, x) in vars.iter().zip(&vals) {
                full.insert(v.clone(), x.clone());
            }
            match eval_formula(body, &full, n)? {
                Verdict::True => return Ok(Some(vals)),
                Verdict::False => return Ok(None),
                Verdict::NeedsPrecision if n < cfg.max_precision => n = (n * 2).min(cfg.max_precision),
                Verdict::NeedsPrecision => {
                    pending = true;
                    return Ok(None);
                }
            }
        }
    };
    for hint in hints {
        let found = try_values(&|n| hint.iter().map(|t| eval_term_at(t, env, n)).collect())?;
        if let Some(w) = found {
            return Ok(ExistsOutcome::Witnessed(w));
        }
    }
    for c in [Scalar::zero(), Scalar::one()] {
        let vals = vec![c; vars.len()];
        if let Some(w) = try_values(&|_| Ok(vals.clone()))? {
            return Ok(ExistsOutcome::Witnessed(w));
        }
    }
    let mut rng = point_rng(cfg.seed, u64::MAX);
    for _ in 0..budget {
        let vals: Vec<Scalar> = vars.iter().map(|_| sample_scalar(&mut rng, &cfg.params)).collect();
        if let Some(w) = try_values(&|_| Ok(vals.clone()))? {
            return Ok(ExistsOutcome::Witnessed(w));
        }
    }
    Ok(if pending {
        ExistsOutcome::NeedsPrecision
    } else {
        ExistsOutcome::NoWitnessFound
    })
}
