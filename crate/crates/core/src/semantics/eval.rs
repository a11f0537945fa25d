use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::scalar::{ddiv, Scalar, ScalarError};
use crate::series::SeriesError;
use crate::term::Term;

/// Variable assignment.
pub type Env = BTreeMap<String, Scalar>;

pub fn env_from(vars: &[String], coords: &[Scalar]) -> Env {
    vars.iter().cloned().zip(coords.iter().cloned()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("series argument {0} lies outside the closed unit disk")]
    SeriesArgumentOutOfDisk(String),
    #[error("insufficient precision")]
    InsufficientPrecision,
    #[error("formula contains a quantifier; evaluate its quantifier-free matrix instead")]
    QuantifierPresent,
    #[error("invalid series: {0}")]
    Series(String),
}

impl From<ScalarError> for EvalError {
    fn from(e: ScalarError) -> Self {
        match e {
            ScalarError::InsufficientPrecision => EvalError::InsufficientPrecision,
            other => EvalError::Series(other.to_string()),
        }
    }
}

impl From<SeriesError> for EvalError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::ArgumentOutOfDisk(a) => EvalError::SeriesArgumentOutOfDisk(a),
            SeriesError::Scalar(s) => s.into(),
            other => EvalError::Series(other.to_string()),
        }
    }
}

/// Three-valued outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    NeedsPrecision,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn decided(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::NeedsPrecision => None,
        }
    }

    pub fn negate(self) -> Verdict {
        match self {
            Verdict::True => Verdict::False,
            Verdict::False => Verdict::True,
            Verdict::NeedsPrecision => Verdict::NeedsPrecision,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::NeedsPrecision => "needs-precision",
        })
    }
}

/// Evaluates with working precision `n`: series are truncated and truncated
/// divisions expanded so that `n` orders are certified locally. The result
/// carries whatever precision survives the arithmetic.
pub fn eval_term_at(t: &Term, env: &Env, n: i64) -> Result<Scalar, EvalError> {
    Ok(match t {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.clone()))?,
        Term::Const(c) => c.clone(),
        Term::Sum(ts) => {
            let mut acc = Scalar::zero();
            for s in ts {
                acc = &acc + &eval_term_at(s, env, n)?;
            }
            acc
        }
        Term::Prod(ts) => {
            let mut acc = Scalar::one();
            for s in ts {
                acc = &acc * &eval_term_at(s, env, n)?;
            }
            acc
        }
        Term::Neg(s) => -&eval_term_at(s, env, n)?,
        Term::D(a, b) => {
            let a = eval_term_at(a, env, n)?;
            let b = eval_term_at(b, env, n)?;
            ddiv(&a, &b, n)?
        }
        Term::Series(s, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term_at(a, env, n))
                .collect::<Result<Vec<_>, _>>()?;
            s.eval(&vals, n)?
        }
    })
}

/// Evaluates `t` so that the result is known up to order `n`, raising the
/// working precision as needed (at most `max_work`).
pub fn eval_term(t: &Term, env: &Env, n: i64, max_work: i64) -> Result<Scalar, EvalError> {
    let mut work = n.max(1);
    loop {
        match eval_term_at(t, env, work) {
            Ok(v) => {
                if v.precision().bound().map_or(true, |b| b >= n) {
                    return Ok(if v.is_exact() { v } else { v.truncate(n) });
                }
                if work >= max_work {
                    return Ok(v);
                }
            }
            Err(EvalError::InsufficientPrecision) if work < max_work => {}
            Err(e) => return Err(e),
        }
        work = (work * 2).min(max_work.max(work + 1));
    }
}

/// Three-valued truth of a quantifier-free formula at working precision `n`.
pub fn eval_formula(f: &Formula, env: &Env, n: i64) -> Result<Verdict, EvalError> {
    let atom = |a: &Term, b: &Term, op: fn(&Scalar, &Scalar) -> Result<bool, ScalarError>| {
        let va = match eval_term_at(a, env, n) {
            Err(EvalError::InsufficientPrecision) => return Ok(Verdict::NeedsPrecision),
            other => other?,
        };
        let vb = match eval_term_at(b, env, n) {
            Err(EvalError::InsufficientPrecision) => return Ok(Verdict::NeedsPrecision),
            other => other?,
        };
        match op(&va, &vb) {
            Ok(v) => Ok(Verdict::from_bool(v)),
            Err(ScalarError::InsufficientPrecision) => Ok(Verdict::NeedsPrecision),
            Err(e) => Err(e.into()),
        }
    };
    match f {
        Formula::Le(a, b) => atom(a, b, Scalar::norm_le),
        Formula::Lt(a, b) => atom(a, b, Scalar::norm_lt),
        Formula::Eq(a, b) => atom(a, b, |x, y| (x - y).is_zero_decided()),
        Formula::And(fs) => {
            let mut pending = false;
            for g in fs {
                match eval_formula(g, env, n)? {
                    Verdict::False => return Ok(Verdict::False),
                    Verdict::NeedsPrecision => pending = true,
                    Verdict::True => {}
                }
            }
            Ok(if pending { Verdict::NeedsPrecision } else { Verdict::True })
        }
        Formula::Or(fs) => {
            let mut pending = false;
            for g in fs {
                match eval_formula(g, env, n)? {
                    Verdict::True => return Ok(Verdict::True),
                    Verdict::NeedsPrecision => pending = true,
                    Verdict::False => {}
                }
            }
            Ok(if pending { Verdict::NeedsPrecision } else { Verdict::False })
        }
        Formula::Not(g) => Ok(eval_formula(g, env, n)?.negate()),
        Formula::Exists(..) => Err(EvalError::QuantifierPresent),
    }
}
