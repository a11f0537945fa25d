//! D-function terms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;
use crate::series::StrictSeries;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// Always an exact scalar.
    Const(Scalar),
    Sum(Vec<Term>),
    Prod(Vec<Term>),
    Neg(Box<Term>),
    /// Truncated division `D(numerator, denominator)`.
    D(Box<Term>, Box<Term>),
    Series(Arc<StrictSeries>, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn int(n: i64) -> Term {
        Term::Const(Scalar::from_int(n))
    }

    pub fn zero() -> Term {
        Term::int(0)
    }

    pub fn one() -> Term {
        Term::int(1)
    }

    pub fn constant(s: Scalar) -> Term {
        debug_assert!(s.is_exact(), "term constants are exact");
        Term::Const(s)
    }

    pub fn d(a: Term, b: Term) -> Term {
        Term::D(Box::new(a), Box::new(b))
    }

    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    /// `a - b`, written as `(+ a (neg b))`.
    pub fn sub(a: Term, b: Term) -> Term {
        if b.is_zero_const() {
            return a;
        }
        Term::Sum(vec![a, Term::neg(b)])
    }

    /// Binary product, dropping unit factors.
    pub fn mul(a: Term, b: Term) -> Term {
        if a.is_one_const() {
            return b;
        }
        if b.is_one_const() {
            return a;
        }
        Term::Prod(vec![a, b])
    }

    pub fn product(mut factors: Vec<Term>) -> Term {
        factors.retain(|f| !f.is_one_const());
        match factors.len() {
            0 => Term::one(),
            1 => factors.pop().unwrap(),
            _ => Term::Prod(factors),
        }
    }

    pub fn sum(mut terms: Vec<Term>) -> Term {
        terms.retain(|t| !t.is_zero_const());
        match terms.len() {
            0 => Term::zero(),
            1 => terms.pop().unwrap(),
            _ => Term::Sum(terms),
        }
    }

    pub fn pow(t: &Term, e: u32) -> Term {
        Term::product(vec![t.clone(); e as usize])
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Term::Const(c) if c.is_exact_zero())
    }

    pub fn is_one_const(&self) -> bool {
        matches!(self, Term::Const(c) if *c == Scalar::one())
    }

    pub fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Sum(ts) | Term::Prod(ts) | Term::Series(_, ts) => {
                ts.iter().for_each(|t| t.free_vars_into(out))
            }
            Term::Neg(t) => t.free_vars_into(out),
            Term::D(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Const(_) => false,
            Term::Sum(ts) | Term::Prod(ts) | Term::Series(_, ts) => ts.iter().any(|t| t.mentions(var)),
            Term::Neg(t) => t.mentions(var),
            Term::D(a, b) => a.mentions(var) || b.mentions(var),
        }
    }

    pub fn contains_d(&self) -> bool {
        match self {
            Term::D(..) => true,
            Term::Var(_) | Term::Const(_) => false,
            Term::Sum(ts) | Term::Prod(ts) | Term::Series(_, ts) => ts.iter().any(|t| t.contains_d()),
            Term::Neg(t) => t.contains_d(),
        }
    }

    /// True when the term is built from variables and constants by `+`, `*`, `neg` only.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Sum(ts) | Term::Prod(ts) => ts.iter().all(|t| t.is_polynomial()),
            Term::Neg(t) => t.is_polynomial(),
            Term::D(..) | Term::Series(..) => false,
        }
    }

    /// Simultaneous substitution of variables by terms.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Sum(ts) => Term::Sum(ts.iter().map(|t| t.substitute(f)).collect()),
            Term::Prod(ts) => Term::Prod(ts.iter().map(|t| t.substitute(f)).collect()),
            Term::Series(s, ts) => Term::Series(s.clone(), ts.iter().map(|t| t.substitute(f)).collect()),
            Term::Neg(t) => Term::neg(t.substitute(f)),
            Term::D(a, b) => Term::d(a.substitute(f), b.substitute(f)),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Sum(ts) | Term::Prod(ts) | Term::Series(_, ts) => ts.iter().map(|t| t.size()).sum(),
            Term::Neg(t) => t.size(),
            Term::D(a, b) => a.size() + b.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, ts: &[Term]) -> fmt::Result {
            write!(f, "({head}")?;
            for t in ts {
                write!(f, " {t}")?;
            }
            write!(f, ")")
        }
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{}", c.to_token()),
            Term::Sum(ts) => list(f, "+", ts),
            Term::Prod(ts) => list(f, "*", ts),
            Term::Neg(t) => write!(f, "(neg {t})"),
            Term::D(a, b) => write!(f, "(D {a} {b})"),
            Term::Series(s, ts) => list(f, &format!("ps {}", s.name()), ts),
        }
    }
}

impl From<Scalar> for Term {
    fn from(s: Scalar) -> Self {
        Term::constant(s)
    }
}
