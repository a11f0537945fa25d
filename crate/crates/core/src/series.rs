//! Strictly convergent power series with a certified coefficient tail.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series `{0}`: coefficient {1} is not exact")]
    InexactCoefficient(String, String),
    #[error("series `{0}`: coefficient of {1:?} has negative order (Gauss norm > 1)")]
    NotIntegral(String, Vec<u32>),
    #[error("series `{0}`: exponent tuple {1:?} does not match arity {2}")]
    ExponentArity(String, Vec<u32>, usize),
    #[error("series `{0}`: tail slope must be >= 1")]
    BadSlope(String),
    #[error("series `{0}`: coefficient of {1:?} violates the tail certificate")]
    CertificateViolated(String, Vec<u32>),
    #[error("series `{0}`: rule `{1}` needs arity 1")]
    RuleArity(String, String),
    #[error("series argument {0} lies outside the closed unit disk")]
    ArgumentOutOfDisk(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Every coefficient of total degree `d >= d0` has order `>= slope * (d - d0) + tau0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TailCertificate {
    pub d0: u32,
    pub slope: u32,
    pub tau0: i64,
}

impl TailCertificate {
    pub fn bound(&self, degree: u32) -> i64 {
        self.slope as i64 * (degree as i64 - self.d0 as i64) + self.tau0
    }
}

/// Closed-form coefficient generator, so that a series can be evaluated to any precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoefficientRule {
    /// Coefficient of `T^i` is `tau^i / i!`.
    Exp { tau: Scalar },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrictSeries {
    name: String,
    arity: usize,
    coeffs: BTreeMap<Vec<u32>, Scalar>,
    tail: TailCertificate,
    rule: Option<CoefficientRule>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl StrictSeries {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        coeffs: BTreeMap<Vec<u32>, Scalar>,
        tail: TailCertificate,
        rule: Option<CoefficientRule>,
    ) -> Result<Self, SeriesError> {
        let name = name.into();
        if tail.slope == 0 {
            return Err(SeriesError::BadSlope(name));
        }
        for (e, c) in &coeffs {
            if e.len() != arity {
                return Err(SeriesError::ExponentArity(name, e.clone(), arity));
            }
            if !c.is_exact() {
                return Err(SeriesError::InexactCoefficient(name, c.to_string()));
            }
            if c.order_lower_bound().is_some_and(|k| k < 0) {
                return Err(SeriesError::NotIntegral(name, e.clone()));
            }
            let d = degree(e);
            if d >= tail.d0 && c.order_lower_bound().is_some_and(|k| k < tail.bound(d)) {
                return Err(SeriesError::CertificateViolated(name, e.clone()));
            }
        }
        if let Some(CoefficientRule::Exp { tau }) = &rule {
            if arity != 1 {
                return Err(SeriesError::RuleArity(name, "exp".into()));
            }
            // ord(tau^i / i!) = i * ord(tau) must dominate the linear bound for all i
            let ot = tau.order_lower_bound().unwrap_or(i64::MAX / 4);
            if !tau.is_exact() || ot < tail.slope as i64 || (tail.d0 as i64) * ot < tail.tau0 {
                return Err(SeriesError::CertificateViolated(name, vec![tail.d0]));
            }
        }
        Ok(StrictSeries {
            name,
            arity,
            coeffs,
            tail,
            rule,
        })
    }

    /// `exptau(T) = sum_i (w T)^i / i!`.
    pub fn exptau() -> Self {
        StrictSeries::new(
            "exptau",
            1,
            BTreeMap::new(),
            TailCertificate {
                d0: 0,
                slope: 1,
                tau0: 0,
            },
            Some(CoefficientRule::Exp {
                tau: Scalar::uniformizer_pow(1),
            }),
        )
        .expect("builtin series is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tail(&self) -> TailCertificate {
        self.tail
    }

    pub fn rule(&self) -> Option<&CoefficientRule> {
        self.rule.as_ref()
    }

    pub fn explicit_coefficients(&self) -> &BTreeMap<Vec<u32>, Scalar> {
        &self.coeffs
    }

    /// Coefficient of a monomial, if it is known.
    pub fn coefficient(&self, e: &[u32]) -> Option<Scalar> {
        if let Some(c) = self.coeffs.get(e) {
            return Some(c.clone());
        }
        match &self.rule {
            Some(CoefficientRule::Exp { tau }) => {
                let i = e[0];
                let fact: BigInt = (1..=i as u64).map(BigInt::from).product();
                Some(tau.pow(i).scale(&BigRational::new(BigInt::one(), fact)))
            }
            None if degree(e) < self.tail.d0 => Some(Scalar::zero()),
            None => None,
        }
    }

    /// Evaluates at a point of the closed unit polydisk; the result is known up to order `n`
    /// (or less, if no rule is present and the certificate only bounds the tail by `tau0`).
    pub fn eval(&self, args: &[Scalar], n: i64) -> Result<Scalar, SeriesError> {
        assert_eq!(args.len(), self.arity, "series arity checked at construction");
        for a in args {
            if a.min_stored_exponent().is_some_and(|k| k < 0) {
                return Err(SeriesError::ArgumentOutOfDisk(a.to_string()));
            }
            if a.precision().bound().is_some_and(|b| b < 0) {
                return Err(SeriesError::Scalar(ScalarError::InsufficientPrecision));
            }
        }
        // highest degree whose certified bound is still below n
        let cert = self.tail;
        let mut top = cert.d0 as i64 - 1;
        if self.rule.is_some() && n > cert.tau0 {
            let extra = (n - cert.tau0 + cert.slope as i64 - 1) / cert.slope as i64;
            top = cert.d0 as i64 + extra - 1;
        }
        let explicit_top = self.coeffs.keys().map(|e| degree(e) as i64).max().unwrap_or(-1);
        let top = top.max(explicit_top);
        let mut powers: Vec<Vec<Scalar>> = Vec::with_capacity(args.len());
        for a in args {
            let mut row = vec![Scalar::one()];
            for k in 1..=top.max(0) as usize {
                let next = (&row[k - 1] * a).truncate(n);
                row.push(next);
            }
            powers.push(row);
        }
        let mut acc = Scalar::zero();
        for d in 0..=top.max(-1) {
            for e in exponent_tuples(self.arity, d as u32) {
                let Some(c) = self.coefficient(&e) else { continue };
                if c.is_exact_zero() {
                    continue;
                }
                let mut term = c;
                for (i, k) in e.iter().enumerate() {
                    term = &term * &powers[i][*k as usize];
                }
                acc = &acc + &term.truncate(n);
            }
        }
        let tail_precision = if self.rule.is_some() {
            n
        } else {
            n.min(cert.tau0)
        };
        Ok(&acc + &Scalar::unknown(tail_precision))
    }
}

/// All exponent tuples of the given length and total degree.
pub fn exponent_tuples(len: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

impl fmt::Display for StrictSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "series {} {} {{", self.name, self.arity)?;
        for (e, c) in &self.coeffs {
            let tuple: Vec<String> = e.iter().map(|k| k.to_string()).collect();
            writeln!(f, "  ({}) : {}", tuple.join(","), c)?;
        }
        if let Some(CoefficientRule::Exp { tau }) = &self.rule {
            writeln!(f, "  rule exp {}", tau)?;
        }
        writeln!(f, "  tail {} {} {}", self.tail.d0, self.tail.slope, self.tail.tau0)?;
        write!(f, "}}")
    }
}

/// Named series available to the formula parser.
#[derive(Debug, Clone, Default)]
pub struct SeriesRegistry {
    map: BTreeMap<String, Arc<StrictSeries>>,
}

impl SeriesRegistry {
    pub fn empty() -> Self {
        SeriesRegistry::default()
    }

    /// Registry holding `exptau`.
    pub fn with_builtins() -> Self {
        let mut r = SeriesRegistry::empty();
        r.insert(StrictSeries::exptau());
        r
    }

    pub fn insert(&mut self, s: StrictSeries) -> Arc<StrictSeries> {
        let s = Arc::new(s);
        self.map.insert(s.name().to_string(), s.clone());
        s
    }

    pub fn get(&self, name: &str) -> Option<Arc<StrictSeries>> {
        self.map.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(|s| s.as_str())
    }

    pub fn merge(&mut self, other: &SeriesRegistry) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }
}
