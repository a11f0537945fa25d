//! Polynomials over `Q((w))` in named variables, with exact coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::scalar::Scalar;
use crate::term::Term;

/// Variable name to exponent; zero exponents are never stored.
pub type Monomial = BTreeMap<String, u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct KPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl KPoly {
    pub fn zero() -> Self {
        KPoly::default()
    }

    pub fn one() -> Self {
        KPoly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = KPoly::zero();
        if !c.is_exact_zero() {
            p.terms.insert(Monomial::new(), c);
        }
        p
    }

    pub fn var(name: &str) -> Self {
        let mut m = Monomial::new();
        m.insert(name.to_string(), 1);
        let mut p = KPoly::zero();
        p.terms.insert(m, Scalar::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = KPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        let m: Monomial = m.into_iter().filter(|(_, e)| *e > 0).collect();
        let entry = self.terms.entry(m.clone()).or_default();
        *entry = &*entry + &c;
        if entry.is_exact_zero() {
            self.terms.remove(&m);
        }
    }

    /// Converts a polynomial term (no `D`, no series); `None` otherwise.
    pub fn from_term(t: &Term) -> Option<KPoly> {
        Some(match t {
            Term::Var(v) => KPoly::var(v),
            Term::Const(c) => KPoly::constant(c.clone()),
            Term::Sum(ts) => {
                let mut acc = KPoly::zero();
                for s in ts {
                    acc = &acc + &KPoly::from_term(s)?;
                }
                acc
            }
            Term::Prod(ts) => {
                let mut acc = KPoly::one();
                for s in ts {
                    acc = &acc * &KPoly::from_term(s)?;
                }
                acc
            }
            Term::Neg(s) => -&KPoly::from_term(s)?,
            Term::D(..) | Term::Series(..) => return None,
        })
    }

    pub fn to_term(&self) -> Term {
        let mut summands = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            if *c != Scalar::one() || m.is_empty() {
                factors.push(Term::Const(c.clone()));
            }
            for (v, e) in m {
                for _ in 0..*e {
                    factors.push(Term::var(v.clone()));
                }
            }
            summands.push(if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Term::Prod(factors)
            });
        }
        match summands.len() {
            0 => Term::zero(),
            1 => summands.pop().unwrap(),
            _ => Term::Sum(summands),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.values().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms
            .keys()
            .map(|m| m.get(var).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Coefficients with respect to `var`: entry `i` multiplies `var^i`.
    pub fn coefficients_in(&self, var: &str) -> Vec<KPoly> {
        let mut out = vec![KPoly::zero(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let e = rest.remove(var).unwrap_or(0);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    /// All coefficient orders are `>= 0`.
    pub fn is_integral(&self) -> bool {
        self.terms
            .values()
            .all(|c| c.order_lower_bound().map_or(true, |k| k >= 0))
    }

    pub fn pow(&self, e: u32) -> KPoly {
        let mut acc = KPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates with `env` giving each variable's value.
    pub fn eval(&self, env: &impl Fn(&str) -> Option<Scalar>) -> Option<Scalar> {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                t = &t * &env(v)?.pow(*e);
            }
            acc = &acc + &t;
        }
        Some(acc)
    }

    /// Substitutes polynomials for variables.
    pub fn compose(&self, images: &BTreeMap<String, KPoly>) -> KPoly {
        let mut acc = KPoly::zero();
        for (m, c) in &self.terms {
            let mut t = KPoly::constant(c.clone());
            for (v, e) in m {
                let base = images.get(v).cloned().unwrap_or_else(|| KPoly::var(v));
                t = &t * &base.pow(*e);
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl std::ops::Add for &KPoly {
    type Output = KPoly;
    fn add(self, rhs: &KPoly) -> KPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Neg for &KPoly {
    type Output = KPoly;
    fn neg(self) -> KPoly {
        KPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Sub for &KPoly {
    type Output = KPoly;
    fn sub(self, rhs: &KPoly) -> KPoly {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &KPoly {
    type Output = KPoly;
    fn mul(self, rhs: &KPoly) -> KPoly {
        let mut out = KPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = ma.clone();
                for (v, e) in mb {
                    *m.entry(v.clone()).or_insert(0) += e;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::series::SeriesRegistry;

    fn kp(s: &str) -> KPoly {
        KPoly::from_term(&parse_term(s, &SeriesRegistry::empty()).unwrap()).unwrap()
    }

    #[test]
    fn arithmetic_identities() {
        assert_eq!(&kp("(+ x 1)") * &kp("(+ x -1)"), kp("(+ (* x x) -1)"));
        assert!((&kp("(* x y)") - &kp("(* y x)")).is_zero());
    }

    #[test]
    fn round_trip_through_terms() {
        let p = kp("(+ (* 2 x x y) (* w y) -3)");
        assert_eq!(KPoly::from_term(&p.to_term()).unwrap(), p);
    }

    #[test]
    fn coefficient_split() {
        let p = kp("(+ (* z z x) (* 3 z) y)");
        let cs = p.coefficients_in("z");
        assert_eq!(cs, vec![kp("y"), kp("3"), kp("x")]);
        assert_eq!(p.degree_in("z"), 2);
    }

    #[test]
    fn non_polynomial_rejected() {
        assert!(KPoly::from_term(&Term::d(Term::var("x"), Term::var("y"))).is_none());
    }

    #[test]
    fn integrality() {
        assert!(kp("(+ x (* w y))").is_integral());
        assert!(!kp("(* w^-1 x)").is_integral());
    }
}
