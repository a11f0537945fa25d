use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::term::Term;

/// Monomial order on exponent vectors; variable 0 is the largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Grevlex on the first `front` variables, ties broken by grevlex on the rest;
    /// any monomial involving the front block beats every monomial that does not.
    Block { front: usize },
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match *self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Block { front } => {
                let f = front.min(a.len());
                grevlex(&a[..f], &b[..f]).then_with(|| grevlex(&a[f..], &b[f..]))
            }
        }
    }
}

pub fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// Sparse polynomial over the rationals; terms sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    order: MonomialOrder,
    terms: Vec<(Vec<u32>, BigRational)>,
}

impl MPoly {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Self {
        MPoly {
            nvars,
            order,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, order: MonomialOrder, c: BigRational) -> Self {
        MPoly::new(nvars, order, vec![(vec![0; nvars], c)])
    }

    pub fn one(nvars: usize, order: MonomialOrder) -> Self {
        MPoly::constant(nvars, order, BigRational::one())
    }

    pub fn var(nvars: usize, order: MonomialOrder, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MPoly::new(nvars, order, vec![(e, BigRational::one())])
    }

    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    pub fn new(nvars: usize, order: MonomialOrder, mut terms: Vec<(Vec<u32>, BigRational)>) -> Self {
        for (e, _) in &terms {
            assert_eq!(e.len(), nvars, "exponent length must match the ring");
        }
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut merged: Vec<(Vec<u32>, BigRational)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match merged.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        MPoly {
            nvars,
            order,
            terms: merged,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.iter().all(|e| *e == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.terms[0].1.is_one()
    }

    pub fn lm(&self) -> &[u32] {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &BigRational {
        &self.terms[0].1
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    /// Whether the polynomial involves variable `i`.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.iter().any(|(e, _)| e[i] > 0)
    }

    pub fn with_order(&self, order: MonomialOrder) -> MPoly {
        MPoly::new(self.nvars, order, self.terms.clone())
    }

    pub fn monic(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars, self.order);
        }
        MPoly {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.combine(other, &BigRational::one(), None)
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.combine(other, &-BigRational::one(), None)
    }

    /// `self + c * m * other` by a sorted merge; `m` is a monomial shift.
    fn combine(&self, other: &MPoly, c: &BigRational, m: Option<&[u32]>) -> MPoly {
        let shift = |e: &[u32]| -> Vec<u32> {
            match m {
                Some(m) => e.iter().zip(m).map(|(a, b)| a + b).collect(),
                None => e.to_vec(),
            }
        };
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let order = self.order;
        let mut pending: Option<Vec<u32>> = other.terms.first().map(|t| shift(&t.0));
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = match (&self.terms.get(i), &pending) {
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(a), Some(b)) => order.cmp(&a.0, b),
                (None, None) => unreachable!(),
            };
            match take_left {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let e = pending.take().unwrap();
                    out.push((e, c * &other.terms[j].1));
                    j += 1;
                    pending = other.terms.get(j).map(|t| shift(&t.0));
                }
                Ordering::Equal => {
                    let e = pending.take().unwrap();
                    let v = &self.terms[i].1 + c * &other.terms[j].1;
                    if !v.is_zero() {
                        out.push((e, v));
                    }
                    i += 1;
                    j += 1;
                    pending = other.terms.get(j).map(|t| shift(&t.0));
                }
            }
        }
        MPoly {
            nvars: self.nvars,
            order,
            terms: out,
        }
    }

    /// `self - c * m * g`.
    pub fn sub_scaled_shift(&self, c: &BigRational, m: &[u32], g: &MPoly) -> MPoly {
        self.combine(g, &-c, Some(m))
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut acc = MPoly::zero(self.nvars, self.order);
        for (e, c) in &self.terms {
            acc = acc.combine(other, c, Some(e));
        }
        acc
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars, self.order);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Full reduction modulo `basis` (not required to be a Gröbner basis).
    pub fn normal_form(&self, basis: &[MPoly]) -> MPoly {
        let mut p = self.clone();
        let mut rem: Vec<(Vec<u32>, BigRational)> = Vec::new();
        'outer: while !p.is_zero() {
            let (lm, lc) = p.terms[0].clone();
            for g in basis {
                if g.is_zero() {
                    continue;
                }
                if divides(g.lm(), &lm) {
                    let m: Vec<u32> = lm.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
                    let c = &lc / g.lc();
                    p = p.sub_scaled_shift(&c, &m, g);
                    continue 'outer;
                }
            }
            rem.push((lm, lc));
            p.terms.remove(0);
        }
        MPoly {
            nvars: self.nvars,
            order: self.order,
            terms: rem,
        }
    }

    /// Embeds into a ring with `k` extra variables placed in front.
    pub fn prepend_vars(&self, k: usize, order: MonomialOrder) -> MPoly {
        MPoly::new(
            self.nvars + k,
            order,
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut ne = vec![0; k];
                    ne.extend_from_slice(e);
                    (ne, c.clone())
                })
                .collect(),
        )
    }

    /// Drops the first `k` variables; callers ensure they do not occur.
    pub fn drop_front(&self, k: usize, order: MonomialOrder) -> MPoly {
        debug_assert!(self.terms.iter().all(|(e, _)| e[..k].iter().all(|x| *x == 0)));
        MPoly::new(
            self.nvars - k,
            order,
            self.terms.iter().map(|(e, c)| (e[k..].to_vec(), c.clone())).collect(),
        )
    }

    /// Reindexes variables: variable `i` of `self` becomes `map[i]` in an `nvars`-variable ring.
    pub fn remap(&self, map: &[usize], nvars: usize, order: MonomialOrder) -> MPoly {
        MPoly::new(
            nvars,
            order,
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut ne = vec![0; nvars];
                    for (i, k) in e.iter().enumerate() {
                        ne[map[i]] += k;
                    }
                    (ne, c.clone())
                })
                .collect(),
        )
    }

    /// Substitutes rational values for some variables (`None` keeps the variable).
    pub fn specialize(&self, values: &[Option<BigRational>]) -> MPoly {
        MPoly::new(
            self.nvars,
            self.order,
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut ne = e.clone();
                    let mut cc = c.clone();
                    for (i, v) in values.iter().enumerate() {
                        if let Some(v) = v {
                            cc *= num_traits::pow(v.clone(), e[i] as usize);
                            ne[i] = 0;
                        }
                    }
                    (ne, cc)
                })
                .collect(),
        )
    }

    pub fn eval(&self, values: &[BigRational]) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (e, c)| {
            let mut t = c.clone();
            for (i, k) in e.iter().enumerate() {
                t *= num_traits::pow(values[i].clone(), *k as usize);
            }
            acc + t
        })
    }

    /// As a term over the given variable names.
    pub fn to_term(&self, names: &[String]) -> Term {
        let mut summands = Vec::new();
        for (e, c) in &self.terms {
            let mut factors = Vec::new();
            let is_unit = c.is_one();
            if !is_unit || e.iter().all(|k| *k == 0) {
                factors.push(Term::Const(crate::scalar::Scalar::from_rational(c.clone())));
            }
            for (i, k) in e.iter().enumerate() {
                for _ in 0..*k {
                    factors.push(Term::var(names[i].clone()));
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

    /// Human-readable form such as `x^2*y - 3*z + 1`.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| if *k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{}*{}", a, mono.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}
