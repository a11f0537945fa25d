//! Structural rewrites: substitution, positivization, basic-set decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalError {
    #[error("formula contains a quantifier")]
    QuantifierPresent,
    #[error("disjunctive normal form exceeds the size cap of {0} atoms")]
    SizeCapExceeded(usize),
}

/// First name of the form `base`, `base_1`, `base_2`, ... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) && base != "w" {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Capture-avoiding simultaneous substitution of free variables.
pub fn substitute(f: &Formula, bindings: &BTreeMap<String, Term>) -> Formula {
    if bindings.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Le(a, b) => Formula::Le(subst_term(a, bindings), subst_term(b, bindings)),
        Formula::Lt(a, b) => Formula::Lt(subst_term(a, bindings), subst_term(b, bindings)),
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, bindings), subst_term(b, bindings)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| substitute(g, bindings)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| substitute(g, bindings)).collect()),
        Formula::Not(g) => Formula::not(substitute(g, bindings)),
        Formula::Exists(vs, body) => {
            let mut inner: BTreeMap<String, Term> = bindings
                .iter()
                .filter(|(k, _)| !vs.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return f.clone();
            }
            let mut incoming = BTreeSet::new();
            for t in inner.values() {
                t.free_vars_into(&mut incoming);
            }
            let mut avoid = body.all_vars();
            avoid.extend(incoming.iter().cloned());
            avoid.extend(inner.keys().cloned());
            let mut new_vs = Vec::with_capacity(vs.len());
            for v in vs {
                if incoming.contains(v) {
                    let nv = fresh_name(v, &avoid);
                    avoid.insert(nv.clone());
                    inner.insert(v.clone(), Term::Var(nv.clone()));
                    new_vs.push(nv);
                } else {
                    new_vs.push(v.clone());
                }
            }
            Formula::Exists(new_vs, Box::new(substitute(body, &inner)))
        }
    }
}

pub fn subst_term(t: &Term, bindings: &BTreeMap<String, Term>) -> Term {
    t.substitute(&|v| bindings.get(v).cloned())
}

/// Substitutes a single variable.
pub fn substitute_one(f: &Formula, var: &str, t: Term) -> Formula {
    let mut b = BTreeMap::new();
    b.insert(var.to_string(), t);
    substitute(f, &b)
}

/// Renames binders so that no bound variable shares a name with a free variable,
/// a name in `avoid`, or another binder.
pub fn rename_bound_apart(f: &Formula, avoid: &BTreeSet<String>) -> Formula {
    let mut used: BTreeSet<String> = f.free_vars();
    used.extend(avoid.iter().cloned());
    let mut all = f.all_vars();
    all.extend(avoid.iter().cloned());
    rename_rec(f, &mut used, &mut all)
}

fn rename_rec(f: &Formula, used: &mut BTreeSet<String>, all: &mut BTreeSet<String>) -> Formula {
    match f {
        Formula::And(fs) => Formula::And(fs.iter().map(|g| rename_rec(g, used, all)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| rename_rec(g, used, all)).collect()),
        Formula::Not(g) => Formula::not(rename_rec(g, used, all)),
        Formula::Exists(vs, body) => {
            let mut ren = BTreeMap::new();
            let mut new_vs = Vec::new();
            for v in vs {
                if used.contains(v) {
                    let nv = fresh_name(v, all);
                    all.insert(nv.clone());
                    used.insert(nv.clone());
                    ren.insert(v.clone(), Term::Var(nv.clone()));
                    new_vs.push(nv);
                } else {
                    used.insert(v.clone());
                    new_vs.push(v.clone());
                }
            }
            let body = substitute(body, &ren);
            Formula::Exists(new_vs, Box::new(rename_rec(&body, used, all)))
        }
        atom => atom.clone(),
    }
}

/// Pushes negations into atoms: `not |a|<=|b|` is `|b|<|a|`, `not |a|<|b|` is `|b|<=|a|`,
/// `not a=b` is `|0|<|a-b|`.
pub fn positivize(f: &Formula) -> Result<Formula, NormalError> {
    pos(f, false)
}

fn pos(f: &Formula, negated: bool) -> Result<Formula, NormalError> {
    Ok(match (f, negated) {
        (Formula::Le(a, b), false) => Formula::Le(a.clone(), b.clone()),
        (Formula::Le(a, b), true) => Formula::Lt(b.clone(), a.clone()),
        (Formula::Lt(a, b), false) => Formula::Lt(a.clone(), b.clone()),
        (Formula::Lt(a, b), true) => Formula::Le(b.clone(), a.clone()),
        (Formula::Eq(a, b), false) => Formula::Eq(a.clone(), b.clone()),
        (Formula::Eq(a, b), true) => Formula::Lt(Term::zero(), Term::sub(a.clone(), b.clone())),
        (Formula::And(fs), false) | (Formula::Or(fs), true) => {
            Formula::And(fs.iter().map(|g| pos(g, negated)).collect::<Result<_, _>>()?)
        }
        (Formula::Or(fs), false) | (Formula::And(fs), true) => {
            Formula::Or(fs.iter().map(|g| pos(g, negated)).collect::<Result<_, _>>()?)
        }
        (Formula::Not(g), _) => pos(g, !negated)?,
        (Formula::Exists(..), _) => return Err(NormalError::QuantifierPresent),
    })
}

/// Disjunctive normal form over `<=`/`<` atoms; equalities become `|a-b| <= |0|`.
pub fn to_basic_union(f: &Formula, size_cap: usize) -> Result<Vec<Vec<Formula>>, NormalError> {
    let p = positivize(f)?;
    dnf(&p, size_cap)
}

fn dnf(f: &Formula, cap: usize) -> Result<Vec<Vec<Formula>>, NormalError> {
    let count = |d: &Vec<Vec<Formula>>| d.iter().map(|c| c.len()).sum::<usize>();
    let out = match f {
        Formula::Le(..) | Formula::Lt(..) => vec![vec![f.clone()]],
        Formula::Eq(a, b) => vec![vec![Formula::Le(Term::sub(a.clone(), b.clone()), Term::zero())]],
        Formula::Or(fs) => {
            let mut out = Vec::new();
            for g in fs {
                out.extend(dnf(g, cap)?);
                if count(&out) > cap {
                    return Err(NormalError::SizeCapExceeded(cap));
                }
            }
            out
        }
        Formula::And(fs) => {
            let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
            for g in fs {
                let part = dnf(g, cap)?;
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                    if count(&next) > cap {
                        return Err(NormalError::SizeCapExceeded(cap));
                    }
                }
                acc = next;
            }
            acc
        }
        Formula::Not(_) => unreachable!("positivized"),
        Formula::Exists(..) => return Err(NormalError::QuantifierPresent),
    };
    if count(&out) > cap {
        return Err(NormalError::SizeCapExceeded(cap));
    }
    Ok(out)
}

/// Reassembles a basic union as `(or (and ...) ...)`.
pub fn basic_union_formula(union: &[Vec<Formula>]) -> Formula {
    if union.is_empty() {
        return Formula::falsity();
    }
    let disjuncts: Vec<Formula> = union
        .iter()
        .map(|c| match c.len() {
            0 => Formula::truth(),
            1 => c[0].clone(),
            _ => Formula::And(c.clone()),
        })
        .collect();
    if disjuncts.len() == 1 {
        disjuncts.into_iter().next().unwrap()
    } else {
        Formula::Or(disjuncts)
    }
}

/// True when the formula is a disjunction of conjunctions of `le`/`lt` atoms.
pub fn is_basic_union(f: &Formula) -> bool {
    let conj = |g: &Formula| match g {
        Formula::Le(..) | Formula::Lt(..) => true,
        Formula::And(cs) => cs.iter().all(|c| matches!(c, Formula::Le(..) | Formula::Lt(..))),
        _ => false,
    };
    match f {
        Formula::Or(ds) => ds.iter().all(conj),
        g => conj(g),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub free_vars: BTreeSet<String>,
    pub is_quantifier_free: bool,
    pub contains_d: bool,
}

pub fn analyze(f: &Formula) -> Analysis {
    Analysis {
        free_vars: f.free_vars(),
        is_quantifier_free: f.is_quantifier_free(),
        contains_d: f.contains_d(),
    }
}

/// A set given piecewise: the union of `guard /\ body` over the pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveredFormula {
    pub pieces: Vec<CoveredPiece>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveredPiece {
    pub guard: Formula,
    pub body: Formula,
}

impl CoveredFormula {
    pub fn to_formula(&self) -> Formula {
        Formula::or(
            self.pieces
                .iter()
                .map(|p| Formula::and(vec![p.guard.clone(), p.body.clone()]))
                .collect(),
        )
    }

    /// Disjunction of the guards; should be valid on the ambient domain.
    pub fn cover(&self) -> Formula {
        Formula::or(self.pieces.iter().map(|p| p.guard.clone()).collect())
    }
}

impl fmt::Display for CoveredFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            writeln!(f, "piece {}", i + 1)?;
            writeln!(f, "  guard {}", p.guard)?;
            writeln!(f, "  body {}", p.body)?;
        }
        write!(f, "union {}", self.to_formula())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::series::SeriesRegistry;

    fn p(s: &str) -> Formula {
        parse_formula(s, &SeriesRegistry::with_builtins()).unwrap()
    }

    #[test]
    fn negation_rules() {
        assert_eq!(positivize(&p("(not (le x y))")).unwrap(), p("(lt y x)"));
        assert_eq!(positivize(&p("(not (not (lt x y)))")).unwrap(), p("(lt x y)"));
        assert_eq!(positivize(&p("(not (eq x 0))")).unwrap(), p("(lt 0 x)"));
        assert_eq!(
            positivize(&p("(exists (t) (le t 1))")),
            Err(NormalError::QuantifierPresent)
        );
    }

    #[test]
    fn substitution() {
        let f = p("(lt w_ 1)");
        let g = substitute_one(&f, "w_", Term::d(Term::var("y"), Term::var("x")));
        assert_eq!(g, p("(lt (D y x) 1)"));
        assert_eq!(substitute_one(&p("(eq x y)"), "x", Term::var("y")), p("(eq y y)"));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = p("(exists (t) (eq t x))");
        let g = substitute_one(&f, "x", Term::var("t"));
        let Formula::Exists(vs, body) = &g else { panic!() };
        assert_ne!(vs[0], "t");
        assert_eq!(**body, Formula::Eq(Term::var(vs[0].clone()), Term::var("t")));
    }

    #[test]
    fn analysis() {
        assert!(analyze(&p("(eq (D x y) 0)")).contains_d);
        assert!(!analyze(&p("(eq x 0)")).contains_d);
        let a = analyze(&p("(exists (y) (eq x y))"));
        assert_eq!(a.free_vars, ["x".to_string()].into_iter().collect());
        assert!(!a.is_quantifier_free);
    }

    #[test]
    fn distribution() {
        let u = to_basic_union(&p("(and (or (le a 1) (le b 1)) (lt c 1))"), 100).unwrap();
        assert_eq!(
            u,
            vec![
                vec![p("(le a 1)"), p("(lt c 1)")],
                vec![p("(le b 1)"), p("(lt c 1)")]
            ]
        );
        let single = to_basic_union(&p("(and (le a 1) (lt b c))"), 100).unwrap();
        assert_eq!(single.len(), 1);
        assert!(is_basic_union(&basic_union_formula(&u)));
    }

    #[test]
    fn size_cap() {
        let f = p("(and (or (le a 1) (le b 1)) (or (le a 1) (le b 1)) (or (le a 1) (le b 1)))");
        assert_eq!(to_basic_union(&f, 10), Err(NormalError::SizeCapExceeded(10)));
    }

    #[test]
    fn fresh_names() {
        let avoid: BTreeSet<String> = ["t".into(), "t_1".into()].into_iter().collect();
        assert_eq!(fresh_name("t", &avoid), "t_2");
        assert_eq!(fresh_name("w", &BTreeSet::new()), "w_1");
    }
}
