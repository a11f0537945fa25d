//! Formulas over norm comparisons of D-function terms.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::Term;

/// `Le(a, b)` is `|a| <= |b|`, `Lt(a, b)` is `|a| < |b|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Le(Term, Term),
    Lt(Term, Term),
    Eq(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    /// `|0| <= |0|`, the canonical true formula.
    pub fn truth() -> Formula {
        Formula::Le(Term::zero(), Term::zero())
    }

    /// `|0| < |0|`, the canonical false formula.
    pub fn falsity() -> Formula {
        Formula::Lt(Term::zero(), Term::zero())
    }

    pub fn is_truth(&self) -> bool {
        *self == Formula::truth()
    }

    pub fn is_falsity(&self) -> bool {
        *self == Formula::falsity()
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Le(a, b)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Lt(a, b)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    /// `t != 0`, as `|0| < |t|`.
    pub fn nonzero(t: Term) -> Formula {
        Formula::Lt(Term::zero(), t)
    }

    pub fn is_zero(t: Term) -> Formula {
        Formula::Eq(t, Term::zero())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Conjunction that flattens nested conjunctions, drops `truth`, and collapses on `falsity`.
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => out.extend(inner),
                p if p.is_truth() => {}
                p if p.is_falsity() => return Formula::falsity(),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::truth(),
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction dual to [`Formula::and`].
    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::Or(inner) => out.extend(inner),
                p if p.is_falsity() => {}
                p if p.is_truth() => return Formula::truth(),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Formula::falsity(),
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Le(..) | Formula::Lt(..) | Formula::Eq(..))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out);
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Le(a, b) | Formula::Lt(a, b) | Formula::Eq(a, b) => {
                a.free_vars_into(out);
                b.free_vars_into(out);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.free_vars_into(out)),
            Formula::Not(f) => f.free_vars_into(out),
            Formula::Exists(vs, f) => {
                let mut inner = BTreeSet::new();
                f.free_vars_into(&mut inner);
                for v in inner {
                    if !vs.contains(&v) {
                        out.insert(v);
                    }
                }
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| t.free_vars_into(&mut out));
        self.visit(&mut |f| {
            if let Formula::Exists(vs, _) = f {
                out.extend(vs.iter().cloned());
            }
        });
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Exists(..)) {
                qf = false;
            }
        });
        qf
    }

    pub fn contains_d(&self) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| found |= t.contains_d());
        found
    }

    pub fn contains_not(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Not(_)));
        found
    }

    /// Pre-order visit of every subformula.
    pub fn visit(&self, g: &mut impl FnMut(&Formula)) {
        g(self);
        match self {
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.visit(g)),
            Formula::Not(f) | Formula::Exists(_, f) => f.visit(g),
            _ => {}
        }
    }

    /// Visits the top-level terms of every atom.
    pub fn visit_terms(&self, g: &mut impl FnMut(&Term)) {
        self.visit(&mut |f| {
            if let Formula::Le(a, b) | Formula::Lt(a, b) | Formula::Eq(a, b) = f {
                g(a);
                g(b);
            }
        });
    }

    /// Rebuilds the formula with every atom's terms mapped (no binder handling).
    pub fn map_atoms(&self, g: &mut impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Le(..) | Formula::Lt(..) | Formula::Eq(..) => g(self),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.map_atoms(g)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.map_atoms(g)).collect()),
            Formula::Not(f) => Formula::not(f.map_atoms(g)),
            Formula::Exists(vs, f) => Formula::Exists(vs.clone(), Box::new(f.map_atoms(g))),
        }
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Formula::Le(a, b) | Formula::Lt(a, b) | Formula::Eq(a, b) => a.size() + b.size(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(|f| f.size()).sum(),
            Formula::Not(f) | Formula::Exists(_, f) => f.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Le(..) | Formula::Lt(..) | Formula::Eq(..) => 0,
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(|f| f.depth()).max().unwrap_or(0),
            Formula::Not(f) | Formula::Exists(_, f) => 1 + f.depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Le(a, b) => write!(f, "(le {a} {b})"),
            Formula::Lt(a, b) => write!(f, "(lt {a} {b})"),
            Formula::Eq(a, b) => write!(f, "(eq {a} {b})"),
            Formula::And(fs) | Formula::Or(fs) => {
                let head = if matches!(self, Formula::And(_)) { "and" } else { "or" };
                write!(f, "({head}")?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::Exists(vs, g) => write!(f, "(exists ({}) {g})", vs.join(" ")),
        }
    }
}
