//! Removing an occurrence `D(p, q)` when one of `p`, `q` divides the other.

use crate::formula::Formula;
use crate::normal::{substitute_one, CoveredFormula, CoveredPiece};
use crate::poly::KPoly;
use crate::term::Term;

use super::TransformError;

fn poly(t: &Term, what: &str) -> Result<KPoly, TransformError> {
    KPoly::from_term(t).ok_or_else(|| TransformError::WitnessInvalid(format!("{what} = {t} is not a polynomial")))
}

fn check_product(lhs: &Term, a: &Term, b: &Term, claim: &str) -> Result<(), TransformError> {
    let l = poly(lhs, "lhs")?;
    let r = &poly(a, "factor")? * &poly(b, "factor")?;
    if (&l - &r).is_zero() {
        Ok(())
    } else {
        Err(TransformError::WitnessInvalid(format!("{claim} fails")))
    }
}

/// `q | p` with `p = q h`: `[p != 0 ∧ ψ(h)] ∨ [p = 0 ∧ ψ(0)]`.
///
/// Requires `h` integral so that `|h| <= 1` on the unit polydisc, which is
/// exactly where `D(p, q) = h`.
pub fn d_eliminate_phq(psi: &Formula, hole: &str, p: &Term, q: &Term, h: &Term) -> Result<Formula, TransformError> {
    check_product(p, q, h, "p = q*h")?;
    if !poly(h, "h")?.is_integral() {
        return Err(TransformError::WitnessNotIntegral(h.to_string()));
    }
    Ok(Formula::Or(vec![
        Formula::And(vec![Formula::nonzero(p.clone()), substitute_one(psi, hole, h.clone())]),
        Formula::And(vec![Formula::is_zero(p.clone()), substitute_one(psi, hole, Term::zero())]),
    ]))
}

/// `p | q` with `q = h p`: on `|h| >= 1 ∧ q != 0` the hole is `1/h`, realized
/// by clearing denominators atom by atom; elsewhere it is `0`.
pub fn d_eliminate_qhp(psi: &Formula, hole: &str, p: &Term, q: &Term, h: &Term) -> Result<CoveredFormula, TransformError> {
    check_product(q, h, p, "q = h*p")?;
    if !psi.is_quantifier_free() {
        return Err(TransformError::QuantifierPresent);
    }
    let cleared = clear_inverse(psi, hole, h)?;
    Ok(CoveredFormula {
        pieces: vec![
            CoveredPiece {
                guard: Formula::And(vec![Formula::le(Term::one(), h.clone()), Formula::nonzero(q.clone())]),
                body: cleared,
            },
            CoveredPiece {
                guard: Formula::Or(vec![Formula::lt(h.clone(), Term::one()), Formula::is_zero(q.clone())]),
                body: substitute_one(psi, hole, Term::zero()),
            },
        ],
    })
}

/// `ψ(1/h)` with each atom multiplied through by `h^d`, `d` the atom's degree in the hole.
fn clear_inverse(psi: &Formula, hole: &str, h: &Term) -> Result<Formula, TransformError> {
    let mut err = None;
    let out = psi.map_atoms(&mut |atom| {
        let (a, b) = match atom {
            Formula::Le(a, b) | Formula::Lt(a, b) | Formula::Eq(a, b) => (a, b),
            _ => unreachable!("map_atoms visits atoms"),
        };
        let (ca, cb) = match (hole_coefficients(a, hole), hole_coefficients(b, hole)) {
            (Ok(ca), Ok(cb)) => (ca, cb),
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                return atom.clone();
            }
        };
        let d = ca.len().max(cb.len()) - 1;
        if d == 0 {
            return atom.clone();
        }
        let clear = |c: Vec<Term>| {
            Term::sum(
                c.into_iter()
                    .enumerate()
                    .filter(|(_, t)| !t.is_zero_const())
                    .map(|(i, t)| Term::mul(t, Term::pow(h, (d - i) as u32)))
                    .collect(),
            )
        };
        let (a2, b2) = (clear(ca), clear(cb));
        match atom {
            Formula::Le(..) => Formula::le(a2, b2),
            Formula::Lt(..) => Formula::lt(a2, b2),
            _ => Formula::eq(a2, b2),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Coefficients of `t` as a polynomial in `hole`, entry `i` multiplying `hole^i`.
fn hole_coefficients(t: &Term, hole: &str) -> Result<Vec<Term>, TransformError> {
    if !t.mentions(hole) {
        return Ok(vec![t.clone()]);
    }
    match t {
        Term::Var(_) => Ok(vec![Term::zero(), Term::one()]),
        Term::Neg(a) => Ok(hole_coefficients(a, hole)?.into_iter().map(neg).collect()),
        Term::Sum(ts) => {
            let mut acc: Vec<Vec<Term>> = Vec::new();
            for s in ts {
                for (i, c) in hole_coefficients(s, hole)?.into_iter().enumerate() {
                    if acc.len() <= i {
                        acc.resize(i + 1, Vec::new());
                    }
                    acc[i].push(c);
                }
            }
            Ok(acc.into_iter().map(Term::sum).collect())
        }
        Term::Prod(ts) => {
            let mut acc = vec![Term::one()];
            for f in ts {
                let c = hole_coefficients(f, hole)?;
                let mut next: Vec<Vec<Term>> = vec![Vec::new(); acc.len() + c.len() - 1];
                for (i, a) in acc.iter().enumerate() {
                    for (j, b) in c.iter().enumerate() {
                        if !a.is_zero_const() && !b.is_zero_const() {
                            next[i + j].push(Term::mul(a.clone(), b.clone()));
                        }
                    }
                }
                acc = next.into_iter().map(Term::sum).collect();
            }
            Ok(acc)
        }
        Term::Const(_) => Ok(vec![t.clone()]),
        Term::D(..) | Term::Series(..) => Err(TransformError::NonPolynomialHole(t.to_string())),
    }
}

fn neg(t: Term) -> Term {
    if t.is_zero_const() {
        t
    } else {
        Term::neg(t)
    }
}
