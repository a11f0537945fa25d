//! Points of `Sp B` over `Q((w))`: Newton lifting of residue points and
//! univariate root finding by Newton polygons.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::KPoly;
use crate::scalar::{Precision, Scalar};
use crate::semantics::Verdict;

use super::model::{AdmissibleMap, Model, SpecialSet};
use super::residue::reduce;
use super::FlatError;

/// Univariate polynomial with exact coefficients, entry `i` multiplying `t^i`.
pub type UPoly = Vec<Scalar>;

fn horner(p: &[Scalar], x: &Scalar) -> Scalar {
    p.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
}

fn derivative(p: &[Scalar]) -> UPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.scale(&BigRational::from_integer(BigInt::from(i))))
        .collect()
}

fn exact_part(s: &Scalar) -> Scalar {
    Scalar::from_terms(s.terms().map(|(k, c)| (k, c.clone())), Precision::Exact)
}

/// `p(x)` with every intermediate truncated below `cap`.
fn horner_trunc(p: &[Scalar], x: &Scalar, cap: i64) -> Scalar {
    p.iter()
        .rev()
        .fold(Scalar::zero(), |acc, c| (&(&acc * x).truncate(cap) + c).truncate(cap))
}

/// Newton iteration from `start` for a simple root of `p`; the result differs
/// from the true root by order at least `n`.
pub fn newton_root(p: &[Scalar], start: Scalar, n: i64) -> Result<Scalar, FlatError> {
    let dp = derivative(p);
    // p'(r) keeps the order it has at a simple residual root
    let od = horner(&dp, &start)
        .min_stored_exponent()
        .ok_or_else(|| FlatError::NotLiftableInFragment("vanishing derivative".into()))?;
    if horner(p, &start).is_exact_zero() {
        return Ok(start);
    }
    let cap = od + n + 1;
    let mut r = start;
    for _ in 0..128 {
        let val = horner_trunc(p, &r, cap);
        if val.is_exact_zero() {
            return Ok(r);
        }
        let ov = val.min_stored_exponent().unwrap_or(cap);
        if ov - od >= n {
            return Ok(r.truncate(n));
        }
        let d = horner_trunc(&dp, &r, cap);
        if d.min_stored_exponent() != Some(od) {
            return Err(FlatError::NotLiftableInFragment("root is not simple".into()));
        }
        // quadratic convergence: terms much beyond twice the current accuracy are noise
        let e = ov - od;
        let keep = (2 * e + 2).max(e + 1).min(n + 1);
        let inv = d
            .invert(keep - ov)
            .map_err(|_| FlatError::NotLiftableInFragment("derivative not invertible".into()))?;
        r = &r - &exact_part(&(&val * &inv).truncate(keep));
    }
    Err(FlatError::NotLiftableInFragment("Newton iteration did not converge".into()))
}

/// Lower convex hull of `(i, ord a_i)`.
fn newton_polygon(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below segment a-p
            if (b.1 - a.1) * (p.0 - a.0) >= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

fn rat_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Nonzero rational roots of a rational polynomial with nonzero constant term;
/// `None` when the coefficients are too large to enumerate candidates.
pub fn rational_roots(p: &[BigRational]) -> Option<Vec<BigRational>> {
    let denom = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(denom.clone())).to_integer()).collect();
    let lead = ints.iter().rev().find(|c| !c.is_zero())?;
    let constant = ints.first()?;
    if constant.is_zero() {
        return None;
    }
    let mut roots = Vec::new();
    for num in divisors(constant)? {
        for den in divisors(lead)? {
            for sign in [1, -1] {
                let x = BigRational::new(num.clone() * sign, den.clone());
                if !roots.contains(&x) && rat_eval(p, &x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    Some(roots)
}

/// Roots in `Q((w))` of a univariate polynomial with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RootSearch {
    /// Roots, each correct to the requested order.
    pub roots: Vec<Scalar>,
    /// Set when some candidate could not be settled (repeated residual root or
    /// oversized coefficients), so `roots` may be incomplete.
    pub incomplete: bool,
}

pub fn univariate_roots(p: &[Scalar], n: i64) -> Result<RootSearch, FlatError> {
    if p.iter().any(|c| !c.is_exact()) {
        return Err(FlatError::NotLiftableInFragment("inexact coefficients".into()));
    }
    let mut p: Vec<Scalar> = p.to_vec();
    while p.last().is_some_and(Scalar::is_exact_zero) {
        p.pop();
    }
    let mut out = RootSearch::default();
    if p.is_empty() {
        out.incomplete = true;
        return Ok(out);
    }
    let zeros = p.iter().take_while(|c| c.is_exact_zero()).count();
    if zeros > 0 {
        out.roots.push(Scalar::zero());
        if zeros > 1 {
            out.incomplete = true;
        }
        p.drain(..zeros);
    }
    if p.len() < 2 {
        return Ok(out);
    }
    let points: Vec<(i64, i64)> = p
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.min_stored_exponent().map(|v| (i as i64, v)))
        .collect();
    let hull = newton_polygon(&points);
    for seg in hull.windows(2) {
        let ((i1, v1), (i2, v2)) = (seg[0], seg[1]);
        if (v1 - v2) % (i2 - i1) != 0 {
            continue; // ramified slope: no roots over Q((w))
        }
        let v = (v1 - v2) / (i2 - i1);
        let residual: Vec<BigRational> = (i1..=i2)
            .map(|i| {
                let c = &p[i as usize];
                c.coefficient(v1 - v * (i - i1))
            })
            .collect();
        let Some(cands) = rational_roots(&residual) else {
            out.incomplete = true;
            continue;
        };
        let dres: Vec<BigRational> = residual
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        for c in cands {
            if rat_eval(&dres, &c).is_zero() {
                out.incomplete = true;
                continue;
            }
            out.roots.push(newton_root(&p, Scalar::monomial(c, v), n)?);
        }
    }
    Ok(out)
}

fn univariate_in(p: &KPoly, var: &str, fixed: &BTreeMap<String, KPoly>) -> Result<UPoly, FlatError> {
    p.compose(fixed)
        .coefficients_in(var)
        .into_iter()
        .map(|c| {
            c.constant_value()
                .ok_or_else(|| FlatError::NotLiftableInFragment(format!("{p} is not univariate in {var}")))
        })
        .collect()
}

fn rational_scalar(c: &BigRational) -> Scalar {
    Scalar::from_rational(c.clone())
}

/// A point of `Sp B` reducing to the residue point `a`, for models with at
/// most one relation that is smooth at `a` in some variable.
pub fn lift_residue_point(model: &Model, a: &[BigRational], n: i64) -> Result<Vec<Scalar>, FlatError> {
    if a.len() != model.vars.len() {
        return Err(FlatError::ArityMismatch {
            expected: model.vars.len(),
            got: a.len(),
        });
    }
    for r in &model.rels {
        if !reduce(r, &model.vars)?.eval(a).is_zero() {
            return Err(FlatError::PointNotOnModel(r.to_string()));
        }
    }
    let mut point: Vec<Scalar> = a.iter().map(rational_scalar).collect();
    match model.rels.as_slice() {
        [] => Ok(point),
        [rel] => {
            let reduced = reduce(rel, &model.vars)?;
            // differentiate the reduction in each variable at `a`, preferring later variables
            for k in (0..model.vars.len()).rev() {
                let fixed: BTreeMap<String, KPoly> = model
                    .vars
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != k)
                    .map(|(i, v)| (v.clone(), KPoly::constant(point[i].clone())))
                    .collect();
                let u = univariate_in(rel, &model.vars[k], &fixed)?;
                let ures: Vec<BigRational> = u.iter().map(|c| c.coefficient(0)).collect();
                let d: Vec<BigRational> = ures
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                    .collect();
                if rat_eval(&d, &a[k]).is_zero() {
                    continue;
                }
                debug_assert!(!reduced.is_zero());
                point[k] = newton_root(&u, rational_scalar(&a[k]), n)?;
                return Ok(point);
            }
            Err(FlatError::NotLiftableInFragment(format!(
                "relation {rel} is singular at the residue point"
            )))
        }
        _ => Err(FlatError::NotLiftableInFragment("more than one relation".into())),
    }
}

/// Outcome of searching the fibre of a target point for a source point in `Σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FibreWitness {
    /// Source point in `Σ`; its image agrees with the target point to the requested order.
    Found(Vec<Scalar>),
    /// The fibre has no `Q((w))`-point in `Σ` (a root exists only after field extension).
    NoRationalPoint,
    /// Neither found nor excluded.
    Undetermined,
}

/// Backward witness for coordinate maps (each target generator maps to a
/// distinct source generator) with at most one relation among the remaining
/// source generators.
pub fn fibre_witness(
    f: &AdmissibleMap,
    sigma: &SpecialSet,
    target: &[Scalar],
    n: i64,
) -> Result<FibreWitness, FlatError> {
    let mut fixed: BTreeMap<String, KPoly> = BTreeMap::new();
    for (tv, x) in f.target.vars.iter().zip(target) {
        let img = &f.morphism[tv];
        let sv = f
            .source
            .vars
            .iter()
            .find(|s| *img == KPoly::var(s))
            .ok_or_else(|| FlatError::NotLiftableInFragment(format!("image of {tv} is not a coordinate")))?;
        if fixed.insert(sv.clone(), KPoly::constant(x.clone())).is_some() {
            return Err(FlatError::NotLiftableInFragment(format!("{sv} is hit twice")));
        }
    }
    let free: Vec<&String> = f.source.vars.iter().filter(|v| !fixed.contains_key(*v)).collect();
    let rels: Vec<KPoly> = f
        .source
        .rels
        .iter()
        .map(|r| r.compose(&fixed))
        .filter(|r| !r.is_zero())
        .collect();
    let assemble = |values: &[Scalar]| -> Vec<Scalar> {
        let mut it = values.iter();
        f.source
            .vars
            .iter()
            .map(|v| match fixed.get(v) {
                Some(c) => c.constant_value().unwrap_or_else(Scalar::zero),
                None => it.next().cloned().unwrap_or_else(Scalar::zero),
            })
            .collect()
    };
    let in_sigma = |pt: &[Scalar]| -> bool {
        matches!(sigma.contains(&f.source.vars, pt, n), Ok(Verdict::True))
    };

    match (free.as_slice(), rels.as_slice()) {
        ([], []) => {
            let pt = assemble(&[]);
            Ok(if in_sigma(&pt) { FibreWitness::Found(pt) } else { FibreWitness::NoRationalPoint })
        }
        ([], _) => Ok(FibreWitness::NoRationalPoint),
        (_, []) => {
            // unconstrained fibre: try small integral values
            let cands = [Scalar::zero(), Scalar::one(), Scalar::uniformizer_pow(1), Scalar::from_int(-1)];
            let k = free.len();
            let total = cands.len().pow(k as u32);
            for idx in 0..total.min(4096) {
                let vals: Vec<Scalar> = (0..k)
                    .map(|j| cands[(idx / cands.len().pow(j as u32)) % cands.len()].clone())
                    .collect();
                let pt = assemble(&vals);
                if in_sigma(&pt) {
                    return Ok(FibreWitness::Found(pt));
                }
            }
            Ok(FibreWitness::Undetermined)
        }
        ([u], [rel]) => {
            let up = univariate_in(rel, u, &BTreeMap::new())?;
            let found = univariate_roots(&up, n)?;
            for r in &found.roots {
                let pt = assemble(std::slice::from_ref(r));
                if in_sigma(&pt) {
                    return Ok(FibreWitness::Found(pt));
                }
            }
            Ok(if found.incomplete { FibreWitness::Undetermined } else { FibreWitness::NoRationalPoint })
        }
        _ => Err(FlatError::NotLiftableInFragment("fibre is not a single univariate equation".into())),
    }
}
