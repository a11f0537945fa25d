//! Ideals over the rationals: Buchberger completion with the sugar strategy,
//! normal forms, elimination, saturation.

mod mpoly;

pub use mpoly::{coprime, divides, lcm, MPoly, MonomialOrder};

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    #[error("Gröbner completion exceeded the budget of {0} S-pairs")]
    BudgetExceeded(usize),
    #[error("Gröbner completion exceeded the degree bound {0}")]
    DegreeExceeded(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GbBudget {
    pub max_pairs: usize,
    pub max_degree: u32,
}

impl Default for GbBudget {
    fn default() -> Self {
        GbBudget {
            max_pairs: 20_000,
            max_degree: 64,
        }
    }
}

struct Pair {
    i: usize,
    j: usize,
    sugar: u32,
    lcm: Vec<u32>,
}

fn spoly(f: &MPoly, g: &MPoly) -> MPoly {
    let l = lcm(f.lm(), g.lm());
    let mf: Vec<u32> = l.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
    let mg: Vec<u32> = l.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
    let zero = MPoly::zero(f.nvars(), f.order());
    let a = zero.sub_scaled_shift(&-f.lc().recip(), &mf, f);
    a.sub_scaled_shift(&g.lc().recip(), &mg, g)
}

fn deg(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Reduced monic Gröbner basis of the ideal generated by `gens` under `order`.
pub fn buchberger(gens: &[MPoly], order: MonomialOrder, budget: GbBudget) -> Result<Vec<MPoly>, GbError> {
    let nvars = gens.first().map_or(0, |g| g.nvars());
    let mut basis: Vec<MPoly> = Vec::new();
    let mut sugar: Vec<u32> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let add = |p: MPoly, s: u32, basis: &mut Vec<MPoly>, sugar: &mut Vec<u32>, pairs: &mut Vec<Pair>| {
        let k = basis.len();
        for (i, g) in basis.iter().enumerate() {
            let l = lcm(g.lm(), p.lm());
            let si = sugar[i] + deg(&l) - deg(g.lm());
            let sk = s + deg(&l) - deg(p.lm());
            pairs.push(Pair {
                i,
                j: k,
                sugar: si.max(sk),
                lcm: l,
            });
        }
        basis.push(p);
        sugar.push(s);
    };

    for g in gens {
        let g = g.with_order(order);
        let h = g.normal_form(&basis);
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return Ok(vec![MPoly::one(nvars, order)]);
        }
        let s = g.total_degree();
        add(h.monic(), s, &mut basis, &mut sugar, &mut pairs);
    }

    let mut processed = 0usize;
    while !pairs.is_empty() {
        // least sugar, then least lcm
        let idx = (0..pairs.len())
            .min_by(|&a, &b| {
                pairs[a]
                    .sugar
                    .cmp(&pairs[b].sugar)
                    .then_with(|| order.cmp(&pairs[a].lcm, &pairs[b].lcm))
            })
            .unwrap();
        let pair = pairs.swap_remove(idx);
        let (f, g) = (&basis[pair.i], &basis[pair.j]);
        if coprime(f.lm(), g.lm()) {
            continue;
        }
        // chain criterion: some k with lm_k | lcm whose pairs with i and j are already gone
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && divides(basis[k].lm(), &pair.lcm)
                && !pairs.iter().any(|p| (p.i == pair.i.min(k) && p.j == pair.i.max(k)) || (p.i == pair.j.min(k) && p.j == pair.j.max(k)))
        });
        if chain {
            continue;
        }
        processed += 1;
        if processed > budget.max_pairs {
            return Err(GbError::BudgetExceeded(budget.max_pairs));
        }
        if pair.sugar > budget.max_degree {
            return Err(GbError::DegreeExceeded(budget.max_degree));
        }
        let h = spoly(f, g).normal_form(&basis);
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return Ok(vec![MPoly::one(nvars, order)]);
        }
        add(h.monic(), pair.sugar, &mut basis, &mut sugar, &mut pairs);
    }
    Ok(reduce_basis(basis))
}

/// Minimal, interreduced, monic, sorted by leading monomial (descending).
fn reduce_basis(basis: Vec<MPoly>) -> Vec<MPoly> {
    let mut minimal: Vec<MPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i && divides(h.lm(), g.lm()) && (h.lm() != g.lm() || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<MPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        out.push(minimal[i].normal_form(&others).monic());
    }
    if let Some(first) = out.first() {
        let order = first.order();
        out.sort_by(|a, b| order.cmp(b.lm(), a.lm()));
    }
    out
}

/// Buchberger's criterion re-checked from scratch: every S-polynomial reduces to zero.
pub fn spoly_check(basis: &[MPoly]) -> bool {
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if !spoly(&basis[i], &basis[j]).normal_form(basis).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Whether every generator reduces to zero modulo `basis`.
pub fn contains_all(basis: &[MPoly], gens: &[MPoly]) -> bool {
    gens.iter().all(|g| g.with_order(basis_order(basis, g)).normal_form(basis).is_zero())
}

fn basis_order(basis: &[MPoly], fallback: &MPoly) -> MonomialOrder {
    basis.first().map_or(fallback.order(), |b| b.order())
}

pub fn normal_form(p: &MPoly, gb: &[MPoly]) -> MPoly {
    p.with_order(basis_order(gb, p)).normal_form(gb)
}

pub fn is_trivial(gens: &[MPoly], budget: GbBudget) -> Result<bool, GbError> {
    if gens.is_empty() {
        return Ok(false);
    }
    let gb = buchberger(gens, MonomialOrder::GrevLex, budget)?;
    Ok(gb.len() == 1 && gb[0].is_one())
}

/// Generators of `I ∩ Q[x_front..]` (as polynomials in the back variables, grevlex).
pub fn elimination_ideal(gens: &[MPoly], front: usize, budget: GbBudget) -> Result<Vec<MPoly>, GbError> {
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    let nvars = gens[0].nvars();
    if front == 0 {
        return buchberger(gens, MonomialOrder::GrevLex, budget);
    }
    let gb = buchberger(gens, MonomialOrder::Block { front }, budget)?;
    let back = nvars - front;
    let mut out: Vec<MPoly> = gb
        .iter()
        .filter(|g| (0..front).all(|i| !g.involves(i)))
        .map(|g| g.drop_front(front, MonomialOrder::GrevLex))
        .collect();
    if out.is_empty() {
        return Ok(out);
    }
    // a block basis restricted to the back block is already a Gröbner basis there
    out = buchberger(&out, MonomialOrder::GrevLex, budget)?;
    debug_assert!(out.iter().all(|g| g.nvars() == back));
    Ok(out)
}

/// `(I : g^∞)` via `I + (g z - 1)` and elimination of `z`.
pub fn saturate(gens: &[MPoly], g: &MPoly, budget: GbBudget) -> Result<Vec<MPoly>, GbError> {
    let nvars = g.nvars();
    let order = MonomialOrder::Block { front: 1 };
    let mut ext: Vec<MPoly> = gens.iter().map(|p| p.prepend_vars(1, order)).collect();
    let z = MPoly::var(nvars + 1, order, 0);
    let gz = g.prepend_vars(1, order).mul(&z).sub(&MPoly::one(nvars + 1, order));
    ext.push(gz);
    elimination_ideal(&ext, 1, budget)
}

/// Leading coefficient with respect to the front block, as a polynomial in the back block.
pub fn front_leading_coefficient(g: &MPoly, front: usize, back_order: MonomialOrder) -> MPoly {
    let lead_front = g.lm()[..front].to_vec();
    MPoly::new(
        g.nvars() - front,
        back_order,
        g.terms()
            .iter()
            .filter(|(e, _)| e[..front] == lead_front[..])
            .map(|(e, c)| (e[front..].to_vec(), c.clone()))
            .collect(),
    )
}

/// The unit ideal's basis in `nvars` variables.
pub fn unit_basis(nvars: usize) -> Vec<MPoly> {
    vec![MPoly::constant(nvars, MonomialOrder::GrevLex, BigRational::one())]
}
