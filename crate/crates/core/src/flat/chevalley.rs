//! Images of constructible sets under polynomial maps over the residue field.
//!
//! For a piece `V(I) \ V(g)` we adjoin target coordinates `X_j - f_j` and a
//! Rabinowitsch variable for `g`, then take the reduced basis `G` of the
//! resulting ideal `L` under a block order eliminating the source block. With
//! `J = G ∩ Q[X]` and `h` the product of the leading coefficients (in `Q[X]`) of
//! the remaining elements, every point of `V(J) \ V(h)` has a nonempty fibre
//! over the algebraic closure, since the specialized basis is still a Gröbner
//! basis without constants. The locus `V(h)` is handled by recursing on
//! `L + (c)` for each leading coefficient `c`; since no `c` lies in `J`, the
//! eliminant strictly grows and the recursion terminates.

use crate::grobner::{buchberger, front_leading_coefficient, GbBudget, MPoly, MonomialOrder};

use super::residue::{ResidueConstructible, ResiduePiece};
use super::FlatError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChevalleyBudget {
    /// Maximum number of Gröbner completions across the recursion.
    pub max_steps: usize,
    pub gb: GbBudget,
}

impl Default for ChevalleyBudget {
    fn default() -> Self {
        ChevalleyBudget {
            max_steps: 256,
            gb: GbBudget::default(),
        }
    }
}

/// A polynomial map between residue affine spaces: target coordinate `j` is `images[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueMorphism {
    pub source_vars: Vec<String>,
    pub target_vars: Vec<String>,
    pub images: Vec<MPoly>,
}

/// Exact image of `s` under `map`, normalized.
pub fn chevalley_image(
    s: &ResidueConstructible,
    map: &ResidueMorphism,
    budget: ChevalleyBudget,
) -> Result<ResidueConstructible, FlatError> {
    assert_eq!(s.vars, map.source_vars, "constructible set lives on the source");
    let ns = map.source_vars.len();
    let nt = map.target_vars.len();
    let mut out = ResidueConstructible::empty(map.target_vars.clone());
    let mut unresolved: Vec<Vec<MPoly>> = Vec::new();
    let mut steps = 0usize;

    for piece in &s.pieces {
        let has_z = !piece.g.is_constant();
        let front = ns + usize::from(has_z);
        let total = front + nt;
        let order = MonomialOrder::Block { front };
        let source_map: Vec<usize> = (0..ns).collect();
        let embed = |p: &MPoly| p.remap(&source_map, total, order);

        let mut gens: Vec<MPoly> = piece.ideal.iter().map(embed).collect();
        if has_z {
            let z = MPoly::var(total, order, ns);
            gens.push(embed(&piece.g).mul(&z).sub(&MPoly::one(total, order)));
        }
        for (j, f) in map.images.iter().enumerate() {
            gens.push(MPoly::var(total, order, front + j).sub(&embed(f)));
        }

        let mut work = vec![gens];
        while let Some(l) = work.pop() {
            if steps >= budget.max_steps {
                unresolved.push(
                    l.iter()
                        .filter(|p| (0..front).all(|i| !p.involves(i)))
                        .map(|p| p.drop_front(front, MonomialOrder::GrevLex))
                        .collect(),
                );
                continue;
            }
            steps += 1;
            let g = buchberger(&l, order, budget.gb)?;
            if g.len() == 1 && g[0].is_constant() {
                continue;
            }
            let j: Vec<MPoly> = g
                .iter()
                .filter(|p| (0..front).all(|i| !p.involves(i)))
                .map(|p| p.drop_front(front, MonomialOrder::GrevLex))
                .collect();
            let mut lcs: Vec<MPoly> = Vec::new();
            for p in g.iter().filter(|p| (0..front).any(|i| p.involves(i))) {
                let c = front_leading_coefficient(p, front, MonomialOrder::GrevLex).monic();
                if !c.is_constant() && !lcs.contains(&c) {
                    lcs.push(c);
                }
            }
            let h = lcs
                .iter()
                .fold(MPoly::one(nt, MonomialOrder::GrevLex), |acc, c| acc.mul(c));
            out.pieces.push(ResiduePiece { ideal: j, g: h });
            for c in &lcs {
                let mut next = g.clone();
                next.push(c.prepend_vars(front, order));
                work.push(next);
            }
        }
    }

    let out = out.normalize(budget.gb)?;
    if unresolved.is_empty() {
        Ok(out)
    } else {
        Err(FlatError::UnsupportedFragment {
            partial: out,
            unresolved: unresolved
                .iter()
                .map(|ideal| {
                    let names = &map.target_vars;
                    ideal.iter().map(|p| p.display_with(names)).collect::<Vec<_>>().join(", ")
                })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn poly(nvars: usize, terms: &[(i64, &[u32])]) -> MPoly {
        MPoly::new(
            nvars,
            MonomialOrder::GrevLex,
            terms
                .iter()
                .map(|(c, e)| (e.to_vec(), BigRational::from_integer((*c).into())))
                .collect(),
        )
    }

    fn projection_to_x() -> ResidueMorphism {
        ResidueMorphism {
            source_vars: names(&["x", "y"]),
            target_vars: names(&["x"]),
            images: vec![poly(2, &[(1, &[1, 0])])],
        }
    }

    fn image_of(ideal: Vec<MPoly>, g: MPoly) -> String {
        let s = ResidueConstructible {
            vars: names(&["x", "y"]),
            pieces: vec![ResiduePiece { ideal, g }],
        };
        chevalley_image(&s, &projection_to_x(), ChevalleyBudget::default())
            .unwrap()
            .to_string()
    }

    #[test]
    fn hyperbola_projects_to_punctured_line() {
        let xy1 = poly(2, &[(1, &[1, 1]), (-1, &[0, 0])]);
        assert_eq!(image_of(vec![xy1], poly(2, &[(1, &[0, 0])])), "vars x\npiece I = (0)  g = x\n");
    }

    #[test]
    fn parabola_projects_onto_line() {
        let p = poly(2, &[(1, &[0, 2]), (-1, &[1, 0])]);
        assert_eq!(image_of(vec![p], poly(2, &[(1, &[0, 0])])), "vars x\npiece I = (0)  g = 1\n");
    }

    #[test]
    fn empty_difference_has_empty_image() {
        let y = poly(2, &[(1, &[0, 1])]);
        assert_eq!(image_of(vec![y.clone()], y), "vars x\nempty\n");
    }

    #[test]
    fn removed_fibre_is_recovered_by_recursion() {
        // V(x*y - x) projects onto the whole line: the generic part away
        // from x = 0, the fibre over 0 from the recursion.
        let p = poly(2, &[(1, &[1, 1]), (-1, &[1, 0])]);
        let r = image_of(vec![p], poly(2, &[(1, &[0, 0])]));
        assert_eq!(r, "vars x\npiece I = (0)  g = x\npiece I = (x)  g = 1\n");
        // x^2*y - x = x*(x*y - 1): the same set; g is not made squarefree
        let h = poly(2, &[(1, &[2, 1]), (-1, &[1, 0])]);
        let r = image_of(vec![h], poly(2, &[(1, &[0, 0])]));
        assert_eq!(r, "vars x\npiece I = (0)  g = x^2\npiece I = (x)  g = 1\n");
    }
}
