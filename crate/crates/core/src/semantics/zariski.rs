use thiserror::Error;

use crate::scalar::Scalar;
use crate::series::exponent_tuples;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZariskiError {
    #[error("{points} points cannot separate {monomials} monomials")]
    InsufficientPoints { points: usize, monomials: usize },
    #[error("point precision too low to certify the rank")]
    InsufficientPrecision,
}

/// Exponent tuples of total degree at most `d`, degree-graded.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    (0..=d).flat_map(|k| exponent_tuples(n, k)).collect()
}

/// Row of monomial values at a point.
pub fn monomial_row(point: &[Scalar], monos: &[Vec<u32>]) -> Vec<Scalar> {
    monos
        .iter()
        .map(|e| {
            e.iter()
                .zip(point)
                .fold(Scalar::one(), |acc, (k, x)| &acc * &x.pow(*k))
        })
        .collect()
}

/// True iff no nonzero polynomial of total degree `<= d` vanishes on all points.
pub fn zariski_independence(points: &[Vec<Scalar>], d: u32) -> Result<bool, ZariskiError> {
    let n = points.first().map_or(0, |p| p.len());
    let monos = monomials_up_to(n, d);
    if points.len() < monos.len() {
        return Err(ZariskiError::InsufficientPoints {
            points: points.len(),
            monomials: monos.len(),
        });
    }
    let rows: Vec<Vec<Scalar>> = points.iter().map(|p| monomial_row(p, &monos)).collect();
    let full = monos.len();
    Ok(rank(rows)? == full)
}

/// Rank over `Q((w))`. Exact matrices use fraction-free elimination; otherwise
/// minimal-order full pivoting certifies a lower bound, and an undecidable
/// remainder is reported as [`ZariskiError::InsufficientPrecision`].
pub fn rank(rows: Vec<Vec<Scalar>>) -> Result<usize, ZariskiError> {
    if rows.iter().flatten().all(|x| x.is_exact()) {
        Ok(bareiss_rank(rows))
    } else if let Some(m) = modular::reduce_matrix(&rows) {
        // a minor that is nonzero mod p is nonzero over Q; a deficit may be p's fault
        let full = rows.len().min(rows.first().map_or(0, Vec::len));
        match modular::valued_rank(m)? {
            r if r == full => Ok(r),
            _ => valued_rank(rows),
        }
    } else {
        valued_rank(rows)
    }
}

mod modular {
    //! Truncated Laurent series over `F_p`, enough for valued elimination.

    use num_bigint::BigInt;
    use num_traits::{ToPrimitive, Zero};

    use super::ZariskiError;
    use crate::scalar::Scalar;

    const P: u64 = 2_147_483_647;

    fn pow_mod(mut b: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    }

    fn inv_mod(a: u64) -> u64 {
        pow_mod(a, P - 2)
    }

    fn int_mod(n: &BigInt) -> u64 {
        let p = BigInt::from(P);
        let r = ((n % &p) + &p) % &p;
        r.to_u64().expect("reduced below p")
    }

    /// `sum c[i] w^(start+i) + O(w^prec)`.
    #[derive(Debug, Clone)]
    pub struct Fp {
        start: i64,
        c: Vec<u64>,
        prec: i64,
    }

    impl Fp {
        fn new(start: i64, prec: i64) -> Fp {
            let start = start.min(prec);
            Fp {
                start,
                c: vec![0; (prec - start) as usize],
                prec,
            }
        }

        fn get(&self, k: i64) -> u64 {
            if k < self.start || k >= self.prec {
                0
            } else {
                self.c[(k - self.start) as usize]
            }
        }

        pub fn order(&self) -> Option<i64> {
            self.c.iter().position(|&x| x != 0).map(|i| self.start + i as i64)
        }

        fn lower(&self) -> i64 {
            self.order().unwrap_or(self.prec)
        }

        pub fn is_exact_zero_like(&self) -> bool {
            // only used for entries set to zero by elimination
            self.prec == i64::MAX
        }

        pub fn zero() -> Fp {
            Fp {
                start: i64::MAX,
                c: Vec::new(),
                prec: i64::MAX,
            }
        }

        pub fn sub(&self, o: &Fp) -> Fp {
            let prec = self.prec.min(o.prec);
            let start = self.lower().min(o.lower()).min(prec);
            let mut r = Fp::new(start, prec);
            for k in start..prec {
                r.c[(k - start) as usize] = (self.get(k) + P - o.get(k)) % P;
            }
            r
        }

        pub fn mul(&self, o: &Fp) -> Fp {
            if self.is_exact_zero_like() || o.is_exact_zero_like() {
                return Fp::zero();
            }
            let (oa, ob) = (self.lower(), o.lower());
            let prec = (oa + o.prec).min(ob + self.prec);
            let start = (oa + ob).min(prec);
            let mut r = Fp::new(start, prec);
            for i in oa..self.prec {
                let a = self.get(i);
                if a == 0 {
                    continue;
                }
                for j in ob..o.prec {
                    let k = i + j;
                    if k >= prec {
                        break;
                    }
                    let idx = (k - start) as usize;
                    r.c[idx] = (r.c[idx] + a * o.get(j)) % P;
                }
            }
            r
        }

        /// Inverse of an element of decided order.
        pub fn invert(&self) -> Option<Fp> {
            let k = self.order()?;
            let rel = (self.prec - k) as usize;
            let u: Vec<u64> = (0..rel).map(|i| self.get(k + i as i64)).collect();
            let u0 = inv_mod(u[0]);
            let mut v = vec![0u64; rel];
            for n in 0..rel {
                let mut acc = if n == 0 { 1 } else { 0 };
                for i in 1..=n {
                    acc = (acc + P - u[i] * v[n - i] % P) % P;
                }
                v[n] = acc * u0 % P;
            }
            Some(Fp {
                start: -k,
                c: v,
                prec: -k + rel as i64,
            })
        }
    }

    /// Coefficients reduced mod `p`; `None` if some denominator is divisible by `p`.
    pub fn reduce(x: &Scalar, work: i64) -> Option<Fp> {
        if x.is_exact_zero() {
            return Some(Fp::zero());
        }
        let prec = x.precision().bound().unwrap_or(work);
        let start = x.min_stored_exponent().unwrap_or(prec).min(prec);
        let mut r = Fp::new(start, prec);
        for (k, c) in x.terms() {
            if k >= prec {
                continue;
            }
            let d = int_mod(c.denom());
            if d.is_zero() {
                return None;
            }
            r.c[(k - start) as usize] = int_mod(c.numer()) * inv_mod(d) % P;
        }
        Some(r)
    }

    pub fn reduce_matrix(rows: &[Vec<Scalar>]) -> Option<Vec<Vec<Fp>>> {
        let work = rows.iter().flatten().filter_map(|x| x.precision().bound()).max().unwrap_or(64);
        rows.iter().map(|r| r.iter().map(|x| reduce(x, work)).collect()).collect()
    }

    pub fn valued_rank(mut m: Vec<Vec<Fp>>) -> Result<usize, ZariskiError> {
        let nrows = m.len();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut used_cols = vec![false; ncols];
        let mut r = 0;
        while r < nrows.min(ncols) {
            let mut best: Option<(i64, usize, usize)> = None;
            let mut undecided = false;
            for i in r..nrows {
                for (j, used) in used_cols.iter().enumerate() {
                    if *used || m[i][j].is_exact_zero_like() {
                        continue;
                    }
                    match m[i][j].order() {
                        Some(k) if best.map_or(true, |b| k < b.0) => best = Some((k, i, j)),
                        Some(_) => {}
                        None => undecided = true,
                    }
                }
            }
            let Some((_, pi, pj)) = best else {
                if undecided {
                    return Err(ZariskiError::InsufficientPrecision);
                }
                return Ok(r);
            };
            m.swap(pi, r);
            used_cols[pj] = true;
            let inv = m[r][pj].invert().expect("pivot has decided order");
            for i in r + 1..nrows {
                if m[i][pj].is_exact_zero_like() {
                    continue;
                }
                let f = m[i][pj].mul(&inv);
                for j in 0..ncols {
                    if used_cols[j] && j != pj {
                        continue;
                    }
                    let delta = f.mul(&m[r][j]);
                    m[i][j] = m[i][j].sub(&delta);
                }
                m[i][pj] = Fp::zero();
            }
            r += 1;
        }
        Ok(r)
    }
}

fn bareiss_rank(mut m: Vec<Vec<Scalar>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut prev = Scalar::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_exact_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let num = &(&m[r][c] * &m[i][j]) - &(&m[i][c] * &m[r][j]);
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("fraction-free elimination divides exactly");
            }
            m[i][c] = Scalar::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn valued_rank(mut m: Vec<Vec<Scalar>>) -> Result<usize, ZariskiError> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let work = m
        .iter()
        .flatten()
        .filter_map(|x| x.precision().bound())
        .max()
        .unwrap_or(64);
    let mut used_cols = vec![false; ncols];
    let mut r = 0;
    while r < nrows.min(ncols) {
        // pivot of least order among decided nonzero entries
        let mut best: Option<(i64, usize, usize)> = None;
        let mut undecided = false;
        for i in r..nrows {
            for (j, used) in used_cols.iter().enumerate() {
                if *used {
                    continue;
                }
                match m[i][j].order() {
                    Ok(Some(k)) if best.map_or(true, |b| k < b.0) => best = Some((k, i, j)),
                    Ok(_) => {}
                    Err(_) => undecided = true,
                }
            }
        }
        let Some((_, pi, pj)) = best else {
            if undecided {
                return Err(ZariskiError::InsufficientPrecision);
            }
            return Ok(r);
        };
        m.swap(pi, r);
        used_cols[pj] = true;
        let inv = m[r][pj]
            .invert(work)
            .map_err(|_| ZariskiError::InsufficientPrecision)?;
        for i in r + 1..nrows {
            if m[i][pj].is_exact_zero() {
                continue;
            }
            let f = &m[i][pj] * &inv;
            for j in 0..ncols {
                if used_cols[j] && j != pj {
                    continue;
                }
                let delta = &f * &m[r][j];
                m[i][j] = &m[i][j] - &delta;
            }
            m[i][pj] = Scalar::zero();
        }
        r += 1;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn line_points_are_dependent_in_degree_one() {
        // points on y = 2x + 1
        let pts: Vec<Vec<Scalar>> = (0..10).map(|i| vec![int(i), int(2 * i + 1)]).collect();
        assert_eq!(zariski_independence(&pts, 1), Ok(false));
    }

    #[test]
    fn parabola_points_are_independent_in_degree_one() {
        let pts: Vec<Vec<Scalar>> = (0..3).map(|i| vec![int(i), int(i * i)]).collect();
        assert_eq!(zariski_independence(&pts, 1), Ok(true));
    }

    #[test]
    fn too_few_points() {
        let pts = vec![vec![int(1), int(2)]];
        assert!(matches!(
            zariski_independence(&pts, 1),
            Err(ZariskiError::InsufficientPoints { points: 1, monomials: 3 })
        ));
    }

    #[test]
    fn inexact_entries_certify_rank() {
        let a: Scalar = "1 + w + O(w^6)".parse().unwrap();
        let b: Scalar = "w + O(w^6)".parse().unwrap();
        let rows = vec![vec![a.clone(), b.clone()], vec![b, a]];
        assert_eq!(rank(rows), Ok(2));
        let z = Scalar::unknown(4);
        assert_eq!(rank(vec![vec![z.clone()], vec![z]]), Err(ZariskiError::InsufficientPrecision));
    }

    #[test]
    fn modular_and_rational_elimination_agree() {
        let pts = crate::osgood::surface_points(25, 3, 24).unwrap();
        let monos = monomials_up_to(3, 2);
        let rows: Vec<Vec<Scalar>> = pts.iter().map(|p| monomial_row(p, &monos)).collect();
        let modular = modular::valued_rank(modular::reduce_matrix(&rows).unwrap());
        assert_eq!(modular, valued_rank(rows));
        assert_eq!(modular, Ok(10));
    }
}
