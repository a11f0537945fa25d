use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{Precision, Scalar};

/// Shape of random points of the closed unit polydisk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleParams {
    /// Exponents range over `[0, max_exp]`.
    pub max_exp: i64,
    /// Integer coefficients range over `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    /// Probability that a coordinate is exactly zero.
    pub zero_prob: f64,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            max_exp: 3,
            coeff_bound: 2,
            zero_prob: 0.15,
        }
    }
}

/// Deterministic generator for sample `index` of the stream keyed by `seed`.
pub fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A random exact element of the valuation ring: leading order uniform in
/// `[0, max_exp]`, further coefficients drawn from the finite coefficient set.
pub fn sample_scalar(rng: &mut impl Rng, params: &SampleParams) -> Scalar {
    if rng.gen_bool(params.zero_prob) {
        return Scalar::zero();
    }
    let b = params.coeff_bound.max(1);
    let v = rng.gen_range(0..=params.max_exp);
    let mut lead = rng.gen_range(1..=b);
    if rng.gen_bool(0.5) {
        lead = -lead;
    }
    let mut terms = vec![(v, BigRational::from_integer(lead.into()))];
    for k in v + 1..=params.max_exp {
        terms.push((k, BigRational::from_integer(rng.gen_range(-b..=b).into())));
    }
    Scalar::from_terms(terms, Precision::Exact)
}

pub fn sample_point(dims: usize, seed: u64, index: u64, params: &SampleParams) -> Vec<Scalar> {
    let mut rng = point_rng(seed, index);
    (0..dims).map(|_| sample_scalar(&mut rng, params)).collect()
}
