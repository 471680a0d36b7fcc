//! Uniform norm `E|⟨x|Δ|x⟩|` over uniformly random unit vectors.

use rand::Rng;

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::random::uniform_unit_vector;
use crate::scalar::Real;
use crate::stats::Estimate;

pub fn uniform_norm_estimate<T: Real, R: Rng + ?Sized>(
    delta: &HermitianOperator<T>,
    n_samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if n_samples < 100 {
        return Err(Error::validation("uniform norm estimate needs at least 100 samples"));
    }
    let m = delta.matrix();
    let samples: Vec<f64> = (0..n_samples)
        .map(|_| {
            let x = uniform_unit_vector::<T, R>(delta.dim(), rng);
            x.dotc(&(m * &x)).re.abs().as_f64()
        })
        .collect();
    Ok(Estimate::from_samples(&samples))
}
