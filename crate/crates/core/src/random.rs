//! Seeded samplers: Ginibre, GUE, HS-uniform states, Haar unitaries, unit
//! vectors, random projectors and traceless sphere directions.
//!
//! Every sampler takes an explicit generator. [`RngStream`] turns a
//! `(seed, stream_id)` pair into a ChaCha8 generator on its own stream, so
//! trials can run concurrently without sharing state.

use nalgebra::{Complex, ComplexField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, CVector, HermitianOperator};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Trace-one PSD operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    op: HermitianOperator<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(op: HermitianOperator<T>) -> Result<Self> {
        let tol = Tolerances::for_scalar::<T>();
        let tr = op.trace().as_f64();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::validation(format!("state trace is {tr}, expected 1")));
        }
        let min = op.min_eigenvalue().as_f64();
        if min < -tol.psd {
            return Err(Error::validation(format!(
                "state is not PSD: min eigenvalue {min}"
            )));
        }
        Ok(DensityOperator { op })
    }

    /// `P / tr(P)` for a nonzero PSD operator.
    pub fn normalized(op: HermitianOperator<T>) -> Result<Self> {
        let tr = op.trace();
        if tr <= T::zero() {
            return Err(Error::validation("cannot normalize operator with non-positive trace"));
        }
        Self::new(op.scale(T::one() / tr))
    }

    pub fn op(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator<T> {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(normal::<T, R>(rng) * s, normal::<T, R>(rng) * s)
}

/// `d×d` matrix of i.i.d. complex Gaussians with `E|z|² = 1`.
pub fn ginibre<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    // Column-major fill order is part of the reproducibility contract.
    CMatrix::from_fn(d, d, |_, _| complex_normal(rng))
}

/// Standard Gaussian vector in the real space of Hermitian matrices with the
/// HS inner product.
pub fn gue_standard<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    let mut m = CMatrix::<T>::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = Complex::from(normal::<T, R>(rng));
        for j in (i + 1)..d {
            let z = complex_normal::<T, R>(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::symmetrized(m)
}

/// HS-uniform random state `GG†/tr(GG†)`.
pub fn uniform_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator<T> {
    let g = ginibre::<T, R>(n, rng);
    let p = HermitianOperator::symmetrized(&g * g.adjoint());
    let tr = p.trace();
    DensityOperator {
        op: p.scale(T::one() / tr),
    }
}

/// Haar unitary: QR of a Ginibre matrix with `R` given a positive diagonal.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T> {
    let qr = ginibre::<T, R>(d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let norm = rjj.modulus();
        let phase = if norm > T::zero() {
            rjj.unscale(norm)
        } else {
            Complex::from(T::one())
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn uniform_unit_vector<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector<T> {
    loop {
        let v = CVector::<T>::from_fn(d, |_, _| complex_normal(rng));
        let n = v.norm();
        if n > T::zero() {
            return v.unscale(n);
        }
    }
}

/// `U P₀ U†` with `P₀` the projector onto the first `k` basis vectors.
pub fn random_subspace_projector<T: Real, R: Rng + ?Sized>(
    d: usize,
    k: usize,
    rng: &mut R,
) -> Result<HermitianOperator<T>> {
    if k == 0 || k > d {
        return Err(Error::validation(format!("rank {k} out of range 1..={d}")));
    }
    let u = haar_unitary::<T, R>(d, rng);
    let cols = u.columns(0, k);
    Ok(HermitianOperator::symmetrized(cols * cols.adjoint()))
}

/// Uniform point on the unit HS sphere of traceless Hermitian matrices.
pub fn traceless_sphere_direction<T: Real, R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> HermitianOperator<T> {
    loop {
        let g = traceless_gaussian::<T, R>(d, rng);
        let n = g.hs_norm();
        if n > T::zero() {
            return g.scale(T::one() / n);
        }
    }
}

/// GUE sample with its trace part removed: a standard Gaussian on `H₀`.
pub fn traceless_gaussian<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    let g = gue_standard::<T, R>(d, rng);
    let shift = g.trace() / T::from_usize_lossy(d);
    let mut m = g.into_matrix();
    for i in 0..d {
        m[(i, i)] -= Complex::from(shift);
    }
    HermitianOperator::symmetrized(m)
}
