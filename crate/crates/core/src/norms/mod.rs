//! Distinguishability norms: single-POVM norms, the ALL norm, the PPT norm
//! with two-sided certificates, one-way LOCC lower bounds, LO bounds for
//! flagged block operators and the uniform-norm estimator.

mod lo;
mod locc;
mod povm_sdp;
mod ppt;
mod uniform;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hermitian::{BipartiteShape, CMatrix, HermitianOperator};
use crate::random::DensityOperator;
use crate::scalar::Real;

pub use lo::{lo_norm_block_exact_small, lo_norm_block_upper, sphere_net, LoBounds, LoEstimate};
pub use locc::{
    locc_one_way_exact_flagged, locc_one_way_lower, locc_one_way_lower_from, locc_one_way_value,
    LoccResult,
};
pub use povm_sdp::{multi_hypothesis_povm_sdp, multi_hypothesis_povm_sdp_from, PovmSdpSolution};
pub use ppt::{ppt_norm, verify_ppt_certificates, PptSolution};
pub use uniform::uniform_norm_estimate;

/// Finite POVM: PSD effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<T: Real> {
    effects: Vec<HermitianOperator<T>>,
}

impl<T: Real> Povm<T> {
    pub fn new(effects: Vec<HermitianOperator<T>>) -> Result<Self> {
        let tol = Tolerances::for_scalar::<T>();
        let first = effects
            .first()
            .ok_or_else(|| Error::validation("POVM needs at least one effect"))?;
        let d = first.dim();
        let mut sum = CMatrix::<T>::zeros(d, d);
        for (i, e) in effects.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::validation(format!(
                    "effect {i} has dimension {}, expected {d}",
                    e.dim()
                )));
            }
            let min = e.min_eigenvalue().as_f64();
            if min < -tol.psd {
                return Err(Error::validation(format!(
                    "effect {i} is not PSD: min eigenvalue {min}"
                )));
            }
            sum += e.matrix();
        }
        let defect = HermitianOperator::symmetrized(sum - CMatrix::identity(d, d))
            .operator_norm()
            .as_f64();
        if defect > tol.completeness {
            return Err(Error::validation(format!(
                "effects do not sum to identity: defect {defect}"
            )));
        }
        Ok(Povm { effects })
    }

    /// Measurement in the orthonormal basis given by the columns of `u`.
    pub fn from_basis(u: &CMatrix<T>) -> Result<Self> {
        let effects = (0..u.ncols())
            .map(|j| HermitianOperator::outer(&u.column(j).into_owned()))
            .collect();
        Self::new(effects)
    }

    pub fn computational(d: usize) -> Self {
        Povm {
            effects: (0..d)
                .map(|i| {
                    let mut diag = vec![T::zero(); d];
                    diag[i] = T::one();
                    HermitianOperator::from_real_diagonal(&diag)
                })
                .collect(),
        }
    }

    pub fn trivial(d: usize) -> Self {
        Povm {
            effects: vec![HermitianOperator::identity(d)],
        }
    }

    pub(crate) fn from_effects_unchecked(effects: Vec<HermitianOperator<T>>) -> Self {
        Povm { effects }
    }

    pub fn effects(&self) -> &[HermitianOperator<T>] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// `‖Σ effects − Id‖_∞`.
    pub fn completeness_defect(&self) -> T {
        let d = self.dim();
        let mut sum = CMatrix::<T>::zeros(d, d);
        for e in &self.effects {
            sum += e.matrix();
        }
        HermitianOperator::symmetrized(sum - CMatrix::identity(d, d)).operator_norm()
    }
}

/// Effect `M` of the two-outcome POVM `(M, Id − M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomeEffect<T: Real> {
    m: HermitianOperator<T>,
}

impl<T: Real> TwoOutcomeEffect<T> {
    pub fn new(m: HermitianOperator<T>) -> Result<Self> {
        let tol = Tolerances::for_scalar::<T>().psd;
        let s = m.spectrum();
        if s.min().as_f64() < -tol || s.max().as_f64() > 1.0 + tol {
            return Err(Error::validation(format!(
                "effect spectrum [{}, {}] leaves [0, 1]",
                s.min(),
                s.max()
            )));
        }
        Ok(TwoOutcomeEffect { m })
    }

    pub fn effect(&self) -> &HermitianOperator<T> {
        &self.m
    }

    pub fn to_povm(&self) -> Povm<T> {
        let d = self.m.dim();
        let complement = &HermitianOperator::identity(d) - &self.m;
        Povm::from_effects_unchecked(vec![self.m.clone(), complement])
    }
}

/// `Δ = Σ_i |i⟩⟨i| ⊗ Δ_i`, stored as its diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FlaggedBlockOperator<T: Real> {
    blocks: Vec<HermitianOperator<T>>,
}

impl<T: Real> FlaggedBlockOperator<T> {
    pub fn new(blocks: Vec<HermitianOperator<T>>) -> Result<Self> {
        let d = blocks
            .first()
            .ok_or_else(|| Error::validation("flagged operator needs at least one block"))?
            .dim();
        if let Some(i) = blocks.iter().position(|b| b.dim() != d) {
            return Err(Error::validation(format!(
                "block {i} has dimension {}, expected {d}",
                blocks[i].dim()
            )));
        }
        Ok(FlaggedBlockOperator { blocks })
    }

    pub fn blocks(&self) -> &[HermitianOperator<T>] {
        &self.blocks
    }

    pub fn flag_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dim(&self) -> usize {
        self.blocks[0].dim()
    }

    /// The full block-diagonal operator on `C^flags ⊗ C^block_dim`.
    pub fn expand(&self) -> HermitianOperator<T> {
        let (n, m) = (self.flag_count(), self.block_dim());
        let mut out = CMatrix::<T>::zeros(n * m, n * m);
        for (i, b) in self.blocks.iter().enumerate() {
            out.view_mut((i * m, i * m), (m, m)).copy_from(b.matrix());
        }
        HermitianOperator::symmetrized(out)
            .with_shape(BipartiteShape::new(n, m))
            .expect("shape matches by construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverStatus {
    Converged,
    IterationLimit,
}

/// Two-sided certificate summary of a solver run. `lower` and `upper` are
/// recomputed from the returned primal and dual objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub status: SolverStatus,
}

impl SolverReport {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

fn check_dims<T: Real>(a: &HermitianOperator<T>, b: usize) -> Result<()> {
    if a.dim() != b {
        return Err(Error::validation(format!(
            "dimension mismatch: operator {} vs measurement {b}",
            a.dim()
        )));
    }
    Ok(())
}

/// `Σ_i |tr(M_i Δ)|`.
pub fn povm_norm<T: Real>(delta: &HermitianOperator<T>, m: &Povm<T>) -> Result<T> {
    check_dims(delta, m.dim())?;
    Ok(m.effects
        .iter()
        .fold(T::zero(), |acc, e| acc + e.hs_inner_unchecked(delta).abs()))
}

pub fn all_norm<T: Real>(delta: &HermitianOperator<T>) -> T {
    delta.trace_norm()
}

/// `½(1 − ½‖ρ − σ‖_M)`.
pub fn helstrom_error_probability<T: Real>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    m: &Povm<T>,
) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::validation("states have different dimensions"));
    }
    let half = T::lit(0.5);
    let bias = povm_norm(&(rho.op() - sigma.op()), m)?;
    Ok((half * (T::one() - half * bias)).max(T::zero()).min(half))
}

/// Coarse-grains `m` to the two-outcome effect `Σ_{i ∈ subset} M_i`.
pub fn two_outcome_reduction<T: Real>(m: &Povm<T>, subset: &[usize]) -> Result<TwoOutcomeEffect<T>> {
    let d = m.dim();
    let mut seen = vec![false; m.len()];
    let mut sum = CMatrix::<T>::zeros(d, d);
    for &i in subset {
        if i >= m.len() {
            return Err(Error::validation(format!(
                "outcome index {i} out of range for {} outcomes",
                m.len()
            )));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::validation(format!("outcome index {i} repeated")));
        }
        sum += m.effects[i].matrix();
    }
    TwoOutcomeEffect::new(HermitianOperator::symmetrized(sum))
}
