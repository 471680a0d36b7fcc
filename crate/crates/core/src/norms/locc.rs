//! One-way LOCC (first party measures first) via a seesaw.
//!
//! For an Alice POVM `(A_i)` the best Bob response to outcome `i` is Helstrom
//! on the conditional operator `Y_i = Tr_A((A_i ⊗ Id)Δ)`, so the exact value of
//! a fixed Alice POVM is `Σ_i ‖Y_i‖₁`. The seesaw alternates that response
//! with an SDP update of Alice's POVM against `X_i = Tr_B(Δ(Id ⊗ B_i))`.

use nalgebra::Complex;
use rand::Rng;

use super::povm_sdp::{solve, PovmSdpState};
use super::{FlaggedBlockOperator, Povm};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::hermitian::{BipartiteShape, CMatrix, HermitianOperator, Subsystem};
use crate::random::haar_unitary;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct LoccResult<T: Real> {
    /// Exact one-way value of `povm`; a lower bound on the LOCC→ norm.
    pub value: T,
    pub povm: Povm<T>,
    /// Seesaw iterations summed over all starts.
    pub iterations: usize,
    /// Number of starting points tried.
    pub starts: usize,
}

fn shape_of<T: Real>(delta: &HermitianOperator<T>) -> Result<BipartiteShape> {
    delta
        .shape()
        .ok_or_else(|| Error::validation("operator has no bipartite shape"))
}

/// `Tr_A((A ⊗ Id)Δ)`.
fn conditional<T: Real>(delta: &CMatrix<T>, shape: BipartiteShape, a: &CMatrix<T>) -> HermitianOperator<T> {
    let (da, db) = (shape.dim_a, shape.dim_b);
    let mut y = CMatrix::<T>::zeros(db, db);
    for r in 0..da {
        for c in 0..da {
            let w = a[(r, c)];
            if w == Complex::from(T::zero()) {
                continue;
            }
            // (A ⊗ Id)Δ contributes A[r,c]·Δ_block(c, r) to the trace over A.
            y += delta.view((c * db, r * db), (db, db)) * w;
        }
    }
    HermitianOperator::symmetrized(y)
}

/// `Tr_B(Δ(Id ⊗ B))`.
fn alice_target<T: Real>(delta: &CMatrix<T>, shape: BipartiteShape, b: &CMatrix<T>) -> HermitianOperator<T> {
    let (da, db) = (shape.dim_a, shape.dim_b);
    let bt = b.transpose();
    HermitianOperator::symmetrized(CMatrix::from_fn(da, da, |r, c| {
        let block = delta.view((r * db, c * db), (db, db));
        block.component_mul(&bt).sum()
    }))
}

/// `Σ_i ‖Tr_A((A_i ⊗ Id)Δ)‖₁` for a POVM on the first factor.
pub fn locc_one_way_value<T: Real>(delta: &HermitianOperator<T>, alice: &Povm<T>) -> Result<T> {
    let shape = shape_of(delta)?;
    if alice.dim() != shape.dim_a {
        return Err(Error::validation(format!(
            "POVM dimension {} does not match first factor {}",
            alice.dim(),
            shape.dim_a
        )));
    }
    Ok(alice.effects().iter().fold(T::zero(), |acc, a| {
        acc + conditional(delta.matrix(), shape, a.matrix()).trace_norm()
    }))
}

/// `Σ_i ‖Δ_i‖₁`, the one-way value attained by measuring the flag.
pub fn locc_one_way_exact_flagged<T: Real>(blocks: &FlaggedBlockOperator<T>) -> T {
    blocks
        .blocks()
        .iter()
        .fold(T::zero(), |acc, b| acc + b.trace_norm())
}

fn seesaw<T: Real>(
    delta: &HermitianOperator<T>,
    shape: BipartiteShape,
    start: Povm<T>,
    cfg: &SolverConfig,
) -> Result<(T, Povm<T>, usize)> {
    let m = delta.matrix();
    let mut povm = start;
    let mut value = locc_one_way_value(delta, &povm)?;
    let mut state = Some(PovmSdpState {
        a: povm.effects().iter().map(|e| e.matrix().clone()).collect(),
        u: vec![CMatrix::zeros(shape.dim_a, shape.dim_a); povm.len()],
    });
    let mut iterations = 0;
    for _ in 0..cfg.seesaw_iterations {
        iterations += 1;
        let targets: Vec<HermitianOperator<T>> = povm
            .effects()
            .iter()
            .map(|a| {
                let b = conditional(m, shape, a.matrix()).sign();
                alice_target(m, shape, b.matrix())
            })
            .collect();
        let sol = solve(&targets, &mut state, cfg.inner_max_iterations, cfg)?;
        let candidate = locc_one_way_value(delta, &sol.povm)?;
        let improvement = candidate - value;
        if improvement <= T::zero() {
            break;
        }
        povm = sol.povm;
        value = candidate;
        if improvement.as_f64() <= 1e-9 * value.as_f64().abs().max(1.0) {
            break;
        }
    }
    Ok((value, povm, iterations))
}

/// Seesaw lower bound on `‖Δ‖_LOCC→`. Starts are the eigenbasis of
/// `Tr_B Δ`, the computational basis, then Haar-random bases up to
/// `cfg.restarts` starts in total.
pub fn locc_one_way_lower<T: Real, R: Rng + ?Sized>(
    delta: &HermitianOperator<T>,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<LoccResult<T>> {
    cfg.validate()?;
    let shape = shape_of(delta)?;
    let da = shape.dim_a;
    let reduced = delta.partial_trace(Subsystem::Second)?;
    let mut starts = vec![Povm::from_basis(&reduced.eig().vectors)?];
    if cfg.restarts > 1 {
        starts.push(Povm::computational(da));
    }
    while starts.len() < cfg.restarts {
        starts.push(Povm::from_basis(&haar_unitary::<T, R>(da, rng))?);
    }
    locc_one_way_lower_from(delta, starts, cfg)
}

/// Seesaw from explicit Alice starting POVMs; returns the best result.
pub fn locc_one_way_lower_from<T: Real>(
    delta: &HermitianOperator<T>,
    starts: Vec<Povm<T>>,
    cfg: &SolverConfig,
) -> Result<LoccResult<T>> {
    let shape = shape_of(delta)?;
    let count = starts.len();
    let mut best: Option<(T, Povm<T>)> = None;
    let mut iterations = 0;
    for start in starts {
        let (v, p, it) = seesaw(delta, shape, start, cfg)?;
        iterations += it;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, p));
        }
    }
    let (value, povm) = best.ok_or_else(|| Error::validation("no starting POVM given"))?;
    Ok(LoccResult {
        value,
        povm,
        iterations,
        starts: count,
    })
}
