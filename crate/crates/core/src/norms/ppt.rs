//! PPT norm `max{tr(ΔA) : A ∈ [−Id,Id], A^Γ ∈ [−Id,Id]}` by consensus ADMM.
//!
//! The iterate pair is `X ∈ [−Id,Id]` and `Z ∈ [−Id,Id]^Γ` with coupling
//! `X = Z`; both projections are eigenvalue clips. Any multiplier `Y` gives
//! the upper bound `‖Δ − Y‖₁ + ‖Y^Γ‖₁`, and a feasible `A` is recovered from
//! the iterate by alternating projections followed by a final rescaling.

use nalgebra::{Complex, SymmetricEigen};

use super::{SolverReport, SolverStatus};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::hermitian::{partial_transpose_matrix, BipartiteShape, CMatrix, HermitianOperator};
use crate::scalar::Real;

/// Certificates of a PPT solve: `primal` is feasible and `dual` is the
/// multiplier of the split `Δ = (Δ − Y) + Y`.
#[derive(Debug, Clone)]
pub struct PptSolution<T: Real> {
    pub report: SolverReport,
    pub primal: HermitianOperator<T>,
    pub dual: HermitianOperator<T>,
}

/// Clip to `[lo, hi]` and report how far the spectrum stuck out.
fn clip_with_excess<T: Real>(m: &CMatrix<T>, lo: T, hi: T) -> (CMatrix<T>, T) {
    let se = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut excess = T::zero();
    let mut scaled = se.eigenvectors.clone();
    for j in 0..n {
        let l = se.eigenvalues[j];
        excess = excess.max(l - hi).max(lo - l);
        let c = Complex::from(l.max(lo).min(hi));
        for i in 0..n {
            scaled[(i, j)] *= c;
        }
    }
    (scaled * se.eigenvectors.adjoint(), excess)
}

fn spectral_abs<T: Real>(m: &CMatrix<T>) -> (T, T) {
    let values = m.clone().symmetric_eigenvalues();
    values.iter().fold((T::zero(), T::zero()), |(sum, max), l| {
        (sum + l.abs(), max.max(l.abs()))
    })
}

fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    spectral_abs(m).0
}

fn op_norm<T: Real>(m: &CMatrix<T>) -> T {
    spectral_abs(m).1
}

fn real_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc + (*x * y.conj()).re)
}

/// Alternating projections from `start` toward `[−Id,Id] ∩ [−Id,Id]^Γ`,
/// then a rescaling that makes the point feasible.
fn restore<T: Real>(start: &CMatrix<T>, shape: BipartiteShape, rounds: usize) -> CMatrix<T> {
    let one = T::one();
    let (mut a, _) = clip_with_excess(start, -one, one);
    let target = T::lit(1e-9);
    for _ in 0..rounds {
        let (b, excess) = clip_with_excess(&partial_transpose_matrix(&a, shape), -one, one);
        if excess <= target {
            break;
        }
        a = clip_with_excess(&partial_transpose_matrix(&b, shape), -one, one).0;
    }
    let s = op_norm(&a)
        .max(op_norm(&partial_transpose_matrix(&a, shape)))
        .max(one);
    a.unscale(s)
}

/// Recomputes `(lower, upper)` from the certificates, rejecting an
/// infeasible primal point.
pub fn verify_ppt_certificates<T: Real>(
    delta: &HermitianOperator<T>,
    primal: &HermitianOperator<T>,
    dual: &HermitianOperator<T>,
) -> Result<(f64, f64)> {
    let shape = delta
        .shape()
        .ok_or_else(|| Error::validation("operator has no bipartite shape"))?;
    let a = primal.matrix();
    let slack = 1.0 + 1e-9;
    let (na, nag) = (
        op_norm(a).as_f64(),
        op_norm(&partial_transpose_matrix(a, shape)).as_f64(),
    );
    if na > slack || nag > slack {
        return Err(Error::validation(format!(
            "primal certificate infeasible: ‖A‖ = {na}, ‖A^Γ‖ = {nag}"
        )));
    }
    let lower = real_inner(delta.matrix(), a).as_f64();
    let y = dual.matrix();
    let upper = (trace_norm(&(delta.matrix() - y)) + trace_norm(&partial_transpose_matrix(y, shape)))
        .as_f64();
    Ok((lower, upper))
}

pub fn ppt_norm<T: Real>(delta: &HermitianOperator<T>, cfg: &SolverConfig) -> Result<PptSolution<T>> {
    cfg.validate()?;
    let shape = delta
        .shape()
        .ok_or_else(|| Error::validation("operator has no bipartite shape"))?;
    let n = delta.dim();
    let scale = delta.hs_norm();
    let zero = HermitianOperator::zeros(n).with_shape(shape)?;
    if scale == T::zero() {
        return Ok(PptSolution {
            report: SolverReport {
                lower: 0.0,
                upper: 0.0,
                iterations: 0,
                primal_residual: 0.0,
                dual_residual: 0.0,
                status: SolverStatus::Converged,
            },
            primal: zero.clone(),
            dual: zero,
        });
    }

    let one = T::one();
    let rho = T::lit(cfg.penalty);
    let alpha = T::lit(cfg.over_relaxation);
    let tol = T::lit(cfg.tolerance);
    let gap_tol = cfg.gap_tolerance;
    let d = delta.matrix().unscale(scale);
    let d_over_rho = d.unscale(rho);

    let mut z = CMatrix::<T>::zeros(n, n);
    let mut u = CMatrix::<T>::zeros(n, n);
    let mut x = z.clone();
    let mut best_upper = (T::max_value().unwrap_or_else(|| T::lit(f64::MAX)), CMatrix::zeros(n, n));
    let mut best_lower = (-T::max_value().unwrap_or_else(|| T::lit(f64::MAX)), CMatrix::zeros(n, n));
    let (mut r_norm, mut s_norm) = (T::zero(), T::zero());
    let mut status = SolverStatus::IterationLimit;
    let mut iterations = 0;

    let evaluate = |x: &CMatrix<T>, u: &CMatrix<T>, rounds: usize, best_upper: &mut (T, CMatrix<T>), best_lower: &mut (T, CMatrix<T>)| {
        let y = u.scale(rho);
        let up = trace_norm(&(&d - &y)) + trace_norm(&partial_transpose_matrix(&y, shape));
        if up < best_upper.0 {
            *best_upper = (up, y);
        }
        let a = restore(x, shape, rounds);
        let lo = real_inner(&d, &a);
        if lo > best_lower.0 {
            *best_lower = (lo, a);
        }
    };

    for k in 1..=cfg.max_iterations {
        iterations = k;
        x = clip_with_excess(&(&z - &u + &d_over_rho), -one, one).0;
        let xh = if alpha == one {
            x.clone()
        } else {
            x.scale(alpha) + z.scale(one - alpha)
        };
        let z_prev = std::mem::replace(
            &mut z,
            partial_transpose_matrix(
                &clip_with_excess(&partial_transpose_matrix(&(&xh + &u), shape), -one, one).0,
                shape,
            ),
        );
        u += &xh - &z;

        if k % cfg.check_every == 0 || k == cfg.max_iterations {
            r_norm = (&x - &z).norm();
            s_norm = (&z - &z_prev).norm() * rho;
            evaluate(&x, &u, 5, &mut best_upper, &mut best_lower);
            let thresh = tol * x.norm().max(one);
            let gap = (best_upper.0 - best_lower.0).as_f64();
            if (r_norm <= thresh && s_norm <= thresh) || gap <= gap_tol * best_upper.0.as_f64().abs().max(1.0) {
                status = SolverStatus::Converged;
                break;
            }
        }
    }
    evaluate(&x, &u, cfg.restoration_rounds, &mut best_upper, &mut best_lower);

    let primal = HermitianOperator::symmetrized(best_lower.1).with_shape(shape)?;
    let dual = HermitianOperator::symmetrized(best_upper.1.scale(scale)).with_shape(shape)?;
    let (lower, upper) = verify_ppt_certificates(delta, &primal, &dual)?;
    Ok(PptSolution {
        report: SolverReport {
            lower,
            upper,
            iterations,
            primal_residual: r_norm.as_f64(),
            dual_residual: s_norm.as_f64(),
            status,
        },
        primal,
        dual,
    })
}
