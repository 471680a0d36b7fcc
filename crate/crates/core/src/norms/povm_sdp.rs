//! `max Σ tr(A_i X_i)` over POVMs `(A_i)` by ADMM.
//!
//! Splitting: `A_i ⪰ 0` against `B` in the affine set `Σ B_i = Id`. The
//! scaled multipliers average to a dual candidate `Y`; shifting it by
//! `max_i λ_max(X_i − Y)` makes it dominate every target, so `tr(Y)` is a
//! valid upper bound. The primal iterate is made an exact POVM by the
//! congruence `S^{-1/2} A_i S^{-1/2}` with `S = Σ A_i`.

use nalgebra::{Complex, SymmetricEigen};

use super::{Povm, SolverReport, SolverStatus};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::hermitian::{clip_spectrum, CMatrix, HermitianOperator};
use crate::scalar::Real;

/// Solution of the POVM SDP with its dual certificate `Y ⪰ X_i`.
#[derive(Debug, Clone)]
pub struct PovmSdpSolution<T: Real> {
    pub povm: Povm<T>,
    pub dual: HermitianOperator<T>,
    pub report: SolverReport,
}

/// Warm-start state carried between related solves.
#[derive(Debug, Clone)]
pub(crate) struct PovmSdpState<T: Real> {
    pub(crate) a: Vec<CMatrix<T>>,
    pub(crate) u: Vec<CMatrix<T>>,
}

/// Normalizes PSD operators into an exact POVM.
fn complete<T: Real>(a: &[CMatrix<T>]) -> Vec<HermitianOperator<T>> {
    let d = a[0].nrows();
    let n = a.len();
    let floor = T::lit(1e-9);
    let mut parts: Vec<CMatrix<T>> = a.to_vec();
    let mut s = parts.iter().fold(CMatrix::<T>::zeros(d, d), |acc, m| acc + m);
    let min = s.clone().symmetric_eigenvalues().min();
    if min < floor {
        // Spread the missing weight evenly so S is safely invertible.
        let shift = (floor - min) / T::from_usize_lossy(n);
        for p in parts.iter_mut() {
            for i in 0..d {
                p[(i, i)] += Complex::from(shift);
            }
        }
        s = parts.iter().fold(CMatrix::<T>::zeros(d, d), |acc, m| acc + m);
    }
    let se = SymmetricEigen::new(s);
    let mut w = se.eigenvectors.clone();
    for j in 0..d {
        let c = Complex::from(T::one() / se.eigenvalues[j].sqrt());
        for i in 0..d {
            w[(i, j)] *= c;
        }
    }
    let inv_sqrt = &w * se.eigenvectors.adjoint();
    parts
        .iter()
        .map(|p| HermitianOperator::symmetrized(&inv_sqrt * p * &inv_sqrt))
        .collect()
}

/// Recomputes `(lower, upper)` for a POVM and dual candidate, checking that
/// the dual dominates every target.
pub(crate) fn verify<T: Real>(
    targets: &[HermitianOperator<T>],
    povm: &Povm<T>,
    dual: &HermitianOperator<T>,
) -> Result<(f64, f64)> {
    let lower = povm
        .effects()
        .iter()
        .zip(targets)
        .fold(T::zero(), |acc, (a, x)| acc + a.hs_inner_unchecked(x));
    for (i, x) in targets.iter().enumerate() {
        let gap = (dual - x).min_eigenvalue().as_f64();
        if gap < -1e-8 * dual.hs_norm().as_f64().max(1.0) {
            return Err(Error::validation(format!(
                "dual certificate fails to dominate target {i}: min eigenvalue {gap}"
            )));
        }
    }
    Ok((lower.as_f64(), dual.trace().as_f64()))
}

pub fn multi_hypothesis_povm_sdp<T: Real>(
    targets: &[HermitianOperator<T>],
    cfg: &SolverConfig,
) -> Result<PovmSdpSolution<T>> {
    multi_hypothesis_povm_sdp_from(targets, None, cfg)
}

/// As [`multi_hypothesis_povm_sdp`], starting the primal iterate at `start`.
pub fn multi_hypothesis_povm_sdp_from<T: Real>(
    targets: &[HermitianOperator<T>],
    start: Option<&Povm<T>>,
    cfg: &SolverConfig,
) -> Result<PovmSdpSolution<T>> {
    let mut state = start.map(|p| PovmSdpState {
        a: p.effects().iter().map(|e| e.matrix().clone()).collect(),
        u: vec![CMatrix::zeros(p.dim(), p.dim()); p.len()],
    });
    solve(targets, &mut state, cfg.max_iterations, cfg)
}

pub(crate) fn solve<T: Real>(
    targets: &[HermitianOperator<T>],
    state: &mut Option<PovmSdpState<T>>,
    max_iterations: usize,
    cfg: &SolverConfig,
) -> Result<PovmSdpSolution<T>> {
    cfg.validate()?;
    let n = targets.len();
    if n == 0 {
        return Err(Error::validation("need at least one target"));
    }
    let d = targets[0].dim();
    if targets.iter().any(|x| x.dim() != d) {
        return Err(Error::validation("targets must share one dimension"));
    }
    if let Some(s) = state.as_ref() {
        if s.a.len() != n || s.a[0].nrows() != d {
            return Err(Error::validation("warm start does not match the targets"));
        }
    }

    let zero = T::zero();
    let nf = T::from_usize_lossy(n);
    let rho = T::lit(cfg.penalty);
    let scale = targets
        .iter()
        .fold(zero, |acc, x| acc.max(x.hs_norm()))
        .max(T::lit(1e-300));
    let x_over: Vec<CMatrix<T>> = targets
        .iter()
        .map(|x| x.matrix().unscale(scale * rho))
        .collect();
    let id = CMatrix::<T>::identity(d, d);

    let (mut a, mut u) = match state.take() {
        Some(s) => (s.a, s.u),
        None => (
            vec![id.unscale(nf); n],
            vec![CMatrix::zeros(d, d); n],
        ),
    };
    let mut b = a.clone();
    let mut best: Option<(T, Vec<HermitianOperator<T>>)> = None;
    let mut best_dual: Option<(T, CMatrix<T>)> = None;
    let (mut r_norm, mut s_norm) = (zero, zero);
    let mut status = SolverStatus::IterationLimit;
    let mut iterations = 0;
    let tol = T::lit(cfg.tolerance);
    let inf = T::lit(f64::MAX);

    let certify = |a: &[CMatrix<T>], u: &[CMatrix<T>], best: &mut Option<(T, Vec<HermitianOperator<T>>)>, best_dual: &mut Option<(T, CMatrix<T>)>| {
        let effects = complete(a);
        let lower = effects
            .iter()
            .zip(targets)
            .fold(zero, |acc, (e, x)| acc + e.hs_inner_unchecked(x));
        if best.as_ref().is_none_or(|(v, _)| lower > *v) {
            *best = Some((lower, effects));
        }
        let mut y = u.iter().fold(CMatrix::<T>::zeros(d, d), |acc, m| acc + m);
        y = y.scale(rho * scale / nf);
        let t = targets
            .iter()
            .map(|x| {
                (x.matrix() - &y)
                    .symmetric_eigenvalues()
                    .max()
            })
            .fold(-inf, |acc, v| acc.max(v));
        for i in 0..d {
            y[(i, i)] += Complex::from(t);
        }
        let upper = (0..d).fold(zero, |acc, i| acc + y[(i, i)].re);
        if best_dual.as_ref().is_none_or(|(v, _)| upper < *v) {
            *best_dual = Some((upper, y));
        }
    };

    for k in 1..=max_iterations.max(1) {
        iterations = k;
        for i in 0..n {
            a[i] = clip_spectrum(&(&b[i] - &u[i] + &x_over[i]), zero, inf);
        }
        let v: Vec<CMatrix<T>> = a.iter().zip(&u).map(|(ai, ui)| ai + ui).collect();
        let mut c = v.iter().fold(CMatrix::<T>::zeros(d, d), |acc, m| acc + m);
        c = (c - &id).unscale(nf);
        let b_prev = std::mem::replace(&mut b, v.iter().map(|vi| vi - &c).collect());
        let mut r2 = zero;
        let mut s2 = zero;
        for i in 0..n {
            let diff = &a[i] - &b[i];
            r2 += diff.norm_squared();
            s2 += (&b[i] - &b_prev[i]).norm_squared();
            u[i] += diff;
        }
        if k % cfg.check_every.min(25) == 0 || k == max_iterations {
            r_norm = r2.sqrt();
            s_norm = s2.sqrt() * rho;
            certify(&a, &u, &mut best, &mut best_dual);
            let lo = best.as_ref().map(|b| b.0).unwrap_or(zero);
            let up = best_dual.as_ref().map(|b| b.0).unwrap_or(inf);
            let gap = (up - lo).as_f64();
            if (r_norm <= tol && s_norm <= tol)
                || gap <= cfg.gap_tolerance * up.as_f64().abs().max(1.0)
            {
                status = SolverStatus::Converged;
                break;
            }
        }
    }
    certify(&a, &u, &mut best, &mut best_dual);
    *state = Some(PovmSdpState { a, u });

    let (_, effects) = best.expect("certified at least once");
    let (_, y) = best_dual.expect("certified at least once");
    let povm = Povm::from_effects_unchecked(effects);
    let dual = HermitianOperator::symmetrized(y);
    let (lower, upper) = verify(targets, &povm, &dual)?;
    Ok(PovmSdpSolution {
        povm,
        dual,
        report: SolverReport {
            lower,
            upper,
            iterations,
            primal_residual: r_norm.as_f64(),
            dual_residual: s_norm.as_f64(),
            status,
        },
    })
}
