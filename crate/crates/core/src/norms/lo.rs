//! LO bounds for flagged block operators `Δ = Σ_i |i⟩⟨i| ⊗ Δ_i`.
//!
//! `‖Δ‖_LO ≤ d·F` with `F = sup_{x ∈ S_{C^d}} f(x)` and
//! `f(x) = Σ_i |⟨x|Δ_i|x⟩|`. [`lo_norm_block_upper`] estimates `F` by sphere
//! ascent (a heuristic: the ascent only ever finds values below `F`).
//! [`lo_norm_block_exact_small`] brackets `d·F` with an explicit δ-net `N`:
//! `F' ≤ F ≤ F'/(1 − 8δ)` where `F' = max_N f`.

use nalgebra::SymmetricEigen;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::FlaggedBlockOperator;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, CVector};
use crate::random::uniform_unit_vector;
use crate::scalar::Real;

/// Heuristic estimate of `d·F`.
#[derive(Debug, Clone)]
pub struct LoEstimate<T: Real> {
    /// `d · sup_estimate`.
    pub value: T,
    /// Best `f(x)` found; a lower bound on `F`.
    pub sup_estimate: T,
    pub point: CVector<T>,
    /// Always true: the value is not certified.
    pub heuristic: bool,
}

/// Certified bracket `lower ≤ d·F ≤ upper` from a δ-net.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoBounds {
    pub lower: f64,
    pub upper: f64,
    pub net_size: usize,
    pub resolution: f64,
}

/// All blocks stacked vertically, so one product gives every `Δ_i x`.
struct Stacked<T: Real> {
    m: CMatrix<T>,
    count: usize,
    dim: usize,
}

impl<T: Real> Stacked<T> {
    fn new(blocks: &FlaggedBlockOperator<T>) -> Self {
        let (count, dim) = (blocks.flag_count(), blocks.block_dim());
        let mut m = CMatrix::zeros(count * dim, dim);
        for (i, b) in blocks.blocks().iter().enumerate() {
            m.view_mut((i * dim, 0), (dim, dim)).copy_from(b.matrix());
        }
        Stacked { m, count, dim }
    }

    /// Returns `f(x)` and the ascent direction `Σ_i sign_i Δ_i x`.
    fn value_and_direction(&self, x: &CVector<T>) -> (T, CVector<T>) {
        let y = &self.m * x;
        let mut f = T::zero();
        let mut g = CVector::zeros(self.dim);
        for i in 0..self.count {
            let yi = y.rows(i * self.dim, self.dim);
            let v = x.dotc(&yi).re;
            f += v.abs();
            if v >= T::zero() {
                g += yi;
            } else {
                g -= yi;
            }
        }
        (f, g)
    }

    fn value(&self, x: &CVector<T>) -> T {
        self.value_and_direction(x).0
    }

    fn signs(&self, x: &CVector<T>) -> Vec<bool> {
        let y = &self.m * x;
        (0..self.count)
            .map(|i| x.dotc(&y.rows(i * self.dim, self.dim)).re >= T::zero())
            .collect()
    }

    fn signed_sum(&self, signs: &[bool]) -> CMatrix<T> {
        let mut s = CMatrix::zeros(self.dim, self.dim);
        for (i, &p) in signs.iter().enumerate() {
            let b = self.m.view((i * self.dim, 0), (self.dim, self.dim));
            if p {
                s += b;
            } else {
                s -= b;
            }
        }
        s
    }
}

/// Fixing the signs at `x`, the top eigenvector of `Σ s_i Δ_i` can only
/// increase `f`; iterate until it stops improving.
fn eigen_polish<T: Real>(st: &Stacked<T>, mut x: CVector<T>, mut fx: T) -> (T, CVector<T>) {
    for _ in 0..100 {
        let se = SymmetricEigen::new(st.signed_sum(&st.signs(&x)));
        let top = se.eigenvalues.imax();
        let cand = se.eigenvectors.column(top).into_owned();
        let fc = st.value(&cand);
        if fc <= fx * (T::one() + T::lit(1e-14)) {
            break;
        }
        (x, fx) = (cand, fc);
    }
    (fx, x)
}

/// Sphere ascent estimate of `d · sup_x Σ_i |⟨x|Δ_i|x⟩|`.
pub fn lo_norm_block_upper<T: Real, R: Rng + ?Sized>(
    blocks: &FlaggedBlockOperator<T>,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<LoEstimate<T>> {
    if cfg.ascent_restarts == 0 || cfg.ascent_iterations == 0 || !(cfg.ascent_step > 0.0) {
        return Err(Error::validation("ascent needs positive restarts, iterations and step"));
    }
    let st = Stacked::new(blocks);
    let d = st.dim;
    let step = T::lit(cfg.ascent_step);
    let mut best: Option<(T, CVector<T>)> = None;
    for _ in 0..cfg.ascent_restarts {
        let mut x = uniform_unit_vector::<T, R>(d, rng);
        let mut local = (T::zero(), x.clone());
        let mut checkpoint = T::zero();
        for t in 1..=cfg.ascent_iterations {
            let (fx, g) = st.value_and_direction(&x);
            if fx > local.0 {
                local = (fx, x.clone());
            }
            if t % 100 == 0 {
                if local.0 - checkpoint <= T::lit(1e-8) * local.0 {
                    break;
                }
                checkpoint = local.0;
            }
            let lr = step / T::from_usize_lossy(t).sqrt();
            let next = &x + g.scale(lr);
            let n = next.norm();
            if n == T::zero() {
                break;
            }
            x = next.unscale(n);
        }
        let polished = eigen_polish(&st, local.1, local.0);
        if best.as_ref().is_none_or(|(b, _)| polished.0 > *b) {
            best = Some(polished);
        }
    }
    let (sup, point) = best.expect("at least one restart");
    Ok(LoEstimate {
        value: sup * T::from_usize_lossy(d),
        sup_estimate: sup,
        point,
        heuristic: true,
    })
}

/// Visits a δ-net of the unit sphere of `C^d` modulo global phase.
///
/// Coordinates are `(Re x₁, Re x₂, Im x₂, …)` with `x₁` real; the lattice
/// `hZ^{2d−1}` with `h = δ/√(2d−1)` is restricted to `Re x₁ ≥ 0` and to the
/// shell `| |p| − 1 | ≤ δ/2`, then normalized. Every unit vector, after a
/// phase rotation, rounds to a kept lattice point within `δ/2`, and
/// normalization moves it by at most another `δ/2`.
fn for_each_net_point(d: usize, delta: f64, mut visit: impl FnMut(&[f64])) {
    let m = 2 * d - 1;
    let h = delta / (m as f64).sqrt();
    let (r_lo, r_hi) = (1.0 - delta / 2.0, 1.0 + delta / 2.0);
    let k_max = (r_hi / h).floor() as i64;
    let mut coords = vec![0.0; m];
    let mut unit = vec![0.0; m];

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        j: usize,
        partial: f64,
        m: usize,
        h: f64,
        k_max: i64,
        bounds: (f64, f64),
        coords: &mut [f64],
        unit: &mut [f64],
        visit: &mut dyn FnMut(&[f64]),
    ) {
        let (r_lo, r_hi) = bounds;
        let room = r_hi * r_hi - partial;
        if room < 0.0 {
            return;
        }
        let lim = ((room.sqrt() / h).floor() as i64).min(k_max);
        if j + 1 == m {
            // Last coordinate: only values landing in the shell.
            let need = (r_lo * r_lo - partial).max(0.0).sqrt();
            let k_in = (need / h).ceil() as i64;
            let start = if j == 0 { 0 } else { -lim };
            for k in start..=lim {
                if k.abs() < k_in {
                    continue;
                }
                coords[j] = k as f64 * h;
                let norm = (partial + coords[j] * coords[j]).sqrt();
                for (u, c) in unit.iter_mut().zip(coords.iter()) {
                    *u = c / norm;
                }
                visit(unit);
            }
            return;
        }
        let start = if j == 0 { 0 } else { -lim };
        for k in start..=lim {
            coords[j] = k as f64 * h;
            recurse(j + 1, partial + coords[j] * coords[j], m, h, k_max, bounds, coords, unit, visit);
        }
    }

    recurse(0, 0.0, m, h, k_max, (r_lo, r_hi), &mut coords, &mut unit, &mut visit);
}

fn to_complex<T: Real>(u: &[f64], d: usize) -> CVector<T> {
    CVector::from_fn(d, |i, _| {
        if i == 0 {
            nalgebra::Complex::new(T::lit(u[0]), T::zero())
        } else {
            nalgebra::Complex::new(T::lit(u[2 * i - 1]), T::lit(u[2 * i]))
        }
    })
}

/// Materialized δ-net of the unit sphere of `C^d` (modulo phase).
pub fn sphere_net<T: Real>(d: usize, delta: f64) -> Result<Vec<CVector<T>>> {
    check_net_args(d, delta)?;
    let mut out = Vec::new();
    for_each_net_point(d, delta, |u| out.push(to_complex(u, d)));
    Ok(out)
}

fn check_net_args(d: usize, delta: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::validation("dimension must be positive"));
    }
    if !(delta > 0.0 && delta < 0.125) {
        return Err(Error::validation("net resolution must lie in (0, 1/8)"));
    }
    Ok(())
}

/// Brackets `d · sup_x Σ_i |⟨x|Δ_i|x⟩|` using a `net_resolution`-net; the
/// upper end is `d·F'/(1 − 8δ)`, which is `2d·F'` at `δ = 1/16`.
pub fn lo_norm_block_exact_small<T: Real>(
    blocks: &FlaggedBlockOperator<T>,
    net_resolution: f64,
) -> Result<LoBounds> {
    let d = blocks.block_dim();
    if d > 3 {
        return Err(Error::Refused(format!(
            "net bound limited to block dimension 3, got {d}"
        )));
    }
    check_net_args(d, net_resolution)?;
    let st = Stacked::new(blocks);
    let mut best = T::zero();
    let mut count = 0usize;
    for_each_net_point(d, net_resolution, |u| {
        count += 1;
        let v = st.value(&to_complex(u, d));
        if v > best {
            best = v;
        }
    });
    let df = best.as_f64() * d as f64;
    Ok(LoBounds {
        lower: df,
        upper: df / (1.0 - 8.0 * net_resolution),
        net_size: count,
        resolution: net_resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::lo_vs_locc_delta;
    use crate::hermitian::HermitianOperator;
    use crate::norms::locc_one_way_exact_flagged;
    use crate::random::{gue_standard, haar_unitary, RngStream};

    type H = HermitianOperator<f64>;

    fn flagged(blocks: Vec<H>) -> FlaggedBlockOperator<f64> {
        FlaggedBlockOperator::new(blocks).unwrap()
    }

    fn fast_cfg() -> SolverConfig {
        SolverConfig {
            ascent_restarts: 10,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn net_covers_sphere() {
        let mut rng = RngStream::new(6, 0).generator();
        for (d, delta) in [(1, 0.1), (2, 0.0625), (2, 0.1)] {
            let net: Vec<CVector<f64>> = sphere_net(d, delta).unwrap();
            assert!(net.iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
            if d == 2 && delta == 0.0625 {
                assert!(net.len() <= 48usize.pow(4));
            }
            for _ in 0..300 {
                let y = uniform_unit_vector::<f64, _>(d, &mut rng);
                // distance modulo phase: min_θ |e^{iθ}y − x| = sqrt(2 − 2|⟨x,y⟩|)
                let dist = net
                    .iter()
                    .map(|x| (2.0 - 2.0 * x.dotc(&y).norm()).max(0.0).sqrt())
                    .fold(f64::MAX, f64::min);
                assert!(dist <= delta + 1e-12, "d={d} dist={dist}");
            }
        }
        assert!(sphere_net::<f64>(2, 0.2).is_err());
    }

    #[test]
    fn single_extreme_block() {
        let mut rng = RngStream::new(6, 1).generator();
        let u = haar_unitary::<f64, _>(4, &mut rng);
        let b = H::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]).conjugate_by(&u);
        let est = lo_norm_block_upper(&flagged(vec![b]), &fast_cfg(), &mut rng).unwrap();
        assert!((est.sup_estimate - 1.0).abs() < 1e-9);
        assert!((est.value - 4.0).abs() < 1e-8);
        assert!(est.heuristic);
    }

    #[test]
    fn equal_blocks() {
        let mut rng = RngStream::new(6, 2).generator();
        let b = gue_standard::<f64, _>(3, &mut rng);
        let est = lo_norm_block_upper(&flagged(vec![b.clone(); 3]), &fast_cfg(), &mut rng).unwrap();
        assert!((est.sup_estimate - 3.0 * b.operator_norm()).abs() < 1e-8);
    }

    #[test]
    fn commuting_blocks_match_diagonal_search() {
        // Diagonal blocks: f depends only on p = |x₁|², so a 1-D scan is exact.
        let blocks = vec![
            H::from_real_diagonal(&[1.0, -0.5]),
            H::from_real_diagonal(&[-0.25, 0.75]),
        ];
        let f = |p: f64| {
            blocks
                .iter()
                .map(|b| (b.matrix()[(0, 0)].re * p + b.matrix()[(1, 1)].re * (1.0 - p)).abs())
                .sum::<f64>()
        };
        let scan = (0..=100_000).map(|i| f(i as f64 / 100_000.0)).fold(0.0, f64::max);
        let fb = flagged(blocks.clone());
        let bounds = lo_norm_block_exact_small(&fb, 1.0 / 16.0).unwrap();
        assert!(bounds.lower <= 2.0 * scan + 1e-12 && 2.0 * scan <= bounds.upper + 1e-12);
        assert!((bounds.lower - 2.0 * scan).abs() < 2e-2 * scan);
        let mut rng = RngStream::new(6, 3).generator();
        let est = lo_norm_block_upper(&fb, &fast_cfg(), &mut rng).unwrap();
        assert!((est.sup_estimate - scan).abs() < 1e-8, "{} {scan}", est.sup_estimate);
    }

    #[test]
    fn zero_blocks_and_refusal() {
        let z = flagged(vec![H::zeros(2), H::zeros(2)]);
        let b = lo_norm_block_exact_small(&z, 1.0 / 16.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let big = flagged(vec![H::identity(4)]);
        assert!(matches!(
            lo_norm_block_exact_small(&big, 1.0 / 16.0),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn three_way_sandwich() {
        let mut rng = RngStream::new(6, 4).generator();
        for _ in 0..5 {
            let blocks: Vec<H> = (0..2).map(|_| gue_standard::<f64, _>(2, &mut rng)).collect();
            let fb = flagged(blocks);
            let bounds = lo_norm_block_exact_small(&fb, 1.0 / 16.0).unwrap();
            let est = lo_norm_block_upper(&fb, &fast_cfg(), &mut rng).unwrap();
            assert!(bounds.lower <= est.value + 1e-9, "{bounds:?} {}", est.value);
            assert!(est.value <= bounds.upper + 1e-9);
        }
    }

    #[test]
    fn flagged_construction_estimate_below_locc_value() {
        let mut rng = RngStream::new(6, 5).generator();
        let f = lo_vs_locc_delta::<f64, _>(4, &mut rng).unwrap();
        let est = lo_norm_block_upper(&f, &fast_cfg(), &mut rng).unwrap();
        assert!(est.value <= locc_one_way_exact_flagged(&f) + 1e-9);
        for c in [-2.0, 0.5] {
            let scaled = flagged(f.blocks().iter().map(|b| b.scale(c)).collect());
            let mut r2 = RngStream::new(6, 6).generator();
            let mut r1 = RngStream::new(6, 6).generator();
            let a = lo_norm_block_upper(&scaled, &fast_cfg(), &mut r2).unwrap().value;
            let b = lo_norm_block_upper(&f, &fast_cfg(), &mut r1).unwrap().value;
            assert!((a - c.abs() * b).abs() < 1e-6 * b);
        }
    }
}
