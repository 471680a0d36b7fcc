//! Convex-geometry estimators: Gaussian mean widths through support
//! functions, the constants `γ_n` and `α_n`, hit-or-miss volume radii,
//! projective-tensor gauges and the top-k majorization check.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::HermitianOperator;
use crate::norms::{povm_norm, Povm};
use crate::random::{gue_standard, traceless_gaussian};
use crate::stats::Estimate;

pub type WidthEstimate = Estimate;

type Hermitian = HermitianOperator<f64>;

/// Real inner-product space a support function lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    /// `R^n` with the standard inner product.
    Real(usize),
    /// Hermitian `d×d` matrices with `⟨A, B⟩ = tr(AB)`, real dimension `d²`.
    Hermitian(usize),
}

impl Ambient {
    pub fn real_dim(&self) -> usize {
        match *self {
            Ambient::Real(n) => n,
            Ambient::Hermitian(d) => d * d,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Direction {
    Real(Vec<f64>),
    Hermitian(Hermitian),
}

impl Direction {
    fn matches(&self, ambient: Ambient) -> bool {
        match (self, ambient) {
            (Direction::Real(v), Ambient::Real(n)) => v.len() == n,
            (Direction::Hermitian(h), Ambient::Hermitian(d)) => h.dim() == d,
            _ => false,
        }
    }
}

type SupportFn = dyn Fn(&Direction) -> f64 + Send + Sync;

/// Support function `h_K(u) = max_{x∈K} ⟨x, u⟩` of a symmetric convex body.
#[derive(Clone)]
pub struct SupportOracle {
    ambient: Ambient,
    h: Arc<SupportFn>,
}

impl std::fmt::Debug for SupportOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SupportOracle").field("ambient", &self.ambient).finish()
    }
}

impl SupportOracle {
    pub fn real(n: usize, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        SupportOracle {
            ambient: Ambient::Real(n),
            h: Arc::new(move |u| match u {
                Direction::Real(v) => h(v),
                Direction::Hermitian(_) => unreachable!("ambient checked by caller"),
            }),
        }
    }

    pub fn hermitian(d: usize, h: impl Fn(&Hermitian) -> f64 + Send + Sync + 'static) -> Self {
        SupportOracle {
            ambient: Ambient::Hermitian(d),
            h: Arc::new(move |u| match u {
                Direction::Hermitian(m) => h(m),
                Direction::Real(_) => unreachable!("ambient checked by caller"),
            }),
        }
    }

    /// `conv{±u}`: `h(x) = |⟨u, x⟩|`.
    pub fn segment(u: Direction) -> Self {
        match u {
            Direction::Real(u) => SupportOracle::real(u.len(), move |x| {
                u.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs()
            }),
            Direction::Hermitian(u) => {
                let d = u.dim();
                SupportOracle::hermitian(d, move |x| u.hs_inner(x).expect("same dimension").abs())
            }
        }
    }

    pub fn euclidean_ball(ambient: Ambient) -> Self {
        match ambient {
            Ambient::Real(n) => SupportOracle::real(n, |x| x.iter().map(|v| v * v).sum::<f64>().sqrt()),
            Ambient::Hermitian(d) => SupportOracle::hermitian(d, |x| x.hs_norm()),
        }
    }

    /// The cube `[−1, 1]^n`: `h(x) = ‖x‖₁`.
    pub fn cube(n: usize) -> Self {
        SupportOracle::real(n, |x| x.iter().map(|v| v.abs()).sum())
    }

    /// `K_M`, whose support function is the distinguishability norm `‖·‖_M`.
    pub fn povm(m: Povm<f64>) -> Self {
        SupportOracle::hermitian(m.dim(), move |x| povm_norm(x, &m).expect("same dimension"))
    }

    /// Operator-norm unit ball, equal to `[−Id, Id]`; its support is `‖·‖₁`.
    pub fn operator_norm_ball(d: usize) -> Self {
        SupportOracle::hermitian(d, |x| x.trace_norm())
    }

    /// Trace-norm unit ball; its support is `‖·‖_∞`.
    pub fn trace_norm_ball(d: usize) -> Self {
        SupportOracle::hermitian(d, |x| x.operator_norm())
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient.real_dim()
    }

    pub fn evaluate(&self, u: &Direction) -> Result<f64> {
        if !u.matches(self.ambient) {
            return Err(Error::validation("direction does not live in the oracle's ambient space"));
        }
        Ok((self.h)(u))
    }

    fn eval_unchecked(&self, u: &Direction) -> f64 {
        (self.h)(u)
    }
}

/// `γ_n` and `α_n = √(2/π)/γ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConstants {
    pub n: usize,
    pub gamma_n: f64,
    pub alpha_n: f64,
}

impl GeometryConstants {
    pub fn new(n: usize) -> Result<Self> {
        let gamma_n = gamma_exact(n)?;
        Ok(GeometryConstants {
            n,
            gamma_n,
            alpha_n: (2.0 / std::f64::consts::PI).sqrt() / gamma_n,
        })
    }
}

const SERIES_THRESHOLD: usize = 200;

/// `γ_n = E‖G‖₂ = √2 Γ((n+1)/2)/Γ(n/2)` for a standard Gaussian in `R^n`.
///
/// Small `n` use `γ_{n+2} = γ_n (n+1)/n` from the closed forms at 1 and 2;
/// large `n` use the asymptotic series of `Γ(x+½)/Γ(x)`, whose truncation
/// error is below `1e-16` for `x ≥ 100`.
pub fn gamma_exact(n: usize) -> Result<f64> {
    use std::f64::consts::PI;
    if n == 0 {
        return Err(Error::validation("gamma_n needs n >= 1"));
    }
    if n >= SERIES_THRESHOLD {
        let x = n as f64 / 2.0;
        let y = 1.0 / x;
        let series = 1.0
            + y * (-1.0 / 8.0
                + y * (1.0 / 128.0
                    + y * (5.0 / 1024.0
                        + y * (-21.0 / 32768.0 + y * (-399.0 / 262144.0 + y * (869.0 / 4194304.0))))));
        return Ok((2.0 * x).sqrt() * series);
    }
    let mut g = if n % 2 == 1 { (2.0 / PI).sqrt() } else { (PI / 2.0).sqrt() };
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    while k < n {
        g *= (k + 1) as f64 / k as f64;
        k += 2;
    }
    Ok(g)
}

/// Mean width of a unit segment in `R^n`.
pub fn alpha(n: usize) -> Result<f64> {
    Ok(GeometryConstants::new(n)?.alpha_n)
}

fn real_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < 100 {
        return Err(Error::validation("width estimates need at least 100 samples"));
    }
    Ok(())
}

/// Spherical mean width `w(K) = E h_K(G)/γ_n` from Gaussian directions.
pub fn mean_width_mc<R: Rng + ?Sized>(
    oracle: &SupportOracle,
    n_samples: usize,
    rng: &mut R,
) -> Result<WidthEstimate> {
    check_samples(n_samples)?;
    let gamma = gamma_exact(oracle.ambient_dim())?;
    let samples: Vec<f64> = (0..n_samples)
        .map(|_| {
            let g = match oracle.ambient {
                Ambient::Real(n) => Direction::Real(real_gaussian(n, rng)),
                Ambient::Hermitian(d) => Direction::Hermitian(gue_standard(d, rng)),
            };
            oracle.eval_unchecked(&g) / gamma
        })
        .collect();
    Ok(Estimate::from_samples(&samples))
}

/// Width of the projection of `K` onto the traceless subspace `H₀`, using
/// standard Gaussians on `H₀` and `γ_{d²−1}`.
pub fn width_projection_traceless<R: Rng + ?Sized>(
    oracle: &SupportOracle,
    n_samples: usize,
    rng: &mut R,
) -> Result<WidthEstimate> {
    check_samples(n_samples)?;
    let Ambient::Hermitian(d) = oracle.ambient else {
        return Err(Error::validation("traceless projection needs a Hermitian ambient"));
    };
    if d < 2 {
        return Err(Error::validation("traceless subspace is trivial for d < 2"));
    }
    let gamma = gamma_exact(d * d - 1)?;
    let samples: Vec<f64> = (0..n_samples)
        .map(|_| oracle.eval_unchecked(&Direction::Hermitian(traceless_gaussian(d, rng))) / gamma)
        .collect();
    Ok(Estimate::from_samples(&samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchattenBall {
    /// Trace-norm ball; Gaussian width `E‖G‖_∞ ≈ 2√d`.
    S1,
    /// Operator-norm ball; Gaussian width `E‖G‖₁ ≈ (8/3π) d^{3/2}`.
    Sinf,
}

/// Asymptotic spherical mean width of a Schatten unit ball in `H(C^d)`.
pub fn schatten_width_reference(d: usize, which: SchattenBall) -> Result<f64> {
    if d < 2 {
        return Err(Error::validation("schatten reference needs d >= 2"));
    }
    let df = d as f64;
    let gaussian = match which {
        SchattenBall::Sinf => df.powf(1.5) * 8.0 / (3.0 * std::f64::consts::PI),
        SchattenBall::S1 => 2.0 * df.sqrt(),
    };
    Ok(gaussian / gamma_exact(d * d)?)
}

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    // V_n = V_{n−2} · 2π/n
    let (mut v, mut k) = if n.is_multiple_of(2) { (1.0, 0) } else { (2.0, 1) };
    while k < n {
        k += 2;
        v *= 2.0 * PI / k as f64;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub vrad: f64,
    pub standard_error: f64,
    pub hit_fraction: f64,
    pub n_samples: usize,
}

impl VolumeEstimate {
    /// Lebesgue volume `vrad^n · vol(B₂ⁿ)`.
    pub fn volume(&self, n: usize) -> f64 {
        self.vrad.powi(n as i32) * unit_ball_volume(n)
    }
}

pub const MAX_VOLUME_DIM: usize = 8;

/// Hit-or-miss volume radius `R·p^{1/n}` with `p` the fraction of uniform
/// points of the radius-`R` ball that fall in the body.
pub fn volume_radius_mc<R: Rng + ?Sized>(
    membership: impl Fn(&[f64]) -> bool,
    radius: f64,
    n: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<VolumeEstimate> {
    if n == 0 || n > MAX_VOLUME_DIM {
        return Err(Error::validation(format!(
            "hit-or-miss volume supports 1..={MAX_VOLUME_DIM} dimensions"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) || n_samples == 0 {
        return Err(Error::validation("need a positive radius and at least one sample"));
    }
    let mut point = vec![0.0; n];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let norm = loop {
            for p in point.iter_mut() {
                *p = rng.sample(StandardNormal);
            }
            let s = point.iter().map(|v| v * v).sum::<f64>().sqrt();
            if s > 0.0 {
                break s;
            }
        };
        let r = radius * rng.random::<f64>().powf(1.0 / n as f64) / norm;
        for p in point.iter_mut() {
            *p *= r;
        }
        if membership(&point) {
            hits += 1;
        }
    }
    if hits == 0 {
        return Err(Error::Refused(
            "no sample hit the body; shrink the bounding radius".into(),
        ));
    }
    let nf = n_samples as f64;
    let p = hits as f64 / nf;
    let inv = 1.0 / n as f64;
    let se_p = (p * (1.0 - p) / nf).sqrt();
    Ok(VolumeEstimate {
        vrad: radius * p.powf(inv),
        standard_error: radius * inv * p.powf(inv - 1.0) * se_p,
        hit_fraction: p,
        n_samples,
    })
}

pub fn euclidean_gauge(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn l1_gauge(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn cube_gauge(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Gauge of `B₁ⁿ ⊗̂ K` at `Σ e_i ⊗ x_i`, which equals `Σ_i ‖x_i‖_K`.
pub fn projective_tensor_gauge(point: &[f64], n: usize, gauge: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if n == 0 || !point.len().is_multiple_of(n) {
        return Err(Error::validation("point length must be a multiple of the block count"));
    }
    let m = point.len() / n;
    Ok(point.chunks(m).map(gauge).sum())
}

pub fn projective_tensor_membership(
    point: &[f64],
    n: usize,
    gauge: impl Fn(&[f64]) -> f64,
) -> Result<bool> {
    Ok(projective_tensor_gauge(point, n, gauge)? <= 1.0)
}

/// Sum of the `k` largest absolute coordinates.
pub fn ordered_topk_norm(x: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > x.len() {
        return Err(Error::validation(format!("k = {k} out of range 1..={}", x.len())));
    }
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    Ok(a[..k].iter().sum())
}

fn check_traceless(x: &[f64]) -> Result<()> {
    let scale = l1_gauge(x).max(1.0);
    if x.iter().sum::<f64>().abs() > 1e-10 * scale {
        return Err(Error::validation("vector must sum to zero"));
    }
    Ok(())
}

/// Checks `|||x||| ≤ 2n (‖x‖_∞/‖y‖₁) |||y|||` for the top-k norm.
pub fn majorization_factor_check(x: &[f64], y: &[f64], k: usize) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::validation("vectors differ in length"));
    }
    check_traceless(x)?;
    check_traceless(y)?;
    let y1 = l1_gauge(y);
    if y1 == 0.0 {
        return Err(Error::validation("y must be nonzero"));
    }
    let n = x.len() as f64;
    let lhs = ordered_topk_norm(x, k)?;
    let rhs = 2.0 * n * cube_gauge(x) / y1 * ordered_topk_norm(y, k)?;
    Ok(lhs <= rhs * (1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::random_rank1_povm;
    use crate::random::RngStream;
    use std::f64::consts::PI;

    fn within(est: &Estimate, target: f64, k: f64) -> bool {
        (est.mean - target).abs() <= k * est.standard_error
    }

    #[test]
    fn gamma_closed_forms_and_bracket() {
        assert!((gamma_exact(1).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((gamma_exact(2).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-15);
        // γ_3 = 2√(2/π)
        assert!((gamma_exact(3).unwrap() - 2.0 * (2.0 / PI).sqrt()).abs() < 1e-15);
        let mut prev = 0.0;
        for n in 1..=10_000 {
            let g = gamma_exact(n).unwrap();
            assert!(g > prev, "n = {n}");
            assert!(g >= ((n - 1) as f64).sqrt() && g <= (n as f64).sqrt(), "n = {n}");
            let c = GeometryConstants::new(n).unwrap();
            assert!((c.alpha_n * c.gamma_n - (2.0 / PI).sqrt()).abs() < 1e-12);
            prev = g;
        }
        assert!(gamma_exact(0).is_err());
    }

    #[test]
    fn gamma_series_joins_recurrence() {
        for n in [SERIES_THRESHOLD, SERIES_THRESHOLD + 1, 5_000] {
            let lhs = gamma_exact(n + 2).unwrap();
            let rhs = gamma_exact(n).unwrap() * (n + 1) as f64 / n as f64;
            assert!((lhs / rhs - 1.0).abs() < 1e-14, "n = {n}");
        }
        // recurrence continued past the switch agrees with the series
        let mut g = gamma_exact(SERIES_THRESHOLD - 2).unwrap();
        let mut k = SERIES_THRESHOLD - 2;
        while k < 1000 {
            g *= (k + 1) as f64 / k as f64;
            k += 2;
        }
        assert!((g / gamma_exact(1000).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_matches_chi_quadrature() {
        // E‖G‖ = ∫ r · r^{n−1} e^{−r²/2} dr / ∫ r^{n−1} e^{−r²/2} dr
        for n in [5usize, 12] {
            let h = 1e-4;
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..200_000 {
                let r = (i as f64 + 0.5) * h;
                let w = r.powi(n as i32 - 1) * (-r * r / 2.0).exp();
                num += r * w;
                den += w;
            }
            assert!((num / den / gamma_exact(n).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn segment_widths_match_alpha() {
        let mut rng = RngStream::new(6, 0).generator();
        for n in [4usize, 9, 16] {
            let mut u = vec![0.0; n];
            u[0] = 1.0;
            let w = mean_width_mc(&SupportOracle::segment(Direction::Real(u)), 20_000, &mut rng).unwrap();
            assert!(within(&w, alpha(n).unwrap(), 3.0), "{n}: {w:?}");
        }
        let w = mean_width_mc(&SupportOracle::euclidean_ball(Ambient::Real(7)), 20_000, &mut rng).unwrap();
        assert!(within(&w, 1.0, 3.0), "{w:?}");
    }

    #[test]
    fn rank_one_povm_width() {
        let mut rng = RngStream::new(6, 1).generator();
        let m = random_rank1_povm::<f64, _>(3, 4, &mut rng).unwrap();
        let w = mean_width_mc(&SupportOracle::povm(m), 20_000, &mut rng).unwrap();
        assert!(within(&w, 3.0 * alpha(9).unwrap(), 3.0), "{w:?}");
    }

    #[test]
    fn schatten_widths_and_product() {
        let mut rng = RngStream::new(6, 2).generator();
        let w_inf = mean_width_mc(&SupportOracle::operator_norm_ball(10), 2_000, &mut rng).unwrap();
        let w_one = mean_width_mc(&SupportOracle::trace_norm_ball(10), 2_000, &mut rng).unwrap();
        let product = w_inf.mean * w_one.mean;
        assert!((1.0..=2.0).contains(&product), "{product}");
        let r_inf = schatten_width_reference(10, SchattenBall::Sinf).unwrap();
        assert!((w_inf.mean / r_inf - 1.0).abs() < 0.05);
        assert!(schatten_width_reference(1, SchattenBall::S1).is_err());
    }

    #[test]
    fn oracle_sanity() {
        let mut rng = RngStream::new(6, 3).generator();
        let m = random_rank1_povm::<f64, _>(3, 2, &mut rng).unwrap();
        let oracles = [
            SupportOracle::povm(m),
            SupportOracle::operator_norm_ball(3),
            SupportOracle::trace_norm_ball(3),
            SupportOracle::euclidean_ball(Ambient::Hermitian(3)),
        ];
        for o in &oracles {
            for _ in 0..1_000 {
                let a: Hermitian = gue_standard(3, &mut rng);
                let b: Hermitian = gue_standard(3, &mut rng);
                let c = rng.random_range(0.1..10.0);
                let ha = o.evaluate(&Direction::Hermitian(a.clone())).unwrap();
                let hb = o.evaluate(&Direction::Hermitian(b.clone())).unwrap();
                let hca = o.evaluate(&Direction::Hermitian(a.scale(c))).unwrap();
                let hab = o.evaluate(&Direction::Hermitian(&a + &b)).unwrap();
                assert!((hca - c * ha).abs() <= 1e-9 * hca.max(1.0));
                assert!(hab <= ha + hb + 1e-9);
            }
        }
        assert!(oracles[1].evaluate(&Direction::Real(vec![1.0; 9])).is_err());
    }

    #[test]
    fn traceless_projection() {
        let mut rng = RngStream::new(6, 4).generator();
        let full = mean_width_mc(&SupportOracle::operator_norm_ball(3), 5_000, &mut rng).unwrap();
        let proj = width_projection_traceless(&SupportOracle::operator_norm_ball(3), 5_000, &mut rng).unwrap();
        let ratio = gamma_exact(9).unwrap() / gamma_exact(8).unwrap();
        assert!(proj.mean <= full.mean * ratio + 3.0 * (proj.standard_error + full.standard_error));
        let id = SupportOracle::segment(Direction::Hermitian(Hermitian::identity(3)));
        let w = width_projection_traceless(&id, 1_000, &mut rng).unwrap();
        assert!(w.mean.abs() < 1e-12);
        let m = random_rank1_povm::<f64, _>(3, 4, &mut rng).unwrap();
        let km = SupportOracle::povm(m);
        let full = mean_width_mc(&km, 5_000, &mut rng).unwrap();
        let proj = width_projection_traceless(&km, 5_000, &mut rng).unwrap();
        // ⟨u|G₀|u⟩ has variance 1 − 1/d for a unit u, so the projected width
        // of a rank-1 K_M is d·√(1 − 1/d)·√(2/π)/γ_{d²−1}.
        let exact = 3.0 * (2.0f64 / 3.0).sqrt() * (2.0 / PI).sqrt() / gamma_exact(8).unwrap();
        assert!(within(&proj, exact, 3.0), "{proj:?} vs {exact}");
        assert!(within(&full, 3.0 * alpha(9).unwrap(), 3.0), "{full:?}");
        assert!(width_projection_traceless(&SupportOracle::cube(3), 100, &mut rng).is_err());
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn hit_or_miss_volumes() {
        let mut rng = RngStream::new(6, 5).generator();
        let ball = volume_radius_mc(|x| euclidean_gauge(x) <= 2.0, 2.0, 3, 100_000, &mut rng).unwrap();
        assert_eq!(ball.vrad, 2.0);
        let cube = volume_radius_mc(|x| cube_gauge(x) <= 1.0, 2.0, 3, 1_000_000, &mut rng).unwrap();
        let exact = (6.0 / PI).powf(1.0 / 3.0);
        assert!((cube.vrad - exact).abs() <= 3.0 * cube.standard_error, "{cube:?}");
        let cross = volume_radius_mc(
            |x| projective_tensor_membership(x, 2, cube_gauge).unwrap(),
            1.0,
            2,
            1_000_000,
            &mut rng,
        )
        .unwrap();
        let exact = (2.0 / PI).sqrt();
        assert!((cross.vrad - exact).abs() <= 3.0 * cross.standard_error, "{cross:?}");
        assert!((cross.volume(2) - 2.0).abs() < 0.01);
        // Urysohn: vrad ≤ w
        let w_cube = 3.0 * (2.0 / PI).sqrt() / gamma_exact(3).unwrap();
        assert!(cube.vrad <= w_cube);
        assert!(matches!(
            volume_radius_mc(|x| x[0] > 10.0, 1.0, 2, 1000, &mut rng),
            Err(Error::Refused(_))
        ));
        assert!(volume_radius_mc(|_| true, 1.0, 9, 10, &mut rng).is_err());
    }

    #[test]
    fn projective_tensor_cases() {
        let g = euclidean_gauge;
        assert!(projective_tensor_membership(&[0.0; 6], 3, g).unwrap());
        assert!(projective_tensor_membership(&[0.6, 0.8, 0.0, 0.0], 2, g).unwrap());
        assert!(!projective_tensor_membership(&[0.6, 0.0, 0.0, 0.6], 2, g).unwrap());
        assert!(projective_tensor_membership(&[1.0; 5], 2, g).is_err());
    }

    #[test]
    fn topk_and_majorization() {
        assert_eq!(ordered_topk_norm(&[1.0, -3.0, 2.0], 2).unwrap(), 5.0);
        assert!(ordered_topk_norm(&[1.0], 2).is_err());
        let x = [1.0, -1.0, 0.0, 0.0];
        assert!(majorization_factor_check(&x, &x, 1).unwrap());
        assert!(majorization_factor_check(&[1.0, 1.0], &x[..2], 1).is_err());
        assert!(majorization_factor_check(&x, &[0.0; 4], 1).is_err());
        let mut rng = RngStream::new(6, 6).generator();
        let traceless = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut v = real_gaussian(12, rng);
            let m = v.iter().sum::<f64>() / 12.0;
            v.iter_mut().for_each(|t| *t -= m);
            v
        };
        for _ in 0..10_000 {
            let x = traceless(&mut rng);
            let y = traceless(&mut rng);
            for k in 1..=12 {
                assert!(majorization_factor_check(&x, &y, k).unwrap());
            }
        }
    }
}
