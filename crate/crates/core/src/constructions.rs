//! Builders for the state pairs and POVM families studied by the experiments.

use nalgebra::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{BipartiteShape, CMatrix, HermitianOperator};
use crate::norms::{FlaggedBlockOperator, Povm};
use crate::random::{haar_unitary, random_subspace_projector, uniform_state, DensityOperator};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Werner,
    DataHiding,
    LoVsLocc,
    UniformRandom,
}

#[derive(Debug, Clone)]
pub struct StatePair<T: Real> {
    pub rho: DensityOperator<T>,
    pub sigma: DensityOperator<T>,
    pub provenance: Provenance,
}

impl<T: Real> StatePair<T> {
    fn new(rho: DensityOperator<T>, sigma: DensityOperator<T>, provenance: Provenance) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::validation("state pair dimensions differ"));
        }
        Ok(StatePair {
            rho,
            sigma,
            provenance,
        })
    }

    /// `ρ − σ`, carrying the bipartite shape of `ρ` when present.
    pub fn difference(&self) -> HermitianOperator<T> {
        let diff = self.rho.op() - self.sigma.op();
        match self.rho.op().shape() {
            Some(s) => diff.with_shape(s).expect("same dimension"),
            None => diff,
        }
    }
}

/// A finite set of POVMs together with the operators `A_i` they came from
/// (for net families `M_i = ((Id + A_i)/2, (Id − A_i)/2)`).
#[derive(Debug, Clone)]
pub struct PovmFamily<T: Real> {
    pub members: Vec<Povm<T>>,
    pub epsilon: f64,
    pub net: Vec<HermitianOperator<T>>,
}

impl<T: Real> PovmFamily<T> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn swap<T: Real>(d: usize) -> CMatrix<T> {
    let mut s = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            s[(a * d + b, b * d + a)] = Complex::from(T::one());
        }
    }
    s
}

/// Normalized projectors onto the symmetric and antisymmetric subspaces.
pub fn werner_pair<T: Real>(d: usize) -> Result<StatePair<T>> {
    if d < 2 {
        return Err(Error::validation("werner pair needs d >= 2"));
    }
    let shape = BipartiteShape::square(d);
    let id = CMatrix::<T>::identity(d * d, d * d);
    let sw = swap::<T>(d);
    let half = T::lit(0.5);
    let df = T::from_usize_lossy(d);
    let p_sym = HermitianOperator::symmetrized((&id + &sw).scale(half));
    let p_anti = HermitianOperator::symmetrized((&id - &sw).scale(half));
    let sym = p_sym.scale(T::one() / (df * (df + T::one()) * half));
    let anti = p_anti.scale(T::one() / (df * (df - T::one()) * half));
    StatePair::new(
        DensityOperator::new(sym.with_shape(shape)?)?,
        DensityOperator::new(anti.with_shape(shape)?)?,
        Provenance::Werner,
    )
}

/// `ρ = U P_E U†/(d²/2)`, `σ = U P_{E⊥} U†/(d²/2)` on `C^d ⊗ C^d`.
pub fn data_hiding_pair<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StatePair<T>> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::validation("data hiding pair needs even d"));
    }
    let n = d * d;
    let p = random_subspace_projector::<T, R>(n, n / 2, rng)?;
    let q = &HermitianOperator::identity(n) - &p;
    let w = T::one() / T::from_usize_lossy(n / 2);
    let shape = BipartiteShape::square(d);
    StatePair::new(
        DensityOperator::new(p.scale(w).with_shape(shape)?)?,
        DensityOperator::new(q.scale(w).with_shape(shape)?)?,
        Provenance::DataHiding,
    )
}

/// Two independent HS-uniform states on `C^d ⊗ C^d`.
pub fn uniform_pair<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<StatePair<T>> {
    if d == 0 {
        return Err(Error::validation("dimension must be positive"));
    }
    let shape = BipartiteShape::square(d);
    let rho = uniform_state::<T, R>(d * d, rng).into_operator().with_shape(shape)?;
    let sigma = uniform_state::<T, R>(d * d, rng).into_operator().with_shape(shape)?;
    StatePair::new(
        DensityOperator::new(rho)?,
        DensityOperator::new(sigma)?,
        Provenance::UniformRandom,
    )
}

/// Blocks `Δ_i = U_i (2P_E − Id) U_i†` for `d` independent Haar `U_i`, with
/// `E` spanned by the first `d/2` basis vectors.
pub fn lo_vs_locc_delta<T: Real, R: Rng + ?Sized>(
    d: usize,
    rng: &mut R,
) -> Result<FlaggedBlockOperator<T>> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::validation("flagged construction needs even d"));
    }
    let diag: Vec<T> = (0..d)
        .map(|i| if i < d / 2 { T::one() } else { -T::one() })
        .collect();
    let delta0 = HermitianOperator::from_real_diagonal(&diag);
    let blocks = (0..d)
        .map(|_| delta0.conjugate_by(&haar_unitary::<T, R>(d, rng)))
        .collect();
    FlaggedBlockOperator::new(blocks)
}

/// `ρ = Δ⁺/tr Δ⁺`, `σ = Δ⁻/tr Δ⁻` for the expanded flagged operator.
pub fn flagged_to_state_pair<T: Real>(delta: &FlaggedBlockOperator<T>) -> Result<StatePair<T>> {
    let floor = T::lit(1e-9);
    for (i, b) in delta.blocks().iter().enumerate() {
        let s = b.spectrum();
        if s.max() <= floor || s.min() >= -floor {
            return Err(Error::validation(format!(
                "block {i} lacks a positive or a negative part"
            )));
        }
    }
    let full = delta.expand();
    let shape = full.shape().expect("expanded operator is bipartite");
    let j = full.jordan_decompose();
    StatePair::new(
        DensityOperator::normalized(j.positive_part.with_shape(shape)?)?,
        DensityOperator::normalized(j.negative_part.with_shape(shape)?)?,
        Provenance::LoVsLocc,
    )
}

/// Splits every effect into its rank-one spectral pieces, dropping
/// numerically zero eigenvalues.
pub fn rank1_refinement<T: Real>(m: &Povm<T>) -> Result<Povm<T>> {
    let mut out = Vec::new();
    for e in m.effects() {
        let eig = e.eig();
        let cutoff = T::lit(1e-12) * e.operator_norm().max(T::one());
        for (j, &l) in eig.spectrum.values().iter().enumerate() {
            if l > cutoff {
                let v = eig.vectors.column(j).into_owned();
                out.push(HermitianOperator::outer(&v).scale(l));
            }
        }
    }
    Povm::new(out)
}

/// Uniform mixture of `n_bases` Haar-random basis measurements.
pub fn random_rank1_povm<T: Real, R: Rng + ?Sized>(
    d: usize,
    n_bases: usize,
    rng: &mut R,
) -> Result<Povm<T>> {
    if n_bases == 0 || d == 0 {
        return Err(Error::validation("need d >= 1 and at least one basis"));
    }
    let w = T::one() / T::from_usize_lossy(n_bases);
    let mut effects = Vec::with_capacity(d * n_bases);
    for _ in 0..n_bases {
        let u = haar_unitary::<T, R>(d, rng);
        for j in 0..d {
            effects.push(HermitianOperator::outer(&u.column(j).into_owned()).scale(w));
        }
    }
    Povm::new(effects)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetMode {
    /// Deterministic eigenvalue/direction grid (`d = 2` only).
    Certified,
    /// Greedy random insertion until 10³ consecutive targets are covered.
    Randomized,
}

const COVERAGE_TRIALS: usize = 1000;

/// Random target in `[−Id, Id]`: `U diag(λ) U†` with `λ` uniform in `[−1, 1]^d`.
fn random_target<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator<T> {
    let lambda: Vec<T> = (0..d).map(|_| T::lit(rng.random_range(-1.0..=1.0))).collect();
    HermitianOperator::from_real_diagonal(&lambda).conjugate_by(&haar_unitary::<T, R>(d, rng))
}

fn gauge_distance<T: Real>(t: &HermitianOperator<T>, net: &[HermitianOperator<T>]) -> f64 {
    net.iter()
        .map(|a| (t - a).operator_norm().as_f64())
        .fold(f64::INFINITY, f64::min)
}

fn witness<T: Real>(t: &HermitianOperator<T>) -> Vec<f64> {
    t.matrix().iter().flat_map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()
}

/// Fibonacci lattice of `n` points on the unit sphere of `R³`.
fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn chord(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Smallest Fibonacci set whose covering chord, measured on a much finer
/// probe set, is at most `0.9 · target`.
fn direction_net(target: f64) -> Vec<[f64; 3]> {
    if target >= 2.0 {
        return vec![[0.0, 0.0, 1.0]];
    }
    let probes = fibonacci_sphere(20_000);
    let mut n = 2;
    loop {
        let pts = fibonacci_sphere(n);
        let cover = probes
            .iter()
            .map(|p| pts.iter().map(|q| chord(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        if cover <= 0.9 * target {
            return pts;
        }
        n = (n as f64 * 1.25).ceil() as usize;
    }
}

/// `c·Id + r·(n·σ)` for a unit Bloch vector `n`.
fn qubit_operator<T: Real>(c: f64, r: f64, n: &[f64; 3]) -> HermitianOperator<T> {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex::new(T::lit(c + r * n[2]), T::zero()),
            Complex::new(T::lit(r * n[0]), T::lit(-r * n[1])),
            Complex::new(T::lit(r * n[0]), T::lit(r * n[1])),
            Complex::new(T::lit(c - r * n[2]), T::zero()),
        ],
    );
    HermitianOperator::symmetrized(m)
}

/// Deterministic ε-net of `[−Id, Id]` on `C²` in the operator-norm gauge.
///
/// Eigenvalues run over the grid `1 − ε/4 − kε/2`, so each target eigenvalue
/// is within `ε/4` of a grid value; the Bloch direction is covered to chord
/// `0.75ε/r`. Since `‖(c−c')Id + (r n − r' n')·σ‖ ≤ |c−c'| + |r−r'| + r'|n−n'|`,
/// the total gauge error is at most `ε`.
fn certified_qubit_net<T: Real>(epsilon: f64) -> Vec<HermitianOperator<T>> {
    let mut grid = Vec::new();
    let mut v = 1.0 - epsilon / 4.0;
    while v >= -1.0 + epsilon / 4.0 - 1e-12 {
        grid.push(v);
        v -= epsilon / 2.0;
    }
    if grid.last().is_some_and(|&g| g > -1.0 + epsilon / 4.0 + 1e-12) {
        grid.push(-1.0 + epsilon / 4.0);
    }
    let mut net = Vec::new();
    let mut scalars = Vec::new();
    for &l1 in &grid {
        for &l2 in &grid {
            if l1 - l2 < -epsilon / 2.0 - 1e-12 {
                continue;
            }
            let c = 0.5 * (l1 + l2);
            let r = 0.5 * (l1 - l2);
            if r <= 1e-12 {
                // Rounding can invert a near-degenerate pair; such targets are
                // within ε of the scalar point.
                if !scalars.iter().any(|&s: &f64| (s - c).abs() < 1e-12) {
                    scalars.push(c);
                    net.push(qubit_operator(c, 0.0, &[0.0, 0.0, 1.0]));
                }
                continue;
            }
            for n in direction_net(0.75 * epsilon / r) {
                net.push(qubit_operator(c, r, &n));
            }
        }
    }
    net
}

fn family_from_net<T: Real>(net: Vec<HermitianOperator<T>>, epsilon: f64) -> PovmFamily<T> {
    let half = T::lit(0.5);
    let members = net
        .iter()
        .map(|a| {
            let d = a.dim();
            let id = HermitianOperator::<T>::identity(d);
            Povm::from_effects_unchecked(vec![(&id + a).scale(half), (&id - a).scale(half)])
        })
        .collect();
    PovmFamily {
        members,
        epsilon,
        net,
    }
}

/// Two-outcome POVMs `((Id + A_i)/2, (Id − A_i)/2)` over an ε-net `{A_i}` of
/// `[−Id, Id]`. Uses the certified grid at `d = 2`, randomized otherwise.
pub fn net_povm_family<T: Real, R: Rng + ?Sized>(
    d: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<PovmFamily<T>> {
    let mode = if d == 2 { NetMode::Certified } else { NetMode::Randomized };
    net_povm_family_with_mode(d, epsilon, mode, rng)
}

pub fn net_povm_family_with_mode<T: Real, R: Rng + ?Sized>(
    d: usize,
    epsilon: f64,
    mode: NetMode,
    rng: &mut R,
) -> Result<PovmFamily<T>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::validation("epsilon must lie in (0, 1)"));
    }
    match mode {
        NetMode::Certified => {
            if d != 2 {
                return Err(Error::validation("certified net is available only for d = 2"));
            }
            let net = certified_qubit_net::<T>(epsilon);
            for _ in 0..COVERAGE_TRIALS {
                let t = random_target::<T, R>(d, rng);
                let dist = gauge_distance(&t, &net);
                if dist > epsilon + 1e-9 {
                    return Err(Error::Coverage {
                        distance: dist,
                        witness: witness(&t),
                    });
                }
            }
            Ok(family_from_net(net, epsilon))
        }
        NetMode::Randomized => {
            if d == 0 || d > 3 {
                return Err(Error::validation("randomized net is limited to d <= 3"));
            }
            let mut net: Vec<HermitianOperator<T>> = Vec::new();
            let mut streak = 0;
            let max_draws = 2_000_000;
            let mut last = None;
            for _ in 0..max_draws {
                let t = random_target::<T, R>(d, rng);
                let dist = gauge_distance(&t, &net);
                if dist <= epsilon {
                    streak += 1;
                    if streak == COVERAGE_TRIALS {
                        return Ok(family_from_net(net, epsilon));
                    }
                } else {
                    streak = 0;
                    last = Some((dist, witness(&t)));
                    net.push(t);
                }
            }
            let (distance, witness) = last.unwrap_or((f64::INFINITY, Vec::new()));
            Err(Error::Coverage { distance, witness })
        }
    }
}
