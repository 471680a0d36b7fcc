//! Dense Hermitian operators and the bipartite maps built on them.
//!
//! Bipartite indices are row-major: `|a⟩⊗|b⟩` sits at `a·dim_b + b`. The
//! partial transpose acts on the first factor, `(M⊗N)^Γ = M^T ⊗ N`.

mod text;

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use text::{read_operator, write_operator};

/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type CVector<T> = DVector<Complex<T>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize) -> Self {
        BipartiteShape { dim_a, dim_b }
    }

    pub fn square(d: usize) -> Self {
        BipartiteShape { dim_a: d, dim_b: d }
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Eigenvalues sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T>(Vec<T>);

impl<T: Real> Spectrum<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> T {
        self.0.first().copied().unwrap_or_else(T::zero)
    }

    pub fn min(&self) -> T {
        self.0.last().copied().unwrap_or_else(T::zero)
    }

    pub fn abs_sum(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &l| acc + l.abs())
    }

    pub fn abs_max(&self) -> T {
        self.max().abs().max(self.min().abs())
    }
}

/// Eigenvalues (non-increasing) with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen<T: Real> {
    pub spectrum: Spectrum<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// `V · diag(f(λ)) · V†`.
    pub fn recompose(&self, mut f: impl FnMut(T) -> T) -> CMatrix<T> {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.spectrum.values().iter().enumerate() {
            let s = Complex::from(f(l));
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

#[derive(Debug, Clone)]
pub struct JordanDecomposition<T: Real> {
    pub positive_part: HermitianOperator<T>,
    pub negative_part: HermitianOperator<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T: Real> {
    entries: CMatrix<T>,
    shape: Option<BipartiteShape>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates Hermiticity at the default tolerance, then symmetrizes.
    pub fn new(entries: CMatrix<T>) -> Result<Self> {
        Self::with_tolerances(entries, &Tolerances::for_scalar::<T>())
    }

    pub fn with_tolerances(entries: CMatrix<T>, tol: &Tolerances) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::validation(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 {
            return Err(Error::validation("operator dimension must be positive"));
        }
        let n = entries.nrows();
        let mut largest = T::zero();
        let mut defect = T::zero();
        for i in 0..n {
            for j in i..n {
                let a = entries[(i, j)];
                let b = entries[(j, i)].conj();
                largest = largest.max(a.modulus()).max(b.modulus());
                defect = defect.max((a - b).modulus());
            }
        }
        if !defect.is_finite() || !largest.is_finite() {
            return Err(Error::validation("operator has non-finite entries"));
        }
        let limit = T::lit(tol.hermitian) * largest.max(T::one());
        if defect > limit {
            return Err(Error::validation(format!(
                "operator is not Hermitian: defect {defect} exceeds {limit}"
            )));
        }
        Ok(Self::symmetrized(entries))
    }

    /// `(H + H†)/2` without validation. Internal routines produce Hermitian
    /// matrices up to rounding and use this to restore exact symmetry.
    pub(crate) fn symmetrized(entries: CMatrix<T>) -> Self {
        let half = T::lit(0.5);
        let n = entries.nrows();
        let mut m = entries;
        for i in 0..n {
            m[(i, i)] = Complex::from(m[(i, i)].re);
            for j in (i + 1)..n {
                let v = (m[(i, j)] + m[(j, i)].conj()).scale(half);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        HermitianOperator {
            entries: m,
            shape: None,
        }
    }

    pub fn bipartite(entries: CMatrix<T>, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(entries)?.with_shape(BipartiteShape::new(dim_a, dim_b))
    }

    pub fn with_shape(mut self, shape: BipartiteShape) -> Result<Self> {
        if shape.total() != self.dim() {
            return Err(Error::validation(format!(
                "bipartite shape {}x{} does not match dimension {}",
                shape.dim_a,
                shape.dim_b,
                self.dim()
            )));
        }
        self.shape = Some(shape);
        Ok(self)
    }

    pub fn without_shape(mut self) -> Self {
        self.shape = None;
        self
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            entries: CMatrix::zeros(dim, dim),
            shape: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            entries: CMatrix::identity(dim, dim),
            shape: None,
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex::from(v);
        }
        HermitianOperator {
            entries: m,
            shape: None,
        }
    }

    /// Rank-one projector `|v⟩⟨v|` (v is not normalized).
    pub fn outer(v: &CVector<T>) -> Self {
        Self::symmetrized(v * v.adjoint())
    }

    /// Tensor product `self ⊗ other`, tagged with the bipartite shape.
    pub fn kron(&self, other: &Self) -> Self {
        let shape = BipartiteShape::new(self.dim(), other.dim());
        let m = self.entries.kronecker(&other.entries);
        HermitianOperator {
            entries: m,
            shape: Some(shape),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn shape(&self) -> Option<BipartiteShape> {
        self.shape
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.entries
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.entries[(i, i)].re)
    }

    pub fn scale(&self, c: T) -> Self {
        HermitianOperator {
            entries: self.entries.map(|z| z.scale(c)),
            shape: self.shape,
        }
    }

    /// `U · H · U†` for any square `U` of matching size.
    pub fn conjugate_by(&self, u: &CMatrix<T>) -> Self {
        let m = u * &self.entries * u.adjoint();
        Self::symmetrized(m).reshaped(self.shape)
    }

    fn reshaped(mut self, shape: Option<BipartiteShape>) -> Self {
        self.shape = shape;
        self
    }

    /// Eigendecomposition with eigenvalues sorted non-increasing. Exact ties
    /// keep the solver's index order.
    pub fn eig(&self) -> Eigen<T> {
        let n = self.dim();
        let se = SymmetricEigen::new(self.entries.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            se.eigenvalues[j]
                .partial_cmp(&se.eigenvalues[i])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &se.eigenvectors.column(src));
        }
        Eigen {
            spectrum: Spectrum(values),
            vectors,
        }
    }

    pub fn spectrum(&self) -> Spectrum<T> {
        let n = self.dim();
        let values = self.entries.clone().symmetric_eigenvalues();
        let mut v: Vec<T> = (0..n).map(|i| values[i]).collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Spectrum(v)
    }

    pub fn trace_norm(&self) -> T {
        self.spectrum().abs_sum()
    }

    pub fn operator_norm(&self) -> T {
        self.spectrum().abs_max()
    }

    pub fn hs_norm(&self) -> T {
        self.entries.norm()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.spectrum().min()
    }

    pub fn max_eigenvalue(&self) -> T {
        self.spectrum().max()
    }

    /// `tr(AB)`, real for Hermitian arguments.
    pub fn hs_inner(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::validation(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.hs_inner_unchecked(other))
    }

    pub(crate) fn hs_inner_unchecked(&self, other: &Self) -> T {
        // tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij)
        self.entries
            .iter()
            .zip(other.entries.iter())
            .fold(T::zero(), |acc, (a, b)| acc + (*a * b.conj()).re)
    }

    fn require_shape(&self) -> Result<BipartiteShape> {
        self.shape
            .ok_or_else(|| Error::validation("operator has no bipartite shape"))
    }

    /// Transpose on the first tensor factor.
    pub fn partial_transpose(&self) -> Result<Self> {
        let shape = self.require_shape()?;
        Ok(HermitianOperator {
            entries: partial_transpose_matrix(&self.entries, shape),
            shape: Some(shape),
        })
    }

    /// Traces out `subsystem`, returning an operator on the other factor.
    pub fn partial_trace(&self, subsystem: Subsystem) -> Result<Self> {
        let shape = self.require_shape()?;
        Ok(Self::symmetrized(partial_trace_matrix(
            &self.entries,
            shape,
            subsystem,
        )))
    }

    /// HS-nearest operator with spectrum in `[lo, hi]`.
    pub fn project_order_interval(&self, lo: T, hi: T) -> Result<Self> {
        if lo > hi {
            return Err(Error::validation(format!(
                "empty order interval [{lo}, {hi}]"
            )));
        }
        Ok(Self::symmetrized(clip_spectrum(&self.entries, lo, hi)).reshaped(self.shape))
    }

    pub fn jordan_decompose(&self) -> JordanDecomposition<T> {
        let e = self.eig();
        let pos = e.recompose(|l| l.max(T::zero()));
        let neg = e.recompose(|l| (-l).max(T::zero()));
        JordanDecomposition {
            positive_part: Self::symmetrized(pos).reshaped(self.shape),
            negative_part: Self::symmetrized(neg).reshaped(self.shape),
        }
    }

    /// Spectral sign operator; zero eigenvalues map to +1.
    pub fn sign(&self) -> Self {
        let e = self.eig();
        let m = e.recompose(|l| if l >= T::zero() { T::one() } else { -T::one() });
        Self::symmetrized(m).reshaped(self.shape)
    }

    pub fn is_psd(&self, tol: T) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Maximum absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).modulus()))
    }

    /// Casts entries to another scalar type.
    pub fn cast<U: Real>(&self) -> HermitianOperator<U> {
        let m = self
            .entries
            .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())));
        HermitianOperator {
            entries: m,
            shape: self.shape,
        }
    }
}

/// Matrix-level partial transpose on the first factor; shared with the solvers.
pub(crate) fn partial_transpose_matrix<T: Real>(m: &CMatrix<T>, shape: BipartiteShape) -> CMatrix<T> {
    let (da, db) = (shape.dim_a, shape.dim_b);
    let n = da * db;
    let mut out = CMatrix::zeros(n, n);
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                for bp in 0..db {
                    out[(ap * db + b, a * db + bp)] = m[(a * db + b, ap * db + bp)];
                }
            }
        }
    }
    out
}

pub(crate) fn partial_trace_matrix<T: Real>(
    m: &CMatrix<T>,
    shape: BipartiteShape,
    subsystem: Subsystem,
) -> CMatrix<T> {
    let (da, db) = (shape.dim_a, shape.dim_b);
    match subsystem {
        Subsystem::First => CMatrix::from_fn(db, db, |b, bp| {
            (0..da).fold(Complex::from(T::zero()), |acc, a| {
                acc + m[(a * db + b, a * db + bp)]
            })
        }),
        Subsystem::Second => CMatrix::from_fn(da, da, |a, ap| {
            (0..db).fold(Complex::from(T::zero()), |acc, b| {
                acc + m[(a * db + b, ap * db + b)]
            })
        }),
    }
}

/// `V · diag(clip(λ, lo, hi)) · V†` for a Hermitian matrix.
pub(crate) fn clip_spectrum<T: Real>(m: &CMatrix<T>, lo: T, hi: T) -> CMatrix<T> {
    let se = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut scaled = se.eigenvectors.clone();
    for j in 0..n {
        let l = se.eigenvalues[j];
        let c = Complex::from(l.max(lo).min(hi));
        for i in 0..n {
            scaled[(i, j)] *= c;
        }
    }
    scaled * se.eigenvectors.adjoint()
}

fn combine_shape(a: Option<BipartiteShape>, b: Option<BipartiteShape>) -> Option<BipartiteShape> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(x),
        (Some(x), None) | (None, Some(x)) => Some(x),
        _ => None,
    }
}

impl<'a, T: Real> Add<&'a HermitianOperator<T>> for &'a HermitianOperator<T> {
    type Output = HermitianOperator<T>;

    fn add(self, rhs: &'a HermitianOperator<T>) -> HermitianOperator<T> {
        HermitianOperator {
            entries: &self.entries + &rhs.entries,
            shape: combine_shape(self.shape, rhs.shape),
        }
    }
}

impl<'a, T: Real> Sub<&'a HermitianOperator<T>> for &'a HermitianOperator<T> {
    type Output = HermitianOperator<T>;

    fn sub(self, rhs: &'a HermitianOperator<T>) -> HermitianOperator<T> {
        HermitianOperator {
            entries: &self.entries - &rhs.entries,
            shape: combine_shape(self.shape, rhs.shape),
        }
    }
}

impl<T: Real> Neg for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;

    fn neg(self) -> HermitianOperator<T> {
        HermitianOperator {
            entries: -self.entries.clone(),
            shape: self.shape,
        }
    }
}

impl<T: Real> Mul<T> for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;

    fn mul(self, c: T) -> HermitianOperator<T> {
        self.scale(c)
    }
}
