//! Dense complex-matrix primitives used by the quantum layer.
//!
//! Matrices are small (dimension 2 to 8 in practice) and stored row-major.
//! Hermitian eigenproblems are solved with cyclic Jacobi rotations, which is
//! slow for large matrices but unconditionally stable and deterministic.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for entrywise matrix comparisons.
pub const ATOL: f64 = 1e-10;
/// Relative tolerance for reconstruction, idempotency and completeness checks.
pub const RTOL: f64 = 1e-8;
/// Default eigenvalue cutoff for supports.
pub const SUPPORT_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;
/// Eigenvalues below this multiple of the spectral radius are round-off.
const NOISE_FLOOR: f64 = 1e-14;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from a flat row-major entry list.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimMismatch(dim * dim, entries.len()));
        }
        Ok(Self { dim, entries })
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "ragged rows");
        Self {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Rank-one operator |v⟩⟨v|.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diag_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    /// Kronecker product `self ⊗ other`; `self` is the leading tensor factor.
    pub fn kron(&self, other: &Self) -> Self {
        let n = self.dim * other.dim;
        let mut m = Self::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m[(i * other.dim + k, j * other.dim + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`. Dimensions must agree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, atol: f64) -> bool {
        self.hermiticity_error() <= atol
    }

    /// `(M + M†) / 2`, with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// True when `M M† = 1` to `RTOL`.
    pub fn is_unitary(&self) -> bool {
        (self * &self.adjoint()).max_abs_diff(&Self::identity(self.dim)) <= RTOL
    }

    /// True when `M` is Hermitian and idempotent to `RTOL`.
    pub fn is_projector(&self) -> bool {
        self.is_hermitian(RTOL) && (self * self).max_abs_diff(self) <= RTOL
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.entries[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim());
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            m = &m + &ComplexMatrix::outer(v).scale_real(w);
        }
        m
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.compose(|x| x)
    }

    pub fn rank_above(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&x| x > tol).count()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come back in descending order. Each eigenvector's global phase is
/// fixed so its largest-magnitude component is real and positive.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    let herr = m.hermiticity_error();
    if herr > ATOL {
        return Err(Error::NotHermitian(herr));
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let col: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
            (a[(k, k)].re, fix_phase(col))
        })
        .collect();
    // Stable sort keeps index order among exactly equal eigenvalues.
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let z = a[(p, q)];
    let r = z.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    // Phase e^{-iθ} turns the 2x2 block real symmetric, then a real rotation
    // diagonalises it.
    let phase = z.conj() / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G = diag(1, phase) · [[c, s], [-s, c]]
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    // A ← A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Rotates the global phase so the largest-magnitude component is real positive.
/// Ties within 1e-12 resolve to the lowest index.
pub fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("max is attained");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
    v
}

fn check_psd(spectrum: &Spectrum) -> Result<()> {
    match spectrum.eigenvalues.last() {
        Some(&lowest) if lowest < -ATOL => Err(Error::NotPsd(lowest)),
        _ => Ok(()),
    }
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-ATOL, 0)` are clamped to zero, as are positive eigenvalues
/// at round-off level relative to the largest one; the square root would
/// otherwise inflate `1e-17` noise to `3e-9`.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eig(m)?;
    check_psd(&spectrum)?;
    let floor = NOISE_FLOOR * spectrum.eigenvalues.first().map_or(0.0, |x| x.abs());
    Ok(spectrum
        .compose(|x| if x > floor { x.sqrt() } else { 0.0 })
        .hermitian_part())
}

/// Star product `M ⋆ N = N^{1/2} M N^{1/2}`.
pub fn star_product(m: &ComplexMatrix, n: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.check_same_dim(n)?;
    let root = psd_sqrt(n)?;
    let out = &(&root * m) * &root;
    if m.is_hermitian(ATOL) {
        Ok(out.hermitian_part())
    } else {
        Ok(out)
    }
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above `tol`.
pub fn support_projector(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eig(m)?;
    check_psd(&spectrum)?;
    Ok(spectrum
        .compose(|x| if x > tol { 1.0 } else { 0.0 })
        .hermitian_part())
}

/// Orthonormal basis of `range(p) ∩ range(q)`: eigenvectors of `p + q` with
/// eigenvalue `2` (within `tol`).
pub fn subspace_intersection_basis(
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    tol: f64,
) -> Result<Vec<Vec<Complex64>>> {
    p.check_same_dim(q)?;
    if !p.is_projector() || !q.is_projector() {
        return Err(Error::NotProjector);
    }
    let spectrum = hermitian_eig(&(p + q).hermitian_part())?;
    Ok(spectrum
        .eigenvalues
        .iter()
        .zip(spectrum.eigenvectors)
        .filter(|(&lambda, _)| lambda > 2.0 - tol)
        .map(|(_, v)| v)
        .collect())
}

/// Dimension of `range(p) ∩ range(q)` for orthogonal projectors `p`, `q`.
pub fn subspace_intersection_rank(p: &ComplexMatrix, q: &ComplexMatrix, tol: f64) -> Result<usize> {
    Ok(subspace_intersection_basis(p, q, tol)?.len())
}
