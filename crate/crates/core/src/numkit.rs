//! Dense kernels shared by every other module: Hermitian eigendecomposition,
//! SVD, Moore-Penrose pseudo-inverse, PSD tests and range inclusion.
//!
//! Matrices are `DMatrix<Complex<f64>>`. The real field is represented by
//! matrices whose imaginary parts are all zero; [`Field::detect`] recovers the
//! tag when it matters (serialization, sampling).

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Scalar field of a matrix or of a whole problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn detect(m: &Mat) -> Field {
        if m.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        }
    }

    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "real" => Ok(Field::Real),
            "complex" => Ok(Field::Complex),
            other => Err(format!("unknown field `{other}` (expected real or complex)")),
        }
    }
}

/// Numerical slack used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Allowed eigenvalue negativity when testing positive semidefiniteness.
    pub psd_tol: f64,
    /// Slack for matrix equalities.
    pub eq_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-10,
            psd_tol: 1e-10,
            eq_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(rank_tol: f64, psd_tol: f64, eq_tol: f64) -> Result<Self> {
        let all_positive = [rank_tol, psd_tol, eq_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !all_positive {
            return Err(FrameError::InvalidTolerances("all tolerances must be positive"));
        }
        if rank_tol >= 1.0 {
            return Err(FrameError::InvalidTolerances("rank_tol must be below 1"));
        }
        Ok(Tolerances {
            rank_tol,
            psd_tol,
            eq_tol,
        })
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

impl EigDecomp {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> Mat {
        self.apply_spectral(|l| l)
    }

    /// `V diag(g(λ)) V*`.
    pub fn apply_spectral(&self, g: impl Fn(f64) -> f64) -> Mat {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, lambda) in self.eigenvalues.iter().enumerate() {
            let gl = g(*lambda);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= gl);
        }
        scaled * v.adjoint()
    }
}

/// Thin singular value decomposition `M = U diag(s) V*`, `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

impl Svd {
    /// Singular values strictly above `rank_tol · s_max`.
    pub fn rank(&self, tol: &Tolerances) -> usize {
        let cut = self.cutoff(tol);
        self.s.iter().take_while(|&&s| s > cut).count()
    }

    pub fn cutoff(&self, tol: &Tolerances) -> f64 {
        tol.rank_tol * self.s.first().copied().unwrap_or(0.0)
    }

    /// Orthonormal basis of the column space.
    pub fn range_basis(&self, tol: &Tolerances) -> Mat {
        self.u.columns(0, self.rank(tol)).into_owned()
    }

    /// Orthonormal basis of the row space (range of `M*`).
    pub fn corange_basis(&self, tol: &Tolerances) -> Mat {
        self.v.columns(0, self.rank(tol)).into_owned()
    }
}

pub fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

/// Real matrix from row slices.
pub fn real_mat(rows: &[&[f64]]) -> Mat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    Mat::from_fn(r, cols, |i, j| c(rows[i][j]))
}

pub fn real_diag(d: &[f64]) -> Mat {
    Mat::from_diagonal(&Vector::from_iterator(d.len(), d.iter().map(|x| c(*x))))
}

pub fn real_vec(v: &[f64]) -> Vector {
    Vector::from_iterator(v.len(), v.iter().map(|x| c(*x)))
}

pub fn fro_norm(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨f, g⟩`, linear in the first argument.
pub fn inner(f: &Vector, g: &Vector) -> C64 {
    g.dotc(f)
}

pub fn is_zero(m: &Mat) -> bool {
    m.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

pub fn ensure_finite(m: &Mat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(FrameError::NonFinite)
    }
}

pub fn ensure_square(m: &Mat, what: &str) -> Result<()> {
    if m.nrows() == m.ncols() {
        Ok(())
    } else {
        Err(FrameError::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * c(0.5)
}

/// Checks `‖M − M*‖ ≤ eq_tol·‖M‖` (Frobenius).
pub fn check_hermitian(m: &Mat, tol: &Tolerances) -> Result<()> {
    ensure_square(m, "Hermitian matrix")?;
    let asymmetry = fro_norm(&(m - m.adjoint()));
    let allowed = tol.eq_tol * fro_norm(m);
    if asymmetry <= allowed {
        Ok(())
    } else {
        Err(FrameError::NotHermitian { asymmetry, allowed })
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn sym_eig(m: &Mat, tol: &Tolerances) -> Result<EigDecomp> {
    ensure_finite(m)?;
    check_hermitian(m, tol)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(EigDecomp {
            eigenvalues: Vec::new(),
            eigenvectors: Mat::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = Mat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigDecomp {
        eigenvalues,
        eigenvectors,
    })
}

/// Thin SVD with singular values sorted descending.
pub fn svd(m: &Mat) -> Result<Svd> {
    ensure_finite(m)?;
    let (r, cols) = m.shape();
    let k = r.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: Mat::zeros(r, 0),
            s: Vec::new(),
            v: Mat::zeros(cols, 0),
        });
    }
    // nalgebra's bidiagonal SVD loses accuracy on some rank-deficient
    // inputs, so the decomposition goes through faer.
    let a = faer::Mat::<C64>::from_fn(r, cols, |i, j| m[(i, j)]);
    let dec = a
        .thin_svd()
        .map_err(|_| FrameError::NonFinite)?;
    let (u, s, v) = (dec.U(), dec.S().column_vector(), dec.V());
    Ok(Svd {
        u: Mat::from_fn(r, k, |i, j| u[(i, j)]),
        s: (0..k).map(|j| s[j].re).collect(),
        v: Mat::from_fn(cols, k, |i, j| v[(i, j)]),
    })
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &Mat) -> Result<f64> {
    Ok(svd(m)?.s.first().copied().unwrap_or(0.0))
}

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
pub fn pinv(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    let dec = svd(m)?;
    let rank = dec.rank(tol);
    let mut v_scaled = dec.v.columns(0, rank).into_owned();
    for j in 0..rank {
        let inv = 1.0 / dec.s[j];
        v_scaled.column_mut(j).iter_mut().for_each(|z| *z *= inv);
    }
    Ok(v_scaled * dec.u.columns(0, rank).adjoint())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn psd_min_eig(m: &Mat, tol: &Tolerances) -> Result<f64> {
    Ok(sym_eig(m, tol)?.min())
}

/// Orthogonal projection onto the column space of `m`.
pub fn range_projector(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    let q = svd(m)?.range_basis(tol);
    Ok(&q * q.adjoint())
}

/// Orthonormal basis of the column space of `m`.
pub fn orth(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    Ok(svd(m)?.range_basis(tol))
}

/// Orthonormal basis of the orthogonal complement of `R(q)` for a matrix
/// `q` with orthonormal columns.
pub fn null_complement(q: &Mat) -> Result<Mat> {
    let n = q.nrows();
    let residual = identity(n) - q * q.adjoint();
    let dec = svd(&residual)?;
    let k = n - q.ncols();
    Ok(dec.u.columns(0, k).into_owned())
}

/// Residual `‖(I − P_{R(T)})·S‖` of projecting the columns of `S` onto `R(T)`.
pub fn range_residual(t: &Mat, s: &Mat, tol: &Tolerances) -> Result<f64> {
    if t.nrows() != s.nrows() {
        return Err(FrameError::DimensionMismatch(format!(
            "range test needs equal row counts, got {} and {}",
            t.nrows(),
            s.nrows()
        )));
    }
    ensure_finite(s)?;
    let q = orth(t, tol)?;
    let projected = &q * (q.adjoint() * s);
    Ok(fro_norm(&(s - projected)))
}

/// `R(S) ⊆ R(T)`, judged by `‖(I − P_{R(T)})·S‖ ≤ rank_tol·max(1, ‖S‖)`.
pub fn range_contains(t: &Mat, s: &Mat, tol: &Tolerances) -> Result<bool> {
    let residual = range_residual(t, s, tol)?;
    Ok(residual <= tol.rank_tol * fro_norm(s).max(1.0))
}

/// Eigendecomposition of a PSD matrix with roundoff negativity clipped and
/// eigenvalues below the rank cutoff set to exactly zero.
pub fn psd_eig(m: &Mat, tol: &Tolerances) -> Result<EigDecomp> {
    let mut eig = sym_eig(m, tol)?;
    let top = eig.max().max(0.0);
    let min = eig.min();
    if min < -tol.psd_tol * top.max(1.0) {
        return Err(FrameError::NotPositiveSemidefinite { min_eig: min });
    }
    let cut = tol.rank_tol * top;
    for l in eig.eigenvalues.iter_mut() {
        if *l <= cut {
            *l = 0.0;
        }
    }
    Ok(eig)
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    Ok(psd_eig(m, tol)?.apply_spectral(f64::sqrt))
}

/// Pseudo-inverse of the principal square root of a PSD matrix.
pub fn pinv_sqrt_psd(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    Ok(psd_eig(m, tol)?.apply_spectral(|l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Block-diagonal matrix `B₁ ⊕ B₂ ⊕ …`.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), b.shape()).copy_from(b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// Horizontal concatenation; `rows` fixes the height when `parts` is empty.
pub fn hstack(rows: usize, parts: &[Mat]) -> Mat {
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut c0 = 0;
    for p in parts {
        out.view_mut((0, c0), p.shape()).copy_from(p);
        c0 += p.ncols();
    }
    out
}
