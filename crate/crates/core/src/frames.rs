//! Vector frames and K-frames.

use crate::error::{FrameError, Result};
use crate::fusion::FusionFlags;
use crate::numkit::{self, fro_norm, hermitian_part, pinv, sym_eig, vec_norm, Mat, Tolerances, Vector};
use crate::optools;

/// A finite family `{f_i}` stored as the columns of an `n × m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFrame {
    vectors: Mat,
}

impl VectorFrame {
    pub fn new(vectors: Mat) -> Result<Self> {
        if vectors.ncols() == 0 || vectors.nrows() == 0 {
            return Err(FrameError::EmptyInput("a frame needs at least one vector"));
        }
        numkit::ensure_finite(&vectors)?;
        Ok(VectorFrame { vectors })
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Synthesis operator `T{c_i} = Σ c_i f_i`.
    pub fn vectors(&self) -> &Mat {
        &self.vectors
    }

    /// Analysis operator `f ↦ {⟨f, f_i⟩}`.
    pub fn analysis(&self, f: &Vector) -> Vector {
        self.vectors.adjoint() * f
    }

    pub fn without(&self, index: usize) -> Option<VectorFrame> {
        if self.len() <= 1 {
            return None;
        }
        Some(VectorFrame {
            vectors: self.vectors.clone().remove_column(index),
        })
    }
}

/// Optimal bounds of a frame-like inequality
/// `A·‖K*f‖² ≤ ⟨Sf,f⟩ ≤ B·‖f‖²` together with extremal witnesses.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    /// Always true for finite families.
    pub is_bessel: bool,
    pub lower_ok: bool,
    /// Optimal lower constant; `+∞` when `K = 0`, `0` when the bound fails.
    pub a_opt: f64,
    pub b_opt: f64,
    pub witness_low: Vector,
    pub witness_high: Vector,
    pub tight: bool,
    pub parseval: bool,
    /// Lower constant from the generalized-eigenvalue route (K variants only).
    pub a_cross_check: Option<f64>,
    pub fusion: Option<FusionFlags>,
    pub tol: Tolerances,
}

/// Bounds of `⟨Sf,f⟩` against `‖f‖²` (no `K`) or `‖K*f‖²`.
pub(crate) fn bounds_from_operator(s: &Mat, k: Option<&Mat>, tol: &Tolerances) -> Result<BoundsReport> {
    let eig = sym_eig(s, tol)?;
    let n = s.nrows();
    let b_opt = eig.max();
    let witness_high = eig.eigenvectors.column(n - 1).into_owned();
    match k {
        None => {
            let a_opt = eig.min();
            let tight = (a_opt - b_opt).abs() <= tol.eq_tol * b_opt;
            Ok(BoundsReport {
                is_bessel: true,
                lower_ok: a_opt > tol.psd_tol,
                a_opt,
                b_opt,
                witness_low: eig.eigenvectors.column(0).into_owned(),
                witness_high,
                tight,
                parseval: tight && (a_opt - 1.0).abs() <= tol.eq_tol,
                a_cross_check: None,
                fusion: None,
                tol: *tol,
            })
        }
        Some(k) => {
            numkit::ensure_square(k, "K")?;
            if k.nrows() != n {
                return Err(FrameError::DimensionMismatch(format!(
                    "K is {}x{}, ambient dimension is {n}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            let lower = optools::lower_bound_against(s, k, tol)?;
            let cross = optools::generalized_lower_bound(s, k, tol)?;
            let tight = lower.lower_ok && lower.a_opt.is_finite() && {
                let kk = k * k.adjoint();
                let residual = fro_norm(&(s - kk * numkit::c(lower.a_opt)));
                residual <= tol.eq_tol * fro_norm(s).max(1.0)
            };
            Ok(BoundsReport {
                is_bessel: true,
                lower_ok: lower.lower_ok,
                a_opt: lower.a_opt,
                b_opt,
                witness_low: lower.witness,
                witness_high,
                tight,
                parseval: tight && (lower.a_opt - 1.0).abs() <= tol.eq_tol,
                a_cross_check: Some(cross),
                fusion: None,
                tol: *tol,
            })
        }
    }
}

/// `S = Σ f_i f_i*`.
pub fn frame_operator(frame: &VectorFrame) -> Mat {
    hermitian_part(&(frame.vectors() * frame.vectors().adjoint()))
}

pub fn frame_bounds(frame: &VectorFrame, tol: &Tolerances) -> Result<BoundsReport> {
    bounds_from_operator(&frame_operator(frame), None, tol)
}

pub fn kframe_bounds(frame: &VectorFrame, k: &Mat, tol: &Tolerances) -> Result<BoundsReport> {
    bounds_from_operator(&frame_operator(frame), Some(k), tol)
}

/// `f = Σ ⟨f, S⁻¹f_i⟩ f_i`, checked against the dual order `Σ ⟨f, f_i⟩ S⁻¹f_i`.
pub fn reconstruct(frame: &VectorFrame, f: &Vector, tol: &Tolerances) -> Result<Vector> {
    let (primal, dual) = reconstruct_both(frame, f, tol)?;
    let report = frame_bounds(frame, tol)?;
    let condition = (report.b_opt / report.a_opt).max(1.0);
    let gap = vec_norm(&(&primal - &dual));
    if gap > tol.eq_tol * vec_norm(f).max(1.0) * condition {
        return Err(FrameError::DualOrderMismatch { gap });
    }
    Ok(primal)
}

/// Both reconstruction orders, `(Σ ⟨f, S⁻¹f_i⟩ f_i, Σ ⟨f, f_i⟩ S⁻¹f_i)`.
pub fn reconstruct_both(frame: &VectorFrame, f: &Vector, tol: &Tolerances) -> Result<(Vector, Vector)> {
    if f.len() != frame.ambient_dim() {
        return Err(FrameError::DimensionMismatch(format!(
            "signal has length {}, frame lives in dimension {}",
            f.len(),
            frame.ambient_dim()
        )));
    }
    if !frame_bounds(frame, tol)?.lower_ok {
        return Err(FrameError::NotAFrame);
    }
    let s_inv = pinv(&frame_operator(frame), tol)?;
    let t = frame.vectors();
    // ⟨f, S⁻¹f_i⟩ = f_i* S⁻¹ f since S⁻¹ is Hermitian
    let primal = t * (t.adjoint() * (&s_inv * f));
    let dual = &s_inv * (t * (t.adjoint() * f));
    Ok((primal, dual))
}

/// A frame is exact when removing any single vector destroys the lower bound.
pub fn is_exact(frame: &VectorFrame, tol: &Tolerances) -> Result<bool> {
    if !frame_bounds(frame, tol)?.lower_ok {
        return Ok(false);
    }
    for i in 0..frame.len() {
        if let Some(rest) = frame.without(i) {
            if frame_bounds(&rest, tol)?.lower_ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
