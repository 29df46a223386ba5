//! Operator-theoretic tests: Douglas factorization and quotient operators,
//! plus the lower-bound machinery `S ⪰ A·KK*` built on them.

use crate::error::{FrameError, Result};
use crate::numkit::{
    self, fro_norm, hermitian_part, is_zero, op_norm, pinv, pinv_sqrt_psd, sqrt_psd,
    svd, sym_eig, vec_norm, Mat, Tolerances, Vector,
};

/// Outcome of testing the three equivalent Douglas conditions for `S`, `T`:
/// `R(S) ⊆ R(T)`, `SS* ≤ α·TT*`, and `S = TL`.
#[derive(Debug, Clone)]
pub struct DouglasReport {
    pub range_inclusion: bool,
    /// Smallest `α` with `SS* ≤ α·TT*`; `None` when no such `α` exists.
    pub alpha_min: Option<f64>,
    /// Minimal-norm factor `L = T†S`; `None` when `S ≠ TL` for every `L`.
    pub factor_l: Option<Mat>,
    /// All three conditions, evaluated independently, agree.
    pub consistent: bool,
    pub majorization_holds: bool,
    pub factorization_holds: bool,
    /// `λ_min(α·TT* − SS*)` for the candidate `α`.
    pub majorization_min_eig: f64,
    /// Eigenvector achieving `majorization_min_eig`; equality witness for `α_min`.
    pub witness: Vector,
}

pub fn douglas_check(s: &Mat, t: &Mat, tol: &Tolerances) -> Result<DouglasReport> {
    if s.nrows() != t.nrows() {
        return Err(FrameError::DimensionMismatch(format!(
            "S has {} rows but T has {}",
            s.nrows(),
            t.nrows()
        )));
    }
    numkit::ensure_finite(s)?;
    numkit::ensure_finite(t)?;

    let range_inclusion = numkit::range_contains(t, s, tol)?;

    // α candidate: ‖(TT*)^{†/2} S‖², the best constant on R(T).
    let tt = t * t.adjoint();
    let ss = s * s.adjoint();
    let alpha = op_norm(&(pinv_sqrt_psd(&tt, tol)? * s))?.powi(2);
    let gap = hermitian_part(&(&tt * numkit::c(alpha) - &ss));
    let eig = sym_eig(&gap, tol)?;
    let scale = (alpha * fro_norm(&tt)).max(fro_norm(&ss)).max(1.0);
    let majorization_holds = eig.min() >= -tol.psd_tol * scale;
    let witness = eig.eigenvectors.column(0).into_owned();

    let l = pinv(t, tol)? * s;
    let residual = fro_norm(&(t * &l - s));
    let factorization_holds = residual <= tol.eq_tol * fro_norm(s).max(1.0);

    let consistent =
        range_inclusion == majorization_holds && majorization_holds == factorization_holds;
    Ok(DouglasReport {
        range_inclusion,
        alpha_min: range_inclusion.then_some(alpha),
        factor_l: range_inclusion.then_some(l),
        consistent,
        majorization_holds,
        factorization_holds,
        majorization_min_eig: eig.min(),
        witness,
    })
}

/// The quotient `[A/B]: Bx ↦ Ax`, defined on `R(B)` only.
#[derive(Debug, Clone)]
pub struct QuotientOp {
    /// Orthonormal basis of `R(B)`.
    pub domain_basis: Mat,
    /// Action on `domain_basis` coordinates, valued in the codomain of `A`.
    pub matrix: Mat,
    pub op_norm: f64,
}

impl QuotientOp {
    /// Applies the quotient to a vector of `R(B)` given in ambient coordinates.
    pub fn apply(&self, y: &Vector) -> Vector {
        &self.matrix * (self.domain_basis.adjoint() * y)
    }
}

/// Builds `[A/B]`. Fails with `NullSpaceViolation` unless `N(B) ⊆ N(A)`.
pub fn quotient(a: &Mat, b: &Mat, tol: &Tolerances) -> Result<QuotientOp> {
    if a.ncols() != b.ncols() {
        return Err(FrameError::DimensionMismatch(format!(
            "quotient needs a common domain, got {} and {} columns",
            a.ncols(),
            b.ncols()
        )));
    }
    numkit::ensure_finite(a)?;
    let dec = svd(b)?;
    let r = dec.rank(tol);
    let v_r = dec.v.columns(0, r).into_owned();
    let u_r = dec.u.columns(0, r).into_owned();

    // A restricted to N(B) = R(B*)^⊥ must vanish.
    let leak = fro_norm(&(a - a * &v_r * v_r.adjoint()));
    if leak > tol.eq_tol * fro_norm(a) {
        return Err(FrameError::NullSpaceViolation { leak });
    }

    let mut matrix = a * &v_r;
    for j in 0..r {
        let inv = 1.0 / dec.s[j];
        matrix.column_mut(j).iter_mut().for_each(|z| *z *= inv);
    }
    let norm = op_norm(&matrix)?;
    Ok(QuotientOp {
        domain_basis: u_r,
        matrix,
        op_norm: norm,
    })
}

/// Best constant `A` in `S ⪰ A·KK*`.
#[derive(Debug, Clone)]
pub struct KLowerBound {
    /// `N(S^{1/2}) ⊆ N(K*)`, i.e. some positive `A` exists.
    pub lower_ok: bool,
    /// `+∞` when `K = 0`, `0` when no positive constant exists.
    pub a_opt: f64,
    /// Norm of `[K*/S^{1/2}]` when the quotient is well defined.
    pub quotient_norm: Option<f64>,
    /// Unit vector attaining `⟨Sf,f⟩ = A_opt·‖K*f‖²`; when the bound fails,
    /// a unit vector with `Sf = 0` and `K*f ≠ 0`.
    pub witness: Vector,
}

/// Optimal lower constant through the quotient `[K*/S^{1/2}]`:
/// `A_opt = 1/‖[K*/S^{1/2}]‖²`.
pub fn lower_bound_against(s: &Mat, k: &Mat, tol: &Tolerances) -> Result<KLowerBound> {
    let n = s.nrows();
    if k.nrows() != n {
        return Err(FrameError::DimensionMismatch(format!(
            "K has {} rows, expected {n}",
            k.nrows()
        )));
    }
    numkit::ensure_finite(k)?;
    let mut first = Vector::zeros(n);
    if n > 0 {
        first[0] = numkit::c(1.0);
    }
    if is_zero(k) {
        return Ok(KLowerBound {
            lower_ok: true,
            a_opt: f64::INFINITY,
            quotient_norm: Some(0.0),
            witness: first,
        });
    }
    let root = sqrt_psd(s, tol)?;
    match quotient(&k.adjoint(), &root, tol) {
        Ok(q) => {
            let dec = svd(&q.matrix)?;
            let norm = q.op_norm;
            let a_opt = if norm > 0.0 { 1.0 / (norm * norm) } else { f64::INFINITY };
            let witness = if dec.s.is_empty() {
                first
            } else {
                let y = &q.domain_basis * dec.v.column(0);
                normalize(pinv(&root, tol)? * y).unwrap_or(first)
            };
            Ok(KLowerBound {
                lower_ok: true,
                a_opt,
                quotient_norm: Some(norm),
                witness,
            })
        }
        Err(FrameError::NullSpaceViolation { .. }) => {
            let p = numkit::range_projector(s, tol)?;
            let leak = (Mat::identity(n, n) - p) * k;
            let dec = svd(&leak)?;
            let witness = if dec.s.is_empty() {
                first
            } else {
                dec.u.column(0).into_owned()
            };
            Ok(KLowerBound {
                lower_ok: false,
                a_opt: 0.0,
                quotient_norm: None,
                witness,
            })
        }
        Err(e) => Err(e),
    }
}

/// Independent route to the same constant: split `f = f_R + f_N` along
/// `R(K) ⊕ N(K*)`, minimize `⟨Sf,f⟩` over `f_N` (Schur complement of the
/// `N(K*)` block), then take the smallest generalized eigenvalue of the
/// pencil `(Schur, KK*|_{R(K)})`.
///
/// Returns `+∞` for `K = 0` and a value near zero when no positive bound exists.
pub fn generalized_lower_bound(s: &Mat, k: &Mat, tol: &Tolerances) -> Result<f64> {
    if is_zero(k) {
        return Ok(f64::INFINITY);
    }
    // split along the SVD of K so the cutoff sees σ, not σ²
    let dec = svd(k)?;
    let rank = dec.rank(tol);
    if rank == 0 {
        return Ok(f64::INFINITY);
    }
    let sigma = &dec.s[..rank];
    let q = dec.u.columns(0, rank).into_owned();
    let nb = numkit::null_complement(&q)?;

    let s_rr = q.adjoint() * s * &q;
    let schur = if nb.ncols() == 0 {
        s_rr
    } else {
        let s_rn = q.adjoint() * s * &nb;
        let s_nn = hermitian_part(&(nb.adjoint() * s * &nb));
        // the block can be tiny in absolute terms; cut relative to ‖S‖
        let cut = tol.rank_tol * op_norm(s)?;
        let s_nn_pinv = sym_eig(&s_nn, tol)?.apply_spectral(|x| if x > cut { 1.0 / x } else { 0.0 });
        &s_rr - &s_rn * s_nn_pinv * s_rn.adjoint()
    };
    // smallest eigenvalue of the pencil (Schur, Σ²) as the reciprocal of
    // the largest one of (Σ², Schur), which is well conditioned
    let eig = sym_eig(&hermitian_part(&schur), tol)?;
    if eig.min() <= tol.rank_tol * op_norm(s)? {
        return Ok(0.0);
    }
    let inv_root = eig.apply_spectral(|x| 1.0 / x.sqrt());
    let mut m = inv_root;
    for (b, &sb) in sigma.iter().enumerate() {
        m.column_mut(b).iter_mut().for_each(|z| *z *= sb);
    }
    Ok(1.0 / op_norm(&m)?.powi(2))
}

fn normalize(v: Vector) -> Option<Vector> {
    let n = vec_norm(&v);
    (n > 0.0).then(|| v / numkit::c(n))
}
