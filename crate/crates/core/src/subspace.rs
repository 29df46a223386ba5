//! Subspaces of `C^n` carried as orthonormal column bases.

use crate::error::{FrameError, Result};
use crate::numkit::{self, fro_norm, identity, orth, svd, Mat, Tolerances, Vector};

/// A subspace of the ambient space, stored as an orthonormal basis.
/// A basis with zero columns is the zero subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Mat,
}

/// An orthogonal projection matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub matrix: Mat,
}

impl Projection {
    /// Idempotent and Hermitian within `eq_tol`.
    pub fn is_valid(&self, tol: &Tolerances) -> bool {
        let p = &self.matrix;
        let scale = fro_norm(p).max(1.0);
        fro_norm(&(p * p - p)) <= tol.eq_tol * scale
            && fro_norm(&(p - p.adjoint())) <= tol.eq_tol * scale
    }

    pub fn apply(&self, f: &Vector) -> Vector {
        &self.matrix * f
    }
}

impl Subspace {
    /// Wraps a basis that must already be orthonormal.
    pub fn from_orthonormal(basis: Mat, tol: &Tolerances) -> Result<Self> {
        numkit::ensure_finite(&basis)?;
        let k = basis.ncols();
        let deviation = fro_norm(&(basis.adjoint() * &basis - identity(k)));
        if deviation > tol.eq_tol {
            return Err(FrameError::NotOrthonormal(deviation));
        }
        Ok(Subspace {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    /// Column span of `vectors`, orthonormalized with a rank-revealing SVD.
    pub fn span(vectors: &Mat, tol: &Tolerances) -> Result<Self> {
        Ok(Subspace {
            ambient_dim: vectors.nrows(),
            basis: orth(vectors, tol)?,
        })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Mat::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn projection(&self) -> Projection {
        Projection {
            matrix: &self.basis * self.basis.adjoint(),
        }
    }

    pub fn project_vector(&self, f: &Vector) -> Vector {
        &self.basis * (self.basis.adjoint() * f)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        self.check_same_ambient(other)?;
        if other.is_zero() {
            return Ok(true);
        }
        if self.is_zero() {
            return Ok(false);
        }
        numkit::range_contains(&self.basis, &other.basis, tol)
    }

    /// Equality as mutual containment; bases are not unique.
    pub fn same_as(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains(other, tol)? && other.contains(self, tol)?)
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim == other.ambient_dim {
            Ok(())
        } else {
            Err(FrameError::DimensionMismatch(format!(
                "subspaces live in dimensions {} and {}",
                self.ambient_dim, other.ambient_dim
            )))
        }
    }
}

pub fn project(w: &Subspace) -> Projection {
    w.projection()
}

/// Frobenius norm of `P_U P_V − P_V P_U`.
pub fn commutator_norm(u: &Subspace, v: &Subspace) -> Result<f64> {
    u.check_same_ambient(v)?;
    let pu = u.projection().matrix;
    let pv = v.projection().matrix;
    Ok(fro_norm(&(&pu * &pv - &pv * &pu)))
}

pub fn commute(u: &Subspace, v: &Subspace, tol: &Tolerances) -> Result<bool> {
    Ok(commutator_norm(u, v)? <= tol.eq_tol)
}

/// `U ∩ V` from the left singular vectors of `P_U P_V` whose singular
/// value (cosine of the principal angle) is within `rank_tol` of one.
pub fn intersect(u: &Subspace, v: &Subspace, tol: &Tolerances) -> Result<Subspace> {
    u.check_same_ambient(v)?;
    if u.is_zero() || v.is_zero() {
        return Ok(Subspace::zero(u.ambient_dim));
    }
    let product = u.projection().matrix * v.projection().matrix;
    let dec = svd(&product)?;
    let k = dec.s.iter().take_while(|&&s| s >= 1.0 - tol.rank_tol).count();
    Ok(Subspace {
        ambient_dim: u.ambient_dim,
        basis: dec.u.columns(0, k).into_owned(),
    })
}

/// External direct sum of subspaces living in (possibly different) spaces.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub subspace: Subspace,
    /// Start row of each summand's ambient block.
    pub offsets: Vec<usize>,
    pub ambient_dims: Vec<usize>,
}

impl DirectSum {
    pub fn total_dim(&self) -> usize {
        self.subspace.ambient_dim
    }

    /// Isometric embedding of the `j`-th ambient space into the sum.
    pub fn embedding(&self, j: usize) -> Mat {
        let mut e = Mat::zeros(self.total_dim(), self.ambient_dims[j]);
        e.view_mut((self.offsets[j], 0), (self.ambient_dims[j], self.ambient_dims[j]))
            .fill_with_identity();
        e
    }

    pub fn embed(&self, j: usize, f: &Vector) -> Vector {
        self.embedding(j) * f
    }
}

pub fn direct_sum(parts: &[Subspace]) -> Result<DirectSum> {
    if parts.is_empty() {
        return Err(FrameError::EmptyInput("direct sum of no subspaces"));
    }
    let ambient_dims: Vec<usize> = parts.iter().map(|p| p.ambient_dim).collect();
    let mut offsets = Vec::with_capacity(parts.len());
    let mut acc = 0;
    for d in &ambient_dims {
        offsets.push(acc);
        acc += d;
    }
    let bases: Vec<Mat> = parts.iter().map(|p| p.basis.clone()).collect();
    Ok(DirectSum {
        subspace: Subspace {
            ambient_dim: acc,
            basis: numkit::block_diag(&bases),
        },
        offsets,
        ambient_dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{real_diag, real_mat, real_vec};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn span_of(rows: &[&[f64]]) -> Subspace {
        Subspace::span(&real_mat(rows), &tol()).unwrap()
    }

    fn e(n: usize, i: usize) -> Subspace {
        let mut b = Mat::zeros(n, 1);
        b[(i, 0)] = numkit::c(1.0);
        Subspace::from_orthonormal(b, &tol()).unwrap()
    }

    #[test]
    fn projection_examples() {
        let p = project(&e(2, 0));
        assert!(fro_norm(&(p.matrix.clone() - real_diag(&[1.0, 0.0]))) < 1e-15);
        assert!(p.is_valid(&tol()));

        let p = project(&Subspace::zero(3));
        assert!(numkit::is_zero(&p.matrix));
        assert_eq!(p.matrix.shape(), (3, 3));

        let diag = span_of(&[&[1.0], &[1.0]]);
        let expected = real_mat(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(fro_norm(&(project(&diag).matrix - expected)) < 1e-15);
    }

    #[test]
    fn from_orthonormal_rejects_skewed_basis() {
        let b = real_mat(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(
            Subspace::from_orthonormal(b, &tol()),
            Err(FrameError::NotOrthonormal(_))
        ));
    }

    #[test]
    fn commute_examples() {
        let t = tol();
        assert!(commute(&e(2, 0), &e(2, 1), &t).unwrap());
        let diag = span_of(&[&[1.0], &[1.0]]);
        assert!(!commute(&e(2, 0), &diag, &t).unwrap());
        // [diag(1,0), ½[[1,1],[1,1]]] = ½[[0,1],[−1,0]]
        let norm = commutator_norm(&e(2, 0), &diag).unwrap();
        assert!((norm - 0.5 * 2f64.sqrt()).abs() < 1e-15);

        let small = e(3, 0);
        let big = span_of(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert!(commute(&small, &big, &t).unwrap());
        assert!(matches!(commute(&e(2, 0), &e(3, 0), &t), Err(FrameError::DimensionMismatch(_))));
    }

    #[test]
    fn intersect_examples() {
        let t = tol();
        let u = span_of(&[&[1.0, 2.0], &[0.0, 1.0], &[3.0, 0.0]]);
        assert!(intersect(&u, &u, &t).unwrap().same_as(&u, &t).unwrap());

        assert!(intersect(&e(2, 0), &e(2, 1), &t).unwrap().is_zero());

        let u = span_of(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let v = span_of(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let i = intersect(&u, &v, &t).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.same_as(&e(3, 1), &t).unwrap());

        // commuting pair: P_{U∩V} = P_U P_V
        let pu = u.projection().matrix;
        let pv = v.projection().matrix;
        assert!(fro_norm(&(i.projection().matrix - pu * pv)) < 1e-9);
    }

    #[test]
    fn direct_sum_examples() {
        let t = tol();
        let s = direct_sum(&[e(2, 0), e(2, 0)]).unwrap();
        assert_eq!(s.total_dim(), 4);
        let expected = span_of(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert!(s.subspace.same_as(&expected, &t).unwrap());

        let w = span_of(&[&[1.0], &[1.0]]);
        let s = direct_sum(&[Subspace::zero(3), w.clone()]).unwrap();
        assert_eq!(s.subspace.dim(), 1);
        let embedded = s.embed(1, &real_vec(&[1.0, 1.0]));
        assert_eq!(embedded.len(), 5);
        let copy = Subspace::span(&(s.embedding(1) * w.basis()), &t).unwrap();
        assert!(s.subspace.same_as(&copy, &t).unwrap());

        let s = direct_sum(&[Subspace::full(2), Subspace::full(3)]).unwrap();
        assert!(s.subspace.same_as(&Subspace::full(5), &t).unwrap());

        assert!(matches!(direct_sum(&[]), Err(FrameError::EmptyInput(_))));
    }

    #[test]
    fn direct_sum_projection_is_block_diagonal() {
        let a = span_of(&[&[1.0, 0.0], &[2.0, 1.0], &[0.0, -1.0]]);
        let b = span_of(&[&[1.0], &[-1.0]]);
        let s = direct_sum(&[a.clone(), b.clone()]).unwrap();
        let expected = numkit::block_diag(&[a.projection().matrix, b.projection().matrix]);
        assert!(fro_norm(&(s.subspace.projection().matrix - expected)) < 1e-9);
    }
}
