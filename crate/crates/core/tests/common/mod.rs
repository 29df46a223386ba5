#![allow(dead_code)]

use framekit::numkit::{c, Field, Mat, Vector, C64};
use framekit::random::Sampler;

pub fn field(complex: bool) -> Field {
    if complex {
        Field::Complex
    } else {
        Field::Real
    }
}

pub fn sampler(seed: u64, complex: bool) -> Sampler {
    Sampler::new(seed, field(complex))
}

pub fn norm(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt with one reorthogonalization pass; columns whose
/// residual falls below `drop · scale` are discarded.
pub fn gram_schmidt(m: &Mat, drop: f64) -> Mat {
    let scale = fro(m).max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vector> = Vec::new();
    for col in m.column_iter() {
        let mut v: Vector = col.into_owned();
        for _ in 0..2 {
            for q in &basis {
                let p = q.dotc(&v);
                v -= q * p;
            }
        }
        let n = norm(&v);
        if n > drop * scale {
            basis.push(v / c(n));
        }
    }
    if basis.is_empty() {
        Mat::zeros(m.nrows(), 0)
    } else {
        Mat::from_columns(&basis)
    }
}

/// Residual of projecting the columns of `s` off the span of `basis`.
pub fn off_span(basis: &Mat, s: &Mat) -> f64 {
    if basis.ncols() == 0 {
        return fro(s);
    }
    fro(&(s - basis * (basis.adjoint() * s)))
}

/// Eigenvalues of a Hermitian matrix through nalgebra's own solver, as
/// an oracle independent of the crate's wrappers.
pub fn eigenvalues(m: &Mat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `Σ v_i² ‖P_i f‖²` evaluated from explicit projection matrices.
pub fn weighted_energy(projections: &[(Mat, f64)], f: &Vector) -> f64 {
    projections
        .iter()
        .map(|(p, w)| w * w * norm(&(p * f)).powi(2))
        .sum()
}

pub fn unit(s: &mut Sampler, n: usize) -> Vector {
    s.unit_vector(n)
}

pub fn real(x: f64) -> C64 {
    c(x)
}
