//! Seeded random instances.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, so a
//! seed reproduces the same stream on every platform. Real entries are
//! standard normal; complex entries are `(x + iy)/√2` with `x, y` standard
//! normal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fusion::{FusionSystem, Member};
use crate::numkit::{orth, vec_norm, Field, Mat, Tolerances, Vector, C64};
use crate::subspace::Subspace;

pub struct Sampler {
    rng: ChaCha8Rng,
    field: Field,
}

/// A fusion system whose projections all commute with `P_V`, built from the
/// columns of one random unitary.
pub struct CommutingInstance {
    pub system: FusionSystem,
    pub v: Subspace,
    /// Unitary whose columns diagonalize every projection.
    pub frame: Mat,
    /// Column indices of `frame` spanning `V`.
    pub v_columns: Vec<usize>,
}

impl Sampler {
    pub fn new(seed: u64, field: Field) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            field,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn scalar(&mut self) -> C64 {
        match self.field {
            Field::Real => C64::new(self.normal(), 0.0),
            Field::Complex => C64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn shuffle(&mut self, items: &mut [usize]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.rng);
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| self.scalar())
    }

    pub fn vector(&mut self, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| self.scalar())
    }

    pub fn unit_vector(&mut self, n: usize) -> Vector {
        loop {
            let v = self.vector(n);
            let norm = vec_norm(&v);
            if norm > 1e-8 {
                return v / C64::new(norm, 0.0);
            }
        }
    }

    /// Random weights in `[0.5, 2)`.
    pub fn weights(&mut self, m: usize) -> Vec<f64> {
        (0..m).map(|_| self.uniform(0.5, 2.0)).collect()
    }

    /// Generic `k`-dimensional subspace of `C^n`.
    pub fn subspace(&mut self, n: usize, k: usize, tol: &Tolerances) -> Result<Subspace> {
        Subspace::span(&self.matrix(n, k), tol)
    }

    pub fn unitary(&mut self, n: usize, tol: &Tolerances) -> Result<Mat> {
        loop {
            let q = orth(&self.matrix(n, n), tol)?;
            if q.ncols() == n {
                return Ok(q);
            }
        }
    }

    /// `n × n` operator of rank at most `r`, a product of tall-thin factors.
    pub fn low_rank(&mut self, n: usize, r: usize) -> Mat {
        self.low_rank_rect(n, n, r)
    }

    /// `rows × cols` matrix of rank at most `r`.
    pub fn low_rank_rect(&mut self, rows: usize, cols: usize, r: usize) -> Mat {
        self.matrix(rows, r) * self.matrix(r, cols)
    }

    /// Operator of random rank in `1..=n`; rank deficient about half the time.
    pub fn operator(&mut self, n: usize) -> Mat {
        if n > 1 && self.coin(0.5) {
            let r = self.int(1, n - 1);
            self.low_rank(n, r)
        } else {
            self.matrix(n, n)
        }
    }

    /// `m` members of random dimension `1..=max_dim` with random weights.
    pub fn fusion_system(&mut self, n: usize, m: usize, max_dim: usize, tol: &Tolerances) -> Result<FusionSystem> {
        let mut members = Vec::with_capacity(m);
        for _ in 0..m {
            let k = self.int(1, max_dim.clamp(1, n));
            members.push(Member {
                subspace: self.subspace(n, k, tol)?,
                weight: self.uniform(0.5, 2.0),
            });
        }
        FusionSystem::new(members)
    }

    /// Fusion system whose dimensions add up to at least `n`, hence
    /// generically a fusion frame.
    pub fn fusion_frame(&mut self, n: usize, tol: &Tolerances) -> Result<FusionSystem> {
        let mut members = Vec::new();
        let mut total = 0;
        while total < n || members.len() < 2 {
            let k = self.int(1, n.div_ceil(2).max(1));
            total += k;
            members.push(Member {
                subspace: self.subspace(n, k, tol)?,
                weight: self.uniform(0.5, 2.0),
            });
        }
        FusionSystem::new(members)
    }

    /// `m` vectors in `C^n`.
    pub fn frame_vectors(&mut self, n: usize, m: usize) -> Mat {
        self.matrix(n, m)
    }

    /// Members spanned by random nonempty subsets of the columns of one
    /// unitary `Q`; `V` is spanned by another such subset.
    pub fn commuting_instance(&mut self, n: usize, m: usize, tol: &Tolerances) -> Result<CommutingInstance> {
        let q = self.unitary(n, tol)?;
        let mut members = Vec::with_capacity(m);
        for _ in 0..m {
            let cols = self.column_subset(n);
            members.push(Member {
                subspace: Subspace::from_orthonormal(q.select_columns(cols.iter()), tol)?,
                weight: self.uniform(0.5, 2.0),
            });
        }
        let v_columns = self.column_subset(n);
        let v = Subspace::from_orthonormal(q.select_columns(v_columns.iter()), tol)?;
        Ok(CommutingInstance {
            system: FusionSystem::new(members)?,
            v,
            frame: q,
            v_columns,
        })
    }

    /// Operator commuting with `P_V` for a commuting instance: block
    /// diagonal in the instance's unitary, split along `V` and `V^⊥`.
    pub fn commuting_operator(&mut self, instance: &CommutingInstance) -> Mat {
        let q = &instance.frame;
        let n = q.nrows();
        let inside: Vec<bool> = (0..n).map(|j| instance.v_columns.contains(&j)).collect();
        let mut core = self.matrix(n, n);
        for i in 0..n {
            for j in 0..n {
                if inside[i] != inside[j] {
                    core[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        q * core * q.adjoint()
    }

    fn column_subset(&mut self, n: usize) -> Vec<usize> {
        let k = self.int(1, n);
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx.truncate(k);
        idx.sort_unstable();
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{fro_norm, identity};
    use crate::subspace::commute;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Sampler::new(11, Field::Complex);
        let mut b = Sampler::new(11, Field::Complex);
        assert_eq!(a.matrix(3, 4), b.matrix(3, 4));
        let mut c = Sampler::new(12, Field::Complex);
        assert_ne!(a.matrix(3, 4), c.matrix(3, 4));
    }

    #[test]
    fn real_field_has_no_imaginary_part() {
        let mut s = Sampler::new(3, Field::Real);
        assert_eq!(Field::detect(&s.matrix(5, 5)), Field::Real);
        let mut s = Sampler::new(3, Field::Complex);
        assert_eq!(Field::detect(&s.matrix(5, 5)), Field::Complex);
    }

    #[test]
    fn unitary_and_low_rank() {
        let tol = Tolerances::default();
        let mut s = Sampler::new(5, Field::Complex);
        let q = s.unitary(6, &tol).unwrap();
        assert!(fro_norm(&(q.adjoint() * &q - identity(6))) < 1e-12);
        let k = s.low_rank(6, 2);
        assert_eq!(crate::numkit::svd(&k).unwrap().rank(&tol), 2);
    }

    #[test]
    fn commuting_instances_commute() {
        let tol = Tolerances::default();
        let mut s = Sampler::new(9, Field::Real);
        let inst = s.commuting_instance(5, 4, &tol).unwrap();
        for m in inst.system.members() {
            assert!(commute(&m.subspace, &inst.v, &tol).unwrap());
        }
        let k = s.commuting_operator(&inst);
        let p = inst.v.projection().matrix;
        assert!(fro_norm(&(&p * &k - &k * &p)) < 1e-10);
    }
}
