//! Fusion frames, K-fusion frames and atomic subspaces.
//!
//! A [`FusionSystem`] is a weighted family `{(W_i, v_i)}` of subspaces of
//! `C^n`. Its synthesis operator acts on the block space `⊕ W_i`, which is
//! coordinatized by concatenating each member's own orthonormal basis in
//! member order; [`synthesis_map`] is the matrix of the synthesis operator in
//! those coordinates.

use crate::error::{FrameError, Result};
use crate::frames::{self, bounds_from_operator, BoundsReport, VectorFrame};
use crate::numkit::{
    self, c, fro_norm, hermitian_part, is_zero, op_norm, pinv, sym_eig, vec_norm, Mat, Tolerances,
    Vector, C64,
};
use crate::optools::{self, KLowerBound};
use crate::subspace::{self, Subspace};

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub subspace: Subspace,
    pub weight: f64,
}

/// Weighted family of subspaces sharing one ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionSystem {
    ambient_dim: usize,
    members: Vec<Member>,
}

impl FusionSystem {
    pub fn new(members: Vec<Member>) -> Result<Self> {
        let first = members
            .first()
            .ok_or(FrameError::EmptyInput("a fusion system needs at least one member"))?;
        let ambient_dim = first.subspace.ambient_dim();
        for (index, m) in members.iter().enumerate() {
            if m.subspace.ambient_dim() != ambient_dim {
                return Err(FrameError::DimensionMismatch(format!(
                    "member {index} lives in dimension {}, expected {ambient_dim}",
                    m.subspace.ambient_dim()
                )));
            }
            if !(m.weight.is_finite() && m.weight > 0.0) {
                return Err(FrameError::InvalidWeight {
                    index,
                    value: m.weight,
                });
            }
        }
        Ok(FusionSystem {
            ambient_dim,
            members,
        })
    }

    pub fn from_pairs(pairs: Vec<(Subspace, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(subspace, weight)| Member { subspace, weight })
                .collect(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }

    /// Dimension of the block space `⊕ W_i`.
    pub fn block_dim(&self) -> usize {
        self.members.iter().map(|m| m.subspace.dim()).sum()
    }

    /// `Σ v_i² ‖P_{W_i} f‖²`.
    pub fn energy(&self, f: &Vector) -> f64 {
        self.members
            .iter()
            .map(|m| m.weight.powi(2) * vec_norm(&m.subspace.project_vector(f)).powi(2))
            .sum()
    }

    fn check_vector(&self, f: &Vector) -> Result<()> {
        if f.len() == self.ambient_dim {
            Ok(())
        } else {
            Err(FrameError::DimensionMismatch(format!(
                "vector has length {}, system lives in dimension {}",
                f.len(),
                self.ambient_dim
            )))
        }
    }
}

/// Element `{f_i}` of the block space, `f_i ∈ W_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllTwoTuple {
    pub blocks: Vec<Vector>,
}

impl EllTwoTuple {
    pub fn zeros(system: &FusionSystem) -> Self {
        EllTwoTuple {
            blocks: vec![Vector::zeros(system.ambient_dim()); system.len()],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.blocks.iter().map(|b| vec_norm(b).powi(2)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `Σ ⟨f_i, g_i⟩`.
    pub fn inner(&self, other: &EllTwoTuple) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| numkit::inner(a, b))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusionFlags {
    /// `S_W = I` and `Σ dim W_i = n`.
    pub orthonormal: bool,
    /// All weights equal.
    pub uniform: bool,
}

/// `S_W = Σ v_i² P_{W_i}`.
pub fn fusion_frame_operator(system: &FusionSystem) -> Mat {
    let n = system.ambient_dim;
    let s = system.members.iter().fold(Mat::zeros(n, n), |acc, m| {
        acc + m.subspace.projection().matrix * c(m.weight.powi(2))
    });
    hermitian_part(&s)
}

fn fusion_flags(system: &FusionSystem, s: &Mat, tol: &Tolerances) -> FusionFlags {
    let n = system.ambient_dim;
    let w0 = system.members[0].weight;
    FusionFlags {
        orthonormal: system.block_dim() == n
            && fro_norm(&(s - Mat::identity(n, n))) <= tol.eq_tol,
        uniform: system
            .members
            .iter()
            .all(|m| (m.weight - w0).abs() <= tol.eq_tol * w0),
    }
}

pub fn fusion_bounds(system: &FusionSystem, tol: &Tolerances) -> Result<BoundsReport> {
    let s = fusion_frame_operator(system);
    let mut report = bounds_from_operator(&s, None, tol)?;
    report.fusion = Some(fusion_flags(system, &s, tol));
    Ok(report)
}

pub fn kfusion_bounds(system: &FusionSystem, k: &Mat, tol: &Tolerances) -> Result<BoundsReport> {
    let s = fusion_frame_operator(system);
    let mut report = bounds_from_operator(&s, Some(k), tol)?;
    report.fusion = Some(fusion_flags(system, &s, tol));
    Ok(report)
}

/// `f ↦ {v_i P_{W_i} f}`.
pub fn analysis(system: &FusionSystem, f: &Vector) -> Result<EllTwoTuple> {
    system.check_vector(f)?;
    Ok(EllTwoTuple {
        blocks: system
            .members
            .iter()
            .map(|m| m.subspace.project_vector(f) * c(m.weight))
            .collect(),
    })
}

/// `{f_i} ↦ Σ v_i f_i`.
pub fn synthesis(system: &FusionSystem, tuple: &EllTwoTuple, tol: &Tolerances) -> Result<Vector> {
    if tuple.blocks.len() != system.len() {
        return Err(FrameError::MemberCountMismatch {
            expected: system.len(),
            found: tuple.blocks.len(),
        });
    }
    let mut out = Vector::zeros(system.ambient_dim);
    for (index, (m, block)) in system.members.iter().zip(&tuple.blocks).enumerate() {
        system.check_vector(block)?;
        let leak = vec_norm(&(m.subspace.project_vector(block) - block));
        if leak > tol.eq_tol * vec_norm(block).max(1.0) {
            return Err(FrameError::BlockNotInSubspace { index, leak });
        }
        out += block * c(m.weight);
    }
    Ok(out)
}

/// `f = Σ v_i S_W⁻¹(v_i P_{W_i} f)` from the measurements `{v_i P_{W_i} f}`.
pub fn fusion_reconstruct(
    system: &FusionSystem,
    measurements: &EllTwoTuple,
    tol: &Tolerances,
) -> Result<Vector> {
    if !fusion_bounds(system, tol)?.lower_ok {
        return Err(FrameError::NotAFusionFrame);
    }
    let s_inv = pinv(&fusion_frame_operator(system), tol)?;
    Ok(s_inv * synthesis(system, measurements, tol)?)
}

/// Matrix of the synthesis operator on the canonical basis of `⊕ W_i`:
/// the column for basis element `e_n` (the `l`-th basis vector of `W_i`)
/// is `v_i e_n^i`.
pub fn synthesis_map(system: &FusionSystem) -> Mat {
    let parts: Vec<Mat> = system
        .members
        .iter()
        .map(|m| m.subspace.basis() * c(m.weight))
        .collect();
    numkit::hstack(system.ambient_dim, &parts)
}

/// Atomic system for `K`: members `(span{K e_n}, ‖K e_n‖)` over the given
/// orthonormal basis, dropping images below `rank_tol·‖K‖`.
pub fn construct_atomic(k: &Mat, basis: &Mat, tol: &Tolerances) -> Result<FusionSystem> {
    numkit::ensure_square(k, "K")?;
    numkit::ensure_finite(k)?;
    let n = k.nrows();
    if basis.nrows() != n || basis.ncols() != n {
        return Err(FrameError::DimensionMismatch(format!(
            "basis must be {n}x{n}, got {}x{}",
            basis.nrows(),
            basis.ncols()
        )));
    }
    let basis = Subspace::from_orthonormal(basis.clone(), tol)?;
    if is_zero(k) {
        return Err(FrameError::ZeroOperator);
    }
    let cutoff = tol.rank_tol * op_norm(k)?;
    let mut members = Vec::new();
    for e in basis.basis().column_iter() {
        let image: Vector = k * e;
        let weight = vec_norm(&image);
        if weight > cutoff {
            let direction = Mat::from_columns(&[image / c(weight)]);
            members.push(Member {
                subspace: Subspace::from_orthonormal(direction, tol)?,
                weight,
            });
        }
    }
    FusionSystem::new(members)
}

/// Minimal-norm Douglas factor `L = T_W†·K`, so that `K = T_W L` whenever
/// the system is a K-fusion frame.
pub fn atomic_factor(system: &FusionSystem, k: &Mat, tol: &Tolerances) -> Result<Mat> {
    check_operator(system, k)?;
    Ok(pinv(&synthesis_map(system), tol)? * k)
}

fn tuple_from_coords(system: &FusionSystem, coords: &Vector) -> EllTwoTuple {
    let mut offset = 0;
    let blocks = system
        .members
        .iter()
        .map(|m| {
            let d = m.subspace.dim();
            let block = m.subspace.basis() * coords.rows(offset, d);
            offset += d;
            block
        })
        .collect();
    EllTwoTuple { blocks }
}

/// `{f_i}` with `Kf = Σ v_i f_i` and `‖{f_i}‖ ≤ ‖L‖·‖f‖`.
pub fn atomic_decompose(
    system: &FusionSystem,
    k: &Mat,
    f: &Vector,
    tol: &Tolerances,
) -> Result<EllTwoTuple> {
    system.check_vector(f)?;
    if !kfusion_bounds(system, k, tol)?.lower_ok {
        return Err(FrameError::NotKFusion);
    }
    let l = atomic_factor(system, k, tol)?;
    Ok(tuple_from_coords(system, &(l * f)))
}

#[derive(Debug, Clone)]
pub struct AtomicReport {
    /// Every `Kf` decomposes through the system: `K = T_W L` for the
    /// minimal-norm factor `L`.
    pub is_atomic: bool,
    pub bessel_b: f64,
    /// Optimal K-fusion lower constant (`+∞` for `K = 0`).
    pub lower_a: f64,
    pub lower_ok: bool,
    /// `‖L‖`, the norm bound constant of the decomposition.
    pub decomposition_c: f64,
    pub factor_l: Mat,
    pub factorization_residual: f64,
    /// Decomposition verdict and K-fusion verdict agree.
    pub consistent: bool,
}

pub fn verify_atomic(system: &FusionSystem, k: &Mat, tol: &Tolerances) -> Result<AtomicReport> {
    let bounds = kfusion_bounds(system, k, tol)?;
    let t = synthesis_map(system);
    let l = atomic_factor(system, k, tol)?;
    let residual = fro_norm(&(&t * &l - k));
    let is_atomic = residual <= tol.eq_tol * fro_norm(k).max(1.0);
    let lower_ok = bounds.lower_ok && bounds.a_opt > tol.psd_tol;
    Ok(AtomicReport {
        is_atomic,
        bessel_b: bounds.b_opt,
        lower_a: bounds.a_opt,
        lower_ok,
        decomposition_c: op_norm(&l)?,
        factor_l: l,
        factorization_residual: residual,
        consistent: is_atomic == lower_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotientVerdict {
    pub bounded: bool,
    pub norm: Option<f64>,
}

/// Boundedness of `[K*/S_W^{1/2}]`.
pub fn kfusion_via_quotient(system: &FusionSystem, k: &Mat, tol: &Tolerances) -> Result<QuotientVerdict> {
    check_operator(system, k)?;
    if is_zero(k) {
        return Ok(QuotientVerdict {
            bounded: true,
            norm: Some(0.0),
        });
    }
    let root = numkit::sqrt_psd(&fusion_frame_operator(system), tol)?;
    match optools::quotient(&k.adjoint(), &root, tol) {
        Ok(q) => Ok(QuotientVerdict {
            bounded: true,
            norm: Some(q.op_norm),
        }),
        Err(FrameError::NullSpaceViolation { .. }) => Ok(QuotientVerdict {
            bounded: false,
            norm: None,
        }),
        Err(e) => Err(e),
    }
}

fn check_operator(system: &FusionSystem, k: &Mat) -> Result<()> {
    let n = system.ambient_dim;
    if k.nrows() != n || k.ncols() != n {
        return Err(FrameError::DimensionMismatch(format!(
            "K is {}x{}, ambient dimension is {n}",
            k.nrows(),
            k.ncols()
        )));
    }
    numkit::ensure_finite(k)
}

fn positive_weights(weights: &[f64]) -> Result<()> {
    for (index, &value) in weights.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(FrameError::InvalidWeight { index, value });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub system: FusionSystem,
    /// Bounds `(A_F, B_F)` of the input K-frame.
    pub frame_bounds: (f64, f64),
    /// `(A_F / B_F)·min v_i²`.
    pub certified_lower: f64,
    /// `|I|·max v_i²`.
    pub certified_upper: f64,
    pub actual: BoundsReport,
}

/// Fusion system of the spans of a partition of a K-frame.
/// `partition` holds zero-based column indices.
pub fn partition_kframe(
    frame: &VectorFrame,
    k: &Mat,
    partition: &[Vec<usize>],
    weights: Option<&[f64]>,
    tol: &Tolerances,
) -> Result<PartitionReport> {
    let m = frame.len();
    let mut seen = vec![false; m];
    for (p, part) in partition.iter().enumerate() {
        if part.is_empty() {
            return Err(FrameError::BadPartition(format!("part {p} is empty")));
        }
        for &j in part {
            if j >= m {
                return Err(FrameError::BadPartition(format!("index {j} out of range for {m} vectors")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(FrameError::BadPartition(format!("index {j} appears twice")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(FrameError::BadPartition(format!("index {missing} is not covered")));
    }
    let ones = vec![1.0; partition.len()];
    let weights = weights.unwrap_or(&ones);
    if weights.len() != partition.len() {
        return Err(FrameError::DimensionMismatch(format!(
            "{} weights for {} parts",
            weights.len(),
            partition.len()
        )));
    }
    positive_weights(weights)?;

    let kb = frames::kframe_bounds(frame, k, tol)?;
    if !kb.lower_ok {
        return Err(FrameError::NotAKFrame);
    }
    let members = partition
        .iter()
        .zip(weights)
        .map(|(part, &weight)| {
            let cols = frame.vectors().select_columns(part.iter());
            Ok(Member {
                subspace: Subspace::span(&cols, tol)?,
                weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let system = FusionSystem::new(members)?;
    let v_min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let v_max = weights.iter().copied().fold(0.0, f64::max);
    let actual = kfusion_bounds(&system, k, tol)?;
    Ok(PartitionReport {
        frame_bounds: (kb.a_opt, kb.b_opt),
        certified_lower: kb.a_opt / kb.b_opt * v_min * v_min,
        certified_upper: partition.len() as f64 * v_max * v_max,
        actual,
        system,
    })
}

#[derive(Debug, Clone)]
pub struct DirectSumReport {
    pub system: FusionSystem,
    /// `K_1 ⊕ K_2 ⊕ …`.
    pub k: Mat,
    /// `(A_j, B_j)` of each input system.
    pub component_bounds: Vec<(f64, f64)>,
    /// `min A_j`.
    pub certified_lower: f64,
    /// `max B_j`.
    pub certified_upper: f64,
    pub actual: BoundsReport,
}

/// Member-wise external direct sum `{(⊕_j W_{ij}, v_i)}` of `K_j`-fusion
/// frames sharing the weights `v_i`.
pub fn direct_sum_kfusion(
    systems: &[FusionSystem],
    ks: &[Mat],
    shared_weights: &[f64],
    tol: &Tolerances,
) -> Result<DirectSumReport> {
    if systems.is_empty() {
        return Err(FrameError::EmptyInput("direct sum of no systems"));
    }
    if ks.len() != systems.len() {
        return Err(FrameError::DimensionMismatch(format!(
            "{} operators for {} systems",
            ks.len(),
            systems.len()
        )));
    }
    positive_weights(shared_weights)?;
    let count = shared_weights.len();
    let mut component_bounds = Vec::with_capacity(systems.len());
    for (j, (system, k)) in systems.iter().zip(ks).enumerate() {
        if system.len() != count {
            return Err(FrameError::MemberCountMismatch {
                expected: count,
                found: system.len(),
            });
        }
        let same = system
            .members
            .iter()
            .zip(shared_weights)
            .all(|(m, &w)| (m.weight - w).abs() <= tol.eq_tol * w);
        if !same {
            return Err(FrameError::WeightMismatch { system: j });
        }
        let b = kfusion_bounds(system, k, tol)?;
        if !b.lower_ok {
            return Err(FrameError::NotKFusion);
        }
        component_bounds.push((b.a_opt, b.b_opt));
    }
    let members = (0..count)
        .map(|i| {
            let parts: Vec<Subspace> = systems.iter().map(|s| s.members[i].subspace.clone()).collect();
            Ok(Member {
                subspace: subspace::direct_sum(&parts)?.subspace,
                weight: shared_weights[i],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let system = FusionSystem::new(members)?;
    let k = numkit::block_diag(ks);
    let actual = kfusion_bounds(&system, &k, tol)?;
    Ok(DirectSumReport {
        certified_lower: component_bounds.iter().map(|b| b.0).fold(f64::INFINITY, f64::min),
        certified_upper: component_bounds.iter().map(|b| b.1).fold(0.0, f64::max),
        component_bounds,
        system,
        k,
        actual,
    })
}

#[derive(Debug, Clone)]
pub struct CombinedReport {
    /// `min_j A_j` over the individual `K_j`-fusion bounds.
    pub common_a: f64,
    pub sum_operator: Mat,
    pub product_operator: Mat,
    /// `A / (Σ|a_j|)²`.
    pub certified_sum: f64,
    /// `A / Π_{j≥2} ‖K_j*‖²`.
    pub certified_product: f64,
    pub actual_sum: BoundsReport,
    pub actual_product: BoundsReport,
}

/// Bounds for `Σ a_j K_j` and `K_1 K_2 ⋯ K_n` from the individual bounds.
pub fn combined_operator_bounds(
    system: &FusionSystem,
    ks: &[Mat],
    coeffs: &[C64],
    tol: &Tolerances,
) -> Result<CombinedReport> {
    if ks.is_empty() {
        return Err(FrameError::EmptyInput("no operators to combine"));
    }
    if coeffs.len() != ks.len() {
        return Err(FrameError::DimensionMismatch(format!(
            "{} coefficients for {} operators",
            coeffs.len(),
            ks.len()
        )));
    }
    let mut common_a = f64::INFINITY;
    for (index, k) in ks.iter().enumerate() {
        check_operator(system, k)?;
        if is_zero(k) {
            return Err(FrameError::ZeroOperatorInProduct { index });
        }
        let b = kfusion_bounds(system, k, tol)?;
        if !b.lower_ok {
            return Err(FrameError::NotKFusion);
        }
        common_a = common_a.min(b.a_opt);
    }
    let n = system.ambient_dim;
    let sum_operator = ks
        .iter()
        .zip(coeffs)
        .fold(Mat::zeros(n, n), |acc, (k, a)| acc + k * *a);
    let product_operator = ks[1..].iter().fold(ks[0].clone(), |acc, k| acc * k);

    let coeff_mass: f64 = coeffs.iter().map(|a| a.norm()).sum();
    let certified_sum = if coeff_mass > 0.0 {
        common_a / (coeff_mass * coeff_mass)
    } else {
        f64::INFINITY
    };
    let mut tail = 1.0;
    for k in &ks[1..] {
        tail *= op_norm(&k.adjoint())?.powi(2);
    }
    Ok(CombinedReport {
        common_a,
        certified_sum,
        certified_product: common_a / tail,
        actual_sum: kfusion_bounds(system, &sum_operator, tol)?,
        actual_product: kfusion_bounds(system, &product_operator, tol)?,
        sum_operator,
        product_operator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictedKind {
    /// Lower bound against `‖P_V f‖²` over all `f`.
    ProjectionFusion,
    /// Lower bound against `‖K*f‖²` over `f ∈ R(P_V)`.
    KFusionOnRange,
}

#[derive(Debug, Clone)]
pub struct RestrictedBounds {
    pub kind: RestrictedKind,
    pub certified_lower: f64,
    pub actual: KLowerBound,
    /// Upper bound over the relevant domain.
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct IntersectReport {
    pub system: FusionSystem,
    pub bessel_before: f64,
    pub bessel_after: f64,
    pub restricted: Option<RestrictedBounds>,
}

/// `{(W_i ∩ V, w_i)}` for projections commuting with `P_V`. Members whose
/// intersection is zero are kept so indices line up with the input.
pub fn intersect_system(
    system: &FusionSystem,
    v: &Subspace,
    k: Option<&Mat>,
    tol: &Tolerances,
) -> Result<IntersectReport> {
    let n = system.ambient_dim;
    if v.ambient_dim() != n {
        return Err(FrameError::DimensionMismatch(format!(
            "V lives in dimension {}, system in {n}",
            v.ambient_dim()
        )));
    }
    for (index, m) in system.members.iter().enumerate() {
        let norm = subspace::commutator_norm(&m.subspace, v)?;
        if norm > tol.eq_tol {
            return Err(FrameError::NonCommutingProjections { index, norm });
        }
    }
    let p_v = v.projection().matrix;
    let p_v_pinv = pinv(&p_v, tol)?;
    if let Some(k) = k {
        check_operator(system, k)?;
        let ks = k.adjoint();
        let norm = fro_norm(&(&p_v_pinv * &ks - &ks * &p_v_pinv));
        if norm > tol.eq_tol * fro_norm(k).max(1.0) {
            return Err(FrameError::CommutationHypothesisFailed { norm });
        }
    }

    let members = system
        .members
        .iter()
        .map(|m| {
            Ok(Member {
                subspace: subspace::intersect(&m.subspace, v, tol)?,
                weight: m.weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = FusionSystem::new(members)?;
    let s_out = fusion_frame_operator(&out);
    let bessel_before = sym_eig(&fusion_frame_operator(system), tol)?.max();
    let bessel_after = sym_eig(&s_out, tol)?.max();

    let restricted = match k {
        None => {
            let original = fusion_bounds(system, tol)?;
            if original.lower_ok {
                let actual = optools::lower_bound_against(&s_out, &p_v, tol)?;
                Some(RestrictedBounds {
                    kind: RestrictedKind::ProjectionFusion,
                    certified_lower: original.a_opt,
                    actual,
                    upper: bessel_after,
                })
            } else {
                None
            }
        }
        Some(k) => {
            let original = kfusion_bounds(system, k, tol)?;
            if !original.lower_ok {
                return Err(FrameError::NotKFusion);
            }
            let pinv_norm = op_norm(&p_v_pinv)?;
            let certified_lower = if pinv_norm > 0.0 {
                original.a_opt / (pinv_norm * pinv_norm)
            } else {
                f64::INFINITY
            };
            // compress to coordinates of V
            let q = v.basis();
            let s_c = hermitian_part(&(q.adjoint() * &s_out * q));
            let k_c = q.adjoint() * k;
            let actual = optools::lower_bound_against(&s_c, &k_c, tol)?;
            let upper = if q.ncols() == 0 { 0.0 } else { sym_eig(&s_c, tol)?.max() };
            Some(RestrictedBounds {
                kind: RestrictedKind::KFusionOnRange,
                certified_lower,
                actual,
                upper,
            })
        }
    };
    Ok(IntersectReport {
        system: out,
        bessel_before,
        bessel_after,
        restricted,
    })
}
