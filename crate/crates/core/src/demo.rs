//! Randomized property runs, one per registered theorem id.
//!
//! Each run draws its instances from a [`Sampler`] seeded with the given
//! seed, so a report depends only on `(id, seed, dim, field, tolerances)`.
//! `max_slack` is the largest observed value of `claimed − achieved` (or of
//! an identity's absolute defect); a run passes when it stays within the
//! run's tolerance and no equivalence disagrees.

use std::fmt;

use crate::error::{FrameError, Result};
use crate::frames::VectorFrame;
use crate::fusion::{self, FusionSystem};
use crate::numkit::{fro_norm, identity, op_norm, pinv, psd_min_eig, range_contains, sym_eig, vec_norm, Field, Mat, Tolerances, C64};
use crate::optools;
use crate::random::{CommutingInstance, Sampler};

pub struct Theorem {
    pub id: &'static str,
    pub claim: &'static str,
    run: fn(&mut Run) -> Result<()>,
}

pub const REGISTRY: &[Theorem] = &[
    Theorem { id: "thm3.2", claim: "atomic construction is tight: sum v^2 |P f|^2 = |K* f|^2", run: atomic_tightness },
    Theorem { id: "thm3.3", claim: "atomic subspace <=> K-fusion frame", run: atomic_equivalence },
    Theorem { id: "thm3.7a", claim: "a fusion frame is a K-fusion frame with A/|K|^2", run: fusion_is_kfusion },
    Theorem { id: "thm3.7b", claim: "a K-fusion frame is a fusion frame for R(K)", run: kfusion_on_range },
    Theorem { id: "cor3.4", claim: "a fusion Bessel system is atomic for its frame operator", run: atomic_for_own_operator },
    Theorem { id: "thm4.2", claim: "[K*/S^1/2] bounded <=> S - A KK* >= 0 with A > 0", run: quotient_vs_majorization },
    Theorem { id: "cor4.3", claim: "fusion frame <=> S_W invertible", run: fusion_iff_invertible },
    Theorem { id: "thm4.4", claim: "quotient-norm and Schur routes give the same A", run: quotient_vs_schur },
    Theorem { id: "thm4.5", claim: "LL* = S_W and R(K) in R(L) <=> K-fusion", run: synthesis_map_range },
    Theorem { id: "thm4.6", claim: "partition floor (A_F/B_F) v_min^2 and ceiling |I| v_max^2", run: partition_bounds },
    Theorem { id: "cor4.7", claim: "1-uniform partition: B <= |I|", run: uniform_partition },
    Theorem { id: "thm4.9", claim: "direct sum bounds min A_j and max B_j", run: direct_sum_bounds },
    Theorem { id: "thm4.10", claim: "sum and product floors A/(sum|a_j|)^2, A/prod|K_j*|^2", run: combined_bounds },
    Theorem { id: "lem4.11", claim: "intersecting with V keeps the Bessel bound", run: intersect_bessel },
    Theorem { id: "thm4.12", claim: "intersected fusion frame is a P_V-fusion frame", run: intersect_projection_fusion },
    Theorem { id: "thm4.13", claim: "intersected K-fusion frame keeps A/|P_V^+|^2 on R(P_V)", run: intersect_kfusion },
    Theorem { id: "douglas", claim: "range inclusion <=> majorization <=> factorization", run: douglas_equivalence },
];

pub fn theorem_ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|t| t.id)
}

pub fn lookup(id: &str) -> Result<&'static Theorem> {
    REGISTRY
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| FrameError::UnknownTheorem(id.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoReport {
    pub id: &'static str,
    pub claim: &'static str,
    pub seed: u64,
    pub dim: usize,
    pub field: Field,
    pub instances: usize,
    pub max_slack: f64,
    pub tolerance: f64,
    pub disagreements: usize,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0 && self.max_slack <= self.tolerance
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem: {}", self.id)?;
        writeln!(f, "claim: {}", self.claim)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "dim: {}", self.dim)?;
        writeln!(f, "field: {}", self.field.as_str())?;
        writeln!(f, "instances: {}", self.instances)?;
        writeln!(f, "max_slack: {:.3e}", self.max_slack)?;
        writeln!(f, "tolerance: {:.3e}", self.tolerance)?;
        writeln!(f, "disagreements: {}", self.disagreements)?;
        writeln!(f, "verdict: {}", if self.passed() { "pass" } else { "fail" })
    }
}

struct Run {
    rng: Sampler,
    n: usize,
    tol: Tolerances,
    tolerance: f64,
    instances: usize,
    max_slack: f64,
    disagreements: usize,
}

impl Run {
    fn slack(&mut self, x: f64) {
        // NaN counts as a violation
        if x.is_nan() {
            self.max_slack = f64::INFINITY;
        } else {
            self.max_slack = self.max_slack.max(x);
        }
    }

    fn agree(&mut self, a: bool, b: bool) {
        if a != b {
            self.disagreements += 1;
        }
    }

    fn expect(&mut self, ok: bool) {
        self.agree(ok, true);
    }
}

pub fn run_demo(id: &str, seed: u64, dim: usize, field: Field, tol: &Tolerances) -> Result<DemoReport> {
    let theorem = lookup(id)?;
    if !(2..=64).contains(&dim) {
        return Err(FrameError::DimensionMismatch(format!("demo dimension must be in 2..=64, got {dim}")));
    }
    let mut run = Run {
        rng: Sampler::new(seed, field),
        n: dim,
        tol: *tol,
        tolerance: 1e-9,
        instances: 0,
        max_slack: f64::NEG_INFINITY,
        disagreements: 0,
    };
    (theorem.run)(&mut run)?;
    Ok(DemoReport {
        id: theorem.id,
        claim: theorem.claim,
        seed,
        dim,
        field,
        instances: run.instances,
        max_slack: run.max_slack,
        tolerance: run.tolerance,
        disagreements: run.disagreements,
    })
}

const PROBES: usize = 10;

/// K-fusion instance generators: `T_W X` always lies in the range of the
/// synthesis operator; the others usually do only when `W` spans.
fn draw_k(r: &mut Run, w: &FusionSystem, case: usize) -> Mat {
    let n = r.n;
    match case % 4 {
        0 => {
            let t = fusion::synthesis_map(w);
            let cols = t.ncols();
            let rank = r.rng.int(1, n.min(cols));
            t * r.rng.low_rank_rect(cols, n, rank)
        }
        1 => {
            let rank = r.rng.int(1, n - 1);
            r.rng.low_rank(n, rank)
        }
        2 => r.rng.matrix(n, n),
        _ => {
            let k = r.rng.int(1, n - 1);
            let p = match r.rng.subspace(n, k, &r.tol) {
                Ok(u) => u.projection().matrix,
                Err(_) => identity(n),
            };
            p * r.rng.matrix(n, n)
        }
    }
}

/// Fusion system that is sometimes a fusion frame and sometimes not.
fn draw_system(r: &mut Run) -> Result<FusionSystem> {
    let n = r.n;
    if r.rng.coin(0.5) {
        r.rng.fusion_frame(n, &r.tol)
    } else {
        let m = r.rng.int(1, n.max(2) - 1);
        r.rng.fusion_system(n, m, (n / 2).max(1), &r.tol)
    }
}

fn atomic_tightness(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let k = r.rng.operator(r.n);
        let basis = r.rng.unitary(r.n, &r.tol)?;
        let w = fusion::construct_atomic(&k, &basis, &r.tol)?;
        for _ in 0..PROBES {
            let f = r.rng.unit_vector(r.n);
            let direct = vec_norm(&(k.adjoint() * &f)).powi(2);
            r.slack((w.energy(&f) - direct).abs());
        }
        let b = fusion::fusion_bounds(&w, &r.tol)?.b_opt;
        r.slack(b - op_norm(&k)?.powi(2));
        r.instances += 1;
    }
    Ok(())
}

fn atomic_equivalence(r: &mut Run) -> Result<()> {
    for i in 0..200 {
        let w = draw_system(r)?;
        let k = draw_k(r, &w, i);
        let report = fusion::verify_atomic(&w, &k, &r.tol)?;
        r.agree(report.is_atomic, report.lower_ok);
        if report.is_atomic {
            r.slack(report.factorization_residual - r.tol.eq_tol * fro_norm(&k).max(1.0));
        }
        r.instances += 1;
    }
    Ok(())
}

fn fusion_is_kfusion(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let w = r.rng.fusion_frame(r.n, &r.tol)?;
        let k = r.rng.operator(r.n);
        let plain = fusion::fusion_bounds(&w, &r.tol)?;
        r.expect(plain.lower_ok);
        let kb = fusion::kfusion_bounds(&w, &k, &r.tol)?;
        r.expect(kb.lower_ok);
        r.slack(plain.a_opt / op_norm(&k)?.powi(2) - kb.a_opt);
        r.instances += 1;
    }
    Ok(())
}

fn kfusion_on_range(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let rank = r.rng.int(1, r.n - 1);
        let k = r.rng.low_rank(r.n, rank);
        let basis = r.rng.unitary(r.n, &r.tol)?;
        let mut members = fusion::construct_atomic(&k, &basis, &r.tol)?.members().to_vec();
        if r.rng.coin(0.5) {
            let d = r.rng.int(1, r.n);
            members.push(fusion::Member {
                subspace: r.rng.subspace(r.n, d, &r.tol)?,
                weight: r.rng.uniform(0.5, 2.0),
            });
        }
        let w = FusionSystem::new(members)?;
        let kb = fusion::kfusion_bounds(&w, &k, &r.tol)?;
        r.expect(kb.lower_ok);
        let constant = kb.a_opt / op_norm(&pinv(&k.adjoint(), &r.tol)?)?.powi(2);
        for _ in 0..PROBES {
            let g = r.rng.vector(r.n);
            let f = &k * g;
            let f = &f / C64::new(vec_norm(&f), 0.0);
            r.slack(constant - w.energy(&f));
        }
        r.instances += 1;
    }
    Ok(())
}

fn atomic_for_own_operator(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let w = draw_system(r)?;
        let s = fusion::fusion_frame_operator(&w);
        let report = fusion::verify_atomic(&w, &s, &r.tol)?;
        r.expect(report.is_atomic && report.consistent);
        r.slack(report.factorization_residual - r.tol.eq_tol * fro_norm(&s).max(1.0));
        r.instances += 1;
    }
    Ok(())
}

fn quotient_vs_majorization(r: &mut Run) -> Result<()> {
    r.tolerance = 1e-10;
    for i in 0..200 {
        let w = draw_system(r)?;
        let k = draw_k(r, &w, i);
        let verdict = fusion::kfusion_via_quotient(&w, &k, &r.tol)?;
        let kb = fusion::kfusion_bounds(&w, &k, &r.tol)?;
        let s = fusion::fusion_frame_operator(&w);
        let scale = fro_norm(&s).max(1.0);
        let holds = kb.a_opt > r.tol.psd_tol && {
            let gap = &s - &k * k.adjoint() * C64::new(kb.a_opt, 0.0);
            let min = psd_min_eig(&crate::numkit::hermitian_part(&gap), &r.tol)?;
            r.slack(-min / scale);
            min >= -r.tol.psd_tol * scale
        };
        r.agree(verdict.bounded, holds);
        r.instances += 1;
    }
    Ok(())
}

fn fusion_iff_invertible(r: &mut Run) -> Result<()> {
    for _ in 0..200 {
        let w = draw_system(r)?;
        let s = fusion::fusion_frame_operator(&w);
        let lower_ok = fusion::fusion_bounds(&w, &r.tol)?.lower_ok;
        let min = sym_eig(&s, &r.tol)?.min();
        r.agree(lower_ok, min > r.tol.psd_tol);
        if lower_ok {
            // inversion error grows with the condition number
            let cond = sym_eig(&s, &r.tol)?.max() / min;
            let inverse = pinv(&s, &r.tol)?;
            r.slack(fro_norm(&(&s * inverse - identity(r.n))) - r.tol.eq_tol * cond);
        }
        r.instances += 1;
    }
    Ok(())
}

fn quotient_vs_schur(r: &mut Run) -> Result<()> {
    r.tolerance = 1e-6;
    for i in 0..200 {
        let w = if i % 2 == 0 { r.rng.fusion_frame(r.n, &r.tol)? } else { draw_system(r)? };
        let k = if i % 2 == 0 { r.rng.operator(r.n) } else { draw_k(r, &w, 0) };
        let s = fusion::fusion_frame_operator(&w);
        let primary = optools::lower_bound_against(&s, &k, &r.tol)?;
        let cross = optools::generalized_lower_bound(&s, &k, &r.tol)?;
        r.expect(primary.lower_ok);
        if primary.a_opt.is_finite() {
            r.slack((primary.a_opt - cross).abs() / primary.a_opt.max(cross));
        }
        r.instances += 1;
    }
    Ok(())
}

fn synthesis_map_range(r: &mut Run) -> Result<()> {
    r.tolerance = 1e-10;
    for i in 0..100 {
        let w = draw_system(r)?;
        let k = draw_k(r, &w, i);
        let l = fusion::synthesis_map(&w);
        let s = fusion::fusion_frame_operator(&w);
        r.slack(fro_norm(&(&l * l.adjoint() - s)));
        let kb = fusion::kfusion_bounds(&w, &k, &r.tol)?;
        r.agree(range_contains(&l, &k, &r.tol)?, kb.lower_ok);
        r.instances += 1;
    }
    Ok(())
}

/// A K-frame: columns `K·G` plus a few random extras. `G` is wide enough to
/// be well conditioned.
fn draw_kframe(r: &mut Run) -> (VectorFrame, Mat) {
    let n = r.n;
    let k = r.rng.operator(n);
    let m = r.rng.int(2 * n, 3 * n);
    let mut cols = k.clone() * r.rng.matrix(n, m);
    if r.rng.coin(0.5) {
        let extra = r.rng.int(1, n);
        let more = r.rng.matrix(n, extra);
        cols = crate::numkit::hstack(n, &[cols, more]);
    }
    (VectorFrame::new(cols).expect("nonempty"), k)
}

fn random_partition(r: &mut Run, m: usize) -> Vec<Vec<usize>> {
    let parts = r.rng.int(1, m);
    let mut idx: Vec<usize> = (0..m).collect();
    r.rng.shuffle(&mut idx);
    let mut out = vec![Vec::new(); parts];
    for (pos, j) in idx.into_iter().enumerate() {
        // first `parts` indices seed distinct parts so none is empty
        let p = if pos < parts { pos } else { r.rng.int(0, parts - 1) };
        out[p].push(j);
    }
    out
}

fn partition_bounds(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let (frame, k) = draw_kframe(r);
        let partition = random_partition(r, frame.len());
        let weights = r.rng.weights(partition.len());
        let report = fusion::partition_kframe(&frame, &k, &partition, Some(&weights), &r.tol)?;
        r.slack(report.certified_lower - report.actual.a_opt);
        r.slack(report.actual.b_opt - report.certified_upper);
        r.instances += 1;
    }
    Ok(())
}

fn uniform_partition(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let (frame, k) = draw_kframe(r);
        let partition = random_partition(r, frame.len());
        let report = fusion::partition_kframe(&frame, &k, &partition, None, &r.tol)?;
        r.slack(report.actual.b_opt - partition.len() as f64);
        r.slack(report.certified_lower - report.actual.a_opt);
        r.instances += 1;
    }
    Ok(())
}

fn direct_sum_bounds(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let parts = r.rng.int(2, 3);
        let count = r.rng.int(2, 4);
        let weights = r.rng.weights(count);
        let mut systems = Vec::with_capacity(parts);
        let mut ks = Vec::with_capacity(parts);
        for _ in 0..parts {
            let nj = r.rng.int(2, (r.n / 2).max(2));
            let members = weights
                .iter()
                .map(|&weight| {
                    let d = r.rng.int(1, nj);
                    Ok(fusion::Member { subspace: r.rng.subspace(nj, d, &r.tol)?, weight })
                })
                .collect::<Result<Vec<_>>>()?;
            let w = FusionSystem::new(members)?;
            let t = fusion::synthesis_map(&w);
            let rank = r.rng.int(1, nj.min(t.ncols()));
            ks.push(t.clone() * r.rng.low_rank_rect(t.ncols(), nj, rank));
            systems.push(w);
        }
        let report = fusion::direct_sum_kfusion(&systems, &ks, &weights, &r.tol)?;
        r.slack(report.certified_lower - report.actual.a_opt);
        r.slack(report.actual.b_opt - report.certified_upper);
        r.instances += 1;
    }
    Ok(())
}

fn combined_bounds(r: &mut Run) -> Result<()> {
    r.tolerance = 1e-8;
    for i in 0..100 {
        let q = r.rng.int(1, 4);
        let frame = i % 2 == 0;
        let w = if frame { r.rng.fusion_frame(r.n, &r.tol)? } else { draw_system(r)? };
        let ks: Vec<Mat> = (0..q)
            .map(|_| if frame { r.rng.operator(r.n) } else { draw_k(r, &w, 0) })
            .collect();
        let coeffs: Vec<C64> = (0..q).map(|_| r.rng.scalar()).collect();
        let report = fusion::combined_operator_bounds(&w, &ks, &coeffs, &r.tol)?;
        r.slack(report.certified_sum - report.actual_sum.a_opt);
        r.slack(report.certified_product - report.actual_product.a_opt);
        r.instances += 1;
    }
    Ok(())
}

/// Commuting instance whose system is a fusion frame.
fn commuting_frame(r: &mut Run) -> Result<CommutingInstance> {
    loop {
        let m = r.rng.int(r.n, 2 * r.n);
        let inst = r.rng.commuting_instance(r.n, m, &r.tol)?;
        if fusion::fusion_bounds(&inst.system, &r.tol)?.lower_ok {
            return Ok(inst);
        }
    }
}

fn intersect_bessel(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let m = r.rng.int(1, 2 * r.n);
        let inst = r.rng.commuting_instance(r.n, m, &r.tol)?;
        let report = fusion::intersect_system(&inst.system, &inst.v, None, &r.tol)?;
        r.slack(report.bessel_after - report.bessel_before);
        r.instances += 1;
    }
    Ok(())
}

fn intersect_projection_fusion(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let inst = commuting_frame(r)?;
        let a = fusion::fusion_bounds(&inst.system, &r.tol)?.a_opt;
        let report = fusion::intersect_system(&inst.system, &inst.v, None, &r.tol)?;
        let restricted = report.restricted.as_ref().expect("fusion frame input");
        r.slack(restricted.certified_lower - restricted.actual.a_opt);
        for _ in 0..PROBES {
            let f = r.rng.unit_vector(r.n);
            let pf = inst.v.project_vector(&f);
            r.slack(a * vec_norm(&pf).powi(2) - report.system.energy(&f));
        }
        r.instances += 1;
    }
    Ok(())
}

fn intersect_kfusion(r: &mut Run) -> Result<()> {
    for _ in 0..100 {
        let inst = commuting_frame(r)?;
        let k = r.rng.commuting_operator(&inst);
        let report = fusion::intersect_system(&inst.system, &inst.v, Some(&k), &r.tol)?;
        let restricted = report.restricted.as_ref().expect("operator given");
        r.slack(restricted.certified_lower - restricted.actual.a_opt);
        for _ in 0..PROBES {
            let g = r.rng.vector(r.n);
            let f = inst.v.project_vector(&g);
            let f = &f / C64::new(vec_norm(&f), 0.0);
            r.slack(restricted.certified_lower * vec_norm(&(k.adjoint() * &f)).powi(2) - report.system.energy(&f));
        }
        r.instances += 1;
    }
    Ok(())
}

fn douglas_equivalence(r: &mut Run) -> Result<()> {
    let n = r.n;
    for _ in 0..100 {
        let q = r.rng.int(1, n);
        let p = r.rng.int(1, n);
        let t = r.rng.matrix(n, q);
        let s = &t * r.rng.matrix(q, p);
        let report = optools::douglas_check(&s, &t, &r.tol)?;
        r.expect(report.range_inclusion && report.majorization_holds && report.factorization_holds);
        if let Some(l) = &report.factor_l {
            r.slack(fro_norm(&(&t * l - &s)) - r.tol.eq_tol * fro_norm(&s).max(1.0));
        }
        r.instances += 1;
    }
    for _ in 0..100 {
        let split = r.rng.int(1, n - 1);
        let basis = r.rng.unitary(n, &r.tol)?;
        let inside = basis.columns(0, split).into_owned();
        let outside = basis.columns(split, n - split).into_owned();
        let q = r.rng.int(1, split);
        let t = &inside * r.rng.matrix(split, q);
        let p = r.rng.int(1, n - split);
        let s = &outside * r.rng.matrix(n - split, p) + &inside * r.rng.matrix(split, p);
        let report = optools::douglas_check(&s, &t, &r.tol)?;
        r.expect(!report.range_inclusion && !report.majorization_holds && !report.factorization_holds);
        r.instances += 1;
    }
    Ok(())
}
