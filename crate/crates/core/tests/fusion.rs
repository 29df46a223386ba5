mod common;

use approx::assert_relative_eq;
use common::{eigenvalues, fro, norm, sampler, weighted_energy};
use framekit::fusion::{
    self, analysis, atomic_decompose, construct_atomic, fusion_bounds, fusion_frame_operator,
    fusion_reconstruct, kfusion_bounds, kfusion_via_quotient, synthesis, synthesis_map,
    verify_atomic, EllTwoTuple, FusionSystem,
};
use framekit::numkit::{self, c, identity, real_diag, real_mat, real_vec, Mat, Tolerances, Vector};
use framekit::subspace::Subspace;
use framekit::FrameError;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn line(v: &[f64]) -> Subspace {
    Subspace::span(&Mat::from_columns(&[real_vec(v)]), &tol()).unwrap()
}

fn tilted_pair() -> FusionSystem {
    FusionSystem::from_pairs(vec![(line(&[1.0, 0.0]), 1.0), (line(&[1.0, 1.0]), 1.0)]).unwrap()
}

fn projections(system: &FusionSystem) -> Vec<(Mat, f64)> {
    system
        .members()
        .iter()
        .map(|m| {
            let b = m.subspace.basis();
            (b * b.adjoint(), m.weight)
        })
        .collect()
}

#[test]
fn tilted_pair_bounds_from_characteristic_polynomial() {
    let w = tilted_pair();
    // P_{e1} + P_{(1,1)/√2} = [[1.5, .5], [.5, .5]]
    let s = real_mat(&[&[1.5, 0.5], &[0.5, 0.5]]);
    assert!(fro(&(fusion_frame_operator(&w) - &s)) < 1e-15);
    let (tr, det): (f64, f64) = (1.5 + 0.5, 1.5 * 0.5 - 0.5 * 0.5);
    let disc = (tr * tr - 4.0 * det).sqrt();
    let b = fusion_bounds(&w, &tol()).unwrap();
    assert_relative_eq!(b.a_opt, (tr - disc) / 2.0, epsilon = 1e-14);
    assert_relative_eq!(b.b_opt, (tr + disc) / 2.0, epsilon = 1e-14);
    assert!(b.lower_ok && !b.tight);
    let l = synthesis_map(&w);
    assert!(fro(&(&l * l.adjoint() - s)) < 1e-10);
}

#[test]
fn tilted_pair_analysis_by_explicit_projection() {
    let w = tilted_pair();
    let t = analysis(&w, &real_vec(&[1.0, 0.0])).unwrap();
    assert!(norm(&(&t.blocks[0] - real_vec(&[1.0, 0.0]))) < 1e-15);
    assert!(norm(&(&t.blocks[1] - real_vec(&[0.5, 0.5]))) < 1e-15);
}

#[test]
fn weighted_axes_synthesize_and_reconstruct() {
    let w = FusionSystem::from_pairs(vec![(line(&[1.0, 0.0]), 2.0), (line(&[0.0, 1.0]), 1.0)]).unwrap();
    assert!(fro(&(fusion_frame_operator(&w) - real_diag(&[4.0, 1.0]))) < 1e-15);
    let t = EllTwoTuple { blocks: vec![real_vec(&[1.0, 0.0]), real_vec(&[0.0, 1.0])] };
    assert!(norm(&(synthesis(&w, &t, &tol()).unwrap() - real_vec(&[2.0, 1.0]))) < 1e-15);
    let f = real_vec(&[1.0, 1.0]);
    let back = fusion_reconstruct(&w, &analysis(&w, &f).unwrap(), &tol()).unwrap();
    assert!(norm(&(back - f)) < 1e-10);
    let bad = EllTwoTuple { blocks: vec![real_vec(&[0.0, 1.0]), real_vec(&[0.0, 1.0])] };
    assert!(matches!(synthesis(&w, &bad, &tol()), Err(FrameError::BlockNotInSubspace { index: 0, .. })));
}

#[test]
fn shear_atoms_match_direct_evaluation() {
    let t = tol();
    let k = real_mat(&[&[1.0, 1.0], &[0.0, 1.0]]);
    let w = construct_atomic(&k, &identity(2), &t).unwrap();
    assert_eq!(w.len(), 2);
    assert_relative_eq!(w.members()[0].weight, 1.0, epsilon = 1e-15);
    assert_relative_eq!(w.members()[1].weight, 2f64.sqrt(), epsilon = 1e-15);
    assert!(w.members()[1].subspace.same_as(&line(&[1.0, 1.0]), &t).unwrap());
    let mut s = sampler(3, false);
    for _ in 0..50 {
        let f = s.vector(2);
        let lhs = weighted_energy(&projections(&w), &f);
        assert!((lhs - norm(&(k.adjoint() * &f)).powi(2)).abs() < 1e-12);
    }
}

#[test]
fn atomic_decomposition_of_diagonal() {
    let t = tol();
    let k = real_diag(&[2.0, 1.0]);
    let w = construct_atomic(&k, &identity(2), &t).unwrap();
    let f = real_vec(&[1.0, 1.0]);
    let parts = atomic_decompose(&w, &k, &f, &t).unwrap();
    let total = parts
        .blocks
        .iter()
        .zip(w.members())
        .fold(Vector::zeros(2), |acc, (b, m)| acc + b * c(m.weight));
    assert!(norm(&(total - real_vec(&[2.0, 1.0]))) < 1e-10);
    let zero = atomic_decompose(&w, &k, &Vector::zeros(2), &t).unwrap();
    assert_eq!(zero.norm(), 0.0);
}

#[test]
fn single_axis_against_identity_is_not_atomic() {
    let t = tol();
    let w = FusionSystem::from_pairs(vec![(line(&[1.0, 0.0]), 1.0)]).unwrap();
    assert!(!verify_atomic(&w, &identity(2), &t).unwrap().is_atomic);
    assert!(!kfusion_via_quotient(&w, &identity(2), &t).unwrap().bounded);
    let v = kfusion_via_quotient(&w, &Mat::zeros(2, 2), &t).unwrap();
    assert!(v.bounded && v.norm == Some(0.0));
    let b = kfusion_bounds(&w, &real_diag(&[1.0, 0.0]), &t).unwrap();
    assert!(b.lower_ok);
    assert_relative_eq!(b.a_opt, 1.0, epsilon = 1e-12);
    assert_relative_eq!(b.b_opt, 1.0, epsilon = 1e-12);
    assert_eq!(fusion_reconstruct(&w, &EllTwoTuple::zeros(&w), &t).unwrap_err(), FrameError::NotAFusionFrame);
}

fn draw(seed: u64, n: usize, complex: bool) -> (framekit::random::Sampler, FusionSystem, Mat) {
    let mut s = sampler(seed, complex);
    let m = s.int(1, n + 2);
    let w = s.fusion_system(n, m, n, &tol()).unwrap();
    let k = s.operator(n);
    (s, w, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn defining_inequality_and_energy_identity(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (mut s, w, k) = draw(seed, n, complex);
        let b = kfusion_bounds(&w, &k, &t).unwrap();
        let op = fusion_frame_operator(&w);
        let proj = projections(&w);
        for _ in 0..100 {
            let f = s.unit_vector(n);
            let e = weighted_energy(&proj, &f);
            prop_assert!((e - f.dotc(&(&op * &f)).re).abs() <= 1e-10 * b.b_opt.max(1.0));
            prop_assert!((e - w.energy(&f)).abs() <= 1e-10 * b.b_opt.max(1.0));
            prop_assert!(e <= b.b_opt + 1e-9);
            if b.lower_ok && b.a_opt.is_finite() {
                prop_assert!(b.a_opt * norm(&(k.adjoint() * &f)).powi(2) <= e + 1e-9);
            }
        }
    }

    #[test]
    fn synthesis_is_adjoint_to_analysis(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (mut s, w, _) = draw(seed, n, complex);
        let blocks = w.members().iter().map(|m| m.subspace.project_vector(&s.vector(n))).collect();
        let tuple = EllTwoTuple { blocks };
        let f = s.vector(n);
        let lhs = numkit::inner(&synthesis(&w, &tuple, &t).unwrap(), &f);
        let rhs = tuple.inner(&analysis(&w, &f).unwrap());
        prop_assert!((lhs - rhs).norm() <= t.eq_tol * (1.0 + lhs.norm()));
    }

    #[test]
    fn reconstruction_recovers_measured_signal(seed in any::<u64>(), n in 1usize..=16, complex in any::<bool>()) {
        let t = tol();
        let mut s = sampler(seed, complex);
        let w = s.fusion_frame(n, &t).unwrap();
        let b = fusion_bounds(&w, &t).unwrap();
        prop_assume!(b.a_opt >= 1e-6);
        let f = s.vector(n);
        let back = fusion_reconstruct(&w, &analysis(&w, &f).unwrap(), &t).unwrap();
        prop_assert!(norm(&(back - &f)) <= 1e-9 * norm(&f));
    }

    #[test]
    fn lower_verdict_is_invertibility(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (_, w, _) = draw(seed, n, complex);
        let b = fusion_bounds(&w, &t).unwrap();
        let lambda = eigenvalues(&fusion_frame_operator(&w))[0];
        prop_assert_eq!(b.lower_ok, lambda > t.psd_tol);
    }

    #[test]
    fn synthesis_map_factors_the_operator(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (_, w, k) = draw(seed, n, complex);
        let l = synthesis_map(&w);
        let op = fusion_frame_operator(&w);
        prop_assert!(fro(&(&l * l.adjoint() - &op)) <= 1e-10 * fro(&op).max(1.0));
        let b = kfusion_bounds(&w, &k, &t).unwrap();
        prop_assert_eq!(numkit::range_contains(&l, &k, &t).unwrap(), b.lower_ok);
    }

    #[test]
    fn atomic_verdict_matches_lower_bound(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (_, w, k) = draw(seed, n, complex);
        let r = verify_atomic(&w, &k, &t).unwrap();
        let b = kfusion_bounds(&w, &k, &t).unwrap();
        prop_assert_eq!(r.is_atomic, b.lower_ok && b.a_opt > t.psd_tol);
        prop_assert!(r.consistent);
        prop_assert!((r.decomposition_c - numkit::op_norm(&r.factor_l).unwrap()).abs() <= 1e-8);
        let q = kfusion_via_quotient(&w, &k, &t).unwrap();
        prop_assert_eq!(q.bounded, b.lower_ok);
        if q.bounded && b.a_opt.is_finite() {
            let nq = q.norm.unwrap();
            prop_assert!((b.a_opt * nq * nq - 1.0).abs() <= 1e-6);
            let gap = fusion_frame_operator(&w) - (&k * k.adjoint()) * c(b.a_opt);
            prop_assert!(numkit::psd_min_eig(&numkit::hermitian_part(&gap), &t).unwrap() >= -t.psd_tol * fro(&fusion_frame_operator(&w)).max(1.0));
        }
    }

    #[test]
    fn own_operator_always_atomic(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (_, w, _) = draw(seed, n, complex);
        let op = fusion_frame_operator(&w);
        prop_assert!(verify_atomic(&w, &op, &t).unwrap().is_atomic);
    }

    #[test]
    fn atomic_construction_is_tight(seed in any::<u64>(), n in 1usize..=12, complex in any::<bool>()) {
        let t = tol();
        let mut s = sampler(seed, complex);
        let k = s.operator(n);
        let basis = s.unitary(n, &t).unwrap();
        let w = construct_atomic(&k, &basis, &t).unwrap();
        let proj = projections(&w);
        let kn = numkit::op_norm(&k).unwrap();
        for _ in 0..100 {
            let f = s.unit_vector(n);
            let gap = weighted_energy(&proj, &f) - norm(&(k.adjoint() * &f)).powi(2);
            prop_assert!(gap.abs() <= 1e-9 * kn.powi(2).max(1.0));
        }
        let b = kfusion_bounds(&w, &k, &t).unwrap();
        prop_assert!(b.b_opt <= kn * kn + 1e-9 * kn.powi(2).max(1.0));
        let r = verify_atomic(&w, &k, &t).unwrap();
        prop_assert!(r.is_atomic);
        prop_assert!((r.lower_a - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn fusion_frames_are_k_fusion_for_every_k(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let mut s = sampler(seed, complex);
        let w = s.fusion_frame(n, &t).unwrap();
        let base = fusion_bounds(&w, &t).unwrap();
        prop_assume!(base.lower_ok);
        let k = s.operator(n);
        let kn = numkit::op_norm(&k).unwrap();
        let b = kfusion_bounds(&w, &k, &t).unwrap();
        prop_assert!(b.lower_ok && b.a_opt >= base.a_opt / (kn * kn) - 1e-9);
    }

    #[test]
    fn k_fusion_frames_are_fusion_frames_on_the_range(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let (mut s, w, k) = draw(seed, n, complex);
        let b = kfusion_bounds(&w, &k, &t).unwrap();
        prop_assume!(b.lower_ok && b.a_opt.is_finite());
        let kp = numkit::op_norm(&numkit::pinv(&k.adjoint(), &t).unwrap()).unwrap();
        let floor = b.a_opt / (kp * kp);
        for _ in 0..100 {
            let f = &k * s.vector(n);
            let nf = norm(&f);
            if nf == 0.0 {
                continue;
            }
            let f = f / c(nf);
            prop_assert!(w.energy(&f) >= floor - 1e-9);
        }
    }

    #[test]
    fn intersection_keeps_the_bessel_bound(seed in any::<u64>(), n in 1usize..=8, complex in any::<bool>()) {
        let t = tol();
        let mut s = sampler(seed, complex);
        let m = s.int(1, n + 2);
        let inst = s.commuting_instance(n, m, &t).unwrap();
        let r = fusion::intersect_system(&inst.system, &inst.v, None, &t).unwrap();
        prop_assert!(r.bessel_after <= r.bessel_before + 1e-9);
        prop_assert_eq!(r.system.len(), inst.system.len());
        for (a, b) in r.system.members().iter().zip(inst.system.members()) {
            prop_assert!(b.subspace.contains(&a.subspace, &t).unwrap());
            prop_assert!(inst.v.contains(&a.subspace, &t).unwrap());
        }
    }
}
