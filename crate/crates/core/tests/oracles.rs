//! Independent oracles for computed values: each quantity is obtained a second way
//! (direct evaluation, nalgebra decompositions, closed forms) and compared.

use cstar_frames::frames::{gabor_frame, periodic_gaussian, BoundsSpec, FrameSystem, Sampling, Verdict};
use cstar_frames::gframes::{compose_bessel, GFrameSystem};
use cstar_frames::linalg::{CMat, C64};
use cstar_frames::operators::{elementary_tensor, kron};
use cstar_frames::opframes::{
    combine_families, conjugate_qxi, perturb_sum, xi_equivalence, OperatorFrameSystem, TensorSide,
};
use cstar_frames::random::{self, Rng64};
use cstar_frames::{AdjointableOp, AlgebraDescriptor, AlgebraElement, ModuleDescriptor, ModuleElement, Tolerance};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn module(rng: &mut Rng64) -> ModuleDescriptor {
    random::random_module(rng, 3)
}

#[test]
fn symmetric_two_by_two() {
    let a = AlgebraElement::full(DMatrix::from_row_slice(
        2,
        2,
        &[2.0, 1.0, 1.0, 2.0].map(|v| C64::new(v, 0.0)),
    ));
    let spec = a.hermitian_spectrum().unwrap();
    assert!((spec[0] - 1.0).abs() < 1e-12 && (spec[1] - 3.0).abs() < 1e-12);
    let s = a.sqrt_psd(&tol()).unwrap();
    assert!((&s * &s).max_abs_diff(&a) <= 1e-10);
    // Closed form: s = ((1+√3)/2)·I + ((√3−1)/2)·J.
    let (p, q) = ((1.0 + 3f64.sqrt()) / 2.0, (3f64.sqrt() - 1.0) / 2.0);
    let expected = AlgebraElement::full(DMatrix::from_row_slice(2, 2, &[p, q, q, p].map(|v| C64::new(v, 0.0))));
    assert!(s.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn nonzero_random_elements_have_positive_norm() {
    for seed in 0..100 {
        let m = ModuleDescriptor::new(AlgebraDescriptor::full(2), 2);
        assert!(ModuleElement::random(m, seed).norm() > 0.0);
    }
}

#[test]
fn repeated_basis_parseval() {
    let m = ModuleDescriptor::new(AlgebraDescriptor::diagonal(1), 2);
    let (e1, e2) = (ModuleElement::basis(m, 0), ModuleElement::basis(m, 1));
    let f = FrameSystem::new(m, vec![e1.clone(), e2, e1]).unwrap();
    let p = f.canonical_parseval(&tol()).unwrap();
    assert!(p.frame_operator().max_abs_diff(&AdjointableOp::identity(m)) <= 1e-10);
    // S^{-1/2} = diag(2^{-1/2}, 1).
    let root = f.frame_operator().inv_sqrt_psd(&tol()).unwrap();
    let expected = AdjointableOp::from_coeffs(
        m,
        m,
        &[
            vec![
                AlgebraElement::diagonal_real(&[0.5f64.sqrt()]),
                AlgebraElement::diagonal_real(&[0.0]),
            ],
            vec![
                AlgebraElement::diagonal_real(&[0.0]),
                AlgebraElement::diagonal_real(&[1.0]),
            ],
        ],
    )
    .unwrap();
    assert!(root.max_abs_diff(&expected) < 1e-12);
}

#[test]
fn gabor_bounds_bracket_rayleigh_quotients() {
    let f = gabor_frame(&periodic_gaussian(8), 2, 2).unwrap();
    let b = f.optimal_scalar_bounds(&tol());
    assert!(b.is_frame);
    let mut rng = random::rng(11);
    for _ in 0..1000 {
        let x = random::gaussian_module_element(&mut rng, &f.module());
        let q = f.frame_operator().apply(&x).unwrap().inner(&x).unwrap().trace().re / x.inner(&x).unwrap().trace().re;
        assert!(q >= b.lower * (1.0 - 1e-12) && q <= b.upper * (1.0 + 1e-12));
    }
}

#[test]
fn tensor_of_tight_operator_frames() {
    let ma = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
    let mb = ModuleDescriptor::new(AlgebraDescriptor::full(2), 2);
    let a = OperatorFrameSystem::new(ma, vec![AdjointableOp::identity(ma); 2]).unwrap();
    let b = OperatorFrameSystem::new(mb, vec![AdjointableOp::identity(mb); 3]).unwrap();
    let t = cstar_frames::opframes::tensor_opframes(&a, &b).unwrap();
    let id = AdjointableOp::identity(t.module());
    assert!(t.opframe_operator().max_abs_diff(&id.scale_real(6.0)) < 1e-12);
    let o = t.optimal_scalar_bounds(&tol());
    assert!(o.tight && (o.lower - 6.0).abs() < 1e-12);
}

#[test]
fn combine_with_exact_families() {
    // n = 2 families on disjoint halves of the index set, L the projection onto the first half.
    let m = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
    let mut rng = random::rng(21);
    let t1 = random::random_opframe(&mut rng, &m, 2);
    let t2 = random::random_opframe(&mut rng, &m, 2);
    let zero = AdjointableOp::zero(m, m);
    let pad = |f: &OperatorFrameSystem, first: bool| {
        let mut ops = vec![zero.clone(); 4];
        for (i, op) in f.ops().iter().enumerate() {
            ops[if first { i } else { i + 2 }] = op.clone();
        }
        OperatorFrameSystem::new(m, ops).unwrap()
    };
    let fams = vec![pad(&t1, true), pad(&t2, false)];
    let stacked = ModuleDescriptor::new(m.algebra, 4);
    let coeffs: Vec<Vec<AlgebraElement>> = (0..4)
        .map(|r| {
            (0..4)
                .map(|c| AlgebraElement::diagonal_real(if r == c && r < 2 { &[1.0, 1.0] } else { &[0.0, 0.0] }))
                .collect()
        })
        .collect();
    let l = AdjointableOp::from_coeffs(stacked, stacked, &coeffs).unwrap();
    let r = combine_families(&fams, &fams, &l, 0, 0.0, &tol(), Sampling::default()).unwrap();
    assert!(r.l_residual < 1e-10);
    let a1 = t1.optimal_scalar_bounds(&tol()).lower;
    let b_sum: f64 = [&t1, &t2]
        .iter()
        .map(|f| f.optimal_scalar_bounds(&tol()).upper.sqrt())
        .sum();
    assert!((r.lower - a1).abs() < 1e-9 * a1.max(1.0));
    assert!((r.upper - b_sum * b_sum).abs() < 1e-9 * r.upper);
    assert!(r.report.report.passed());
}

#[test]
fn doubled_system_is_xi_certified() {
    let m = ModuleDescriptor::new(AlgebraDescriptor::full(2), 2);
    let mut rng = random::rng(4);
    let of = random::random_opframe(&mut rng, &m, 2);
    let r = of.scale_real(2.0);
    let x = xi_equivalence(&of, &r, &tol(), Sampling::default()).unwrap();
    assert!(x.xi.is_some_and(f64::is_finite) && x.certified);
}

/// Every element of the scalar representation equals the adjointable action on the
/// vectorized module, so nalgebra SVD and eigen solvers act as independent oracles.
fn scalar_matrix(t: &AdjointableOp) -> CMat {
    t.scalar_rep().matrix
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn module_absolute_value_squares_to_inner(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let x = random::gaussian_module_element(&mut rng, &m);
        let a = x.avalued_abs();
        let g = x.inner(&x).unwrap();
        prop_assert!((&a * &a).max_abs_diff(&g) <= 1e-10 * g.op_norm().max(1.0));
    }

    #[test]
    fn adjoint_contract(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let h = module(&mut rng);
        let v = ModuleDescriptor::new(h.algebra, rng.random_range(1..=3));
        let t = random::gaussian_op(&mut rng, &h, &v);
        let x = random::gaussian_module_element(&mut rng, &h);
        let y = random::gaussian_module_element(&mut rng, &v);
        let lhs = t.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&t.adjoint().apply(&y).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn vectorize_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let x = random::gaussian_module_element(&mut rng, &m);
        let y = ModuleElement::from_vector(m, &x.vectorize()).unwrap();
        prop_assert!(y.max_abs_diff(&x) <= 1e-12);
    }

    #[test]
    fn inverse_of_adjoint(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let t = random::gaussian_op(&mut rng, &m, &m);
        let t = t.add(&AdjointableOp::identity(m).scale_real(t.op_norm() + 0.5)).unwrap();
        let a = t.invert(&tol()).unwrap().adjoint();
        let b = t.adjoint().invert(&tol()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn scalar_rep_matches_action(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let h = module(&mut rng);
        let v = ModuleDescriptor::new(h.algebra, rng.random_range(1..=3));
        let t = random::gaussian_op(&mut rng, &h, &v);
        // The operator norm from an SVD of the scalar representation.
        let top = scalar_matrix(&t).singular_values().max();
        prop_assert!((top - t.op_norm()).abs() <= 1e-10 * top.max(1.0));
    }

    #[test]
    fn tensor_of_operators(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let h = ModuleDescriptor::new(random::random_algebra(&mut rng), rng.random_range(1..=2));
        let k = ModuleDescriptor::new(AlgebraDescriptor::diagonal(rng.random_range(1..=2)), rng.random_range(1..=2));
        let t = random::gaussian_op(&mut rng, &h, &h);
        let u = random::gaussian_op(&mut rng, &k, &k);
        let x = random::gaussian_module_element(&mut rng, &h);
        let y = random::gaussian_module_element(&mut rng, &k);
        let lhs = kron(&t, &u).apply(&elementary_tensor(&x, &y)).unwrap();
        let rhs = elementary_tensor(&t.apply(&x).unwrap(), &u.apply(&y).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * (1.0 + rhs.norm()));
        let n = kron(&t, &u).op_norm();
        prop_assert!((n - t.op_norm() * u.op_norm()).abs() <= 1e-9 * n.max(1.0));
        let nx = elementary_tensor(&x, &y).norm();
        prop_assert!((nx - x.norm() * y.norm()).abs() <= 1e-9 * nx.max(1.0));
    }

    #[test]
    fn frame_operator_two_ways(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let count = rng.random_range(0..=2);
        let f = random::random_frame(&mut rng, &m, count);
        let t = f.analysis();
        prop_assert!(t.bounded_below_margin() > 0.0);
        prop_assert!(t.adjoint().compose(&t).unwrap().max_abs_diff(f.frame_operator()) <= 1e-12 * f.frame_operator().op_norm().max(1.0));
        let x = random::gaussian_module_element(&mut rng, &m);
        // Σ⟨x,x_i⟩⟨x_i,x⟩ against ⟨Sx,x⟩.
        let mut direct = AlgebraElement::zero(m.algebra);
        for v in f.vectors() {
            direct = &direct + &(&x.inner(v).unwrap() * &v.inner(&x).unwrap());
        }
        let via_s = f.frame_operator().apply(&x).unwrap().inner(&x).unwrap();
        prop_assert!(direct.max_abs_diff(&via_s) <= 1e-10 * via_s.op_norm().max(1.0));
        let b = f.optimal_scalar_bounds(&tol());
        for _ in 0..50 {
            let x = random::gaussian_module_element(&mut rng, &m);
            let q = f.frame_operator().apply(&x).unwrap().inner(&x).unwrap().trace().re / x.inner(&x).unwrap().trace().re;
            prop_assert!(q >= b.lower * (1.0 - 1e-10) && q <= b.upper * (1.0 + 1e-10));
        }
    }

    #[test]
    fn gframe_operator_and_projection(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let blocks = rng.random_range(1..=4);
        let g = random::random_gframe(&mut rng, &m, blocks);
        let direct = AdjointableOp::sum(g.ops().iter().map(|l| l.adjoint().compose(l).unwrap()).collect::<Vec<_>>().iter()).unwrap();
        prop_assert!(direct.max_abs_diff(g.gframe_operator()) <= 1e-12 * direct.op_norm().max(1.0));
        if g.optimal_scalar_bounds(&tol()).is_frame {
            let p = g.range_projection_p(&tol()).unwrap();
            let q = g.synthesis_q();
            let y = random::gaussian_module_element(&mut rng, &q.codomain());
            let qy = q.adjoint().apply(&y).unwrap();
            prop_assert!(p.apply(&qy).unwrap().max_abs_diff(&qy) <= 1e-10 * (1.0 + qy.norm()));
            let rank = |a: &CMat| {
                let s = a.singular_values();
                let top = s.max();
                s.iter().filter(|&&v| v > 1e-10 * top).count()
            };
            prop_assert_eq!(rank(&scalar_matrix(&p)), rank(&scalar_matrix(&q.adjoint())));
        }
    }

    #[test]
    fn opframe_operator_matches_gframe_view(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let count = rng.random_range(1..=3);
        let of = random::random_opframe(&mut rng, &m, count);
        prop_assert!(of.as_gframe().gframe_operator().max_abs_diff(of.opframe_operator()) <= 1e-12 * of.opframe_operator().op_norm().max(1.0));
    }

    #[test]
    fn bessel_composition_with_parseval(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let count = rng.random_range(1..=3);
        let g = random::random_gframe(&mut rng, &m, count);
        prop_assume!(g.optimal_scalar_bounds(&tol()).is_frame);
        let root = g.gframe_operator().inv_sqrt_psd(&tol()).unwrap();
        let parseval = g.right_compose(&root).unwrap();
        let c = compose_bessel(&parseval, &parseval, &tol()).unwrap();
        prop_assert!(c.report.passed());
        // Σ(Λ_i*Λ_i)*(Λ_i*Λ_i) directly, against the asserted bound.
        let direct = AdjointableOp::sum(parseval.ops().iter().map(|l| {
            let p = l.adjoint().compose(l).unwrap();
            p.adjoint().compose(&p).unwrap()
        }).collect::<Vec<_>>().iter()).unwrap();
        prop_assert!(direct.is_positive_op(&tol()));
        prop_assert!(direct.max_eigenvalue() <= c.bound * (1.0 + 1e-9));
    }

    #[test]
    fn perturbation_intervals(seed in any::<u64>(), eps in 0.01f64..0.4) {
        let mut rng = random::rng(seed);
        let m = module(&mut rng);
        let count = rng.random_range(1..=3);
        let of = random::random_opframe(&mut rng, &m, count);
        let b = of.optimal_scalar_bounds(&tol());
        prop_assume!(b.is_frame);
        // R = ε·OF with ε²δ < ν: the sum and difference have spectra (1 ± ε)²·spec(S).
        let eps = eps * (b.lower / b.upper).sqrt();
        let p = perturb_sum(&of, &of.scale_real(eps), &tol(), Sampling { samples: 10, seed }).unwrap();
        prop_assert!(p.lower <= (1.0 - eps).powi(2) * b.lower * (1.0 + 1e-9));
        prop_assert!(p.upper >= (1.0 + eps).powi(2) * b.upper * (1.0 - 1e-9));
        // ξ = ν/4 with an unrelated perturbation.
        let r = random::random_opframe(&mut rng, &m, of.len());
        let r = r.scale_real((b.lower / 4.0 / r.opframe_operator().max_eigenvalue()).sqrt());
        let p = perturb_sum(&of, &r, &tol(), Sampling { samples: 10, seed }).unwrap();
        for sys in [&p.plus, &p.minus] {
            let o = sys.optimal_scalar_bounds(&tol());
            prop_assert!(o.lower >= p.lower - 1e-9 && o.upper <= p.upper + 1e-9);
        }
    }

    #[test]
    fn unitary_conjugation_keeps_bounds(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let a = random::random_opframe(&mut rng, &ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1), 2);
        let b = random::random_opframe(&mut rng, &ModuleDescriptor::new(AlgebraDescriptor::full(2), 1), 1);
        let of = cstar_frames::opframes::tensor_opframes(&a, &b).unwrap();
        let q = random::random_unitary(&mut rng, &a.module());
        let k = AdjointableOp::identity(of.module());
        let r = conjugate_qxi(&of, &k, &q, b.module(), TensorSide::Left, &tol()).unwrap();
        let before = of.optimal_scalar_bounds(&tol());
        let after = r.system.optimal_scalar_bounds(&tol());
        prop_assert!((before.lower - after.lower).abs() <= 1e-9 * before.upper);
        prop_assert!((before.upper - after.upper).abs() <= 1e-9 * before.upper);
        prop_assert_eq!(r.report.verdict, Verdict::Proved);
    }

    #[test]
    fn plain_bounds_imply_central_star_bounds(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = ModuleDescriptor::new(AlgebraDescriptor::full(rng.random_range(1..=3)), rng.random_range(1..=3));
        let g = GFrameSystem::from_frame(&random::random_frame(&mut rng, &m, 1));
        let b = g.optimal_scalar_bounds(&tol());
        prop_assert_eq!(g.verify_gbounds(&BoundsSpec::plain(b.lower, b.upper), &tol(), 0, 0).unwrap().verdict, Verdict::Proved);
        let id = AlgebraElement::identity(m.algebra);
        let star = BoundsSpec::star(id.scale_real(b.lower.sqrt()), id.scale_real(b.upper.sqrt()));
        prop_assert!(g.verify_gbounds(&star, &tol(), 20, seed).unwrap().passed());
    }
}
