use loopstar::determinant::{lie_cocycle, LoopAlgebraElement};
use loopstar::disk::builders::interior_element;
use loopstar::disk::random::{random_map, random_matrix, random_su, seeded_rng};
use loopstar::disk::{DiskAlgebra, StarElement};
use loopstar::higher_dim::*;
use loopstar::jets::{BumpProfile, SmoothMap};
use loopstar::series::NuSeries;
use loopstar::{Error, MatrixNC, C64};
use rand::Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn spin_half_is_the_pauli_representation() {
    let f = su2_irrep(0.5).unwrap();
    assert_eq!(f.dim(), 2);
    let [x, y, z] = f.generators();
    for (g, s) in [x, y, z].iter().zip(MatrixNC::pauli()) {
        assert!((*g - &s.scale(c(0.0, -0.5))).max_abs() < 1e-15);
    }
    assert!((&f.casimir() + &MatrixNC::identity(2).scale(c(0.75, 0.0))).max_abs() < 1e-15);
}

#[test]
fn spin_one_casimir() {
    let f = su2_irrep(1.0).unwrap();
    assert_eq!(f.dim(), 3);
    assert!((&f.casimir() + &MatrixNC::identity(3).scale(c(2.0, 0.0))).max_abs() < 1e-14);
}

#[test]
fn relations_hold_up_to_spin_ten() {
    for tj in 0..=20 {
        let f = su2_irrep(tj as f64 / 2.0).unwrap();
        assert_eq!(f.dim(), tj + 1);
        assert!(f.commutation_residual() < 1e-13, "2j = {tj}: {}", f.commutation_residual());
        assert!(f.casimir_residual() < 1e-12, "2j = {tj}: {}", f.casimir_residual());
        for g in f.generators() {
            assert!(g.anti_hermiticity_residual() < 1e-15);
        }
    }
}

#[test]
fn invalid_spins_are_rejected() {
    for j in [0.3, -0.5, f64::NAN, f64::INFINITY] {
        assert!(matches!(su2_irrep(j), Err(Error::InvalidSpin(_))));
    }
}

#[test]
fn trace_functionals_are_tracial() {
    let mut rng = seeded_rng(1);
    for d in [1, 3, 5] {
        for tr in [TraceFunctional::matrix_trace(d), TraceFunctional::normalized_trace(d)] {
            for _ in 0..5 {
                let (a, b) = (random_matrix(&mut rng, d, 1.0), random_matrix(&mut rng, d, 1.0));
                assert!(tr.traciality_residual(&a, &b).unwrap() < 1e-12);
            }
        }
    }
    let corner = TraceFunctional::new(3, "corner entry", |a| a[(0, 0)]);
    let (a, b) = (random_matrix(&mut rng, 3, 1.0), random_matrix(&mut rng, 3, 1.0));
    assert!(corner.traciality_residual(&a, &b).unwrap() > 1e-3);
    assert!(matches!(corner.apply(&MatrixNC::identity(2)), Err(Error::DimensionMismatch(_))));
}

#[test]
fn combined_trace_of_tensor_products() {
    let mut rng = seeded_rng(2);
    let (a, s) = (random_matrix(&mut rng, 2, 1.0), random_matrix(&mut rng, 3, 1.0));
    let tr = TraceFunctional::normalized_trace(3);
    let got = tr.combined(&a.kron(&s)).unwrap();
    assert!((got - a.trace() * s.trace() / 3.0).norm() < 1e-14);
}

#[test]
fn tensor_trace_of_the_identity() {
    let alg = DiskAlgebra::default();
    let fz = su2_irrep(1.0).unwrap();
    let tr = fz.trace_functional();
    let f = StarElement::identity(6, 2);
    let t = tensor_trace(&alg, &f, &tr).unwrap();
    assert_eq!(t.laurent.p_min(), -1);
    assert!((t.laurent.coeffs()[0] - c(3.0, 0.0)).norm() < 1e-13);
    assert!((t.plain.coeffs()[0] - c(3.0, 0.0)).norm() < 1e-13);
    assert!(t.laurent.coeffs()[1..].iter().all(|z| z.norm() == 0.0));
    let bad = StarElement::identity(4, 2);
    assert!(matches!(tensor_trace(&alg, &bad, &tr), Err(Error::DimensionMismatch(_))));
}

fn interior_tensor(rng: &mut impl Rng, prof: BumpProfile, n: usize, d: usize) -> StarElement {
    let coeffs = (0..3)
        .map(|_| {
            let m = random_map(rng, 1, 0.8).unwrap();
            let k = SmoothMap::constant(random_matrix(rng, n, 1.0).kron(&random_matrix(rng, d, 1.0)));
            interior_element(prof, &SmoothMap::product(&m, &k).unwrap()).unwrap()
        })
        .collect();
    StarElement::general(NuSeries::new(0, coeffs).unwrap()).unwrap()
}

#[test]
fn tensor_trace_vanishes_on_commutators_of_interior_elements() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::new(0.0).unwrap();
    let mut rng = seeded_rng(9);
    let tr = TraceFunctional::normalized_trace(2);
    for _ in 0..3 {
        let f = interior_tensor(&mut rng, prof, 2, 2);
        let g = interior_tensor(&mut rng, prof, 2, 2);
        let t = tensor_trace(&alg, &alg.star_commutator(&f, &g).unwrap(), &tr).unwrap();
        for z in t.laurent.coeffs() {
            assert!(z.norm() < 1e-9, "{z}");
        }
    }
}

#[test]
fn tensor_trace_is_linear_and_reduces_to_the_disk_trace() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::default();
    let mut rng = seeded_rng(12);
    let f = interior_tensor(&mut rng, prof, 2, 1);
    let g = interior_tensor(&mut rng, prof, 2, 1);
    let tr = TraceFunctional::matrix_trace(1);
    let a = c(0.3, -1.2);
    let lhs = tensor_trace(&alg, &f.scale(a).add(&g).unwrap(), &tr).unwrap();
    let tf = tensor_trace(&alg, &f, &tr).unwrap();
    let tg = tensor_trace(&alg, &g, &tr).unwrap();
    for p in 0..3 {
        let r = lhs.plain.coeffs()[p] - tf.plain.coeffs()[p] * a - tg.plain.coeffs()[p];
        assert!(r.norm() < 1e-13);
    }
    let disk = alg.trace_nu(&f).unwrap();
    for (x, y) in disk.coeffs().iter().zip(tf.laurent.coeffs()) {
        assert!((x - y).norm() < 1e-14);
    }
    assert_eq!(disk.p_min(), tf.laurent.p_min());
}

fn random_loop(rng: &mut impl Rng, size: usize, modes: &[i32]) -> MatrixLoop {
    MatrixLoop::new(size, modes.iter().map(|m| (*m, random_matrix(rng, size, 1.0))).collect()).unwrap()
}

#[test]
fn loop_cocycle_single_modes() {
    let mut rng = seeded_rng(4);
    let tr = TraceFunctional::matrix_trace(3);
    let (a, b) = (random_matrix(&mut rng, 6, 1.0), random_matrix(&mut rng, 6, 1.0));
    for m in -3..=3 {
        let f = MatrixLoop::single(m, a.clone()).unwrap();
        let g = MatrixLoop::single(-m, b.clone()).unwrap();
        let r = loop_cocycle_s(&f, &g, &tr, CocycleNormalization::OverTwoPiI).unwrap();
        let expected = (&a * &b).trace() * (-m as f64);
        assert!((r.value() - expected).norm() < 1e-12 * (1.0 + expected.norm()));
        assert!((r.over_two_pi - expected * c(0.0, 1.0)).norm() < 1e-12 * (1.0 + expected.norm()));
        let other = loop_cocycle_s(&f, &g, &tr, CocycleNormalization::OverTwoPi).unwrap();
        assert_eq!(other.value(), r.over_two_pi);
        let off = MatrixLoop::single(m + 1, b.clone()).unwrap();
        assert_eq!(loop_cocycle_s(&f, &off, &tr, CocycleNormalization::OverTwoPiI).unwrap().value(), c(0.0, 0.0));
    }
}

#[test]
fn loop_cocycle_matches_a_quadrature_of_the_contour_integral() {
    let mut rng = seeded_rng(5);
    let tr = TraceFunctional::normalized_trace(2);
    let f = random_loop(&mut rng, 4, &[-2, 0, 1, 3]);
    let g = random_loop(&mut rng, 4, &[-3, -1, 2]);
    let dg = MatrixLoop::new(4, g.modes().iter().map(|(m, b)| (*m, b.scale(c(0.0, *m as f64)))).collect()).unwrap();
    let n = 64;
    let mut acc = c(0.0, 0.0);
    for k in 0..n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        acc += tr.combined(&(&f.value(th) * &dg.value(th))).unwrap();
    }
    let contour = acc / n as f64;
    let r = loop_cocycle_s(&f, &g, &tr, CocycleNormalization::OverTwoPi).unwrap();
    assert!((r.value() - contour).norm() < 1e-12 * (1.0 + contour.norm()));
}

#[test]
fn loop_cocycle_is_an_antisymmetric_bilinear_cocycle() {
    let mut rng = seeded_rng(6);
    let tr = TraceFunctional::matrix_trace(2);
    let norm = CocycleNormalization::OverTwoPiI;
    let cs = |a: &MatrixLoop, b: &MatrixLoop| loop_cocycle_s(a, b, &tr, norm).unwrap().value();
    for _ in 0..5 {
        let f = random_loop(&mut rng, 4, &[-1, 1, 2]);
        let g = random_loop(&mut rng, 4, &[-2, -1, 3]);
        let h = random_loop(&mut rng, 4, &[-1, 0, 1]);
        assert!(cs(&f, &f).norm() < 1e-12);
        assert!((cs(&f, &g) + cs(&g, &f)).norm() < 1e-12);
        let a = c(0.7, 0.2);
        let lin = cs(&f.scale(a).add(&h).unwrap(), &g) - cs(&f, &g) * a - cs(&h, &g);
        assert!(lin.norm() < 1e-12);
        let jac = cs(&f.bracket(&g).unwrap(), &h) + cs(&g.bracket(&h).unwrap(), &f) + cs(&h.bracket(&f).unwrap(), &g);
        assert!(jac.norm() < 1e-10, "{jac}");
    }
}

#[test]
fn fuzzy_cocycle_agrees_with_the_disk_cocycle() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::default();
    let fz = su2_irrep(1.0).unwrap();
    let tr = fz.trace_functional();
    let [x, _, z] = fz.generators();
    let i = c(0.0, 1.0);
    // hermitian factors in the fuzzy algebra, so su(n) ⊗ herm is anti-hermitian
    let herm = [MatrixNC::identity(3), x.scale(i), &(x * z) + &(z * x)];
    let mut rng = seeded_rng(31);
    let coeff = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| random_su(rng, 2, 1.0).kron(&herm[k]);
    let f = MatrixLoop::new(6, vec![(1, coeff(&mut rng, 1)), (-2, coeff(&mut rng, 2)), (2, coeff(&mut rng, 0))]).unwrap();
    let g = MatrixLoop::new(6, vec![(-1, coeff(&mut rng, 1)), (2, coeff(&mut rng, 2)), (3, coeff(&mut rng, 0))]).unwrap();
    let expected = loop_cocycle_s(&f, &g, &tr, CocycleNormalization::OverTwoPiI).unwrap().value();
    assert!(expected.norm() > 1e-3);
    let (xf, xg): (LoopAlgebraElement, LoopAlgebraElement) = (f.to_loop_element(prof).unwrap(), g.to_loop_element(prof).unwrap());
    let r = lie_cocycle(&alg, &xf, &xg).unwrap();
    assert!((r.c_star - expected).norm() < 1e-6 * expected.norm(), "{} vs {expected}", r.c_star);
}
