use std::f64::consts::PI;

use loopstar::determinant::*;
use loopstar::disk::builders::{interior_cutoff, interior_element};
use loopstar::disk::random::{random_boundary_identity, random_polynomial, random_su, seeded_rng};
use loopstar::disk::{DiskAlgebra, DiskQuadrature, StarElement};
use loopstar::jets::{BumpProfile, LoopFamily, SmoothMap};
use loopstar::series::NuSeries;
use loopstar::{Error, MatrixNC, C64};
use rand::Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn small_alg() -> DiskAlgebra {
    DiskAlgebra::with_quadrature(DiskQuadrature::new(24, 32, 16).unwrap())
}

/// `χ(u)·Σ p_i(x, y)·iσ_i` with random scalar polynomials: traceless and
/// flat zero at the boundary.
fn interior_traceless(rng: &mut impl Rng, scale: f64) -> SmoothMap {
    let prof = BumpProfile::default();
    let terms: Vec<SmoothMap> = MatrixNC::pauli()
        .iter()
        .map(|s| {
            let p = random_polynomial(rng, 1, 2, scale).unwrap();
            SmoothMap::product(&p, &SmoothMap::constant(s.scale(c(0.0, 1.0)))).unwrap()
        })
        .collect();
    interior_element(prof, &SmoothMap::sum(terms).unwrap()).unwrap()
}

fn close_mod_2pi_i(a: C64, b: C64, tol: f64) -> bool {
    mod_two_pi_i(a - b).norm() < tol
}

fn diag_i() -> MatrixNC {
    MatrixNC::diag(&[c(0.0, 1.0), c(0.0, -1.0)])
}

#[test]
fn factorization_reproduces_the_element() {
    let alg = small_alg();
    let mut rng = seeded_rng(3);
    let h = interior_traceless(&mut rng, 0.5);
    let mut coeffs = vec![h.exp()];
    for _ in 0..alg.truncation() {
        coeffs.push(interior_traceless(&mut rng, 0.5));
    }
    let f = alg.element(NuSeries::new(0, coeffs).unwrap()).unwrap();
    let (g, k) = factorize(&alg, &f, BoundaryGroup::Unitary, &DetSettings::default()).unwrap();
    assert!(k.coeff(0).as_constant().is_some_and(MatrixNC::is_identity_exact));
    let back = alg.star_product(&g, &k).unwrap();
    assert!(alg.distance(&back, &f).unwrap() < 1e-12);
}

#[test]
fn factorization_rejects_elements_outside_dg() {
    let alg = small_alg();
    let settings = DetSettings::default();
    let general = StarElement::from_order_zero(&SmoothMap::x() * &SmoothMap::constant(MatrixNC::identity(2)), 2);
    assert!(matches!(factorize(&alg, &general, BoundaryGroup::Complex, &settings), Err(Error::NotInDG(_))));
    let stretch = StarElement::constant(MatrixNC::diag(&[c(2.0, 0.0), c(1.0, 0.0)]), 2);
    assert!(matches!(factorize(&alg, &stretch, BoundaryGroup::Unitary, &settings), Err(Error::NotInDG(_))));
    assert!(factorize(&alg, &stretch, BoundaryGroup::Complex, &settings).is_ok());
    let singular = StarElement::constant(MatrixNC::diag(&[c(1.0, 0.0), c(0.0, 0.0)]), 2);
    assert!(matches!(factorize(&alg, &singular, BoundaryGroup::Complex, &settings), Err(Error::NotInDG(_))));
}

#[test]
fn unipotent_determinant_reads_the_first_coefficient() {
    let alg = DiskAlgebra::default();
    let mut rng = seeded_rng(11);
    for _ in 0..3 {
        let s = random_boundary_identity(&mut rng, BumpProfile::default(), 2, 2, 0.4).unwrap();
        let mut coeffs = s.coeffs().to_vec();
        coeffs[0] = SmoothMap::identity(2);
        let k = alg.element(NuSeries::new(0, coeffs.clone()).unwrap()).unwrap();
        let tr = alg.integrate_traces(&coeffs[1..2]).unwrap()[0];
        let expected = (tr / (2.0 * PI)).exp();
        let got = det_unipotent(&alg, &k).unwrap();
        assert!((got - expected).norm() < 1e-10 * expected.norm(), "{got} vs {expected}");
    }
}

#[test]
fn homotopy_of_constant_and_abelian_paths() {
    let alg = small_alg();
    let settings = DetSettings::default();
    let one = LoopFamily::constant("one", SmoothMap::identity(2));
    let r = det_homotopy(&alg, &one, &settings).unwrap();
    assert!(r.log_det.norm() < 1e-14);

    // pointwise commuting values: the order-one correction vanishes
    let prof = BumpProfile::default();
    let mut rng = seeded_rng(5);
    let p = random_polynomial(&mut rng, 1, 3, 0.8).unwrap();
    let h = SmoothMap::product(&interior_element(prof, &p).unwrap(), &SmoothMap::constant(diag_i())).unwrap();
    let r = det_homotopy(&alg, &linear_exponential_path(&h), &settings).unwrap();
    assert!(r.log_det.norm() < 1e-12, "{}", r.log_det);
    assert!(r.laurent < 1e-12);
}

#[test]
fn nonzero_trace_integral_is_a_laurent_obstruction() {
    let alg = small_alg();
    let h = interior_cutoff(BumpProfile::default()).unwrap().scale(c(0.0, 0.3));
    let h = &h * &SmoothMap::constant(MatrixNC::identity(2));
    let r = det_homotopy(&alg, &linear_exponential_path(&h), &DetSettings::default());
    assert!(matches!(r, Err(Error::LaurentObstruction(_))));
}

#[test]
fn paths_must_stay_in_the_boundary_identity_group() {
    let alg = small_alg();
    let h = SmoothMap::constant(diag_i().scale(c(0.5, 0.0)));
    let r = det_homotopy(&alg, &linear_exponential_path(&h), &DetSettings::default());
    assert!(matches!(r, Err(Error::PathNotInG(_))));
}

#[test]
fn homotopy_is_path_independent() {
    let alg = DiskAlgebra::default();
    let settings = DetSettings::default();
    let mut rng = seeded_rng(21);
    let h = interior_traceless(&mut rng, 0.8);
    let k = interior_traceless(&mut rng, 0.8);
    let direct = det_homotopy(&alg, &linear_exponential_path(&h), &settings).unwrap();
    let detour = LoopFamily::pointwise_product(
        &linear_exponential_path(&h),
        &exponential_path(&k, |s| s * (1.0 - s), |s| 1.0 - 2.0 * s),
    )
    .unwrap();
    let other = det_homotopy(&alg, &detour, &settings).unwrap();
    assert!(direct.log_det.norm() > 1e-6, "trivial example: {}", direct.log_det);
    assert!(close_mod_2pi_i(direct.log_det, other.log_det, 1e-6), "{} vs {}", direct.log_det, other.log_det);
}

#[test]
fn determinant_is_multiplicative() {
    let alg = DiskAlgebra::default();
    let settings = DetSettings::default();
    let mut rng = seeded_rng(8);
    let make = |rng: &mut rand_chacha::ChaCha8Rng| {
        let h = interior_traceless(rng, 0.7);
        let mut coeffs = vec![h.exp()];
        for _ in 0..alg.truncation() {
            coeffs.push(interior_traceless(rng, 0.5));
        }
        (alg.element(NuSeries::new(0, coeffs).unwrap()).unwrap(), linear_exponential_path(&h))
    };
    let (f, pf) = make(&mut rng);
    let (g, pg) = make(&mut rng);
    let fg = alg.star_product(&f, &g).unwrap();
    let pfg = LoopFamily::pointwise_product(&pf, &pg).unwrap();
    let lf = log_det(&alg, &f, &pf, &settings).unwrap();
    let lg = log_det(&alg, &g, &pg, &settings).unwrap();
    let lfg = log_det(&alg, &fg, &pfg, &settings).unwrap();
    assert!(lf.norm() > 1e-4 && lg.norm() > 1e-4, "trivial example: {lf}, {lg}");
    assert!(close_mod_2pi_i(lfg, lf + lg, 1e-6), "{lfg} vs {}", lf + lg);
}

#[test]
fn log_det_checks_its_path() {
    let alg = small_alg();
    let mut rng = seeded_rng(2);
    let h = interior_traceless(&mut rng, 0.5);
    let f = alg.zero_order(h.exp()).unwrap();
    let wrong = linear_exponential_path(&h.scale(c(0.5, 0.0)));
    assert!(matches!(log_det(&alg, &f, &wrong, &DetSettings::default()), Err(Error::PathNotInG(_))));
}

#[test]
fn section_has_the_loop_exponential_as_boundary_value() {
    let alg = small_alg();
    let mut rng = seeded_rng(4);
    let prof = BumpProfile::default();
    let x = LoopAlgebraElement::new(2, vec![(1, random_su(&mut rng, 2, 0.3)), (-2, random_su(&mut rng, 2, 0.3))], prof).unwrap();
    let psi = section_psi(&alg, &x).unwrap();
    let angles = [0.1, 1.3, 2.9, 4.4];
    let b = alg.boundary_values(&psi, &angles).unwrap();
    for (i, th) in angles.iter().enumerate() {
        assert!((&b[0][i] - &x.value(*th).exp()).max_abs() < 1e-12);
        assert!(b[1][i].max_abs() < 1e-12);
    }
    assert!(matches!(section_psi(&alg, &x.scale(20.0)), Err(Error::InvalidArgument(_))));
}

#[test]
fn lie_cocycle_of_the_reference_pair() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::default();
    let x = LoopAlgebraElement::single(2, diag_i(), prof).unwrap();
    let y = LoopAlgebraElement::single(-2, diag_i(), prof).unwrap();
    let r = lie_cocycle(&alg, &x, &y).unwrap();
    assert!((r.closed_form - c(4.0, 0.0)).norm() < 1e-14);
    assert!((r.c_star - r.closed_form).norm() < 1e-6 * 4.0, "{}", r.c_star);
    assert!((r.c_boundary - r.closed_form).norm() < 1e-12);
}

#[test]
fn lie_cocycle_matches_boundary_pairing_on_modes() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::default();
    let mut rng = seeded_rng(17);
    let (a, b) = (random_su(&mut rng, 2, 1.0), random_su(&mut rng, 2, 1.0));
    for m in -3..=3 {
        for k in -3..=3 {
            let x = LoopAlgebraElement::single(m, a.clone(), prof).unwrap();
            let y = LoopAlgebraElement::single(k, b.clone(), prof).unwrap();
            let r = lie_cocycle(&alg, &x, &y).unwrap();
            let expected = if m + k == 0 { (&a * &b).trace() * k as f64 } else { c(0.0, 0.0) };
            let scale = expected.norm().max(1.0);
            assert!((r.closed_form - expected).norm() < 1e-12 * scale);
            assert!((r.c_star - r.c_boundary).norm() < 1e-6 * scale, "m={m} k={k}: {} vs {}", r.c_star, r.c_boundary);
            assert!((r.c_boundary - expected).norm() < 1e-10 * scale);
        }
    }
}

#[test]
fn lie_cocycle_algebraic_identities() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::default();
    let mut rng = seeded_rng(29);
    let random_loop = |rng: &mut rand_chacha::ChaCha8Rng| {
        let modes = vec![(-1, random_su(rng, 2, 0.5)), (1, random_su(rng, 2, 0.5)), (2, random_su(rng, 2, 0.5))];
        LoopAlgebraElement::new(2, modes, prof).unwrap()
    };
    let (x, y, z) = (random_loop(&mut rng), random_loop(&mut rng), random_loop(&mut rng));
    let cs = |a: &LoopAlgebraElement, b: &LoopAlgebraElement| lie_cocycle(&alg, a, b).unwrap().c_star;

    assert!((cs(&x, &y) + cs(&y, &x)).norm() < 1e-9);
    assert!(cs(&x, &x).norm() < 1e-9);

    let lhs = cs(&x.scale(2.0).add(&z).unwrap(), &y);
    let rhs = cs(&x, &y) * 2.0 + cs(&z, &y);
    assert!((lhs - rhs).norm() < 1e-9);

    let jacobi = cs(&x.bracket(&y).unwrap(), &z) + cs(&y.bracket(&z).unwrap(), &x) + cs(&z.bracket(&x).unwrap(), &y);
    assert!(cs(&x.bracket(&y).unwrap(), &z).norm() > 1e-3);
    assert!(jacobi.norm() < 1e-7, "{jacobi}");

    let changed = lie_cocycle(&alg, &x.with_profile(BumpProfile::new(0.3).unwrap()), &y.with_profile(BumpProfile::new(0.3).unwrap()))
        .unwrap()
        .c_star;
    assert!((changed - cs(&x, &y)).norm() < 1e-6 * cs(&x, &y).norm().max(1.0));
}

#[test]
fn group_cocycle_recovers_the_lie_cocycle() {
    let alg = DiskAlgebra::default();
    let prof = BumpProfile::default();
    let x = LoopAlgebraElement::single(1, diag_i(), prof).unwrap();
    let y = LoopAlgebraElement::single(-1, diag_i(), prof).unwrap();
    let lie = lie_cocycle(&alg, &x, &y).unwrap().closed_form;
    let g = group_cocycle_extract(&alg, &x, &y, &[0.1, 0.2, 0.3], &DetSettings::default()).unwrap();
    assert!((g.limit - lie).norm() < 1e-3 * lie.norm(), "{} vs {lie}", g.limit);
}

#[test]
fn group_cocycle_vanishes_for_orthogonal_modes() {
    let alg = small_alg();
    let prof = BumpProfile::default();
    let x = LoopAlgebraElement::single(1, diag_i(), prof).unwrap();
    let y = LoopAlgebraElement::single(2, diag_i(), prof).unwrap();
    let g = group_cocycle_extract(&alg, &x, &y, &[0.2, 0.3], &DetSettings::default()).unwrap();
    assert!(g.limit.norm() < 1e-6, "{}", g.limit);
}

#[test]
fn group_cocycle_requires_commuting_boundary_values() {
    let alg = small_alg();
    let prof = BumpProfile::default();
    let [s1, s2, _] = MatrixNC::pauli();
    let x = LoopAlgebraElement::single(1, s1.scale(c(0.0, 1.0)), prof).unwrap();
    let y = LoopAlgebraElement::single(-1, s2.scale(c(0.0, 1.0)), prof).unwrap();
    let r = group_cocycle_extract(&alg, &x, &y, &[0.1], &DetSettings::default());
    assert!(matches!(r, Err(Error::BoundaryNotCommuting(_))));
}

#[test]
fn neville_extrapolation_is_exact_for_polynomials() {
    let h = [0.01, 0.04, 0.09];
    let v: Vec<C64> = h.iter().map(|t| c(2.0 + 3.0 * t - t * t, -1.0 + t)).collect();
    assert!((extrapolate_to_zero(&h, &v) - c(2.0, -1.0)).norm() < 1e-12);
}
