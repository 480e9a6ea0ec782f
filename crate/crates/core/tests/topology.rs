use std::f64::consts::PI;
use std::sync::Arc;

use loopstar::determinant::DetSettings;
use loopstar::disk::builders::interior_element;
use loopstar::disk::random::{random_matrix, seeded_rng};
use loopstar::disk::DiskAlgebra;
use loopstar::jets::{BumpProfile, LoopFamily, SmoothMap};
use loopstar::topology::*;
use loopstar::{Error, MatrixNC, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn generator(alg: &DiskAlgebra) -> GLoop {
    let g = su2_generator_loop(BumpProfile::default()).unwrap();
    GLoop::new(alg, Arc::clone(g.family())).unwrap()
}

fn both(alg: &DiskAlgebra, lp: &GLoop) -> (f64, C64) {
    let w = wzw_integral(alg, lp).unwrap();
    let d = winding_via_determinant(alg, lp, &DetSettings::default()).unwrap();
    assert!(d.laurent < 1e-9);
    (w, d.value)
}

fn assert_integer(v: f64, expected: f64) {
    assert!((v - expected).abs() < 1e-3, "{v} is not {expected}");
}

#[test]
fn generator_is_identity_on_the_boundary_and_at_the_ends() {
    let alg = DiskAlgebra::default();
    let g = generator(&alg);
    let f = g.family();
    let pts = [[1.0, 0.0], [0.0, -1.0], [0.6, 0.8], [0.1, 0.2], [0.0, 0.0]];
    for t in [0.0, 1.0] {
        let v = alg.values_at(&[f.slice(t)], &pts).unwrap();
        for m in &v[0] {
            assert!((m - &MatrixNC::identity(2)).max_abs() < 1e-14);
        }
    }
    let v = alg.values_at(&[f.slice(0.37)], &pts[..3]).unwrap();
    for m in &v[0] {
        assert!((m - &MatrixNC::identity(2)).max_abs() < 1e-14);
    }
    // at the centre of the ball the map reaches −1
    let v = alg.values_at(&[f.slice(0.5)], &[[0.0, 0.0]]).unwrap();
    assert!((&v[0][0] + &MatrixNC::identity(2)).max_abs() < 1e-14);
}

#[test]
fn generator_velocity_matches_difference_quotients() {
    let alg = DiskAlgebra::default();
    let g = generator(&alg);
    let pts = [[0.1, 0.2], [-0.3, 0.5], [0.0, 0.0], [0.7, -0.1]];
    for t in [0.2, 0.45, 0.5, 0.8] {
        let r = g.family().velocity_residual(alg.context(), t, 1e-5, &pts).unwrap();
        assert!(r < 1e-6, "t = {t}: {r}");
    }
}

#[test]
fn constant_loop_has_no_winding() {
    let alg = DiskAlgebra::default();
    let (w, d) = both(&alg, &GLoop::constant(2));
    assert!(w.abs() < 1e-14);
    assert!(d.norm() < 1e-14);
}

#[test]
fn generator_has_degree_one() {
    let alg = DiskAlgebra::default();
    let (w, d) = both(&alg, &generator(&alg));
    assert_integer(w.abs(), 1.0);
    assert_integer(d.re.abs(), 1.0);
    assert!(d.im.abs() < 1e-3);
    assert!((w.abs() - d.norm()).abs() < 2e-3);
    // both conventions give the same sign
    assert!((w - d.re).abs() < 1e-6);
}

#[test]
fn traversal_multiplies_the_degree() {
    let alg = DiskAlgebra::default();
    let g = generator(&alg);
    let (w1, d1) = both(&alg, &g);
    let (w2, d2) = both(&alg, &g.traversed(2).unwrap());
    assert_integer(w2.abs(), 2.0);
    assert!((w2 - 2.0 * w1).abs() < 1e-3);
    assert!((d2 - d1 * 2.0).norm() < 1e-3);
    let (wr, dr) = both(&alg, &g.traversed(-1).unwrap());
    assert!((wr + w1).abs() < 1e-3);
    assert!((dr + d1).norm() < 1e-3);
}

#[test]
fn perturbation_keeps_the_degree() {
    let alg = DiskAlgebra::default();
    let g = generator(&alg);
    let prof = BumpProfile::default();
    let [s1, s2, s3] = MatrixNC::pauli().map(|m| SmoothMap::constant(m.scale(c(0.0, 1.0))));
    let k = SmoothMap::sum(vec![s1, &SmoothMap::x() * &s2, &SmoothMap::y() * &s3]).unwrap();
    let k = interior_element(prof, &k).unwrap();
    let p = g.perturbed(&alg, &k, 0.1).unwrap();
    let (w0, d0) = both(&alg, &g);
    let (w, d) = both(&alg, &p);
    assert_eq!(w.round(), w0.round());
    assert_eq!(d.re.round(), d0.re.round());
    assert_integer(w, w0.round());
    assert_integer(d.re, d0.re.round());
}

#[test]
fn three_form_reduction_matches_the_permutation_sum() {
    let mut rng = seeded_rng(13);
    for n in [2, 3, 4] {
        for _ in 0..5 {
            let (a, b, d) = (random_matrix(&mut rng, n, 1.0), random_matrix(&mut rng, n, 1.0), random_matrix(&mut rng, n, 1.0));
            let full = three_form_permutation_sum(&a, &b, &d);
            let reduced = three_form_density(&a, &b, &d);
            assert!((full - reduced).norm() < 1e-12 * (1.0 + full.norm()));
        }
    }
}

/// `(1 + ½ sin²(8πt) χ(u)) I`: identity on the validation slices `t = i/8`,
/// not unitary between them.
fn stretched_loop() -> Arc<LoopFamily> {
    let chi = interior_element(BumpProfile::default(), &SmoothMap::identity(2)).unwrap();
    let (c1, c2) = (chi.clone(), chi);
    LoopFamily::new(
        "stretch",
        2,
        true,
        Arc::new(move |t| SmoothMap::identity(2).try_add(&c1.scale(c(0.5 * (8.0 * PI * t).sin().powi(2), 0.0))).unwrap()),
        Arc::new(move |t| c2.scale(c(0.5 * 8.0 * PI * (16.0 * PI * t).sin(), 0.0))),
    )
}

#[test]
fn non_unitary_slices_are_rejected() {
    let alg = DiskAlgebra::default();
    let lp = GLoop::new(&alg, stretched_loop()).unwrap();
    assert!(matches!(wzw_integral(&alg, &lp), Err(Error::NonUnitarySlice(_))));

    let chi = interior_element(BumpProfile::default(), &SmoothMap::identity(2)).unwrap();
    let scaled = SmoothMap::identity(2).try_add(&chi.scale(c(0.5, 0.0))).unwrap();
    let fam = LoopFamily::constant("scaled", scaled);
    assert!(matches!(GLoop::new(&alg, fam), Err(Error::NonUnitarySlice(_))));
}

#[test]
fn loops_must_be_closed_with_identity_boundary() {
    let alg = DiskAlgebra::default();
    let u = SmoothMap::constant(MatrixNC::diag(&[c(0.0, 1.0), c(0.0, -1.0)]));
    assert!(matches!(GLoop::new(&alg, LoopFamily::constant("rotation", u)), Err(Error::PathNotInG(_))));
    let g = su2_generator_loop(BumpProfile::default()).unwrap();
    let open = LoopFamily::new(
        "open",
        2,
        true,
        Arc::new({
            let f = Arc::clone(g.family());
            move |t| f.slice(0.5 * t)
        }),
        Arc::new({
            let f = Arc::clone(g.family());
            move |t| f.velocity(0.5 * t).scale(c(0.5, 0.0))
        }),
    );
    assert!(matches!(GLoop::new(&alg, open), Err(Error::InvalidArgument(_))));
}
