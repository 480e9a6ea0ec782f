use std::f64::consts::PI;
use std::time::Instant;

use loopstar::disk::builders::{angular_mode, interior_element};
use loopstar::disk::random::{random_boundary_constant, random_boundary_identity, random_series, seeded_rng};
use loopstar::disk::{moyal_coefficient, BoundaryClass, DiskAlgebra, DiskQuadrature, StarElement};
use loopstar::jets::{BumpProfile, SmoothMap};
use loopstar::series::NuSeries;
use loopstar::{Error, MatrixNC, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn p0() -> MatrixNC {
    MatrixNC::from_real_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]])
}

fn element(alg: &DiskAlgebra, f: SmoothMap) -> StarElement {
    alg.zero_order(f).unwrap()
}

#[test]
fn coordinate_commutator() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(8, 8, 4).unwrap());
    let x = element(&alg, SmoothMap::x());
    let y = element(&alg, SmoothMap::y());
    let com = alg.star_commutator(&x, &y).unwrap();
    let vals = alg.values_at(com.series().coeffs(), &[[0.3, -0.2], [0.0, 0.9]]).unwrap();
    for v in &vals[0] {
        assert!(v.max_abs() < 1e-15);
    }
    for v in &vals[1] {
        assert!((v[(0, 0)] - c(0.0, -1.0)).norm() < 1e-12);
    }
    for v in &vals[2] {
        assert!(v.max_abs() < 1e-15);
    }
}

#[test]
fn x_star_y() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(8, 8, 4).unwrap());
    let x = element(&alg, SmoothMap::x());
    let y = element(&alg, SmoothMap::y());
    let p = alg.star_product(&x, &y).unwrap();
    let v = alg.values_at(p.series().coeffs(), &[[0.5, 0.25]]).unwrap();
    assert!((v[0][0][(0, 0)] - c(0.125, 0.0)).norm() < 1e-15);
    assert!((v[1][0][(0, 0)] - c(0.0, -0.5)).norm() < 1e-15);
}

#[test]
fn associativity_on_random_elements() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(12, 16, 4).unwrap());
    let mut rng = seeded_rng(7);
    for _ in 0..3 {
        let e: Vec<StarElement> =
            (0..3).map(|_| StarElement::general(random_series(&mut rng, 2, 2, 1.0).unwrap()).unwrap()).collect();
        let l = alg.star_product(&alg.star_product(&e[0], &e[1]).unwrap(), &e[2]).unwrap();
        let r = alg.star_product(&e[0], &alg.star_product(&e[1], &e[2]).unwrap()).unwrap();
        assert!(alg.distance(&l, &r).unwrap() < 1e-9);
    }
}

#[test]
fn constants_multiply_pointwise() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(8, 8, 4).unwrap());
    let a = StarElement::constant(MatrixNC::pauli()[0].clone(), 2);
    let g = element(&alg, &(&SmoothMap::x() * &SmoothMap::y()) * &SmoothMap::constant(p0()));
    let p = alg.star_product(&a, &g).unwrap();
    assert!(p.series().coeffs()[1].is_zero() && p.series().coeffs()[2].is_zero());
    assert!(moyal_coefficient(&SmoothMap::real(2.0), &SmoothMap::x(), 1).unwrap().is_zero());
}

#[test]
fn boundary_classes_are_detected() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(8, 8, 4).unwrap());
    let prof = BumpProfile::default();
    let a = MatrixNC::pauli()[2].clone();
    assert_eq!(element(&alg, SmoothMap::x()).boundary_class(), BoundaryClass::General);
    let mode = angular_mode(prof, 2, &a).unwrap();
    assert_eq!(element(&alg, mode).boundary_class(), BoundaryClass::FlatLoop);
    let inner = interior_element(prof, &(&SmoothMap::x() * &SmoothMap::constant(p0()))).unwrap();
    let shifted = SmoothMap::constant(a.clone()).try_add(&inner).unwrap();
    assert_eq!(element(&alg, shifted).boundary_class(), BoundaryClass::FlatConstant);
    let g = SmoothMap::identity(2).try_add(&interior_element(prof, &SmoothMap::constant(a)).unwrap()).unwrap();
    assert_eq!(element(&alg, g).boundary_class(), BoundaryClass::FlatIdentity);
}

#[test]
fn boundary_homomorphism() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(8, 16, 4).unwrap());
    let prof = BumpProfile::default();
    let p = MatrixNC::pauli();
    let f = element(&alg, angular_mode(prof, 1, &p[0]).unwrap().try_add(&interior_element(prof, &(&SmoothMap::x() * &SmoothMap::constant(p0()))).unwrap()).unwrap());
    let g = element(&alg, angular_mode(prof, -2, &p[1]).unwrap());
    let fg = alg.star_product(&f, &g).unwrap();
    assert_eq!(fg.boundary_class(), BoundaryClass::FlatLoop);
    let angles = alg.quadrature().boundary_angles();
    let bf = alg.boundary_values(&f, &angles).unwrap();
    let bg = alg.boundary_values(&g, &angles).unwrap();
    let bfg = alg.boundary_values(&fg, &angles).unwrap();
    for (k, th) in angles.iter().enumerate() {
        assert!((&bfg[0][k] - &(&bf[0][k] * &bg[0][k])).max_abs() < 1e-10);
        assert!(bfg[1][k].max_abs() < 1e-10);
        // ν²: ¼ ∂_θf ∂_θg with modes 1 and −2
        let expect = (&p[0] * &p[1]).scale(C64::from_polar(0.5, -th));
        assert!((&bfg[2][k] - &expect).max_abs() < 1e-10);
    }
}

#[test]
fn star_inverse_residual() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(10, 12, 4).unwrap());
    let mut rng = seeded_rng(3);
    let s = random_series(&mut rng, 2, 2, 0.3).unwrap();
    let mut coeffs = s.coeffs().to_vec();
    coeffs[0] = SmoothMap::identity(2).try_add(&coeffs[0]).unwrap();
    let f = StarElement::general(NuSeries::new(0, coeffs).unwrap()).unwrap();
    let inv = alg.star_inverse(&f).unwrap();
    let one = StarElement::identity(2, 2);
    assert!(alg.distance(&alg.star_product(&f, &inv).unwrap(), &one).unwrap() < 1e-10);
    assert!(alg.distance(&alg.star_product(&inv, &f).unwrap(), &one).unwrap() < 1e-10);
}

#[test]
fn star_inverse_of_identity_and_singular() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(6, 8, 4).unwrap());
    let one = StarElement::identity(2, 2);
    assert!(alg.distance_to_identity(&alg.star_inverse(&one).unwrap()).unwrap() < 1e-15);
    let x = element(&alg, SmoothMap::x());
    assert!(matches!(alg.star_inverse(&x), Err(Error::SingularZerothOrder)));
}

#[test]
fn star_exp_properties() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(10, 12, 4).unwrap());
    let zero = StarElement::constant(MatrixNC::zeros(2), 2);
    assert!(alg.distance_to_identity(&alg.star_exp(&zero).unwrap()).unwrap() < 1e-15);
    let a = MatrixNC::pauli()[1].scale(c(0.0, 0.7));
    let e = alg.star_exp(&StarElement::constant(a.clone(), 2)).unwrap();
    assert!(alg.distance(&e, &StarElement::constant(a.exp(), 2)).unwrap() < 1e-13);
    let mut rng = seeded_rng(11);
    let x = StarElement::general(random_series(&mut rng, 2, 2, 0.25).unwrap()).unwrap();
    let t = Instant::now();
    let p = alg.star_exp(&x).unwrap();
    let m = alg.star_exp(&x.scale(c(-1.0, 0.0))).unwrap();
    let r = alg.distance_to_identity(&alg.star_product(&p, &m).unwrap()).unwrap();
    assert!(r < 1e-8, "residual {r}");
    eprintln!("star_exp pair {:?}", t.elapsed());
}

#[test]
fn trace_nu_basics() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::default());
    let one = StarElement::identity(1, 2);
    let t = alg.trace_nu(&one).unwrap();
    assert_eq!(t.p_min(), -1);
    assert!((t.coeff(-1).unwrap() - c(0.5, 0.0)).norm() < 1e-13);
    let odd = element(&alg, &SmoothMap::x() * &SmoothMap::y());
    assert!(alg.trace_nu(&odd).unwrap().coeff(-1).unwrap().norm() < 1e-14);
    let cnu = StarElement::constant(MatrixNC::scalar(c(3.0, 1.0)), 2).shift_nu();
    assert!((alg.trace(&cnu).unwrap() - c(1.5, 0.5)).norm() < 1e-13);
    assert_eq!(alg.trace(&odd).unwrap(), c(0.0, 0.0));
}

#[test]
fn trace_property_on_boundary_constant_elements() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::default());
    // a cutoff spread over the whole radius keeps the quadrature error of the
    // exact-divergence integrands far below the tolerance
    let prof = BumpProfile::new(0.0).unwrap();
    let mut rng = seeded_rng(5);
    for _ in 0..2 {
        let f = alg.element(random_boundary_constant(&mut rng, prof, 2, 2, 1.0).unwrap()).unwrap();
        let g = alg.element(random_boundary_constant(&mut rng, prof, 2, 2, 1.0).unwrap()).unwrap();
        assert_eq!(f.boundary_class(), BoundaryClass::FlatConstant);
        let (lhs, rhs) = alg.trace_defect(&f, &g).unwrap();
        for v in lhs.coeffs() {
            assert!(v.norm() < 1e-9, "{lhs:?}");
        }
        assert!(rhs.norm() < 1e-12);
    }
    let f = alg.element(random_boundary_identity(&mut rng, prof, 2, 2, 1.0).unwrap()).unwrap();
    assert_eq!(f.boundary_class(), BoundaryClass::FlatIdentity);
}

#[test]
fn trace_defect_single_modes() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::default());
    let p = MatrixNC::pauli();
    let a = &p[0] + &p[2].scale(c(0.0, 1.0));
    let b = &p[0] + &MatrixNC::identity(2).scale(c(0.5, 0.0));
    let tr_ab = (&a * &b).trace();
    for s0 in [0.1, 0.2, 0.3] {
        let prof = BumpProfile::new(s0).unwrap();
        for m in 1..=4 {
            let f = element(&alg, angular_mode(prof, m, &a).unwrap());
            let g = element(&alg, angular_mode(prof, -m, &b).unwrap());
            let (lhs, rhs) = alg.trace_defect(&f, &g).unwrap();
            let expect = tr_ab * (-m as f64);
            assert!((rhs - expect).norm() < 1e-12 * expect.norm(), "{rhs} vs {expect}");
            assert!(lhs.coeff(-1).unwrap().norm() < 1e-12);
            let rel = (lhs.coeff(0).unwrap() - rhs).norm() / rhs.norm();
            assert!(rel < 1e-6, "s0={s0} m={m} rel={rel}");
        }
        let f = element(&alg, angular_mode(prof, 2, &a).unwrap());
        let g = element(&alg, angular_mode(prof, -1, &b).unwrap());
        let (lhs, rhs) = alg.trace_defect(&f, &g).unwrap();
        assert!(rhs.norm() < 1e-12 && lhs.coeff(0).unwrap().norm() < 1e-8);
    }
}

#[test]
fn trace_defect_requires_flat_arguments() {
    let alg = DiskAlgebra::with_quadrature(DiskQuadrature::new(6, 8, 4).unwrap());
    let x = element(&alg, SmoothMap::x());
    assert!(matches!(alg.trace_defect(&x, &x), Err(Error::BoundaryNotFlat(_))));
}

#[test]
fn disk_area_through_traces() {
    let alg = DiskAlgebra::default();
    let v = alg.integrate_traces(&[SmoothMap::identity(1)]).unwrap();
    assert!((v[0].re - PI).abs() < 1e-13);
}
