//! Seeded random elements for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::builders::interior_element;
use crate::error::Result;
use crate::jets::{BumpProfile, Primitive, SmoothMap};
use crate::matrix::{MatrixNC, C64};
use crate::series::NuSeries;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[−scale, scale]`.
pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> MatrixNC {
    MatrixNC::from_fn(n, |_, _| C64::new(rng.random_range(-scale..=scale), rng.random_range(-scale..=scale)))
}

/// Random anti-hermitian traceless matrix.
pub fn random_su(rng: &mut impl Rng, n: usize, scale: f64) -> MatrixNC {
    let a = random_matrix(rng, n, scale);
    let mut h = (&a - &a.adjoint()).scale(C64::new(0.5, 0.0));
    let t = h.trace() / n as f64;
    for i in 0..n {
        h[(i, i)] -= t;
    }
    h
}

/// `Σ_{a+b≤deg} A_ab x^a y^b` with random matrix coefficients.
pub fn random_polynomial(rng: &mut impl Rng, n: usize, degree: usize, scale: f64) -> Result<SmoothMap> {
    let (x, y) = (SmoothMap::x(), SmoothMap::y());
    let mut terms = Vec::new();
    for d in 0..=degree {
        for b in 0..=d {
            let mut mono = SmoothMap::real(1.0);
            for _ in 0..(d - b) {
                mono = SmoothMap::product(&mono, &x)?;
            }
            for _ in 0..b {
                mono = SmoothMap::product(&mono, &y)?;
            }
            let c = SmoothMap::constant(random_matrix(rng, n, scale / (1 + d) as f64));
            terms.push(SmoothMap::product(&mono, &c)?);
        }
    }
    SmoothMap::sum(terms)
}

/// Random smooth map: a polynomial plus a transcendental term.
pub fn random_map(rng: &mut impl Rng, n: usize, scale: f64) -> Result<SmoothMap> {
    let p = random_polynomial(rng, n, 3, scale)?;
    let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let arg = &SmoothMap::x().scale(C64::new(a, 0.0)) + &SmoothMap::y().scale(C64::new(b, 0.0));
    let s = SmoothMap::compose(Primitive::Sin, &arg)?;
    let c = SmoothMap::constant(random_matrix(rng, n, scale));
    p.try_add(&SmoothMap::product(&s, &c)?)
}

/// Series with random bounded coefficients for every power up to `k`.
pub fn random_series(rng: &mut impl Rng, n: usize, k: usize, scale: f64) -> Result<NuSeries<SmoothMap>> {
    let coeffs = (0..=k).map(|_| random_map(rng, n, scale)).collect::<Result<Vec<_>>>()?;
    NuSeries::new(0, coeffs)
}

/// Series whose coefficients are `C_p + χ(u)·P_p`: flat with constant
/// boundary values.
pub fn random_boundary_constant(rng: &mut impl Rng, profile: BumpProfile, n: usize, k: usize, scale: f64) -> Result<NuSeries<SmoothMap>> {
    let coeffs = (0..=k)
        .map(|_| {
            let c = SmoothMap::constant(random_matrix(rng, n, scale));
            c.try_add(&interior_element(profile, &random_map(rng, n, scale)?)?)
        })
        .collect::<Result<Vec<_>>>()?;
    NuSeries::new(0, coeffs)
}

/// Series `1 + χ(u)·P_0 + Σ_p ν^p χ(u)·P_p`: flat with identity boundary value.
pub fn random_boundary_identity(rng: &mut impl Rng, profile: BumpProfile, n: usize, k: usize, scale: f64) -> Result<NuSeries<SmoothMap>> {
    let mut coeffs = Vec::with_capacity(k + 1);
    for p in 0..=k {
        let q = interior_element(profile, &random_map(rng, n, scale)?)?;
        coeffs.push(if p == 0 { SmoothMap::identity(n).try_add(&q)? } else { q });
    }
    NuSeries::new(0, coeffs)
}
