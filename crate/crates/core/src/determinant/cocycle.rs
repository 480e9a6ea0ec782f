use std::sync::{Arc, Mutex};

use super::det::{log_det, DetSettings};
use super::loops::LoopAlgebraElement;
use crate::disk::{DiskAlgebra, StarElement};
use crate::error::{Error, Result};
use crate::jets::{LoopFamily, SmoothMap};
use crate::matrix::{C64, ZERO};

/// Largest admissible loop norm for the section.
pub const SECTION_MAX_NORM: f64 = 2.0;

/// Largest admissible `‖[X(θ), Y(θ)]‖` for group-level extraction.
pub const COMMUTING_TOL: f64 = 1e-12;

const ANGLE_SAMPLES: usize = 64;

/// `ψ(e^X) = e^{X̃}` with the star exponential.
pub fn section_psi(alg: &DiskAlgebra, x: &LoopAlgebraElement) -> Result<StarElement> {
    let norm = x.sup_norm(ANGLE_SAMPLES);
    if norm > SECTION_MAX_NORM {
        return Err(Error::InvalidArgument(format!("loop norm {norm:.3} exceeds {SECTION_MAX_NORM}")));
    }
    let xt = alg.zero_order(x.extension()?)?;
    alg.star_exp(&xt)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieCocycle {
    /// `TR [X̃, Ỹ]_⋆`
    pub c_star: C64,
    /// `(1/2πi)∮ tr X dY` by angular quadrature.
    pub c_boundary: C64,
    /// `Σ_m (−m) tr(A_m B_{−m})`
    pub closed_form: C64,
}

pub fn lie_cocycle(alg: &DiskAlgebra, x: &LoopAlgebraElement, y: &LoopAlgebraElement) -> Result<LieCocycle> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("loops of size {} and {}", x.dim(), y.dim())));
    }
    let (xm, ym) = (x.extension()?, y.extension()?);
    let k = alg.truncation();
    let xt = StarElement::from_order_zero(xm.clone(), k);
    let yt = StarElement::from_order_zero(ym.clone(), k);
    let c_star = alg.trace(&alg.star_commutator(&xt, &yt)?)?;
    let c_boundary = alg.boundary_pairing(&xm, &ym)?;
    Ok(LieCocycle { c_star, c_boundary, closed_form: x.contour_pairing(y) })
}

/// `s ↦ e^{sA} e^{sB} e^{−sA} e^{−sB}` (pointwise) with its analytic
/// derivative.
pub fn pointwise_commutator_path(a: &SmoothMap, b: &SmoothMap) -> Arc<LoopFamily> {
    let n = a.dim().max(b.dim());
    // value and velocity at the same s share their exponential nodes
    let last: Arc<Mutex<Option<(u64, [SmoothMap; 4])>>> = Arc::new(Mutex::new(None));
    let factors = {
        let (a, b) = (a.clone(), b.clone());
        move |s: f64| {
            let mut slot = last.lock().unwrap();
            if let Some((bits, e)) = slot.as_ref() {
                if *bits == s.to_bits() {
                    return e.clone();
                }
            }
            let c = C64::new(s, 0.0);
            let e = [a.scale(c).exp(), b.scale(c).exp(), a.scale(-c).exp(), b.scale(-c).exp()];
            *slot = Some((s.to_bits(), e.clone()));
            e
        }
    };
    let f1 = factors.clone();
    let value = Arc::new(move |s: f64| {
        let e = f1(s);
        &(&(&e[0] * &e[1]) * &e[2]) * &e[3]
    });
    let (a, b) = (a.clone(), b.clone());
    let velocity = Arc::new(move |s: f64| {
        let e = factors(s);
        let gens = [a.clone(), b.clone(), a.scale(C64::new(-1.0, 0.0)), b.scale(C64::new(-1.0, 0.0))];
        let terms: Vec<SmoothMap> = (0..4)
            .map(|i| {
                let mut acc = SmoothMap::identity(n);
                for (j, f) in e.iter().enumerate() {
                    if j == i {
                        acc = &acc * &gens[i];
                    }
                    acc = &acc * f;
                }
                acc
            })
            .collect();
        SmoothMap::sum(terms).expect("terms share a size")
    });
    LoopFamily::new("pointwise group commutator", n, false, value, velocity)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupCocycle {
    /// `(ε, log det(commutator)/ε²)`
    pub samples: Vec<(f64, C64)>,
    /// Richardson limit `ε → 0` in powers of `ε²`.
    pub limit: C64,
}

/// `log det(ψ(e^{εX}) ⋆ ψ(e^{εY}) ⋆ ψ(e^{−εX}) ⋆ ψ(e^{−εY}))`
pub fn group_commutator_log_det(alg: &DiskAlgebra, x: &LoopAlgebraElement, y: &LoopAlgebraElement, settings: &DetSettings) -> Result<C64> {
    let px = section_psi(alg, x)?;
    let py = section_psi(alg, y)?;
    let pxm = section_psi(alg, &x.scale(-1.0))?;
    let pym = section_psi(alg, &y.scale(-1.0))?;
    let q = alg.star_product(&alg.star_product(&alg.star_product(&px, &py)?, &pxm)?, &pym)?;
    let path = pointwise_commutator_path(&x.extension()?, &y.extension()?);
    log_det(alg, &q, &path, settings)
}

/// Group-level cocycle for loops that commute pointwise: Richardson
/// extrapolation of `log det(commutator)/ε²` over `eps`.
pub fn group_cocycle_extract(
    alg: &DiskAlgebra,
    x: &LoopAlgebraElement,
    y: &LoopAlgebraElement,
    eps: &[f64],
    settings: &DetSettings,
) -> Result<GroupCocycle> {
    let r = x.commutator_residual(y, ANGLE_SAMPLES);
    if r > COMMUTING_TOL {
        return Err(Error::BoundaryNotCommuting(r));
    }
    if eps.is_empty() {
        return Err(Error::InvalidArgument("no ε values given".into()));
    }
    let samples = eps
        .iter()
        .map(|&e| Ok((e, group_commutator_log_det(alg, &x.scale(e), &y.scale(e), settings)? / (e * e))))
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let v: Vec<C64> = samples.iter().map(|s| s.1).collect();
    Ok(GroupCocycle { limit: extrapolate_to_zero(&h, &v), samples })
}

/// Value at 0 of the interpolating polynomial through `(h_i, v_i)`
/// (Neville's scheme).
pub fn extrapolate_to_zero(h: &[f64], v: &[C64]) -> C64 {
    let mut p = v.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (p[i + 1] * h[i] - p[i] * h[i + k]) / (h[i] - h[i + k]);
        }
    }
    p.first().copied().unwrap_or(ZERO)
}
