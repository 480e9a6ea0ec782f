use std::sync::Arc;

use crate::disk::{DiskAlgebra, MoyalProduct, StarElement};
use crate::error::{Error, Result};
use crate::jets::{LoopFamily, SmoothMap};
use crate::matrix::{MatrixNC, C64, ZERO};
use crate::series::{series_log_unipotent, NuSeries};

/// Tolerances for the determinant constructions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetSettings {
    /// Pointwise residual allowed for `k₀ = 1` and path endpoints.
    pub tol_unipotent: f64,
    /// Boundary residual for membership in the boundary-identity group.
    pub tol_boundary: f64,
    /// Boundary unitarity residual for membership in DG.
    pub tol_unitary: f64,
    /// Largest admissible `ν^{−1}` coefficient of a homotopy integrand.
    pub tol_laurent: f64,
}

impl Default for DetSettings {
    fn default() -> Self {
        Self { tol_unipotent: 1e-10, tol_boundary: 1e-10, tol_unitary: 1e-8, tol_laurent: 1e-9 }
    }
}

/// Which group the boundary values must lie in for DG membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryGroup {
    Unitary,
    /// Invertible complex matrices (complexified loops).
    Complex,
}

/// Result of the homotopy formula for `log det g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomotopyLogDet {
    pub log_det: C64,
    /// Largest `|ν^{−1}|` coefficient of `TR_ν(g⁻¹ ⋆ ∂_t g)` over the nodes.
    pub laurent: f64,
}

pub(crate) fn nodes_with_boundary(alg: &DiskAlgebra) -> Vec<[f64; 2]> {
    let mut pts = alg.quadrature().points().to_vec();
    pts.extend(alg.quadrature().boundary_points());
    pts
}

/// `f = g ⋆ k` with `g` the order-0 part of `f` and `k` unipotent.
pub fn factorize(alg: &DiskAlgebra, f: &StarElement, group: BoundaryGroup, settings: &DetSettings) -> Result<(StarElement, StarElement)> {
    if !f.boundary_class().is_flat() {
        return Err(Error::NotInDG("boundary is not flat".into()));
    }
    let f0 = f.coeff(0);
    if group == BoundaryGroup::Unitary {
        let vals = alg.values_at(std::slice::from_ref(&f0), &alg.quadrature().boundary_points())?;
        let r = vals[0].iter().map(MatrixNC::unitarity_residual).fold(0.0, f64::max);
        if r > settings.tol_unitary {
            return Err(Error::NotInDG(format!("boundary values are not unitary (residual {r:.3e})")));
        }
    }
    let g = StarElement::with_class_of(NuSeries::constant(f0, f.order()), f)?;
    let ginv = alg.star_inverse(&g).map_err(|e| match e {
        Error::SingularZerothOrder => Error::NotInDG("order-0 coefficient is singular".into()),
        e => e,
    })?;
    let k = alg.star_product(&ginv, f)?;
    let k = unipotent_normal_form(alg, &k, settings)?;
    Ok((g, k))
}

/// Replaces a numerically verified identity order-0 coefficient by the
/// exact identity.
fn unipotent_normal_form(alg: &DiskAlgebra, k: &StarElement, settings: &DetSettings) -> Result<StarElement> {
    let n = k.dim();
    let k0 = k.coeff(0);
    if k0.as_constant().is_some_and(MatrixNC::is_identity_exact) {
        return Ok(k.clone());
    }
    let vals = alg.values_at(&[k0], &nodes_with_boundary(alg))?;
    let r = vals[0].iter().map(|v| (v - &MatrixNC::identity(n)).max_abs()).fold(0.0, f64::max);
    if r > settings.tol_unipotent {
        return Err(Error::NotUnipotent(format!("order-0 coefficient differs from the identity by {r:.3e}")));
    }
    let mut coeffs = k.series().coeffs().to_vec();
    coeffs[0] = SmoothMap::identity(n);
    StarElement::with_class_of(NuSeries::new(0, coeffs)?, k)
}

/// `TR log k`, where `log` is the finite series logarithm of a unipotent
/// element.
pub fn log_det_unipotent(alg: &DiskAlgebra, k: &StarElement) -> Result<C64> {
    let moyal = MoyalProduct { max_order: k.order() };
    let log = series_log_unipotent(k.series(), &moyal, |c| c.as_constant().is_some_and(MatrixNC::is_identity_exact))?;
    alg.trace(&StarElement::general(log)?)
}

/// `exp(TR log k)`
pub fn det_unipotent(alg: &DiskAlgebra, k: &StarElement) -> Result<C64> {
    Ok(log_det_unipotent(alg, k)?.exp())
}

/// `log det g = ∫₀¹ TR(g(t)⁻¹ ⋆ ∂_t g(t)) dt` along a path of order-0
/// elements from the identity, with Gauss–Legendre nodes in `t`.
pub fn det_homotopy(alg: &DiskAlgebra, path: &Arc<LoopFamily>, settings: &DetSettings) -> Result<HomotopyLogDet> {
    let n = path.dim();
    let start = alg.values_at(&[path.slice(0.0)], &nodes_with_boundary(alg))?;
    let r = start[0].iter().map(|v| (v - &MatrixNC::identity(n)).max_abs()).fold(0.0, f64::max);
    if r > settings.tol_unipotent {
        return Err(Error::PathNotInG(format!("path does not start at the identity (residual {r:.3e})")));
    }
    trace_integral(alg, path, &alg.quadrature().t_nodes_open(), settings)
}

/// `Σ_i w_i TR(g(t_i)⁻¹ ⋆ ∂_t g(t_i))` over the given parameter nodes, with
/// every slice checked to have identity boundary value.
pub(crate) fn trace_integral(
    alg: &DiskAlgebra,
    path: &Arc<LoopFamily>,
    nodes: &[(f64, f64)],
    settings: &DetSettings,
) -> Result<HomotopyLogDet> {
    let k = alg.truncation();
    let n = path.dim();
    let bpts = alg.quadrature().boundary_points();
    let mut log_det = ZERO;
    let mut laurent: f64 = 0.0;
    for &(t, w) in nodes {
        let gt = path.slice(t);
        let b = alg.values_at(std::slice::from_ref(&gt), &bpts)?;
        let r = b[0].iter().map(|v| (v - &MatrixNC::identity(n)).max_abs()).fold(0.0, f64::max);
        if r > settings.tol_boundary {
            return Err(Error::PathNotInG(format!("slice t = {t:.4} has boundary residual {r:.3e}")));
        }
        let g = StarElement::from_order_zero(gt.clone(), k);
        let dg = StarElement::from_order_zero(path.velocity(t), k);
        let integrand = alg.star_product(&alg.star_inverse_unchecked(&g, gt.inverse())?, &dg)?;
        let (neg, tr) = alg.trace_low(&integrand)?;
        laurent = laurent.max(neg.norm());
        log_det += tr * w;
    }
    if laurent > settings.tol_laurent {
        return Err(Error::LaurentObstruction(laurent));
    }
    Ok(HomotopyLogDet { log_det, laurent })
}

/// `log det f = log det g + TR log k` for `f = g ⋆ k` in the boundary
/// identity group, with `path` joining the identity to `g = f₀`.
pub fn log_det(alg: &DiskAlgebra, f: &StarElement, path: &Arc<LoopFamily>, settings: &DetSettings) -> Result<C64> {
    let n = f.dim();
    let pts = nodes_with_boundary(alg);
    let ends = alg.values_at(&[path.slice(1.0), f.coeff(0)], &pts)?;
    let r = ends[0].iter().zip(&ends[1]).map(|(a, b)| (a - b).max_abs()).fold(0.0, f64::max);
    if r > settings.tol_unipotent {
        return Err(Error::PathNotInG(format!("path does not end at the order-0 part (residual {r:.3e})")));
    }
    let bvals = alg.boundary_values(f, &alg.quadrature().boundary_angles())?;
    for (p, per) in bvals.iter().enumerate().take(2) {
        let target = if p == 0 { MatrixNC::identity(n) } else { MatrixNC::zeros(n) };
        let r = per.iter().map(|v| (v - &target).max_abs()).fold(0.0, f64::max);
        if r > settings.tol_boundary {
            return Err(Error::PathNotInG(format!("element has boundary residual {r:.3e} at order {p}")));
        }
    }
    let (_, k) = factorize(alg, f, BoundaryGroup::Complex, settings)?;
    Ok(det_homotopy(alg, path, settings)?.log_det + log_det_unipotent(alg, &k)?)
}

/// `t ↦ exp(φ(t)·h)` with velocity `φ'(t)·h·exp(φ(t)·h)`.
pub fn exponential_path(
    h: &SmoothMap,
    phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    dphi: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Arc<LoopFamily> {
    let (h1, h2) = (h.clone(), h.clone());
    let phi = Arc::new(phi);
    let phi2 = Arc::clone(&phi);
    LoopFamily::new(
        "exponential path",
        h.dim(),
        false,
        Arc::new(move |t| h1.scale(C64::new(phi(t), 0.0)).exp()),
        Arc::new(move |t| {
            let e = h2.scale(C64::new(phi2(t), 0.0)).exp();
            (&h2 * &e).scale(C64::new(dphi(t), 0.0))
        }),
    )
}

/// `t ↦ exp(t·h)`
pub fn linear_exponential_path(h: &SmoothMap) -> Arc<LoopFamily> {
    exponential_path(h, |t| t, |_| 1.0)
}

/// Reduces `z` to the strip `−π < Im z ≤ π`.
pub fn mod_two_pi_i(z: C64) -> C64 {
    let tau = 2.0 * std::f64::consts::PI;
    let mut im = z.im - tau * (z.im / tau).round();
    if im <= -std::f64::consts::PI {
        im += tau;
    }
    C64::new(z.re, im)
}
