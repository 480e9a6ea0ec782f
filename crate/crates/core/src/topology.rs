//! Winding numbers of loops in the boundary-identity group: the degree
//! integral and the determinant winding.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::determinant::{nodes_with_boundary, trace_integral, DetSettings};
use crate::disk::DiskAlgebra;
use crate::error::{Error, Result};
use crate::jets::{BumpProfile, LoopFamily, Primitive, SmoothMap};
use crate::matrix::{MatrixNC, C64, ZERO};

/// Unitarity residual allowed on every slice.
pub const TOL_UNITARY: f64 = 1e-8;
/// Boundary-identity residual allowed on every slice.
pub const TOL_BOUNDARY: f64 = 1e-10;

const VALIDATION_SLICES: usize = 8;

/// A closed loop `t ↦ f(t, ·)` of unitary order-0 elements with identity
/// boundary value.
#[derive(Clone, Debug)]
pub struct GLoop {
    family: Arc<LoopFamily>,
}

impl GLoop {
    /// Checks closure, unitarity and the boundary value on a sample of
    /// slices before accepting `family`.
    pub fn new(alg: &DiskAlgebra, family: Arc<LoopFamily>) -> Result<Self> {
        if !family.is_closed() {
            return Err(Error::InvalidArgument(format!("family '{}' is not closed", family.label())));
        }
        let n = family.dim();
        let pts = nodes_with_boundary(alg);
        let r = family.closure_residual(alg.context(), &pts)?;
        if r > TOL_BOUNDARY {
            return Err(Error::InvalidArgument(format!("loop does not close (residual {r:.3e})")));
        }
        let interior = alg.quadrature().points().len();
        for i in 0..VALIDATION_SLICES {
            let t = i as f64 / VALIDATION_SLICES as f64;
            let vals = alg.values_at(&[family.slice(t)], &pts)?;
            let u = vals[0].iter().map(MatrixNC::unitarity_residual).fold(0.0, f64::max);
            if u > TOL_UNITARY {
                return Err(Error::NonUnitarySlice(u));
            }
            let b = vals[0][interior..].iter().map(|v| (v - &MatrixNC::identity(n)).max_abs()).fold(0.0, f64::max);
            if b > TOL_BOUNDARY {
                return Err(Error::PathNotInG(format!("slice t = {t:.4} has boundary residual {b:.3e}")));
            }
        }
        Ok(Self { family })
    }

    /// The loop `f ≡ 1`.
    pub fn constant(n: usize) -> Self {
        Self { family: LoopFamily::constant("identity", SmoothMap::identity(n)) }
    }

    pub fn family(&self) -> &Arc<LoopFamily> {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// The loop traversed `k` times (reversed for `k < 0`).
    pub fn traversed(&self, k: i32) -> Result<Self> {
        Ok(Self { family: self.family.traversed(k)? })
    }

    /// `f(t)·exp(a sin(2πt) K)` for an anti-hermitian `K` vanishing flatly
    /// at the boundary.
    pub fn perturbed(&self, alg: &DiskAlgebra, direction: &SmoothMap, amplitude: f64) -> Result<Self> {
        let tau = 2.0 * PI;
        let (k1, k2) = (direction.clone(), direction.clone());
        let phase = LoopFamily::new(
            "perturbation",
            direction.dim(),
            true,
            Arc::new(move |t| k1.scale(C64::new(amplitude * (tau * t).sin(), 0.0)).exp()),
            Arc::new(move |t| {
                let e = k2.scale(C64::new(amplitude * (tau * t).sin(), 0.0)).exp();
                (&k2 * &e).scale(C64::new(amplitude * tau * (tau * t).cos(), 0.0))
            }),
        );
        Self::new(alg, LoopFamily::pointwise_product(&self.family, &phase)?)
    }
}

/// Degree-one loop in SU(2): with `s = 2t − 1` and `u = s² + x² + y²`,
///
/// `f = cos(πχ(u)) I + i sin(πχ(u)) u^{−1/2} (s σ₃ + x σ₁ + y σ₂)`.
///
/// For each `t` this is identity wherever `u ≥ 1`, in particular on the
/// boundary circle and on the slices `t = 0, 1`.
pub fn su2_generator_loop(profile: BumpProfile) -> Result<GLoop> {
    let [s1, s2, s3] = MatrixNC::pauli().map(|m| SmoothMap::constant(m.scale(C64::new(0.0, 1.0))));
    let r2 = SmoothMap::radius_squared();
    let (x, y) = (SmoothMap::x(), SmoothMap::y());
    let spatial = (&x * &s1).try_add(&(&y * &s2))?;
    let one = SmoothMap::identity(2);
    let parts = move |t: f64, prim: Primitive| -> Result<SmoothMap> {
        let s = 2.0 * t - 1.0;
        let u = r2.try_add(&SmoothMap::real(s * s))?;
        SmoothMap::compose(prim, &u)
    };
    let cos = Primitive::CosPiChi(profile);
    let sin = Primitive::SinPiChiOverSqrt(profile);
    // f = C·I + S·V(t) with V = s iσ₃ + x iσ₁ + y iσ₂
    let direction = {
        let (s3, spatial) = (s3.clone(), spatial.clone());
        move |t: f64| spatial.try_add(&s3.scale(C64::new(2.0 * t - 1.0, 0.0)))
    };
    let value = {
        let (parts, direction, one) = (parts.clone(), direction.clone(), one.clone());
        let (cos, sin) = (cos.clone(), sin.clone());
        move |t: f64| -> Result<SmoothMap> {
            let c = parts(t, cos.clone())?;
            let sv = parts(t, sin.clone())?;
            (&c * &one).try_add(&(&sv * &direction(t)?))
        }
    };
    // ∂_t u = 4s, ∂_t V = 2 iσ₃
    let velocity = move |t: f64| -> Result<SmoothMap> {
        let s = 2.0 * t - 1.0;
        let dc = parts(t, cos.clone().derivative(1))?;
        let ds = parts(t, sin.clone().derivative(1))?;
        let sv = parts(t, sin.clone())?;
        let terms = vec![
            (&dc * &one).scale(C64::new(4.0 * s, 0.0)),
            (&ds * &direction(t)?).scale(C64::new(4.0 * s, 0.0)),
            (&sv * &s3).scale(C64::new(2.0, 0.0)),
        ];
        SmoothMap::sum(terms)
    };
    let family = LoopFamily::new(
        "su2 generator",
        2,
        true,
        Arc::new(move |t| value(t).expect("generator slices are well formed")),
        Arc::new(move |t| velocity(t).expect("generator velocities are well formed")),
    );
    Ok(GLoop { family })
}

/// `3 tr(L_t [L_x, L_y])`, the coefficient of `dt∧dx∧dy` in `tr(f⁻¹df)³`.
pub fn three_form_density(lt: &MatrixNC, lx: &MatrixNC, ly: &MatrixNC) -> C64 {
    (lt * &lx.commutator(ly)).trace() * 3.0
}

/// `Σ_σ sgn(σ) tr(L_σ(1) L_σ(2) L_σ(3))` over the six orderings of
/// `(L_t, L_x, L_y)`.
pub fn three_form_permutation_sum(lt: &MatrixNC, lx: &MatrixNC, ly: &MatrixNC) -> C64 {
    let l = [lt, lx, ly];
    let perms: [([usize; 3], f64); 6] =
        [([0, 1, 2], 1.0), ([1, 2, 0], 1.0), ([2, 0, 1], 1.0), ([0, 2, 1], -1.0), ([2, 1, 0], -1.0), ([1, 0, 2], -1.0)];
    perms.iter().fold(ZERO, |acc, (p, sign)| acc + (&(l[p[0]] * l[p[1]]) * l[p[2]]).trace() * *sign)
}

/// `−(1/24π²) ∫ tr(f⁻¹df)³` over `[0,1] × D`, trapezoid rule in `t`.
pub fn wzw_integral(alg: &DiskAlgebra, lp: &GLoop) -> Result<f64> {
    let cond = alg.context().config().cond_max;
    let pts = alg.quadrature().points();
    let mut total = ZERO;
    for (t, w) in alg.quadrature().t_nodes_closed() {
        let f = lp.family.slice(t);
        let v = lp.family.velocity(t);
        let jets = alg.context().eval_points(&[f, v], pts, 1)?;
        let density = jets
            .iter()
            .map(|j| {
                let f0 = j[0].value();
                let u = f0.unitarity_residual();
                if u > TOL_UNITARY {
                    return Err(Error::NonUnitarySlice(u));
                }
                let finv = f0.inverse(cond)?;
                let lt = &finv * &j[1].value();
                let lx = &finv * &j[0].derivative(1, 0);
                let ly = &finv * &j[0].derivative(0, 1);
                Ok(three_form_density(&lt, &lx, &ly))
            })
            .collect::<Result<Vec<_>>>()?;
        total += alg.quadrature().integrate(&density) * w;
    }
    Ok(-total.re / (24.0 * PI * PI))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    /// `(1/2πi) ∫₀¹ TR(f⁻¹ ⋆ ∂_t f) dt`
    pub value: C64,
    /// Largest `|ν^{−1}|` coefficient of the integrand over the nodes.
    pub laurent: f64,
}

/// Winding number of the determinant along the loop.
pub fn winding_via_determinant(alg: &DiskAlgebra, lp: &GLoop, settings: &DetSettings) -> Result<Winding> {
    let r = trace_integral(alg, &lp.family, &alg.quadrature().t_nodes_closed(), settings)?;
    Ok(Winding { value: r.log_det / C64::new(0.0, 2.0 * PI), laurent: r.laurent })
}
