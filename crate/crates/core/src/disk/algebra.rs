use std::f64::consts::PI;

use super::element::{BoundaryClass, StarElement};
use super::moyal::MoyalProduct;
use super::quadrature::DiskQuadrature;
use crate::error::{Error, Result};
use crate::jets::{EvalContext, JetConfig, SmoothMap};
use crate::matrix::{MatrixNC, C64, ZERO};
use crate::series::{series_inverse, series_mul, series_sub, NuSeries};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskSettings {
    /// Truncation order K of ν-series.
    pub truncation: usize,
    pub tol_flat: f64,
    pub tol_boundary: f64,
    /// Highest radial derivative checked for flatness.
    pub j_check: usize,
    /// Number of boundary angles used by the boundary classifier.
    pub boundary_samples: usize,
    pub exp_tol: f64,
    pub exp_max_terms: usize,
}

impl Default for DiskSettings {
    fn default() -> Self {
        Self {
            truncation: 2,
            tol_flat: 1e-9,
            tol_boundary: 1e-10,
            j_check: 6,
            boundary_samples: 16,
            exp_tol: 1e-14,
            exp_max_terms: 60,
        }
    }
}

/// The deformed disk algebra: star operations, traces and the quadrature
/// and evaluation context they run on.
pub struct DiskAlgebra {
    quad: DiskQuadrature,
    ctx: EvalContext,
    settings: DiskSettings,
}

impl DiskAlgebra {
    pub fn new(quad: DiskQuadrature, jet: JetConfig, settings: DiskSettings) -> Result<Self> {
        if jet.max_order < settings.j_check + settings.truncation {
            return Err(Error::InvalidArgument(format!(
                "jet order cap {} is below the flatness check order {} plus truncation {}",
                jet.max_order, settings.j_check, settings.truncation
            )));
        }
        Ok(Self { quad, ctx: EvalContext::new(jet), settings })
    }

    pub fn with_quadrature(quad: DiskQuadrature) -> Self {
        Self::new(quad, JetConfig::default(), DiskSettings::default()).expect("default settings are consistent")
    }

    pub fn quadrature(&self) -> &DiskQuadrature {
        &self.quad
    }

    pub fn context(&self) -> &EvalContext {
        &self.ctx
    }

    pub fn settings(&self) -> &DiskSettings {
        &self.settings
    }

    pub fn truncation(&self) -> usize {
        self.settings.truncation
    }

    fn moyal(&self) -> MoyalProduct {
        MoyalProduct { max_order: self.settings.truncation }
    }

    /// Values of every map at every interior node: `out[map][node]`.
    pub fn values_at_nodes(&self, maps: &[SmoothMap]) -> Result<Vec<Vec<MatrixNC>>> {
        self.values_at(maps, self.quad.points())
    }

    pub fn values_at(&self, maps: &[SmoothMap], points: &[[f64; 2]]) -> Result<Vec<Vec<MatrixNC>>> {
        let jets = self.ctx.eval_points(maps, points, 0)?;
        let mut out = vec![Vec::with_capacity(points.len()); maps.len()];
        for per_point in jets {
            for (k, j) in per_point.into_iter().enumerate() {
                out[k].push(j.value());
            }
        }
        Ok(out)
    }

    /// Largest entry modulus of each map over the interior nodes.
    pub fn sup_norms(&self, maps: &[SmoothMap]) -> Result<Vec<f64>> {
        let vals = self.values_at_nodes(maps)?;
        Ok(vals.iter().map(|v| v.iter().map(MatrixNC::max_abs).fold(0.0, f64::max)).collect())
    }

    /// `∫_D tr f dx dy` for each map.
    pub fn integrate_traces(&self, maps: &[SmoothMap]) -> Result<Vec<C64>> {
        let vals = self.values_at_nodes(maps)?;
        Ok(vals.iter().map(|v| self.quad.integrate(&v.iter().map(MatrixNC::trace).collect::<Vec<_>>())).collect())
    }

    /// Wraps a series and determines its boundary class by sampling.
    pub fn element(&self, series: NuSeries<SmoothMap>) -> Result<StarElement> {
        let class = self.classify(&series)?;
        StarElement::with_class(series, class)
    }

    /// Zero-order element `f + 0·ν + …` with verified class.
    pub fn zero_order(&self, f: SmoothMap) -> Result<StarElement> {
        self.element(NuSeries::constant(f, self.settings.truncation))
    }

    /// Boundary class of a series, from radial derivatives up to `j_check`
    /// and boundary values at `boundary_samples` angles. Only the
    /// coefficients of `ν⁰` and `ν¹` are inspected (see [`BoundaryClass`]).
    pub fn classify(&self, series: &NuSeries<SmoothMap>) -> Result<BoundaryClass> {
        let ns = self.settings.boundary_samples;
        let angles: Vec<f64> = (0..ns).map(|k| 2.0 * PI * (k as f64 + 0.25) / ns as f64).collect();
        let points: Vec<[f64; 2]> = angles.iter().map(|t| [t.cos(), t.sin()]).collect();
        let low = &series.coeffs()[..series.coeffs().len().min(2)];
        let jets = self.ctx.eval_points(low, &points, self.settings.j_check)?;
        let mut identity = true;
        let mut constant = true;
        for (k, per_point) in jets.iter().enumerate() {
            let (c, s) = (angles[k].cos(), angles[k].sin());
            for (p, jet) in per_point.iter().enumerate() {
                for j in 1..=self.settings.j_check {
                    if jet.directional_derivative(j, c, s).max_abs() > self.settings.tol_flat {
                        return Ok(BoundaryClass::General);
                    }
                }
                let v = jet.value();
                let target = if p == 0 { MatrixNC::identity(v.dim()) } else { MatrixNC::zeros(v.dim()) };
                if (&v - &target).max_abs() > self.settings.tol_boundary {
                    identity = false;
                }
                let first = jets[0][p].value();
                if (&v - &first).max_abs() > self.settings.tol_boundary {
                    constant = false;
                }
            }
        }
        Ok(if identity {
            BoundaryClass::FlatIdentity
        } else if constant {
            BoundaryClass::FlatConstant
        } else {
            BoundaryClass::FlatLoop
        })
    }

    pub fn star_product(&self, f: &StarElement, g: &StarElement) -> Result<StarElement> {
        f.check_compatible(g)?;
        let s = series_mul(f.series(), g.series(), &self.moyal())?;
        StarElement::with_class(s, f.boundary_class().product(g.boundary_class()))
    }

    /// `f ⋆ g − g ⋆ f`
    pub fn star_commutator(&self, f: &StarElement, g: &StarElement) -> Result<StarElement> {
        self.star_product(f, g)?.sub(&self.star_product(g, f)?)
    }

    /// Star inverse; the order-0 coefficient is the pointwise inverse.
    pub fn star_inverse(&self, f: &StarElement) -> Result<StarElement> {
        let f0 = f.coeff(0);
        let inv0 = f0.inverse();
        let mut pts = self.quad.points().to_vec();
        pts.extend(self.quad.boundary_points());
        let vals = self.values_at(&[f0, inv0.clone()], &pts).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SingularZerothOrder,
            e => e,
        })?;
        // condition number over the whole disk, not just per point
        let sup = |v: &[MatrixNC]| v.iter().map(MatrixNC::norm1).fold(0.0, f64::max);
        if !(sup(&vals[0]) * sup(&vals[1]) <= self.ctx.config().cond_max) {
            return Err(Error::SingularZerothOrder);
        }
        self.star_inverse_unchecked(f, inv0)
    }

    /// Star inverse without the disk-wide conditioning scan; singular points
    /// still surface as `SingularMatrix` when the result is evaluated.
    pub(crate) fn star_inverse_unchecked(&self, f: &StarElement, inv0: SmoothMap) -> Result<StarElement> {
        let s = series_inverse(f.series(), &inv0, &self.moyal())?;
        StarElement::with_class(s, f.boundary_class())
    }

    /// `Σ_n X^{⋆n}/n!`, with the number of terms grown until every
    /// coefficient of the last terms is below `exp_tol` on the nodes.
    pub fn star_exp(&self, x: &StarElement) -> Result<StarElement> {
        let n = x.dim();
        let k = x.order();
        let one = StarElement::identity(n, k);
        let tol = self.settings.exp_tol;
        let mut terms = vec![one.clone()];
        let mut cap = 8usize;
        loop {
            while terms.len() <= cap {
                let m = terms.len();
                let next = self.star_product(terms.last().unwrap(), x)?.scale(C64::new(1.0 / m as f64, 0.0));
                terms.push(next);
            }
            // tail: the last two terms
            let tail: Vec<SmoothMap> = terms[cap - 1..].iter().flat_map(|t| t.series().coeffs().to_vec()).collect();
            let norms = self.sup_norms(&tail)?;
            if norms.iter().all(|&v| v < tol) {
                break;
            }
            if cap >= self.settings.exp_max_terms {
                return Err(Error::NoConvergence { terms: cap });
            }
            cap = (cap * 2).min(self.settings.exp_max_terms);
        }
        let class = match x.boundary_class() {
            BoundaryClass::General => BoundaryClass::General,
            c => c.max(BoundaryClass::FlatConstant),
        };
        let coeffs = (0..=k)
            .map(|p| SmoothMap::sum(terms.iter().map(|t| t.coeff(p)).collect()))
            .collect::<Result<Vec<_>>>()?;
        StarElement::with_class(NuSeries::new(0, coeffs)?, class)
    }

    /// `TR_ν f = (1/2πν) ∫_D tr f`, with the ν^{m−1} coefficient equal to
    /// `(1/2π)∫ tr f_m`.
    pub fn trace_nu(&self, f: &StarElement) -> Result<NuSeries<C64>> {
        let ints = self.integrate_traces(f.series().coeffs())?;
        let p0 = f.series().p_min() - 1;
        NuSeries::new(p0, ints.into_iter().map(|v| v / (2.0 * PI)).collect())
    }

    /// The `ν^{−1}` and `ν⁰` coefficients of [`Self::trace_nu`], evaluating
    /// only the coefficients of order 0 and 1.
    pub fn trace_low(&self, f: &StarElement) -> Result<(C64, C64)> {
        let maps: Vec<SmoothMap> = (0..=f.order().min(1)).map(|p| f.coeff(p)).collect();
        let ints = self.integrate_traces(&maps)?;
        let tr = ints.get(1).copied().unwrap_or(ZERO);
        Ok((ints[0] / (2.0 * PI), tr / (2.0 * PI)))
    }

    /// The ν⁰ coefficient of [`Self::trace_nu`], `(1/2π)∫ tr f_1`.
    pub fn trace(&self, f: &StarElement) -> Result<C64> {
        if f.order() < 1 || f.coeff(1).is_zero() {
            return Ok(ZERO);
        }
        Ok(self.integrate_traces(&[f.coeff(1)])?[0] / (2.0 * PI))
    }

    /// `(1/2πi) ∮ tr f dg` over the boundary nodes, using the order-0
    /// coefficients.
    pub fn boundary_pairing(&self, f: &SmoothMap, g: &SmoothMap) -> Result<C64> {
        let pts = self.quad.boundary_points();
        let jets = self.ctx.eval_points(&[f.clone(), g.clone()], &pts, 1)?;
        let vals: Vec<C64> = jets
            .iter()
            .zip(&pts)
            .map(|(j, p)| {
                // ∂_θ = −y ∂_x + x ∂_y
                let dg = &j[1].coeff(0, 1).scale(C64::new(p[0], 0.0)) - &j[1].coeff(1, 0).scale(C64::new(p[1], 0.0));
                (&j[0].value() * &dg).trace()
            })
            .collect();
        Ok(self.quad.integrate_boundary(&vals) / C64::new(0.0, 2.0 * PI))
    }

    /// `(TR_ν [f, g]_⋆, (1/2πi)∮ tr f dg)`.
    pub fn trace_defect(&self, f: &StarElement, g: &StarElement) -> Result<(NuSeries<C64>, C64)> {
        for (name, e) in [("first", f), ("second", g)] {
            if !e.boundary_class().is_flat() {
                return Err(Error::BoundaryNotFlat(format!("{name} argument")));
            }
        }
        let lhs = self.trace_nu(&self.star_commutator(f, g)?)?;
        let rhs = self.boundary_pairing(&f.coeff(0), &g.coeff(0))?;
        Ok((lhs, rhs))
    }

    /// Boundary values `θ ↦ (f_0(θ), …, f_K(θ))` at the given angles.
    pub fn boundary_values(&self, f: &StarElement, angles: &[f64]) -> Result<Vec<Vec<MatrixNC>>> {
        let pts: Vec<[f64; 2]> = angles.iter().map(|t| [t.cos(), t.sin()]).collect();
        self.values_at(f.series().coeffs(), &pts)
    }

    /// Largest sup-norm over the nodes of the coefficients of `f − g`.
    pub fn distance(&self, f: &StarElement, g: &StarElement) -> Result<f64> {
        let d = series_sub(f.series(), g.series())?;
        Ok(self.sup_norms(d.coeffs())?.into_iter().fold(0.0, f64::max))
    }

    /// `‖f − 1‖` in the sense of [`Self::distance`].
    pub fn distance_to_identity(&self, f: &StarElement) -> Result<f64> {
        self.distance(f, &StarElement::identity(f.dim(), f.order()))
    }

    /// Largest boundary deviation from the identity over the boundary nodes.
    pub fn boundary_identity_residual(&self, f: &StarElement) -> Result<f64> {
        let vals = self.boundary_values(f, &self.quad.boundary_angles())?;
        let n = f.dim();
        let mut r: f64 = 0.0;
        for (p, per) in vals.iter().enumerate() {
            for v in per {
                let t = if p == 0 { MatrixNC::identity(n) } else { MatrixNC::zeros(n) };
                let v = if v.dim() == n { v.clone() } else { MatrixNC::identity(n).scale(v[(0, 0)]) };
                r = r.max((&v - &t).max_abs());
            }
        }
        Ok(r)
    }
}

impl Default for DiskAlgebra {
    fn default() -> Self {
        Self::with_quadrature(DiskQuadrature::default())
    }
}
