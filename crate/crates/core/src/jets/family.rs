use std::fmt;
use std::sync::Arc;

use super::eval::EvalContext;
use super::expr::SmoothMap;
use crate::error::{Error, Result};

pub type SliceFn = Arc<dyn Fn(f64) -> SmoothMap + Send + Sync>;

/// A t-parametrized family `t ↦ f(t, ·)`, `t ∈ [0, 1]`, together with an
/// analytically supplied `∂_t f`.
pub struct LoopFamily {
    label: String,
    dim: usize,
    closed: bool,
    value: SliceFn,
    velocity: SliceFn,
}

impl fmt::Debug for LoopFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoopFamily").field("label", &self.label).field("dim", &self.dim).field("closed", &self.closed).finish()
    }
}

fn unit_fract(t: f64) -> f64 {
    let f = t - t.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

impl LoopFamily {
    pub fn new(label: impl Into<String>, dim: usize, closed: bool, value: SliceFn, velocity: SliceFn) -> Arc<Self> {
        Arc::new(Self { label: label.into(), dim, closed, value, velocity })
    }

    /// The family `t ↦ c` with zero velocity.
    pub fn constant(label: impl Into<String>, value: SmoothMap) -> Arc<Self> {
        let dim = value.dim();
        let v = value.clone();
        Self::new(label, dim, true, Arc::new(move |_| v.clone()), Arc::new(move |_| SmoothMap::zero(dim)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub(crate) fn value_expr(&self, t: f64) -> SmoothMap {
        (self.value)(t)
    }

    /// `f(t, ·)` as a `TimeSlice` node.
    pub fn slice(self: &Arc<Self>, t: f64) -> SmoothMap {
        SmoothMap::time_slice(self, t)
    }

    /// `∂_t f(t, ·)`
    pub fn velocity(&self, t: f64) -> SmoothMap {
        (self.velocity)(t)
    }

    /// `t ↦ f(k t mod 1)` for a closed family: traversal `k` times, reversed
    /// when `k < 0`.
    pub fn traversed(self: &Arc<Self>, k: i32) -> Result<Arc<Self>> {
        if !self.closed {
            return Err(Error::InvalidArgument(format!("family '{}' is not closed", self.label)));
        }
        let (a, b) = (Arc::clone(self), Arc::clone(self));
        let kf = k as f64;
        Ok(Self::new(
            format!("{}^{k}", self.label),
            self.dim,
            true,
            Arc::new(move |t| (a.value)(unit_fract(kf * t))),
            Arc::new(move |t| (b.velocity)(unit_fract(kf * t)).scale(crate::matrix::C64::new(kf, 0.0))),
        ))
    }

    /// Pointwise product `t ↦ f(t)·g(t)`.
    pub fn pointwise_product(f: &Arc<Self>, g: &Arc<Self>) -> Result<Arc<Self>> {
        if f.dim != g.dim {
            return Err(Error::DimensionMismatch(format!("families of size {} and {}", f.dim, g.dim)));
        }
        let (f1, g1, f2, g2) = (Arc::clone(f), Arc::clone(g), Arc::clone(f), Arc::clone(g));
        Ok(Self::new(
            format!("{}*{}", f.label, g.label),
            f.dim,
            f.closed && g.closed,
            Arc::new(move |t| &(f1.value)(t) * &(g1.value)(t)),
            Arc::new(move |t| &(&(f2.velocity)(t) * &(g2.value)(t)) + &(&(f2.value)(t) * &(g2.velocity)(t))),
        ))
    }

    /// Largest entry of `f(1) − f(0)` over the sample points.
    pub fn closure_residual(&self, ctx: &EvalContext, points: &[[f64; 2]]) -> Result<f64> {
        let diff = &self.value_expr(1.0) - &self.value_expr(0.0);
        let jets = ctx.eval_points(&[diff], points, 0)?;
        Ok(jets.iter().map(|j| j[0].max_abs()).fold(0.0, f64::max))
    }

    /// Largest entry of `(f(t+h) − f(t−h))/2h − ∂_t f(t)` over the sample points.
    pub fn velocity_residual(&self, ctx: &EvalContext, t: f64, h: f64, points: &[[f64; 2]]) -> Result<f64> {
        let fd = (&self.value_expr(t + h) - &self.value_expr(t - h)).scale(crate::matrix::C64::new(0.5 / h, 0.0));
        let diff = &fd - &self.velocity(t);
        let jets = ctx.eval_points(&[diff], points, 0)?;
        Ok(jets.iter().map(|j| j[0].max_abs()).fold(0.0, f64::max))
    }
}
