//! Product quadrature on the closed unit disk and on parameter intervals.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::{C64, ZERO};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Deterministic pairwise (tree) sum.
pub fn pairwise_sum(v: &[C64]) -> C64 {
    if v.len() <= 8 {
        return v.iter().fold(ZERO, |a, b| a + b);
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Gauss–Legendre in `u = r²` (so `r dr = du/2`) times the trapezoid rule
/// in `θ`, plus the node sets for the homotopy/loop parameter `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskQuadrature {
    nr: usize,
    ntheta: usize,
    nt: usize,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl DiskQuadrature {
    pub fn new(nr: usize, ntheta: usize, nt: usize) -> Result<Self> {
        if nr == 0 || ntheta == 0 || nt == 0 {
            return Err(Error::InvalidArgument("quadrature sizes must be positive".into()));
        }
        let (x, w) = gauss_legendre(nr);
        let dtheta = 2.0 * PI / ntheta as f64;
        let mut points = Vec::with_capacity(nr * ntheta);
        let mut weights = Vec::with_capacity(nr * ntheta);
        for (xi, wi) in x.iter().zip(&w) {
            let r = (0.5 * (xi + 1.0)).sqrt();
            for k in 0..ntheta {
                let th = k as f64 * dtheta;
                points.push([r * th.cos(), r * th.sin()]);
                weights.push(0.25 * wi * dtheta);
            }
        }
        Ok(Self { nr, ntheta, nt, points, weights })
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.nr, self.ntheta, self.nt)
    }

    /// Interior nodes, radial-major.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_D v dx dy` from values at [`Self::points`].
    pub fn integrate(&self, values: &[C64]) -> C64 {
        let terms: Vec<C64> = values.iter().zip(&self.weights).map(|(v, w)| v * w).collect();
        pairwise_sum(&terms)
    }

    /// Angles of the boundary nodes.
    pub fn boundary_angles(&self) -> Vec<f64> {
        (0..self.ntheta).map(|k| 2.0 * PI * k as f64 / self.ntheta as f64).collect()
    }

    pub fn boundary_points(&self) -> Vec<[f64; 2]> {
        self.boundary_angles().into_iter().map(|t| [t.cos(), t.sin()]).collect()
    }

    /// `∮ v dθ` from values at [`Self::boundary_points`].
    pub fn integrate_boundary(&self, values: &[C64]) -> C64 {
        let d = 2.0 * PI / self.ntheta as f64;
        pairwise_sum(values) * d
    }

    /// Gauss–Legendre nodes and weights on `[0, 1]` for open paths.
    pub fn t_nodes_open(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_legendre(self.nt);
        x.iter().zip(&w).map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect()
    }

    /// Trapezoid nodes `k/N_t` with equal weights for closed loops.
    pub fn t_nodes_closed(&self) -> Vec<(f64, f64)> {
        let h = 1.0 / self.nt as f64;
        (0..self.nt).map(|k| (k as f64 * h, h)).collect()
    }
}

impl Default for DiskQuadrature {
    fn default() -> Self {
        Self::new(48, 64, 64).expect("default sizes are positive")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_nodes_integrate_polynomials() {
        for n in [1, 2, 5, 16, 48, 97] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n).min(40) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn disk_area() {
        let q = DiskQuadrature::default();
        let ones = vec![C64::new(1.0, 0.0); q.points().len()];
        assert!((q.integrate(&ones).re - PI).abs() < 1e-13);
    }

    #[test]
    fn second_moment() {
        // ∫_D (x² + y²) = π/2
        let q = DiskQuadrature::new(8, 16, 4).unwrap();
        let v: Vec<C64> = q.points().iter().map(|p| C64::new(p[0] * p[0] + p[1] * p[1], 0.0)).collect();
        assert!((q.integrate(&v).re - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn parameter_nodes() {
        let q = DiskQuadrature::new(4, 4, 10).unwrap();
        let s: f64 = q.t_nodes_open().iter().map(|(t, w)| w * t * t).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
        let c: f64 = q.t_nodes_closed().iter().map(|(t, w)| w * (2.0 * PI * t).cos().powi(2)).sum();
        assert!((c - 0.5).abs() < 1e-15);
    }
}
