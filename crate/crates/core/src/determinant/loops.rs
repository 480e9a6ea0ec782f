use std::f64::consts::PI;

use crate::disk::builders::angular_mode;
use crate::error::{Error, Result};
use crate::jets::{BumpProfile, SmoothMap};
use crate::matrix::{MatrixNC, C64, ZERO};

const COEFF_TOL: f64 = 1e-12;

/// A loop `X(θ) = Σ_m A_m e^{imθ}` with anti-hermitian traceless
/// coefficients, and the profile used to extend it into the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopAlgebraElement {
    n: usize,
    modes: Vec<(i32, MatrixNC)>,
    profile: BumpProfile,
}

impl LoopAlgebraElement {
    pub fn new(n: usize, modes: Vec<(i32, MatrixNC)>, profile: BumpProfile) -> Result<Self> {
        for (m, a) in &modes {
            if a.dim() != n {
                return Err(Error::DimensionMismatch(format!("mode {m} has size {}, expected {n}", a.dim())));
            }
            let scale = 1.0 + a.max_abs();
            if a.anti_hermiticity_residual() > COEFF_TOL * scale || a.trace().norm() > COEFF_TOL * scale {
                return Err(Error::InvalidArgument(format!("mode {m} is not anti-hermitian and traceless")));
            }
        }
        Ok(Self { n, modes: merge(modes), profile })
    }

    pub fn single(m: i32, a: MatrixNC, profile: BumpProfile) -> Result<Self> {
        Self::new(a.dim(), vec![(m, a)], profile)
    }

    pub fn zero(n: usize, profile: BumpProfile) -> Self {
        Self { n, modes: Vec::new(), profile }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[(i32, MatrixNC)] {
        &self.modes
    }

    pub fn profile(&self) -> BumpProfile {
        self.profile
    }

    pub fn with_profile(&self, profile: BumpProfile) -> Self {
        Self { profile, ..self.clone() }
    }

    /// `A_m`, zero when the mode is absent.
    pub fn mode(&self, m: i32) -> MatrixNC {
        self.modes.iter().find(|(k, _)| *k == m).map(|(_, a)| a.clone()).unwrap_or_else(|| MatrixNC::zeros(self.n))
    }

    /// `X(θ)`
    pub fn value(&self, theta: f64) -> MatrixNC {
        let mut out = MatrixNC::zeros(self.n);
        for (m, a) in &self.modes {
            out = &out + &a.scale(C64::from_polar(1.0, *m as f64 * theta));
        }
        out
    }

    /// `max_θ ‖X(θ)‖_1` over `samples` angles.
    pub fn sup_norm(&self, samples: usize) -> f64 {
        (0..samples).map(|k| self.value(2.0 * PI * k as f64 / samples as f64).norm1()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: f64) -> Self {
        let modes = self.modes.iter().map(|(m, a)| (*m, a.scale(C64::new(c, 0.0)))).collect();
        Self { modes, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("loops of size {} and {}", self.n, other.n)));
        }
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Ok(Self { n: self.n, modes: merge(modes), profile: self.profile })
    }

    /// Pointwise commutator `[X, Y](θ)`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("loops of size {} and {}", self.n, other.n)));
        }
        let mut modes = Vec::new();
        for (m, a) in &self.modes {
            for (k, b) in &other.modes {
                modes.push((m + k, a.commutator(b)));
            }
        }
        Ok(Self { n: self.n, modes: merge(modes), profile: self.profile })
    }

    /// Extension `X̃ = Σ_m ρ(u) u^{−|m|/2} (x ± iy)^{|m|} A_m`, equal to
    /// `X(θ)` near the boundary and flat there.
    pub fn extension(&self) -> Result<SmoothMap> {
        if self.modes.is_empty() {
            return Ok(SmoothMap::zero(self.n));
        }
        let terms = self.modes.iter().map(|(m, a)| angular_mode(self.profile, *m, a)).collect::<Result<Vec<_>>>()?;
        SmoothMap::sum(terms)
    }

    /// `(1/2πi)∮ tr X dY = Σ_m (−m) tr(A_m B_{−m})`
    pub fn contour_pairing(&self, other: &Self) -> C64 {
        self.modes.iter().fold(ZERO, |acc, (m, a)| acc + (a * &other.mode(-m)).trace() * (-(*m as f64)))
    }

    /// Largest `‖[X(θ), Y(θ)]‖` over `samples` angles.
    pub fn commutator_residual(&self, other: &Self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / samples as f64;
                self.value(t).commutator(&other.value(t)).max_abs()
            })
            .fold(0.0, f64::max)
    }
}

fn merge(modes: Vec<(i32, MatrixNC)>) -> Vec<(i32, MatrixNC)> {
    let mut out: Vec<(i32, MatrixNC)> = Vec::new();
    for (m, a) in modes {
        match out.iter_mut().find(|(k, _)| *k == m) {
            Some((_, b)) => *b = &*b + &a,
            None => out.push((m, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out.sort_by_key(|(m, _)| *m);
    out
}
