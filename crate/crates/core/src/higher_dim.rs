//! Tensor-factor coefficient algebras: trace functionals, the fuzzy sphere
//! and the loop-algebra cocycle with coefficients in `M_n ⊗ 𝒮`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::determinant::LoopAlgebraElement;
use crate::disk::{DiskAlgebra, StarElement};
use crate::error::{Error, Result};
use crate::jets::BumpProfile;
use crate::matrix::{MatrixNC, C64, ZERO};
use crate::series::NuSeries;

type TraceFn = Arc<dyn Fn(&MatrixNC) -> C64 + Send + Sync>;

/// A linear functional `tr_𝒮` on `d×d` matrices.
#[derive(Clone)]
pub struct TraceFunctional {
    d: usize,
    label: String,
    map: TraceFn,
}

impl fmt::Debug for TraceFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TraceFunctional").field("d", &self.d).field("label", &self.label).finish()
    }
}

impl TraceFunctional {
    pub fn new(d: usize, label: impl Into<String>, map: impl Fn(&MatrixNC) -> C64 + Send + Sync + 'static) -> Self {
        Self { d, label: label.into(), map: Arc::new(map) }
    }

    pub fn matrix_trace(d: usize) -> Self {
        Self::new(d, "matrix trace", MatrixNC::trace)
    }

    /// `tr(a)/d`
    pub fn normalized_trace(d: usize) -> Self {
        Self::new(d, "normalized trace", move |a| a.trace() / d as f64)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, a: &MatrixNC) -> Result<C64> {
        if a.dim() != self.d {
            return Err(Error::DimensionMismatch(format!("trace on {}x{} applied to {}x{}", self.d, self.d, a.dim(), a.dim())));
        }
        Ok((self.map)(a))
    }

    /// `|tr(ab) − tr(ba)|`
    pub fn traciality_residual(&self, a: &MatrixNC, b: &MatrixNC) -> Result<f64> {
        Ok((self.apply(&(a * b))? - self.apply(&(b * a))?).norm())
    }

    /// `Σ_i tr_𝒮(F_ii)` for `F ∈ M_n ⊗ 𝒮`, indices `(i, α) ↦ i·d + α`.
    pub fn combined(&self, f: &MatrixNC) -> Result<C64> {
        let d = self.d;
        if !f.dim().is_multiple_of(d) {
            return Err(Error::DimensionMismatch(format!("size {} is not a multiple of {d}", f.dim())));
        }
        let mut acc = ZERO;
        for i in 0..f.dim() / d {
            let block = MatrixNC::from_fn(d, |a, b| f[(i * d + a, i * d + b)]);
            acc += (self.map)(&block);
        }
        Ok(acc)
    }
}

/// The spin-`j` representation of su(2) with anti-hermitian generators
/// satisfying `[x, y] = z`, `[y, z] = x`, `[z, x] = y`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyAlgebra {
    twice_j: u32,
    x: MatrixNC,
    y: MatrixNC,
    z: MatrixNC,
}

/// `x = −iJ_x`, `y = −iJ_y`, `z = −iJ_z` from the ladder construction.
pub fn su2_irrep(j: f64) -> Result<FuzzyAlgebra> {
    let tj = 2.0 * j;
    if !(tj >= 0.0 && tj.fract() == 0.0 && tj <= 1e6) {
        return Err(Error::InvalidSpin(j));
    }
    let twice_j = tj as u32;
    let d = twice_j as usize + 1;
    // basis index a ↔ m = j − a
    let m = |a: usize| j - a as f64;
    let jz = MatrixNC::diag(&(0..d).map(|a| C64::new(m(a), 0.0)).collect::<Vec<_>>());
    let jp = MatrixNC::from_fn(d, |a, b| {
        if b == a + 1 {
            let mb = m(b);
            C64::new((j * (j + 1.0) - mb * (mb + 1.0)).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale(C64::new(0.5, 0.0));
    let jy = (&jp - &jm).scale(C64::new(0.0, -0.5));
    let mi = C64::new(0.0, -1.0);
    Ok(FuzzyAlgebra { twice_j, x: jx.scale(mi), y: jy.scale(mi), z: jz.scale(mi) })
}

impl FuzzyAlgebra {
    pub fn spin(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// `2j + 1`
    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn generators(&self) -> [&MatrixNC; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Largest entry of `[x,y] − z`, `[y,z] − x`, `[z,x] − y`.
    pub fn commutation_residual(&self) -> f64 {
        let (x, y, z) = (&self.x, &self.y, &self.z);
        [(&x.commutator(y) - z), (&y.commutator(z) - x), (&z.commutator(x) - y)]
            .iter()
            .map(MatrixNC::max_abs)
            .fold(0.0, f64::max)
    }

    /// `x² + y² + z²`
    pub fn casimir(&self) -> MatrixNC {
        let (x, y, z) = (&self.x, &self.y, &self.z);
        &(&(x * x) + &(y * y)) + &(z * z)
    }

    /// Largest entry of `x² + y² + z² + j(j+1)`.
    pub fn casimir_residual(&self) -> f64 {
        let j = self.spin();
        (&self.casimir() + &MatrixNC::identity(self.dim()).scale(C64::new(j * (j + 1.0), 0.0))).max_abs()
    }

    /// The matrix trace in this representation.
    pub fn trace_functional(&self) -> TraceFunctional {
        TraceFunctional::matrix_trace(self.dim())
    }
}

/// Both normalizations of the combined trace of a disk element.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorTrace {
    /// `(1/2πν) ∫_D tr_{n⊗𝒮} f`: coefficient `p` sits at `ν^{p−1}`.
    pub laurent: NuSeries<C64>,
    /// `(1/2π) ∫_D tr_{n⊗𝒮} f` without the `1/ν`.
    pub plain: NuSeries<C64>,
}

pub fn tensor_trace(alg: &DiskAlgebra, f: &StarElement, tr: &TraceFunctional) -> Result<TensorTrace> {
    if !f.dim().is_multiple_of(tr.dim()) {
        return Err(Error::DimensionMismatch(format!("element size {} is not a multiple of {}", f.dim(), tr.dim())));
    }
    let vals = alg.values_at_nodes(f.series().coeffs())?;
    let n = f.dim();
    let coeffs = vals
        .iter()
        .map(|per| {
            let dens = per
                .iter()
                .map(|v| {
                    // 1×1 coefficients broadcast as scalars
                    if v.dim() == 1 && n > 1 {
                        tr.combined(&MatrixNC::identity(n).scale(v[(0, 0)]))
                    } else {
                        tr.combined(v)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(alg.quadrature().integrate(&dens) / (2.0 * PI))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TensorTrace { laurent: NuSeries::new(-1, coeffs.clone())?, plain: NuSeries::new(0, coeffs)? })
}

/// A finite Fourier loop `Σ_m A_m e^{imθ}` with coefficients in `M_n ⊗ 𝒮`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLoop {
    size: usize,
    modes: Vec<(i32, MatrixNC)>,
}

impl MatrixLoop {
    pub fn new(size: usize, modes: Vec<(i32, MatrixNC)>) -> Result<Self> {
        for (m, a) in &modes {
            if a.dim() != size {
                return Err(Error::DimensionMismatch(format!("mode {m} has size {}, expected {size}", a.dim())));
            }
            if !a.is_finite() {
                return Err(Error::InvalidArgument(format!("mode {m} has non-finite entries")));
            }
        }
        let mut out: Vec<(i32, MatrixNC)> = Vec::new();
        for (m, a) in modes {
            match out.iter_mut().find(|(k, _)| *k == m) {
                Some((_, b)) => *b = &*b + &a,
                None => out.push((m, a)),
            }
        }
        out.sort_by_key(|(m, _)| *m);
        Ok(Self { size, modes: out })
    }

    pub fn single(m: i32, a: MatrixNC) -> Result<Self> {
        Self::new(a.dim(), vec![(m, a)])
    }

    pub fn dim(&self) -> usize {
        self.size
    }

    pub fn modes(&self) -> &[(i32, MatrixNC)] {
        &self.modes
    }

    pub fn mode(&self, m: i32) -> MatrixNC {
        self.modes.iter().find(|(k, _)| *k == m).map(|(_, a)| a.clone()).unwrap_or_else(|| MatrixNC::zeros(self.size))
    }

    pub fn value(&self, theta: f64) -> MatrixNC {
        self.modes.iter().fold(MatrixNC::zeros(self.size), |acc, (m, a)| &acc + &a.scale(C64::from_polar(1.0, *m as f64 * theta)))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { size: self.size, modes: self.modes.iter().map(|(m, a)| (*m, a.scale(c))).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Self::new(self.size, self.modes.iter().chain(&other.modes).cloned().collect())
    }

    /// Pointwise commutator.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let mut modes = Vec::new();
        for (m, a) in &self.modes {
            for (k, b) in &other.modes {
                modes.push((m + k, a.commutator(b)));
            }
        }
        Self::new(self.size, modes)
    }

    /// The same loop as a boundary loop for the disk algebra (coefficients
    /// must be anti-hermitian and traceless).
    pub fn to_loop_element(&self, profile: BumpProfile) -> Result<LoopAlgebraElement> {
        LoopAlgebraElement::new(self.size, self.modes.clone(), profile)
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch(format!("loops of size {} and {}", self.size, other.size)));
        }
        Ok(())
    }
}

/// Prefactor of the contour integral `∮ tr_𝒮 f dg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CocycleNormalization {
    /// `1/2πi`, matching the disk-boundary cocycle.
    OverTwoPiI,
    /// `1/2π`
    OverTwoPi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopCocycle {
    /// `(1/2πi)∮ tr_𝒮 f dg = Σ_m (−m) tr_𝒮(A_m B_{−m})`
    pub over_two_pi_i: C64,
    /// `(1/2π)∮ tr_𝒮 f dg = i · over_two_pi_i`
    pub over_two_pi: C64,
    pub normalization: CocycleNormalization,
}

impl LoopCocycle {
    /// The value selected by the normalization.
    pub fn value(&self) -> C64 {
        match self.normalization {
            CocycleNormalization::OverTwoPiI => self.over_two_pi_i,
            CocycleNormalization::OverTwoPi => self.over_two_pi,
        }
    }
}

/// Exact mode-sum evaluation of the loop cocycle with the combined trace.
pub fn loop_cocycle_s(f: &MatrixLoop, g: &MatrixLoop, tr: &TraceFunctional, normalization: CocycleNormalization) -> Result<LoopCocycle> {
    f.check_size(g)?;
    let mut acc = ZERO;
    for (m, a) in &f.modes {
        let b = g.mode(-m);
        acc += tr.combined(&(a * &b))? * (-(*m as f64));
    }
    Ok(LoopCocycle { over_two_pi_i: acc, over_two_pi: acc * C64::new(0.0, 1.0), normalization })
}
