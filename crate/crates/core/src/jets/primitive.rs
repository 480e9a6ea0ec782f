//! Univariate primitives that can be composed onto scalar expressions.

use std::f64::consts::PI;

use super::taylor::{cos_taylor, exp_taylor, sin_taylor, Series1};
use crate::error::{Error, Result};
use crate::matrix::{C64, ONE};

/// Below this argument `exp(-1/s)` underflows and is taken as exactly zero
/// together with all of its derivatives.
const FLAT_CUTOFF: f64 = 1.0 / 700.0;

/// Smooth monotone step `ρ: [0,1] → [0,1]`, identically zero on `[0, s₀]`,
/// equal to one at 1, with every derivative vanishing at both ends.
///
/// `ρ(s) = h(τ) / (h(τ) + h(1−τ))`, `τ = (s − s₀)/(1 − s₀)`, `h(s) = exp(−1/s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpProfile {
    inner: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self { inner: 0.2 }
    }
}

/// Expansion of `h(τ₀ + slope·δ)` in δ.
fn h_series(tau0: f64, slope: f64, order: usize) -> Series1 {
    if tau0 <= FLAT_CUTOFF {
        return Series1::zeros(order);
    }
    let tau = Series1::linear(C64::new(tau0, 0.0), C64::new(slope, 0.0), order);
    tau.recip().scale(-ONE).exp()
}

impl BumpProfile {
    pub fn new(inner: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&inner) {
            return Err(Error::InvalidArgument(format!("bump inner radius {inner} must lie in [0, 1)")));
        }
        Ok(Self { inner })
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    /// Expansion of ρ about `s`, to `order`.
    pub fn taylor(&self, s: f64, order: usize) -> Series1 {
        let w = 1.0 - self.inner;
        let tau0 = (s - self.inner) / w;
        let a = h_series(tau0, 1.0 / w, order);
        if a.is_zero() {
            return Series1::zeros(order);
        }
        let b = h_series(1.0 - tau0, -1.0 / w, order);
        if b.is_zero() {
            return Series1::constant(ONE, order);
        }
        a.mul(&a.add(&b).recip())
    }

    pub fn value(&self, s: f64) -> f64 {
        self.taylor(s, 0).0[0].re
    }

    /// `d^j ρ / ds^j` at `s`.
    pub fn derivative(&self, s: f64, j: usize) -> f64 {
        self.taylor(s, j).derivatives()[j].re
    }
}

/// Scalar primitive `φ`. Each primitive reports its Taylor expansion at a
/// point; composition with jets is done by univariate series composition.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Exp,
    Sin,
    Cos,
    /// `ρ(s)`
    Bump(BumpProfile),
    /// `1 − ρ(s)`: one near the origin, flat zero at `s = 1`.
    Chi(BumpProfile),
    /// `ρ(s) · s^{−k/2}`; with `s = x²+y²` and a factor `(x ± iy)^k` this
    /// gives a smooth function equal to `e^{±ikθ}` near the boundary.
    BumpOverPower { profile: BumpProfile, k: u32 },
    /// `cos(π χ(s))`
    CosPiChi(BumpProfile),
    /// `sin(π χ(s)) / √s`, identically zero for `s ≤ s₀`.
    SinPiChiOverSqrt(BumpProfile),
    /// `d^k φ / ds^k`
    Derivative(Box<Primitive>, usize),
}

fn real_arg(prim: &Primitive, v: C64) -> Result<f64> {
    if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) || !v.re.is_finite() {
        return Err(Error::DomainError { primitive: format!("{prim:?}"), value: v.re });
    }
    Ok(v.re)
}

impl Primitive {
    pub fn derivative(self, k: usize) -> Self {
        match self {
            Primitive::Derivative(inner, j) => Primitive::Derivative(inner, j + k),
            p if k == 0 => p,
            p => Primitive::Derivative(Box::new(p), k),
        }
    }

    /// Taylor coefficients `φ^{(k)}(v)/k!` for `k = 0..=order`.
    pub fn taylor(&self, v: C64, order: usize) -> Result<Vec<C64>> {
        let series = match self {
            Primitive::Exp => return Ok(exp_taylor(v, order)),
            Primitive::Sin => return Ok(sin_taylor(v, order)),
            Primitive::Cos => return Ok(cos_taylor(v, order)),
            Primitive::Bump(p) => p.taylor(real_arg(self, v)?, order),
            Primitive::Chi(p) => {
                let r = p.taylor(real_arg(self, v)?, order);
                Series1::constant(ONE, order).add(&r.scale(-ONE))
            }
            Primitive::BumpOverPower { profile, k } => {
                let s = real_arg(self, v)?;
                if s <= profile.inner() {
                    Series1::zeros(order)
                } else {
                    let rho = profile.taylor(s, order);
                    let pw = Series1::linear(C64::new(s, 0.0), ONE, order).powf(-(*k as f64) / 2.0);
                    rho.mul(&pw)
                }
            }
            Primitive::CosPiChi(p) => {
                let s = real_arg(self, v)?;
                let chi = Series1::constant(ONE, order).add(&p.taylor(s, order).scale(-ONE));
                if s <= p.inner() {
                    Series1::constant(-ONE, order)
                } else {
                    chi.scale(C64::new(PI, 0.0)).cos()
                }
            }
            Primitive::SinPiChiOverSqrt(p) => {
                let s = real_arg(self, v)?;
                if s <= p.inner() {
                    Series1::zeros(order)
                } else {
                    let chi = Series1::constant(ONE, order).add(&p.taylor(s, order).scale(-ONE));
                    let sin = chi.scale(C64::new(PI, 0.0)).sin();
                    sin.mul(&Series1::linear(C64::new(s, 0.0), ONE, order).powf(-0.5))
                }
            }
            Primitive::Derivative(inner, k) => {
                let base = inner.taylor(v, order + k)?;
                let out = (0..=order)
                    .map(|j| {
                        let w: f64 = ((j + 1)..=(j + k)).map(|i| i as f64).product();
                        base[j + k] * w
                    })
                    .collect();
                return Ok(out);
            }
        };
        Ok(series.0)
    }

    pub fn value(&self, v: C64) -> Result<C64> {
        Ok(self.taylor(v, 0)?[0])
    }
}
