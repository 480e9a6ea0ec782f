//! Univariate truncated power series, the engine behind every scalar
//! primitive's derivative data.

use crate::matrix::{C64, ONE, ZERO};

/// Coefficients `c_0 .. c_M` of `Σ c_k h^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1(pub Vec<C64>);

impl Series1 {
    pub fn zeros(order: usize) -> Self {
        Self(vec![ZERO; order + 1])
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.0[0] = c;
        s
    }

    /// The series of `v + slope * h`.
    pub fn linear(v: C64, slope: C64, order: usize) -> Self {
        let mut s = Self::constant(v, order);
        if order >= 1 {
            s.0[1] = slope;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == ZERO)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.order();
        let mut out = Self::zeros(m);
        for (i, a) in self.0.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in o.0.iter().take(m + 1 - i).enumerate() {
                out.0[i + j] += a * b;
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let m = self.order();
        let mut out = Self::zeros(m);
        out.0[0] = ONE / self.0[0];
        for k in 1..=m {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.0[j] * out.0[k - j];
            }
            out.0[k] = -acc * out.0[0];
        }
        out
    }

    pub fn exp(&self) -> Self {
        let m = self.order();
        let mut out = Self::zeros(m);
        out.0[0] = self.0[0].exp();
        for k in 1..=m {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.0[j] * out.0[k - j] * j as f64;
            }
            out.0[k] = acc / k as f64;
        }
        out
    }

    /// `Σ outer_k (self − self_0)^k` where `outer` is an expansion about `self_0`.
    pub fn compose(&self, outer: &[C64]) -> Self {
        let m = self.order();
        let mut shifted = self.clone();
        shifted.0[0] = ZERO;
        let mut acc = Self::constant(outer[m], m);
        for k in (0..m).rev() {
            acc = acc.mul(&shifted);
            acc.0[0] += outer[k];
        }
        acc
    }

    pub fn sin(&self) -> Self {
        self.compose(&sin_taylor(self.0[0], self.order()))
    }

    pub fn cos(&self) -> Self {
        self.compose(&cos_taylor(self.0[0], self.order()))
    }

    /// `self^alpha` for a series with positive real leading coefficient.
    pub fn powf(&self, alpha: f64) -> Self {
        let v = self.0[0];
        let m = self.order();
        let mut outer = vec![ZERO; m + 1];
        let mut binom = 1.0;
        let base = v.powf(alpha);
        for (k, o) in outer.iter_mut().enumerate() {
            if k > 0 {
                binom *= (alpha - (k - 1) as f64) / k as f64;
            }
            *o = base * binom / v.powi(k as i32);
        }
        self.compose(&outer)
    }

    /// Derivative data of the series: `d^k/dh^k` at 0 equals `k! c_k`.
    pub fn derivatives(&self) -> Vec<C64> {
        let mut f = 1.0;
        self.0
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    f *= k as f64;
                }
                c * f
            })
            .collect()
    }
}

pub(crate) fn exp_taylor(v: C64, order: usize) -> Vec<C64> {
    let e = v.exp();
    let mut f = 1.0;
    (0..=order)
        .map(|k| {
            if k > 0 {
                f *= k as f64;
            }
            e / f
        })
        .collect()
}

fn cyclic_taylor(values: [C64; 4], order: usize) -> Vec<C64> {
    let mut f = 1.0;
    (0..=order)
        .map(|k| {
            if k > 0 {
                f *= k as f64;
            }
            values[k % 4] / f
        })
        .collect()
}

pub(crate) fn sin_taylor(v: C64, order: usize) -> Vec<C64> {
    let (s, c) = (v.sin(), v.cos());
    cyclic_taylor([s, c, -s, -c], order)
}

pub(crate) fn cos_taylor(v: C64, order: usize) -> Vec<C64> {
    let (s, c) = (v.sin(), v.cos());
    cyclic_taylor([c, -s, -c, s], order)
}
