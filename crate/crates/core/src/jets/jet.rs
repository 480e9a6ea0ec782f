use crate::error::{Error, Result};
use crate::matrix::{gemm_acc, MatrixNC, C64, ONE, ZERO};

/// Number of coefficient slots of an order-`order` bivariate jet.
#[inline]
pub const fn num_slots(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Graded slot index of the monomial `x^a y^b`. A jet of order M is a
/// prefix of a jet of any higher order under this layout.
#[inline]
pub const fn slot(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Truncated bivariate Taylor expansion with square-matrix coefficients.
/// Slot `(a, b)` holds `∂_x^a ∂_y^b f(center) / (a! b!)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2D {
    center: [f64; 2],
    order: usize,
    n: usize,
    coeffs: Vec<C64>,
}

impl Jet2D {
    pub fn zero(center: [f64; 2], order: usize, n: usize) -> Self {
        Self { center, order, n, coeffs: vec![ZERO; num_slots(order) * n * n] }
    }

    pub fn constant(center: [f64; 2], order: usize, value: &MatrixNC) -> Self {
        let mut j = Self::zero(center, order, value.dim());
        j.block_mut(0).copy_from_slice(value.as_slice());
        j
    }

    pub fn coord_x(center: [f64; 2], order: usize) -> Self {
        let mut j = Self::zero(center, order, 1);
        j.coeffs[0] = C64::new(center[0], 0.0);
        if order >= 1 {
            j.coeffs[slot(1, 0)] = ONE;
        }
        j
    }

    pub fn coord_y(center: [f64; 2], order: usize) -> Self {
        let mut j = Self::zero(center, order, 1);
        j.coeffs[0] = C64::new(center[1], 0.0);
        if order >= 1 {
            j.coeffs[slot(0, 1)] = ONE;
        }
        j
    }

    /// Builds a jet from raw slot data (graded layout, `n*n` entries per slot).
    pub fn from_raw(center: [f64; 2], order: usize, n: usize, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), num_slots(order) * n * n, "raw jet data has the wrong length");
        Self { center, order, n, coeffs }
    }

    #[inline]
    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn raw(&self) -> &[C64] {
        &self.coeffs
    }

    #[inline]
    fn block(&self, s: usize) -> &[C64] {
        let nn = self.n * self.n;
        &self.coeffs[s * nn..(s + 1) * nn]
    }

    #[inline]
    fn block_mut(&mut self, s: usize) -> &mut [C64] {
        let nn = self.n * self.n;
        &mut self.coeffs[s * nn..(s + 1) * nn]
    }

    /// Taylor coefficient of `x^a y^b` (zero above the stored order).
    pub fn coeff(&self, a: usize, b: usize) -> MatrixNC {
        if a + b > self.order {
            return MatrixNC::zeros(self.n);
        }
        MatrixNC::from_vec(self.n, self.block(slot(a, b)).to_vec())
    }

    pub fn value(&self) -> MatrixNC {
        self.coeff(0, 0)
    }

    /// The partial derivative `∂_x^a ∂_y^b f(center)`.
    pub fn derivative(&self, a: usize, b: usize) -> MatrixNC {
        self.coeff(a, b).scale(C64::new(factorial(a) * factorial(b), 0.0))
    }

    /// Order-`j` directional derivative along the unit vector `(nx, ny)`.
    pub fn directional_derivative(&self, j: usize, nx: f64, ny: f64) -> MatrixNC {
        let mut acc = MatrixNC::zeros(self.n);
        for a in 0..=j {
            let b = j - a;
            let w = nx.powi(a as i32) * ny.powi(b as i32);
            acc = &acc + &self.coeff(a, b).scale(C64::new(w, 0.0));
        }
        acc.scale(C64::new(factorial(j), 0.0))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let nn = self.n * self.n;
        Self { center: self.center, order, n: self.n, coeffs: self.coeffs[..num_slots(order) * nn].to_vec() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sum of slot Frobenius norms; submultiplicative under `mul`.
    fn slot_norm(&self) -> f64 {
        (0..num_slots(self.order))
            .map(|s| self.block(s).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { center: self.center, order: self.order, n: self.n, coeffs: self.coeffs.iter().map(|z| z * c).collect() }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.center != other.center {
            return Err(Error::CenterMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("jet add {} vs {}", self.n, other.n)));
        }
        let order = self.order.min(other.order);
        let len = num_slots(order) * self.n * self.n;
        let coeffs = self.coeffs[..len].iter().zip(&other.coeffs[..len]).map(|(a, b)| a + b).collect();
        Ok(Self { center: self.center, order, n: self.n, coeffs })
    }

    /// In-place `self += c * other`, truncated to `self.order`.
    pub(crate) fn axpy(&mut self, c: C64, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        debug_assert!(other.order >= self.order);
        let len = self.coeffs.len();
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs[..len]) {
            *a += c * b;
        }
    }

    /// Truncated noncommutative Cauchy product. A 1x1 operand broadcasts
    /// as a scalar. The result order is the smaller operand order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        Self::mul_to(self, other, order)
    }

    pub(crate) fn mul_to(a: &Self, b: &Self, order: usize) -> Result<Self> {
        let n = Self::product_dim(a, b)?;
        let mut out = Self::zero(a.center, order, n);
        Self::mul_acc(a, b, &mut out);
        Ok(out)
    }

    fn product_dim(a: &Self, b: &Self) -> Result<usize> {
        match (a.n, b.n) {
            (x, y) if x == y => Ok(x),
            (1, y) => Ok(y),
            (x, 1) => Ok(x),
            (x, y) => Err(Error::DimensionMismatch(format!("jet product {x}x{x} by {y}x{y}"))),
        }
    }

    /// `out += a·b` truncated to `out.order`.
    fn mul_acc(a: &Self, b: &Self, out: &mut Self) {
        let order = out.order;
        let n = out.n;
        let nn = n * n;
        debug_assert!(a.order >= order && b.order >= order);
        let mut flags = [false; 66];
        let mut heap = Vec::new();
        let ns = num_slots(order);
        let b_nz: &mut [bool] = if ns <= flags.len() {
            &mut flags[..ns]
        } else {
            heap.resize(ns, false);
            &mut heap
        };
        for (s, f) in b_nz.iter_mut().enumerate() {
            *f = b.block(s).iter().any(|z| *z != ZERO);
        }
        for da in 0..=order {
            for b1 in 0..=da {
                let sa = slot(da - b1, b1);
                let ablk = a.block(sa);
                if ablk.iter().all(|z| *z == ZERO) {
                    continue;
                }
                for db in 0..=(order - da) {
                    for b2 in 0..=db {
                        let sb = slot(db - b2, b2);
                        if !b_nz[sb] {
                            continue;
                        }
                        let bblk = b.block(sb);
                        let st = slot(da + db - b1 - b2, b1 + b2);
                        let target = &mut out.coeffs[st * nn..(st + 1) * nn];
                        match (a.n, b.n) {
                            (x, y) if x == y => gemm_acc(n, ablk, bblk, target),
                            (1, _) => {
                                let c = ablk[0];
                                for (t, v) in target.iter_mut().zip(bblk) {
                                    *t += c * v;
                                }
                            }
                            _ => {
                                let c = bblk[0];
                                for (t, v) in target.iter_mut().zip(ablk) {
                                    *t += v * c;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Jet of the pointwise inverse via `d(F⁻¹) = −F⁻¹ (dF) F⁻¹`, realized
    /// as the graded recursion `G_s = −G_0 Σ_{t≠0} F_t G_{s−t}`.
    pub fn inverse(&self, cond_max: f64) -> Result<Self> {
        let n = self.n;
        let nn = n * n;
        let g0 = self.value().inverse(cond_max)?;
        let mut out = Self::zero(self.center, self.order, n);
        out.block_mut(0).copy_from_slice(g0.as_slice());
        for d in 1..=self.order {
            for bb in 0..=d {
                let aa = d - bb;
                let mut acc = vec![ZERO; nn];
                for i in 0..=aa {
                    for j in 0..=bb {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        let f = self.block(slot(i, j));
                        let g = out.block(slot(aa - i, bb - j));
                        gemm_acc(n, f, g, &mut acc);
                    }
                }
                let mut res = vec![ZERO; nn];
                gemm_acc(n, g0.as_slice(), &acc, &mut res);
                for (t, v) in out.block_mut(slot(aa, bb)).iter_mut().zip(res) {
                    *t = -v;
                }
            }
        }
        Ok(out)
    }

    /// Jet of the pointwise matrix exponential: scaling and squaring carried
    /// out inside the truncated jet algebra.
    pub fn exp(&self) -> Self {
        let norm = self.slot_norm();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scaled = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        let one = Self::constant(self.center, self.order, &MatrixNC::identity(self.n));
        let mut result = one.clone();
        let mut term = one;
        let mut next = Self::zero(self.center, self.order, self.n);
        for k in 1..40 {
            next.coeffs.fill(ZERO);
            Self::mul_acc(&term, &scaled, &mut next);
            let inv_k = 1.0 / k as f64;
            let (mut size, mut total): (f64, f64) = (0.0, 0.0);
            for (r, t) in result.coeffs.iter_mut().zip(next.coeffs.iter_mut()) {
                *t *= inv_k;
                *r += *t;
                size = size.max(t.norm_sqr());
                total = total.max(r.norm_sqr());
            }
            std::mem::swap(&mut term, &mut next);
            if size <= 1e-36 * total {
                break;
            }
        }
        for _ in 0..squarings {
            next.coeffs.fill(ZERO);
            Self::mul_acc(&result, &result, &mut next);
            std::mem::swap(&mut result, &mut next);
        }
        result
    }

    /// Jet of `∂_x^dx ∂_y^dy f`; the order drops by `dx + dy`.
    pub fn partial(&self, dx: usize, dy: usize) -> Result<Self> {
        let k = dx + dy;
        if k > self.order {
            return Err(Error::OrderExceeded { requested: k, max: self.order });
        }
        let order = self.order - k;
        let mut out = Self::zero(self.center, order, self.n);
        for d in 0..=order {
            for b in 0..=d {
                let a = d - b;
                let w = factorial(a + dx) / factorial(a) * factorial(b + dy) / factorial(b);
                let src = self.block(slot(a + dx, b + dy)).to_vec();
                for (t, v) in out.block_mut(slot(a, b)).iter_mut().zip(src) {
                    *t = v * w;
                }
            }
        }
        Ok(out)
    }

    /// Composes a univariate Taylor expansion `Σ c_k h^k` (taken about this
    /// scalar jet's value) with the jet: `Σ c_k (J − J(center))^k`.
    pub fn compose_scalar(&self, taylor: &[C64]) -> Result<Self> {
        if self.n != 1 {
            return Err(Error::DimensionMismatch(format!("scalar composition needs a 1x1 jet, got {}", self.n)));
        }
        let order = self.order;
        assert!(taylor.len() > order, "primitive expansion shorter than the jet order");
        let mut shifted = self.clone();
        shifted.coeffs[0] = ZERO;
        let mut acc = Self::zero(self.center, order, 1);
        acc.coeffs[0] = taylor[order];
        for k in (0..order).rev() {
            acc = Self::mul_to(&acc, &shifted, order)?;
            acc.coeffs[0] += taylor[k];
        }
        Ok(acc)
    }
}

/// Truncated product of two jets; see [`Jet2D::mul`].
pub fn jet_mul(a: &Jet2D, b: &Jet2D) -> Result<Jet2D> {
    a.mul(b)
}
