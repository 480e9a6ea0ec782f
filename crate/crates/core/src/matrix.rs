//! Small dense complex matrices, the coefficient ring of every function
//! algebra in the crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct MatrixNC {
    n: usize,
    data: Vec<C64>,
}

impl fmt::Debug for MatrixNC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixNC({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl MatrixNC {
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// 1x1 matrix holding `c`.
    pub fn scalar(c: C64) -> Self {
        Self { n: 1, data: vec![c] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows do not form a square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Self::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_vec(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "data length must be n*n");
        Self { n, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    /// Pauli matrices sigma_x, sigma_y, sigma_z.
    pub fn pauli() -> [MatrixNC; 3] {
        [
            Self::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
            Self::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
            Self::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]),
        ]
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn is_identity_exact(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self[(i, j)] == if i == j { ONE } else { ZERO }))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.n, other.n);
        Self::from_fn(a * b, |i, j| self[(i / b, j / b)] * other[(i % b, j % b)])
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting. Fails
    /// when the 1-norm condition estimate exceeds `cond_max`.
    pub fn inverse(&self, cond_max: f64) -> Result<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].norm().total_cmp(&a[q * n + col].norm()))
                .unwrap();
            let pv = a[pivot * n + col];
            if pv.norm() == 0.0 || !pv.norm().is_finite() {
                return Err(Error::SingularMatrix { cond: f64::INFINITY, limit: cond_max });
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                    inv.swap(col * n + j, pivot * n + j);
                }
            }
            let r = ONE / pv;
            for j in 0..n {
                a[col * n + j] *= r;
                inv[col * n + j] *= r;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[i * n + col];
                if factor == ZERO {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                    a[i * n + j] -= factor * ac;
                    inv[i * n + j] -= factor * ic;
                }
            }
        }
        let inv = Self { n, data: inv };
        let cond = self.norm1() * inv.norm1();
        if !cond.is_finite() || cond > cond_max {
            return Err(Error::SingularMatrix { cond, limit: cond_max });
        }
        Ok(inv)
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Self {
        let norm = self.norm1();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scaled = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut result = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for k in 1..40 {
            term = (&term * &scaled).scale(C64::new(1.0 / k as f64, 0.0));
            result = &result + &term;
            if term.max_abs() <= 1e-18 * result.max_abs() {
                break;
            }
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }

    /// `||A^† A - 1||_max`
    pub fn unitarity_residual(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.n)).max_abs()
    }

    /// `||A + A^†||_max`
    pub fn anti_hermiticity_residual(&self) -> f64 {
        (self + &self.adjoint()).max_abs()
    }
}

impl std::ops::Index<(usize, usize)> for MatrixNC {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixNC {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &MatrixNC {
    type Output = MatrixNC;
    fn add(self, rhs: &MatrixNC) -> MatrixNC {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch in add");
        MatrixNC { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &MatrixNC {
    type Output = MatrixNC;
    fn sub(self, rhs: &MatrixNC) -> MatrixNC {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch in sub");
        MatrixNC { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &MatrixNC {
    type Output = MatrixNC;
    fn neg(self) -> MatrixNC {
        self.scale(-ONE)
    }
}

impl Mul for &MatrixNC {
    type Output = MatrixNC;
    fn mul(self, rhs: &MatrixNC) -> MatrixNC {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch in mul");
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        gemm_acc(n, &self.data, &rhs.data, &mut out);
        MatrixNC { n, data: out }
    }
}

/// `out += a * b` for row-major n x n blocks.
#[inline]
pub(crate) fn gemm_acc(n: usize, a: &[C64], b: &[C64], out: &mut [C64]) {
    if n == 1 {
        out[0] += a[0] * b[0];
        return;
    }
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == ZERO {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (o, bk) in orow.iter_mut().zip(brow) {
                *o += aik * bk;
            }
        }
    }
}
