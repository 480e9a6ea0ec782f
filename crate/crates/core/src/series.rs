//! Truncated Laurent/power series in the formal deformation parameter ν.
//!
//! ν is never given a numeric value. A series stores the coefficients of
//! `ν^p_min .. ν^top`; products are truncated at the highest power that is
//! fully determined by the operands.

use crate::error::{Error, Result};
use crate::jets::SmoothMap;
use crate::matrix::{MatrixNC, C64, ONE, ZERO};

/// Coefficient algebra operations needed by series arithmetic.
pub trait Coefficient: Clone {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: C64) -> Self;
    fn zero_like(&self) -> Self;
}

impl Coefficient for C64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn zero_like(&self) -> Self {
        ZERO
    }
}

impl Coefficient for MatrixNC {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        MatrixNC::scale(self, c)
    }
    fn zero_like(&self) -> Self {
        MatrixNC::zeros(self.dim())
    }
}

impl Coefficient for SmoothMap {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        SmoothMap::scale(self, c)
    }
    fn zero_like(&self) -> Self {
        SmoothMap::zero(self.dim())
    }
}

/// Bilinear product of coefficients that may itself carry ν-shifts: the
/// product of `a ν^p` and `b ν^q` contributes `apply(a, b, j) ν^{p+q+j}`
/// for `j = 0..=max_shift`.
pub trait SeriesProduct<T> {
    fn max_shift(&self) -> usize;
    /// `Ok(None)` marks an identically vanishing contribution.
    fn apply(&self, a: &T, b: &T, shift: usize) -> Result<Option<T>>;
}

/// A product without ν-shifts, given by a plain bilinear map.
pub struct Pointwise<F>(pub F);

impl<T, F: Fn(&T, &T) -> T> SeriesProduct<T> for Pointwise<F> {
    fn max_shift(&self) -> usize {
        0
    }
    fn apply(&self, a: &T, b: &T, shift: usize) -> Result<Option<T>> {
        Ok((shift == 0).then(|| (self.0)(a, b)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NuSeries<T> {
    p_min: i32,
    coeffs: Vec<T>,
}

impl<T: Coefficient> NuSeries<T> {
    /// Series with coefficients for `ν^p_min, ν^{p_min+1}, ...`.
    pub fn new(p_min: i32, coeffs: Vec<T>) -> Result<Self> {
        if p_min < -1 {
            return Err(Error::TruncationUnderflow);
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a series needs at least one coefficient".into()));
        }
        Ok(Self { p_min, coeffs })
    }

    /// `c + 0 ν + ... + 0 ν^top`
    pub fn constant(c: T, top: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![c];
        coeffs.extend(std::iter::repeat_n(z, top));
        Self { p_min: 0, coeffs }
    }

    pub fn p_min(&self) -> i32 {
        self.p_min
    }

    /// Highest stored power, the truncation order K.
    pub fn top(&self) -> i32 {
        self.p_min + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `ν^p`, or `None` outside the stored range.
    pub fn coeff(&self, p: i32) -> Option<&T> {
        if p < self.p_min || p > self.top() {
            None
        } else {
            Some(&self.coeffs[(p - self.p_min) as usize])
        }
    }

    pub fn map<U: Coefficient>(&self, f: impl FnMut(&T) -> U) -> NuSeries<U> {
        NuSeries { p_min: self.p_min, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<U: Coefficient>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<NuSeries<U>> {
        Ok(NuSeries { p_min: self.p_min, coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|x| x.scale(c))
    }

    /// Drops powers above `top`.
    pub fn truncated(&self, top: i32) -> Self {
        let keep = ((top - self.p_min + 1).max(1) as usize).min(self.coeffs.len());
        Self { p_min: self.p_min, coeffs: self.coeffs[..keep].to_vec() }
    }
}

/// Termwise sum, truncated at the lower of the two tops.
pub fn series_add<T: Coefficient>(a: &NuSeries<T>, b: &NuSeries<T>) -> Result<NuSeries<T>> {
    let p_min = a.p_min.min(b.p_min);
    let top = a.top().min(b.top());
    if top < p_min {
        return Err(Error::InvalidArgument("series have disjoint ranges".into()));
    }
    let zero = a.coeffs[0].zero_like();
    let coeffs = (p_min..=top)
        .map(|p| match (a.coeff(p), b.coeff(p)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => zero.clone(),
        })
        .collect();
    NuSeries::new(p_min, coeffs)
}

pub fn series_sub<T: Coefficient>(a: &NuSeries<T>, b: &NuSeries<T>) -> Result<NuSeries<T>> {
    series_add(a, &b.scale(-ONE))
}

/// Truncated convolution `Σ_{p+q+j=m} prod(a_p, b_q, j)`.
pub fn series_mul<T: Coefficient>(a: &NuSeries<T>, b: &NuSeries<T>, prod: &impl SeriesProduct<T>) -> Result<NuSeries<T>> {
    let p_min = a.p_min + b.p_min;
    if p_min < -1 {
        return Err(Error::TruncationUnderflow);
    }
    let top = (a.top() + b.p_min).min(b.top() + a.p_min);
    let terms = (p_min..=top).map(|m| convolution_term(a, b, prod, m, None)).collect::<Result<Vec<_>>>()?;
    let zero = match terms.iter().flatten().next() {
        Some(t) => t.zero_like(),
        None => b.coeffs[0].zero_like(),
    };
    NuSeries::new(p_min, terms.into_iter().map(|t| t.unwrap_or_else(|| zero.clone())).collect())
}

/// Sum of all `prod(a_p, b_q, j)` with `p + q + j = m`, optionally skipping
/// one `(p, q, j)` triple.
fn convolution_term<T: Coefficient>(
    a: &NuSeries<T>,
    b: &NuSeries<T>,
    prod: &impl SeriesProduct<T>,
    m: i32,
    skip: Option<(i32, i32, usize)>,
) -> Result<Option<T>> {
    let mut acc: Option<T> = None;
    for j in 0..=prod.max_shift() {
        for p in a.p_min..=a.top() {
            let q = m - p - j as i32;
            if q < b.p_min || q > b.top() {
                continue;
            }
            if skip == Some((p, q, j)) {
                continue;
            }
            if let Some(t) = prod.apply(a.coeff(p).unwrap(), b.coeff(q).unwrap(), j)? {
                acc = Some(match acc {
                    Some(s) => s.add(&t),
                    None => t,
                });
            }
        }
    }
    Ok(acc)
}

/// Right inverse `b` with `a · b = 1 + O(ν^{K+1})`, given the inverse of
/// the leading coefficient. Uses `b_m = −inv0 · Σ_{(p,q,j) ≠ (0,m,0)} a_p b_q`.
pub fn series_inverse<T: Coefficient>(a: &NuSeries<T>, inv0: &T, prod: &impl SeriesProduct<T>) -> Result<NuSeries<T>> {
    if a.p_min != 0 {
        return Err(Error::NotInvertible);
    }
    let mut b = NuSeries { p_min: 0, coeffs: vec![inv0.clone()] };
    for m in 1..=a.top() {
        let zero = inv0.zero_like();
        // extend with a placeholder so b_q for q < m are visible
        b.coeffs.push(zero.clone());
        let s = convolution_term(a, &b, prod, m, Some((0, m, 0)))?;
        let bm = match s {
            Some(s) => prod.apply(inv0, &s, 0)?.map(|t| t.scale(-ONE)).unwrap_or(zero),
            None => zero,
        };
        *b.coeffs.last_mut().unwrap() = bm;
    }
    Ok(b)
}

/// [`series_inverse`] for matrix coefficients with a pointwise product.
pub fn series_inverse_matrix(a: &NuSeries<MatrixNC>, cond_max: f64) -> Result<NuSeries<MatrixNC>> {
    let inv0 = a.coeff(0).ok_or(Error::NotInvertible)?.inverse(cond_max).map_err(|_| Error::NotInvertible)?;
    series_inverse(a, &inv0, &Pointwise(|x: &MatrixNC, y: &MatrixNC| x * y))
}

/// Splits off `k − 1`; the caller guarantees `k_0` is the identity.
fn nilpotent_part<T: Coefficient>(k: &NuSeries<T>) -> NuSeries<T> {
    let mut z = k.clone();
    z.coeffs[0] = z.coeffs[0].zero_like();
    z
}

/// `log k = Σ_{n=1}^{K} (−1)^{n+1} (k − 1)^n / n` for unipotent `k`.
/// `is_identity` decides whether the order-0 coefficient is exactly one.
pub fn series_log_unipotent<T: Coefficient>(
    k: &NuSeries<T>,
    prod: &impl SeriesProduct<T>,
    is_identity: impl Fn(&T) -> bool,
) -> Result<NuSeries<T>> {
    if k.p_min != 0 {
        return Err(Error::NotUnipotent("series has a Laurent part".into()));
    }
    if !is_identity(&k.coeffs[0]) {
        return Err(Error::NotUnipotent("order-0 coefficient is not the identity".into()));
    }
    let z = nilpotent_part(k);
    let mut power = z.clone();
    let mut acc = z.clone();
    for n in 2..=k.top().max(1) {
        power = series_mul(&power, &z, prod)?;
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        acc = series_add(&acc, &power.scale(C64::new(sign / n as f64, 0.0)))?;
    }
    Ok(acc)
}

/// `exp z = Σ_{n=0}^{K} z^n / n!` for `z` without order-0 term.
pub fn series_exp_nilpotent<T: Coefficient>(z: &NuSeries<T>, one: &T, prod: &impl SeriesProduct<T>) -> Result<NuSeries<T>> {
    if z.p_min != 0 {
        return Err(Error::InvalidArgument("exponent must be a power series".into()));
    }
    let z = nilpotent_part(z);
    let mut acc = series_add(&NuSeries::constant(one.clone(), z.top() as usize), &z)?;
    let mut power = z.clone();
    let mut fact = 1.0;
    for n in 2..=z.top().max(1) {
        fact *= n as f64;
        power = series_mul(&power, &z, prod)?;
        acc = series_add(&acc, &power.scale(C64::new(1.0 / fact, 0.0)))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_mul() -> Pointwise<fn(&C64, &C64) -> C64> {
        Pointwise(|a: &C64, b: &C64| a * b)
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn one_is_neutral() {
        let one = NuSeries::constant(ONE, 3);
        let b = NuSeries::new(0, vec![c(1.0), c(2.0), c(-3.0), c(0.5)]).unwrap();
        assert_eq!(series_mul(&one, &b, &scalar_mul()).unwrap(), b);
    }

    #[test]
    fn difference_of_squares() {
        // (1 + ν x)(1 − ν x) = 1 − ν² x²
        let x = 0.7;
        let a = NuSeries::new(0, vec![c(1.0), c(x), c(0.0)]).unwrap();
        let b = NuSeries::new(0, vec![c(1.0), c(-x), c(0.0)]).unwrap();
        let p = series_mul(&a, &b, &scalar_mul()).unwrap();
        assert_eq!(p.coeffs(), &[c(1.0), c(0.0), c(-x * x)]);
    }

    #[test]
    fn underflow_is_rejected() {
        let a = NuSeries::new(-1, vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(series_mul(&a, &a, &scalar_mul()), Err(Error::TruncationUnderflow));
    }

    #[test]
    fn laurent_times_power_series_keeps_slot() {
        let a = NuSeries::new(-1, vec![c(0.5), c(1.0), c(2.0)]).unwrap();
        let b = NuSeries::new(0, vec![c(2.0), c(1.0), c(0.0)]).unwrap();
        let p = series_mul(&a, &b, &scalar_mul()).unwrap();
        assert_eq!(p.p_min(), -1);
        assert_eq!(p.top(), 1);
        assert_eq!(p.coeffs(), &[c(1.0), c(2.5), c(5.0)]);
    }

    #[test]
    fn geometric_inverse() {
        // (1 + ν h)^{-1} = 1 − ν h + ν² h² − ν³ h³
        let h = 0.3;
        let a = NuSeries::new(0, vec![c(1.0), c(h), c(0.0), c(0.0)]).unwrap();
        let inv = series_inverse(&a, &ONE, &scalar_mul()).unwrap();
        for (k, z) in inv.coeffs().iter().enumerate() {
            assert!((z.re - (-h).powi(k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn log_of_one_plus_nu_f() {
        let f = 0.9;
        let k = NuSeries::new(0, vec![c(1.0), c(f), c(0.0)]).unwrap();
        let l = series_log_unipotent(&k, &scalar_mul(), |z| *z == ONE).unwrap();
        assert_eq!(l.coeffs(), &[c(0.0), c(f), c(-f * f / 2.0)]);
    }

    #[test]
    fn log_requires_unipotent() {
        let k = NuSeries::new(0, vec![c(2.0), c(1.0)]).unwrap();
        assert!(matches!(series_log_unipotent(&k, &scalar_mul(), |z| *z == ONE), Err(Error::NotUnipotent(_))));
    }

    #[test]
    fn matrix_inverse_of_constant() {
        let a = MatrixNC::from_real_rows(&[vec![2.0, 1.0], vec![0.0, 4.0]]);
        let s = NuSeries::constant(a.clone(), 2);
        let inv = series_inverse_matrix(&s, 1e12).unwrap();
        assert!((&inv.coeffs()[0] - &a.inverse(1e12).unwrap()).max_abs() < 1e-15);
        assert!(inv.coeffs()[1].is_zero() && inv.coeffs()[2].is_zero());
    }
}
