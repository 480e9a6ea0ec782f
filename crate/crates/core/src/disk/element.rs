use crate::error::{Error, Result};
use crate::jets::SmoothMap;
use crate::matrix::{MatrixNC, C64, ONE};
use crate::series::{series_add, NuSeries};

/// Boundary behaviour of an element, from most to least special.
///
/// Every class except `General` means the `ν⁰` and `ν¹` coefficients are
/// flat at the unit circle (radial derivatives vanish to the checked order).
/// Higher coefficients are not constrained: for two factors with
/// θ-dependent boundary values the `ν²` coefficient of the Moyal product
/// restricts to `¼ ∂_θf ∂_θg` on the circle and is not flat there. Traces
/// and determinants only read the coefficients of order 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryClass {
    /// Boundary value is the identity series.
    FlatIdentity,
    /// Boundary values do not depend on θ.
    FlatConstant,
    /// Arbitrary boundary loop.
    FlatLoop,
    General,
}

impl BoundaryClass {
    pub fn is_flat(self) -> bool {
        self != BoundaryClass::General
    }

    /// Class of a star product (the boundary value of a product of flat
    /// elements is the pointwise product of boundary values).
    pub fn product(self, other: Self) -> Self {
        self.max(other)
    }

    /// Class of a linear combination.
    pub fn combination(self, other: Self) -> Self {
        self.max(other).max(BoundaryClass::FlatConstant)
    }
}

/// An element of the deformed disk algebra: a ν-series of smooth matrix
/// functions together with its boundary class.
#[derive(Clone, Debug)]
pub struct StarElement {
    series: NuSeries<SmoothMap>,
    class: BoundaryClass,
}

impl StarElement {
    /// Wraps a series as a `General` element. Use
    /// `DiskAlgebra::element` to obtain a verified class.
    pub fn general(series: NuSeries<SmoothMap>) -> Result<Self> {
        Self::with_class(series, BoundaryClass::General)
    }

    pub(crate) fn with_class(series: NuSeries<SmoothMap>, class: BoundaryClass) -> Result<Self> {
        if series.p_min() < 0 {
            return Err(Error::InvalidArgument("algebra elements have no Laurent part".into()));
        }
        let n = series.coeffs()[0].dim();
        if series.coeffs().iter().any(|c| c.dim() != n && c.dim() != 1) {
            return Err(Error::DimensionMismatch("series coefficients of different sizes".into()));
        }
        Ok(Self { series, class })
    }

    /// `f_0 + 0·ν + … + 0·ν^K`
    pub(crate) fn zero_order(map: SmoothMap, k: usize, class: BoundaryClass) -> Self {
        Self { series: NuSeries::constant(map, k), class }
    }

    /// `f + 0·ν + … + 0·ν^k` as a `General` element.
    pub fn from_order_zero(map: SmoothMap, k: usize) -> Self {
        Self::zero_order(map, k, BoundaryClass::General)
    }

    /// Wraps `series` with the boundary class of `like`, for series whose
    /// boundary behaviour is inherited from `like` by construction.
    pub(crate) fn with_class_of(series: NuSeries<SmoothMap>, like: &Self) -> Result<Self> {
        Self::with_class(series, like.class)
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self::zero_order(SmoothMap::identity(n), k, BoundaryClass::FlatIdentity)
    }

    pub fn constant(m: MatrixNC, k: usize) -> Self {
        let class = if m.is_identity_exact() { BoundaryClass::FlatIdentity } else { BoundaryClass::FlatConstant };
        Self::zero_order(SmoothMap::constant(m), k, class)
    }

    pub fn series(&self) -> &NuSeries<SmoothMap> {
        &self.series
    }

    pub fn boundary_class(&self) -> BoundaryClass {
        self.class
    }

    /// Matrix size (the largest coefficient size; 1×1 coefficients broadcast).
    pub fn dim(&self) -> usize {
        self.series.coeffs().iter().map(SmoothMap::dim).max().unwrap_or(1)
    }

    /// Truncation order K.
    pub fn order(&self) -> usize {
        self.series.top() as usize
    }

    /// Coefficient of `ν^p` (zero map when `p` exceeds the stored range).
    pub fn coeff(&self, p: usize) -> SmoothMap {
        self.series.coeff(p as i32).cloned().unwrap_or_else(|| SmoothMap::zero(self.dim()))
    }

    /// True when every coefficient above order 0 is structurally zero.
    pub fn is_zero_order(&self) -> bool {
        self.series.coeffs()[1..].iter().all(SmoothMap::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Self::with_class(series_add(&self.series, &other.series)?, self.class.combination(other.class))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: C64) -> Self {
        let class = if c == ONE { self.class } else { self.class.combination(BoundaryClass::FlatConstant) };
        Self { series: self.series.scale(c), class }
    }

    /// Multiplies the element by `ν^1` (dropping the top coefficient).
    pub fn shift_nu(&self) -> Self {
        let k = self.order();
        let mut coeffs = vec![SmoothMap::zero(self.dim())];
        coeffs.extend(self.series.coeffs()[..k].iter().cloned());
        let class = self.class.combination(BoundaryClass::FlatConstant);
        Self { series: NuSeries::new(0, coeffs).expect("nonempty"), class }
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!("elements of size {} and {}", self.dim(), other.dim())));
        }
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch(format!("truncation orders {} and {}", self.order(), other.order())));
        }
        Ok(())
    }
}
