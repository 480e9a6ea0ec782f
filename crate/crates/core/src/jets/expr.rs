use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::family::LoopFamily;
use super::primitive::Primitive;
use crate::error::{Error, Result};
use crate::matrix::{MatrixNC, C64, ONE, ZERO};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Node kinds of the expression DAG.
pub enum NodeKind {
    Const(MatrixNC),
    CoordX,
    CoordY,
    Sum(Vec<SmoothMap>),
    ScalarScale(C64, SmoothMap),
    /// Order-preserving matrix product; a 1x1 factor acts as a scalar.
    MatProduct(SmoothMap, SmoothMap),
    MatInverse(SmoothMap),
    MatExp(SmoothMap),
    ScalarCompose(Primitive, SmoothMap),
    PartialDerivative { dx: usize, dy: usize, child: SmoothMap },
    TimeSlice { family: Arc<LoopFamily>, t: f64, expr: SmoothMap },
}

pub(crate) struct Node {
    id: u64,
    dim: usize,
    kind: NodeKind,
}

/// Immutable expression for a matrix-valued smooth function on the closed
/// unit disk. Cloning shares the underlying node.
#[derive(Clone)]
pub struct SmoothMap(Arc<Node>);

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind() {
            NodeKind::Const(_) => "Const",
            NodeKind::CoordX => "CoordX",
            NodeKind::CoordY => "CoordY",
            NodeKind::Sum(_) => "Sum",
            NodeKind::ScalarScale(..) => "ScalarScale",
            NodeKind::MatProduct(..) => "MatProduct",
            NodeKind::MatInverse(_) => "MatInverse",
            NodeKind::MatExp(_) => "MatExp",
            NodeKind::ScalarCompose(..) => "ScalarCompose",
            NodeKind::PartialDerivative { .. } => "PartialDerivative",
            NodeKind::TimeSlice { .. } => "TimeSlice",
        };
        write!(f, "SmoothMap#{}({kind}, {}x{})", self.id(), self.dim(), self.dim())
    }
}

impl SmoothMap {
    fn make(dim: usize, kind: NodeKind) -> Self {
        SmoothMap(Arc::new(Node { id: NEXT_ID.fetch_add(1, Ordering::Relaxed), dim, kind }))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn kind(&self) -> &NodeKind {
        &self.0.kind
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn constant(m: MatrixNC) -> Self {
        let n = m.dim();
        Self::make(n, NodeKind::Const(m))
    }

    pub fn scalar(c: C64) -> Self {
        Self::constant(MatrixNC::scalar(c))
    }

    pub fn real(c: f64) -> Self {
        Self::scalar(C64::new(c, 0.0))
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(MatrixNC::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(MatrixNC::identity(n))
    }

    pub fn x() -> Self {
        Self::make(1, NodeKind::CoordX)
    }

    pub fn y() -> Self {
        Self::make(1, NodeKind::CoordY)
    }

    /// `x² + y²`
    pub fn radius_squared() -> Self {
        let (x, y) = (Self::x(), Self::y());
        &(&x * &x) + &(&y * &y)
    }

    /// `(x + i·sign·y)^k`
    pub fn complex_power(k: u32, sign: f64) -> Self {
        let z = &Self::x() + &Self::y().scale(C64::new(0.0, sign));
        let mut acc = Self::real(1.0);
        for _ in 0..k {
            acc = &acc * &z;
        }
        acc
    }

    pub fn as_constant(&self) -> Option<&MatrixNC> {
        match self.kind() {
            NodeKind::Const(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant().is_some_and(MatrixNC::is_zero)
    }

    fn is_exact_identity(&self) -> bool {
        self.as_constant().is_some_and(MatrixNC::is_identity_exact)
    }

    pub fn sum(items: Vec<SmoothMap>) -> Result<Self> {
        let Some(first) = items.first() else {
            return Err(Error::InvalidArgument("empty sum".into()));
        };
        let dim = first.dim();
        if let Some(bad) = items.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch(format!("sum of {dim}x{dim} and {d}x{d}", d = bad.dim())));
        }
        let mut constant: Option<MatrixNC> = None;
        let mut rest = Vec::with_capacity(items.len());
        for m in items {
            match m.as_constant() {
                Some(c) => {
                    constant = Some(match constant {
                        Some(acc) => &acc + c,
                        None => c.clone(),
                    })
                }
                None => rest.push(m),
            }
        }
        if let Some(c) = constant {
            if !c.is_zero() || rest.is_empty() {
                rest.push(Self::constant(c));
            }
        }
        Ok(match rest.len() {
            1 => rest.pop().unwrap(),
            _ => Self::make(dim, NodeKind::Sum(rest)),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Self::sum(vec![self.clone(), other.clone()])
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == ONE {
            return self.clone();
        }
        if c == ZERO {
            return Self::zero(self.dim());
        }
        match self.kind() {
            NodeKind::Const(m) => Self::constant(m.scale(c)),
            NodeKind::ScalarScale(c0, inner) => inner.scale(c * c0),
            _ => Self::make(self.dim(), NodeKind::ScalarScale(c, self.clone())),
        }
    }

    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        let dim = match (a.dim(), b.dim()) {
            (x, y) if x == y => x,
            (1, y) => y,
            (x, 1) => x,
            (x, y) => return Err(Error::DimensionMismatch(format!("product of {x}x{x} and {y}x{y}"))),
        };
        if a.is_zero() || b.is_zero() {
            return Ok(Self::zero(dim));
        }
        if a.is_exact_identity() && b.dim() == dim {
            return Ok(b.clone());
        }
        if b.is_exact_identity() && a.dim() == dim {
            return Ok(a.clone());
        }
        match (a.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => {
                let m = match (x.dim(), y.dim()) {
                    (p, q) if p == q => x * y,
                    (1, _) => y.scale(x[(0, 0)]),
                    _ => x.scale(y[(0, 0)]),
                };
                Ok(Self::constant(m))
            }
            (Some(x), None) if x.dim() == 1 => Ok(b.scale(x[(0, 0)]).broadcast(dim)),
            (None, Some(y)) if y.dim() == 1 => Ok(a.scale(y[(0, 0)]).broadcast(dim)),
            _ => Ok(Self::make(dim, NodeKind::MatProduct(a.clone(), b.clone()))),
        }
    }

    fn broadcast(self, dim: usize) -> Self {
        if self.dim() == dim {
            self
        } else {
            Self::make(dim, NodeKind::MatProduct(self, Self::identity(dim)))
        }
    }

    pub fn inverse(&self) -> Self {
        if let Some(m) = self.as_constant() {
            if let Ok(inv) = m.inverse(1e12) {
                return Self::constant(inv);
            }
        }
        Self::make(self.dim(), NodeKind::MatInverse(self.clone()))
    }

    /// Pointwise matrix exponential.
    pub fn exp(&self) -> Self {
        if let Some(m) = self.as_constant() {
            return Self::constant(m.exp());
        }
        Self::make(self.dim(), NodeKind::MatExp(self.clone()))
    }

    /// `prim ∘ inner` for a scalar-valued `inner`.
    pub fn compose(prim: Primitive, inner: &Self) -> Result<Self> {
        if inner.dim() != 1 {
            return Err(Error::DimensionMismatch(format!("scalar composition with a {}x{} expression", inner.dim(), inner.dim())));
        }
        if let Some(m) = inner.as_constant() {
            return Ok(Self::scalar(prim.value(m[(0, 0)])?));
        }
        Ok(Self::make(1, NodeKind::ScalarCompose(prim, inner.clone())))
    }

    pub fn partial(&self, dx: usize, dy: usize) -> Self {
        if dx + dy == 0 {
            return self.clone();
        }
        match self.kind() {
            NodeKind::Const(_) => Self::zero(self.dim()),
            NodeKind::CoordX => match (dx, dy) {
                (1, 0) => Self::real(1.0),
                _ => Self::zero(1),
            },
            NodeKind::CoordY => match (dx, dy) {
                (0, 1) => Self::real(1.0),
                _ => Self::zero(1),
            },
            _ => Self::make(self.dim(), NodeKind::PartialDerivative { dx, dy, child: self.clone() }),
        }
    }

    /// Slice of a t-parametrized family at a fixed time.
    pub fn time_slice(family: &Arc<LoopFamily>, t: f64) -> Self {
        let expr = family.value_expr(t);
        Self::make(expr.dim(), NodeKind::TimeSlice { family: Arc::clone(family), t, expr })
    }

    pub fn children(&self) -> Vec<&SmoothMap> {
        match self.kind() {
            NodeKind::Const(_) | NodeKind::CoordX | NodeKind::CoordY => vec![],
            NodeKind::Sum(items) => items.iter().collect(),
            NodeKind::ScalarScale(_, c)
            | NodeKind::MatInverse(c)
            | NodeKind::MatExp(c)
            | NodeKind::ScalarCompose(_, c)
            | NodeKind::PartialDerivative { child: c, .. }
            | NodeKind::TimeSlice { expr: c, .. } => vec![c],
            NodeKind::MatProduct(a, b) => vec![a, b],
        }
    }

    /// Number of distinct nodes reachable from this one.
    pub fn node_count(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(m) = stack.pop() {
            if seen.insert(m.id()) {
                stack.extend(m.children());
            }
        }
        seen.len()
    }
}

impl Add for &SmoothMap {
    type Output = SmoothMap;
    /// Panics on a dimension mismatch; use [`SmoothMap::sum`] for a fallible form.
    fn add(self, rhs: &SmoothMap) -> SmoothMap {
        self.try_add(rhs).expect("dimension mismatch in SmoothMap addition")
    }
}

impl Sub for &SmoothMap {
    type Output = SmoothMap;
    fn sub(self, rhs: &SmoothMap) -> SmoothMap {
        self.try_add(&rhs.scale(-ONE)).expect("dimension mismatch in SmoothMap subtraction")
    }
}

impl Mul for &SmoothMap {
    type Output = SmoothMap;
    fn mul(self, rhs: &SmoothMap) -> SmoothMap {
        SmoothMap::product(self, rhs).expect("dimension mismatch in SmoothMap product")
    }
}

impl Neg for &SmoothMap {
    type Output = SmoothMap;
    fn neg(self) -> SmoothMap {
        self.scale(-ONE)
    }
}
