//! Exact derivative bookkeeping: truncated bivariate jets with matrix
//! coefficients and the immutable expression DAG that produces them.

mod eval;
mod expr;
mod family;
mod jet;
mod primitive;
mod taylor;

pub use eval::{jet_eval, EvalContext, JetConfig, Plan};
pub use expr::{NodeKind, SmoothMap};
pub use family::{LoopFamily, SliceFn};
pub use jet::{jet_mul, num_slots, slot, Jet2D};
pub use primitive::{BumpProfile, Primitive};
pub use taylor::Series1;

use crate::error::Result;

/// `prim ∘ inner` on the jet level (Faà di Bruno via univariate Taylor
/// composition).
pub fn scalar_compose(prim: &Primitive, inner: &Jet2D) -> Result<Jet2D> {
    let taylor = prim.taylor(inner.raw()[0], inner.order())?;
    inner.compose_scalar(&taylor)
}
