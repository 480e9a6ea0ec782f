//! Determinants on the boundary-identity group, the local section and the
//! central-extension cocycles.

mod cocycle;
mod det;
mod loops;

pub use cocycle::{
    extrapolate_to_zero, group_cocycle_extract, group_commutator_log_det, lie_cocycle, pointwise_commutator_path, section_psi,
    GroupCocycle, LieCocycle, COMMUTING_TOL, SECTION_MAX_NORM,
};
pub use det::{
    det_homotopy, det_unipotent, exponential_path, factorize, linear_exponential_path, log_det, log_det_unipotent, mod_two_pi_i,
    BoundaryGroup, DetSettings, HomotopyLogDet,
};
pub use loops::LoopAlgebraElement;

pub(crate) use det::{nodes_with_boundary, trace_integral};
