//! Standard flat-boundary building blocks.

use crate::error::Result;
use crate::jets::{BumpProfile, Primitive, SmoothMap};
use crate::matrix::MatrixNC;

/// `ρ(u) u^{−|m|/2} (x ± iy)^{|m|} · A`: smooth on the disk, zero near the
/// origin and equal to `A e^{imθ}` on a neighbourhood of the boundary.
pub fn angular_mode(profile: BumpProfile, m: i32, a: &MatrixNC) -> Result<SmoothMap> {
    let k = m.unsigned_abs();
    let radial = SmoothMap::compose(Primitive::BumpOverPower { profile, k }, &SmoothMap::radius_squared())?;
    let phase = SmoothMap::complex_power(k, if m < 0 { -1.0 } else { 1.0 });
    let scalar = SmoothMap::product(&radial, &phase)?;
    SmoothMap::product(&scalar, &SmoothMap::constant(a.clone()))
}

/// `χ(u) = 1 − ρ(u)`: one near the origin, flat zero at the boundary.
pub fn interior_cutoff(profile: BumpProfile) -> Result<SmoothMap> {
    SmoothMap::compose(Primitive::Chi(profile), &SmoothMap::radius_squared())
}

/// `ρ(u)`: zero near the origin, flat one at the boundary.
pub fn boundary_bump(profile: BumpProfile) -> Result<SmoothMap> {
    SmoothMap::compose(Primitive::Bump(profile), &SmoothMap::radius_squared())
}

/// `χ(u) · P`, vanishing flatly at the boundary.
pub fn interior_element(profile: BumpProfile, p: &SmoothMap) -> Result<SmoothMap> {
    SmoothMap::product(&interior_cutoff(profile)?, p)
}
