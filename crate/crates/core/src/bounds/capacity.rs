//! Capacity regions: better cognitive decoding, semi-deterministic and
//! deterministic channels, plus the three simple-scheme sub-regions used in
//! the semi-deterministic achievability argument.

use super::assignment::{AuxAssignment, Factorization};
use super::{joint_with, region, BoundsError, Ev};
use crate::channel::CifcChannel;
use crate::polytope::RatePolytope2D;
use crate::prob::{JointPmf, Role};

/// Four-row region with `U` in the role of the cognitive common message.
/// When `I(Y1;U,X2) ≥ I(Y2;U,X2)` the last row is redundant.
pub fn capacity_better_cognitive(
    ch: &CifcChannel,
    a: &AuxAssignment,
) -> Result<RatePolytope2D, BoundsError> {
    use Role::*;
    a.require(Factorization::Wu)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let r1 = ev.i(&[Y1], &[U, X1], &[X2])?;
    let r2 = ev.i(&[Y2], &[U, X2], &[])?;
    let s1 = r2 + ev.i(&[Y1], &[X1], &[X2, U])?;
    let s2 = ev.i(&[Y1], &[X2, U, X1], &[])?;
    region(&[(1, 0, r1), (0, 1, r2), (1, 1, s1), (1, 1, s2)])
}

/// Capacity when `Y1` is a deterministic function of the inputs.
pub fn capacity_semidet(
    ch: &CifcChannel,
    a: &AuxAssignment,
) -> Result<RatePolytope2D, BoundsError> {
    use Role::*;
    if !ch.is_semideterministic() {
        return Err(BoundsError::NotSemiDeterministic);
    }
    a.require(Factorization::Wu)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let r1 = ev.h(&[Y1], &[X2])?;
    let r2 = ev.i(&[Y2], &[U, X2], &[])?;
    let s = r2 + ev.h(&[Y1], &[U, X2])?;
    region(&[(1, 0, r1), (0, 1, r2), (1, 1, s)])
}

/// Capacity of a deterministic channel at input law `p_in` (other axes are
/// marginalized away).
pub fn capacity_det(ch: &CifcChannel, p_in: &JointPmf) -> Result<RatePolytope2D, BoundsError> {
    use Role::*;
    if !ch.is_deterministic() {
        return Err(BoundsError::NotDeterministic);
    }
    let input = p_in.marginalize(&[X1, X2])?;
    let joint = joint_with(ch, &input)?;
    let mut ev = Ev::new(&joint);
    let r1 = ev.h(&[Y1], &[X2])?;
    let r2 = ev.h(&[Y2], &[])?;
    let s = r2 + ev.h(&[Y1], &[Y2, X2])?;
    region(&[(1, 0, r1), (0, 1, r2), (1, 1, s)])
}

/// The three simple-scheme regions `Rc0`, `Rc1`, `Rc2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidetRegions {
    pub rc0: RatePolytope2D,
    pub rc1: RatePolytope2D,
    pub rc2: RatePolytope2D,
    /// `I(Y2;U2pb|X2) − I(U1pb;U2pb|X2)`; `Rc0 = Rc1` when this is `≥ 0`.
    pub beta: f64,
}

/// Regions of the three simple schemes over `(U1pb, U2pb, X1, X2)`.
/// `Rc0 ⊆ Rc1` always and `Rc2 ⊆ Rc1` when `beta ≥ 0`.
pub fn semidet_sub_regions(
    ch: &CifcChannel,
    a: &AuxAssignment,
) -> Result<SemidetRegions, BoundsError> {
    use Role::*;
    if !ch.is_semideterministic() {
        return Err(BoundsError::NotSemiDeterministic);
    }
    for r in [U1pb, U2pb] {
        if !a.pmf().has_role(r) {
            return Err(BoundsError::FactorizationMismatch(format!(
                "sub-regions need role {r}"
            )));
        }
    }
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let y1_u1 = ev.i(&[Y1], &[U1pb], &[])?;
    let a_term = y1_u1 - ev.i(&[U1pb], &[X2], &[])?;
    let beta = ev.i(&[Y2], &[U2pb], &[X2])? - ev.i(&[U1pb], &[U2pb], &[X2])?;
    let r2 = ev.i(&[Y2], &[U2pb, X2], &[])?;
    let sum = r2 + y1_u1 - ev.i(&[U1pb], &[U2pb, X2], &[])?;
    let rc1_rows = [(1, 0, a_term), (0, 1, r2), (1, 1, sum)];
    let mut rc0_rows = rc1_rows.to_vec();
    rc0_rows.push((1, 0, beta + a_term));
    Ok(SemidetRegions {
        rc0: region(&rc0_rows)?,
        rc1: region(&rc1_rows)?,
        rc2: region(&[(1, 0, a_term), (0, 1, ev.i(&[Y2], &[X2], &[])?)])?,
        beta,
    })
}
