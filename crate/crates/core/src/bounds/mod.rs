//! Bound and capacity evaluators, regime classification, frontier search
//! and region dominance checks.
//!
//! Every evaluator composes an auxiliary assignment with the channel, reads
//! off the information quantities and returns a reduced 2-D region.

pub mod assignment;
pub mod capacity;
pub mod dominance;
pub mod outer;
pub mod regime;
pub mod rtd;
pub mod sample;
pub mod search;

pub use assignment::{AuxAssignment, Factorization};
pub use capacity::{
    capacity_better_cognitive, capacity_det, capacity_semidet, semidet_sub_regions, SemidetRegions,
};
pub use dominance::{
    dominance_check, dominance_sweep, sample_conforming, Comparison, DominanceReport, Relation,
    RowCheck,
};
pub use outer::{
    outer_bound_bc, outer_bound_marginal, outer_bound_marginal_single, outer_bound_wu,
    wu_corner_points, CornerPair, Coupling, WuTerms,
};
pub use regime::{classify_regime, Condition, ConditionRecord, RegimeReport, Status};
pub use rtd::{
    inner_bound_rtd, inner_bound_rtd_with, rtd_rhs, rtd_system, Binning, RtdOptions, RtdRhs,
};
pub use search::{search_frontier, BoundKind, FrontierPoint, SearchConfig};

use thiserror::Error;

use crate::channel::CifcChannel;
use crate::polytope::{LinearConstraint, PolytopeError, RatePolytope2D, RateVar};
use crate::prob::{compose_with_channel, InfoEval, JointPmf, ProbError, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("factorization mismatch: {0}")]
    FactorizationMismatch(String),
    #[error("channel is not deterministic")]
    NotDeterministic,
    #[error("channel is not semi-deterministic (Y1 is not a function of the inputs)")]
    NotSemiDeterministic,
    #[error("invalid coupling: {0}")]
    BadCoupling(String),
    #[error("unsupported bound: {0}")]
    UnsupportedBound(String),
}

/// Thin wrapper returning plain `f64` bits.
pub(crate) struct Ev<'a>(InfoEval<'a>);

impl<'a> Ev<'a> {
    pub(crate) fn new(joint: &'a JointPmf) -> Self {
        Ev(joint.info())
    }

    pub(crate) fn i(&mut self, a: &[Role], b: &[Role], given: &[Role]) -> Result<f64, BoundsError> {
        Ok(self.0.i(a, b, given)?.value())
    }

    pub(crate) fn h(&mut self, t: &[Role], given: &[Role]) -> Result<f64, BoundsError> {
        Ok(self.0.h(t, given)?.value())
    }
}

pub(crate) fn joint_with(ch: &CifcChannel, pmf: &JointPmf) -> Result<JointPmf, BoundsError> {
    Ok(compose_with_channel(pmf, ch)?)
}

/// Region `{a1·R1 + a2·R2 ≤ b}` with redundancy removed.
pub(crate) fn region(rows: &[(i64, i64, f64)]) -> Result<RatePolytope2D, BoundsError> {
    Ok(RatePolytope2D::new(rows_2d(rows))?)
}

pub(crate) fn rows_2d(rows: &[(i64, i64, f64)]) -> Vec<LinearConstraint> {
    rows.iter()
        .map(|&(a1, a2, b)| LinearConstraint::le(&[(RateVar::R1, a1), (RateVar::R2, a2)], b))
        .collect()
}
