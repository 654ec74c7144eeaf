//! Single-letter rate regions for the discrete memoryless cognitive
//! interference channel (DM-CIFC).
//!
//! The crate is organized bottom-up:
//!
//! * [`prob`] for finite joint PMFs, entropy and mutual information in bits.
//! * [`channel`]: the channel kernel `p(y1,y2|x1,x2)`, deterministic
//!   sub-classes, the two built-in example channels and their JSON format.
//! * [`polytope`] holds linear rate systems with exact rational coefficients,
//!   Fourier-Motzkin projection and 2-D region geometry.
//! * [`bounds`] evaluates the outer bounds, the rate-split/binning inner bound,
//!   capacity regions, regime classification and frontier search.
//! * [`schemes`] has single-letter zero-error codes for the example channels.
//! * [`format`] does fixed-precision number formatting shared by exporters.

pub mod bounds;
pub mod channel;
pub mod format;
pub mod polytope;
pub mod prob;
pub mod schemes;

pub use channel::{BuiltinChannel, CifcChannel};
pub use polytope::{LinearConstraint, RatePolytope2D, RateSystem, RateVar, Sense};
pub use prob::{Bits, JointPmf, Role};
