//! Outer bounds: one auxiliary RV, BC inspired, and the marginal-based bound
//! with a coupled copy `Y2'` of receiver 2's output.

use serde::Serialize;

use super::assignment::{AuxAssignment, Factorization};
use super::{joint_with, region, BoundsError, Ev};
use crate::channel::CifcChannel;
use crate::polytope::RatePolytope2D;
use crate::prob::{JointPmf, Role};

/// Marginal tolerance for couplings.
pub const COUPLING_TOL: f64 = 1e-9;

/// Per-input joint laws `q(y1, y2' | x1, x2)` over `Y1 × Y2'`, stored like a
/// channel kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    name: String,
    kernel: CifcChannel,
}

impl Coupling {
    /// `Y2' = Y2`: the channel's own joint law.
    pub fn identity(ch: &CifcChannel) -> Self {
        Coupling {
            name: "identity".into(),
            kernel: ch.clone(),
        }
    }

    /// `q = p(y1|x1,x2) p(y2|x1,x2)`.
    pub fn product(ch: &CifcChannel) -> Self {
        let kernel = CifcChannel::from_fn(ch.cards(), |x1, x2, y1, y2| {
            ch.y1_marginal(x1, x2)[y1] * ch.y2_marginal(x1, x2)[y2]
        })
        .expect("product of stochastic rows is stochastic");
        Coupling {
            name: "product".into(),
            kernel,
        }
    }

    /// Validates a user-supplied coupling against the channel marginals.
    pub fn new(name: &str, ch: &CifcChannel, kernel: CifcChannel) -> Result<Self, BoundsError> {
        if kernel.cards() != ch.cards() {
            return Err(BoundsError::BadCoupling(format!(
                "coupling '{name}' has alphabets {:?}, channel has {:?}",
                kernel.cards(),
                ch.cards()
            )));
        }
        let c = ch.cards();
        for x1 in 0..c.x1 {
            for x2 in 0..c.x2 {
                let pairs = [
                    (kernel.y1_marginal(x1, x2), ch.y1_marginal(x1, x2), "Y1"),
                    (kernel.y2_marginal(x1, x2), ch.y2_marginal(x1, x2), "Y2'"),
                ];
                for (got, want, which) in pairs {
                    if got
                        .iter()
                        .zip(&want)
                        .any(|(a, b)| (a - b).abs() > COUPLING_TOL)
                    {
                        return Err(BoundsError::BadCoupling(format!(
                            "coupling '{name}': {which} marginal differs at (x1={x1}, x2={x2})"
                        )));
                    }
                }
            }
        }
        Ok(Coupling {
            name: name.into(),
            kernel,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Joint law of `(X1, X2, Y1, Y2')` for an input PMF.
    pub fn joint(&self, p_in: &JointPmf) -> Result<JointPmf, BoundsError> {
        let input = p_in.marginalize(&[Role::X1, Role::X2])?;
        let with_y = joint_with(&self.kernel, &input)?;
        Ok(with_y.rename(Role::Y2, Role::Y2p)?)
    }
}

/// `R1 ≤ I(X1;Y1|X2)`, `R2 ≤ I(X2,U;Y2)`, `R1+R2 ≤ I(X2,U;Y2) + I(X1;Y1|X2,U)`.
pub fn outer_bound_wu(ch: &CifcChannel, a: &AuxAssignment) -> Result<RatePolytope2D, BoundsError> {
    let t = WuTerms::eval(ch, a)?;
    region(&[(1, 0, t.r1), (0, 1, t.r2), (1, 1, t.r2 + t.tail)])
}

/// Right-hand sides of the one-auxiliary outer bound plus the quantities the
/// corner points and the better-cognition condition need.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WuTerms {
    /// `I(X1;Y1|X2)`
    pub r1: f64,
    /// `I(Y2;U,X2)`
    pub r2: f64,
    /// `I(X1;Y1|U,X2)`
    pub tail: f64,
    /// `I(Y1;U|X2)`
    pub y1_u: f64,
    /// `I(Y1;U,X2)`
    pub y1_ux2: f64,
}

impl WuTerms {
    pub fn eval(ch: &CifcChannel, a: &AuxAssignment) -> Result<Self, BoundsError> {
        use Role::*;
        a.require(Factorization::Wu)?;
        let joint = joint_with(ch, a.pmf())?;
        let mut ev = Ev::new(&joint);
        Ok(WuTerms {
            r1: ev.i(&[X1], &[Y1], &[X2])?,
            r2: ev.i(&[Y2], &[U, X2], &[])?,
            tail: ev.i(&[X1], &[Y1], &[U, X2])?,
            y1_u: ev.i(&[Y1], &[U], &[X2])?,
            y1_ux2: ev.i(&[Y1], &[U, X2], &[])?,
        })
    }
}

/// The two candidate corner points of the one-auxiliary outer bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CornerPair {
    pub point_a: (f64, f64),
    pub point_b: (f64, f64),
    pub delta: f64,
}

pub fn wu_corner_points(ch: &CifcChannel, a: &AuxAssignment) -> Result<CornerPair, BoundsError> {
    let t = WuTerms::eval(ch, a)?;
    let delta = (t.r2 - t.y1_u).max(0.0);
    Ok(CornerPair {
        point_a: (t.tail, t.r2),
        point_b: (t.tail + t.r2 - delta, delta),
        delta,
    })
}

/// BC inspired outer bound (four rows).
pub fn outer_bound_bc(ch: &CifcChannel, a: &AuxAssignment) -> Result<RatePolytope2D, BoundsError> {
    use Role::*;
    a.require(Factorization::Bc)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let r1 = ev.i(&[V, U1], &[Y1], &[])?;
    let r2 = ev.i(&[V, U2], &[Y2], &[])?;
    let s1 = r1 + ev.i(&[U2], &[Y2], &[U1, V])?;
    let s2 = r2 + ev.i(&[U1], &[Y1], &[U2, V])?;
    region(&[(1, 0, r1), (0, 1, r2), (1, 1, s1), (1, 1, s2)])
}

/// `I(Y1; X1 | Y2', X2)` under one coupling.
pub fn coupled_term(coupling: &Coupling, p_in: &JointPmf) -> Result<f64, BoundsError> {
    let j = coupling.joint(p_in)?;
    Ev::new(&j).i(&[Role::Y1], &[Role::X1], &[Role::Y2p, Role::X2])
}

fn marginal_rows(ch: &CifcChannel, p_in: &JointPmf) -> Result<(f64, f64), BoundsError> {
    use Role::*;
    let input = p_in.marginalize(&[X1, X2])?;
    let joint = joint_with(ch, &input)?;
    let mut ev = Ev::new(&joint);
    Ok((ev.i(&[Y1], &[X1], &[X2])?, ev.i(&[X1, X2], &[Y2], &[])?))
}

/// Marginal-based outer bound; the sum-rate uses the smallest coupled term
/// over `couplings` and the identity coupling.
pub fn outer_bound_marginal(
    ch: &CifcChannel,
    p_in: &JointPmf,
    couplings: &[Coupling],
) -> Result<RatePolytope2D, BoundsError> {
    let (r1, r2) = marginal_rows(ch, p_in)?;
    let mut best = coupled_term(&Coupling::identity(ch), p_in)?;
    for c in couplings {
        best = best.min(coupled_term(c, p_in)?);
    }
    region(&[(1, 0, r1), (0, 1, r2), (1, 1, r2 + best)])
}

/// Marginal-based outer bound evaluated at exactly one coupling.
pub fn outer_bound_marginal_single(
    ch: &CifcChannel,
    p_in: &JointPmf,
    coupling: &Coupling,
) -> Result<RatePolytope2D, BoundsError> {
    let (r1, r2) = marginal_rows(ch, p_in)?;
    let t = coupled_term(coupling, p_in)?;
    region(&[(1, 0, r1), (0, 1, r2), (1, 1, r2 + t)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{BuiltinChannel, Cards};

    fn wu_assignment(p_in: &JointPmf, u: impl Fn(&[usize]) -> usize, card: usize) -> AuxAssignment {
        AuxAssignment::new(
            p_in.extend_deterministic(Role::U, card, u).unwrap(),
            Factorization::Wu,
        )
        .unwrap()
    }

    fn uniform(a: usize, b: usize) -> JointPmf {
        JointPmf::uniform(&[(Role::X1, a), (Role::X2, b)]).unwrap()
    }

    #[test]
    fn wu_example_one_with_u_equal_y2() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let b = BuiltinChannel::AsymmetricClipper;
        let a = wu_assignment(&uniform(4, 8), |i| b.eval(i[0], i[1]).1, 8);
        let r = outer_bound_wu(&ch, &a).unwrap();
        assert_eq!(
            r.vertices(),
            &[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 3.0), (0.0, 3.0)]
        );
    }

    #[test]
    fn wu_constant_u() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let p = uniform(4, 8);
        let a = wu_assignment(&p, |_| 0, 1);
        let t = WuTerms::eval(&ch, &a).unwrap();
        let j = crate::prob::compose_with_channel(&p, &ch).unwrap();
        let i_x2_y2 = j
            .mutual_information(&[Role::X2], &[Role::Y2], &[])
            .unwrap()
            .value();
        assert!((t.r2 - i_x2_y2).abs() < 1e-12);
        assert!((t.tail - t.r1).abs() < 1e-12);
    }

    #[test]
    fn point_mass_gives_zero_region() {
        let ch = BuiltinChannel::SymmetricClipper.channel();
        let p = JointPmf::point_mass(&[(Role::X1, 4), (Role::X2, 3)], &[2, 1]).unwrap();
        let a = wu_assignment(&p, |i| i[0], 4);
        assert_eq!(outer_bound_wu(&ch, &a).unwrap().vertices(), &[(0.0, 0.0)]);
    }

    #[test]
    fn corner_points_constant_u() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let a = wu_assignment(&uniform(4, 8), |_| 0, 1);
        let c = wu_corner_points(&ch, &a).unwrap();
        let t = WuTerms::eval(&ch, &a).unwrap();
        assert_eq!(c.point_a, (t.r1, t.r2));
    }

    #[test]
    fn corner_delta_zero_when_receiver_one_learns_more() {
        // Y1 = (X1, X2) reveals everything; Y2 constant
        let cards = Cards {
            x1: 2,
            x2: 2,
            y1: 4,
            y2: 1,
        };
        let ch = CifcChannel::from_maps(cards, |a, b| 2 * a + b, |_, _| 0).unwrap();
        let a = wu_assignment(&uniform(2, 2), |i| i[0], 2);
        let c = wu_corner_points(&ch, &a).unwrap();
        assert_eq!(c.delta, 0.0);
        assert_eq!(c.point_b.1, 0.0);
    }

    #[test]
    fn bc_with_independent_inputs() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let p = uniform(4, 8)
            .extend_deterministic(Role::U1, 4, |i| i[0])
            .unwrap()
            .extend_deterministic(Role::U2, 8, |i| i[1])
            .unwrap()
            .extend_deterministic(Role::V, 32, |i| 8 * i[0] + i[1])
            .unwrap();
        let a = AuxAssignment::new(p.clone(), Factorization::Bc).unwrap();
        let r = outer_bound_bc(&ch, &a).unwrap();
        let j = crate::prob::compose_with_channel(&p, &ch).unwrap();
        let r1 = j
            .mutual_information(&[Role::X1, Role::X2], &[Role::Y1], &[])
            .unwrap()
            .value();
        let r2 = j
            .mutual_information(&[Role::X1, Role::X2], &[Role::Y2], &[])
            .unwrap()
            .value();
        // V reveals both inputs, so each private term vanishes and both sum
        // rows reduce to single-user rates
        let m = r1.min(r2);
        let expect = crate::bounds::region(&[(1, 0, r1), (0, 1, r2), (1, 1, m)]).unwrap();
        assert!(r.same_vertices(&expect, 1e-12));
        assert_eq!(r.vertices(), &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
    }

    #[test]
    fn bc_degenerate_point_mass() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let p = JointPmf::point_mass(&[(Role::X1, 4), (Role::X2, 8)], &[1, 5])
            .unwrap()
            .extend_deterministic(Role::U1, 1, |_| 0)
            .unwrap()
            .extend_deterministic(Role::U2, 1, |_| 0)
            .unwrap()
            .extend_deterministic(Role::V, 1, |_| 0)
            .unwrap();
        let a = AuxAssignment::new(p, Factorization::Bc).unwrap();
        assert_eq!(outer_bound_bc(&ch, &a).unwrap().vertices(), &[(0.0, 0.0)]);
    }

    #[test]
    fn marginal_reproduces_det_capacity() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let r = outer_bound_marginal(&ch, &uniform(4, 8), &[]).unwrap();
        assert_eq!(r.rhs_of(1, 1), Some(4.0));
    }

    #[test]
    fn fully_revealing_y2_collapses_sum_row() {
        let cards = Cards {
            x1: 2,
            x2: 2,
            y1: 2,
            y2: 4,
        };
        let ch = CifcChannel::from_maps(cards, |a, b| a ^ b, |a, b| 2 * a + b).unwrap();
        let p = uniform(2, 2);
        let r = outer_bound_marginal(&ch, &p, &[]).unwrap();
        assert_eq!(coupled_term(&Coupling::identity(&ch), &p).unwrap(), 0.0);
        assert_eq!(
            r.vertices(),
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 2.0)]
        );
    }

    #[test]
    fn product_coupling_is_valid_and_min_is_taken() {
        let cards = Cards {
            x1: 2,
            x2: 2,
            y1: 2,
            y2: 2,
        };
        // Y1 = X1 ⊕ N, Y2 = X1 ⊕ N with a shared noise bit
        let ch = CifcChannel::from_fn(cards, |x1, _, y1, y2| {
            if y1 == y2 {
                if y1 == x1 {
                    0.9
                } else {
                    0.1
                }
            } else {
                0.0
            }
        })
        .unwrap();
        let prod = Coupling::product(&ch);
        assert!(Coupling::new("p", &ch, prod.kernel.clone()).is_ok());
        let p = uniform(2, 2);
        let id = coupled_term(&Coupling::identity(&ch), &p).unwrap();
        let pr = coupled_term(&prod, &p).unwrap();
        assert!(id < pr);
        let min = outer_bound_marginal(&ch, &p, std::slice::from_ref(&prod)).unwrap();
        let single = outer_bound_marginal_single(&ch, &p, &prod).unwrap();
        assert!(crate::polytope::contains(&single, &min));
    }

    #[test]
    fn bad_coupling_is_rejected() {
        let ch = BuiltinChannel::SymmetricClipper.channel();
        let other = BuiltinChannel::SymmetricClipper.channel();
        let shifted = CifcChannel::from_maps(
            other.cards(),
            |a, b| (BuiltinChannel::SymmetricClipper.eval(a, b).0 + 1) % 2,
            |a, b| BuiltinChannel::SymmetricClipper.eval(a, b).1,
        )
        .unwrap();
        assert!(matches!(
            Coupling::new("bad", &ch, shifted),
            Err(BoundsError::BadCoupling(_))
        ));
    }
}
