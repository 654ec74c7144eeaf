//! Rate-splitting, binning and superposition inner bound.
//!
//! The full system lives over the split rates `R1c, R1pb, R2c, R2pa, R2pb`
//! and the binning rates `R1c', R1pb', R2pb'`; Fourier–Motzkin projects it
//! onto `(R1, R2)`.

use std::collections::BTreeSet;

use serde::Serialize;

use super::assignment::{AuxAssignment, Factorization};
use super::{joint_with, BoundsError, Ev};
use crate::channel::CifcChannel;
use crate::polytope::{
    project_to_r1_r2, LinearConstraint, RatePolytope2D, RateSystem, RateVar, Sense,
};
use crate::prob::Role;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Binning {
    /// Joint binning of `U1c` and `U1pb` against `X2` and `U2pb`.
    #[default]
    Joint,
    /// Bin `U1c` first, then `U1pb` given the chosen `U1c`.
    TwoStep,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RtdOptions {
    pub binning: Binning,
    /// Rates pinned to zero. Rows whose whole rate group is pinned are
    /// dropped.
    pub zero_rates: BTreeSet<RateVar>,
}

/// Right-hand sides of the eleven inequalities, labelled `a` through `k`,
/// plus the two extra terms the two-step variant needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RtdRhs {
    /// `I(U1c;X2|U2c)`
    pub i1: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
    /// `I(U1pb;X2|U2c,U1c)`
    pub ts_pb: f64,
    /// `I(U1pb;X2,U2pb|U2c,U1c)`
    pub ts_joint: f64,
}

pub fn rtd_rhs(ch: &CifcChannel, a: &AuxAssignment) -> Result<RtdRhs, BoundsError> {
    use Role::*;
    a.require(Factorization::Rtd)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let i1 = ev.i(&[U1c], &[X2], &[U2c])?;
    let ts_pb = ev.i(&[U1pb], &[X2], &[U1c, U2c])?;
    let ts_joint = ev.i(&[U1pb], &[X2, U2pb], &[U1c, U2c])?;
    Ok(RtdRhs {
        i1,
        a: i1,
        b: ts_pb + i1,
        c: ts_joint + i1,
        d: ev.i(&[Y2], &[U2pb, U1c, X2, U2c], &[])? + i1,
        e: ev.i(&[Y2], &[U2pb, U1c, X2], &[U2c])? + i1,
        f: ev.i(&[Y2], &[U2pb, X2], &[U1c, U2c])? + i1,
        g: ev.i(&[Y2], &[U2pb, U1c], &[X2, U2c])? + i1,
        h: ev.i(&[Y2], &[U2pb], &[U1c, X2, U2c])?,
        i: ev.i(&[Y1], &[U1pb, U1c, U2c], &[])?,
        j: ev.i(&[Y1], &[U1pb, U1c], &[U2c])?,
        k: ev.i(&[Y1], &[U1pb], &[U1c, U2c])?,
        ts_pb,
        ts_joint,
    })
}

/// The full rate system before projection.
pub fn rtd_system(rhs: &RtdRhs, opts: &RtdOptions) -> RateSystem {
    use RateVar::*;
    let pinned = |group: &[RateVar]| group.iter().all(|v| opts.zero_rates.contains(v));
    let mut sys = RateSystem::default();
    match opts.binning {
        Binning::Joint => {
            sys.push(LinearConstraint::eq(&[(R1cP, 1)], rhs.a));
            sys.push(LinearConstraint::sum(&[R1cP, R1pbP], Sense::Ge, rhs.b));
            sys.push(LinearConstraint::sum(
                &[R1cP, R1pbP, R2pbP],
                Sense::Ge,
                rhs.c,
            ));
        }
        Binning::TwoStep => {
            sys.push(LinearConstraint::ge(&[(R1cP, 1)], rhs.i1));
            sys.push(LinearConstraint::ge(&[(R1pbP, 1)], rhs.ts_pb));
            sys.push(LinearConstraint::ge(
                &[(R1pbP, 1), (R2pbP, 1)],
                rhs.ts_joint,
            ));
        }
    }
    let le = |vars: &[RateVar], b: f64| LinearConstraint::sum(vars, Sense::Le, b);
    if !pinned(&[R2c, R2pa, R2pb, R2pbP]) {
        sys.push(le(&[R2c, R2pa, R1c, R1cP, R2pb, R2pbP], rhs.d));
    }
    if !pinned(&[R2pa, R2pb, R2pbP]) {
        sys.push(le(&[R2pa, R1c, R1cP, R2pb, R2pbP], rhs.e));
    }
    sys.push(le(&[R2pa, R2pb, R2pbP], rhs.f));
    if !pinned(&[R2pb, R2pbP]) {
        sys.push(le(&[R1c, R1cP, R2pb, R2pbP], rhs.g));
    }
    sys.push(le(&[R2pb, R2pbP], rhs.h));
    if !pinned(&[R1c, R1cP, R1pb, R1pbP]) {
        sys.push(le(&[R2c, R1c, R1cP, R1pb, R1pbP], rhs.i));
    }
    sys.push(le(&[R1c, R1cP, R1pb, R1pbP], rhs.j));
    sys.push(le(&[R1pb, R1pbP], rhs.k));
    for &v in &opts.zero_rates {
        sys.push(LinearConstraint::le(&[(v, 1)], 0.0));
    }
    sys
}

pub fn inner_bound_rtd(
    ch: &CifcChannel,
    a: &AuxAssignment,
    binning: Binning,
) -> Result<RatePolytope2D, BoundsError> {
    inner_bound_rtd_with(
        ch,
        a,
        &RtdOptions {
            binning,
            ..RtdOptions::default()
        },
    )
}

pub fn inner_bound_rtd_with(
    ch: &CifcChannel,
    a: &AuxAssignment,
    opts: &RtdOptions,
) -> Result<RatePolytope2D, BoundsError> {
    let rhs = rtd_rhs(ch, a)?;
    Ok(project_to_r1_r2(&rtd_system(&rhs, opts))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::outer::outer_bound_wu;
    use crate::bounds::region;
    use crate::channel::{BuiltinChannel, Cards};
    use crate::polytope::contains;
    use crate::prob::JointPmf;

    fn rtd_assignment(p: &JointPmf, maps: [(usize, fn(&[usize]) -> usize); 4]) -> AuxAssignment {
        let roles = [Role::U2c, Role::U1c, Role::U1pb, Role::U2pb];
        let mut q = p.clone();
        for (role, (card, f)) in roles.into_iter().zip(maps) {
            q = q.extend_deterministic(role, card, |i| f(&i[..2])).unwrap();
        }
        AuxAssignment::new(q, Factorization::Rtd).unwrap()
    }

    fn uniform(a: usize, b: usize) -> JointPmf {
        JointPmf::uniform(&[(Role::X1, a), (Role::X2, b)]).unwrap()
    }

    #[test]
    fn constant_auxiliaries_on_point_mass_give_origin() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let p = JointPmf::point_mass(&[(Role::X1, 4), (Role::X2, 8)], &[0, 0]).unwrap();
        let a = rtd_assignment(&p, [(1, |_| 0), (1, |_| 0), (1, |_| 0), (1, |_| 0)]);
        let r = inner_bound_rtd(&ch, &a, Binning::Joint).unwrap();
        assert_eq!(r.vertices(), &[(0.0, 0.0)]);
    }

    #[test]
    fn strong_interference_choice_matches_capacity() {
        // both receivers see (X1, X2) through a noiseless but differently
        // labelled map, so interference is very strong
        let cards = Cards {
            x1: 2,
            x2: 2,
            y1: 4,
            y2: 4,
        };
        let ch = CifcChannel::from_maps(cards, |a, b| 2 * a + b, |a, b| 2 * b + a).unwrap();
        let p = JointPmf::from_table(vec![0.4, 0.1, 0.2, 0.3], &[(Role::X1, 2), (Role::X2, 2)])
            .unwrap();
        let a = rtd_assignment(
            &p,
            [(2, |i| i[1]), (2, |i| i[0]), (2, |i| i[0]), (2, |i| i[1])],
        );
        let r = inner_bound_rtd(&ch, &a, Binning::Joint).unwrap();
        let j = crate::prob::compose_with_channel(&p, &ch).unwrap();
        let r1 = j
            .mutual_information(&[Role::Y1], &[Role::X1], &[Role::X2])
            .unwrap()
            .value();
        let s = j
            .mutual_information(&[Role::Y2], &[Role::X1, Role::X2], &[])
            .unwrap()
            .value();
        let expect = region(&[(1, 0, r1), (1, 1, s)]).unwrap();
        assert!(
            r.same_vertices(&expect, 1e-9),
            "{:?} vs {:?}",
            r.vertices(),
            expect.vertices()
        );
    }

    #[test]
    fn joint_and_two_step_agree() {
        let ch = BuiltinChannel::SymmetricClipper.channel();
        let p = crate::channel::example_two_input();
        let a = rtd_assignment(
            &p,
            [(3, |i| i[1]), (2, |i| i[0] / 2), (4, |i| i[0]), (1, |_| 0)],
        );
        let j = inner_bound_rtd(&ch, &a, Binning::Joint).unwrap();
        let t = inner_bound_rtd(&ch, &a, Binning::TwoStep).unwrap();
        assert!(j.same_vertices(&t, 1e-9));
    }

    #[test]
    fn inside_wu_outer_bound() {
        let ch = BuiltinChannel::AsymmetricClipper.channel();
        let p = uniform(4, 8);
        let a = rtd_assignment(
            &p,
            [
                (2, |i| i[1] % 2),
                (2, |i| i[0] % 2),
                (4, |i| i[0]),
                (8, |i| i[1]),
            ],
        );
        let inner = inner_bound_rtd(&ch, &a, Binning::Joint).unwrap();
        let u = a
            .pmf()
            .marginalize(&[Role::X1, Role::X2, Role::U1c, Role::U2c, Role::U2pb])
            .unwrap()
            .merge_axes(&[Role::U1c, Role::U2c, Role::U2pb], Role::U)
            .unwrap();
        let w = outer_bound_wu(&ch, &AuxAssignment::new(u, Factorization::Wu).unwrap()).unwrap();
        assert!(contains(&w, &inner));
    }

    #[test]
    fn pinned_rows_are_dropped() {
        use RateVar::*;
        let rhs = RtdRhs {
            i1: 0.0,
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
            e: 1.0,
            f: 1.0,
            g: 1.0,
            h: 1.0,
            i: 1.0,
            j: 1.0,
            k: 1.0,
            ts_pb: 0.0,
            ts_joint: 0.0,
        };
        let full = rtd_system(&rhs, &RtdOptions::default());
        let opts = RtdOptions {
            binning: Binning::Joint,
            zero_rates: [R2pa, R2pb, R2pbP].into_iter().collect(),
        };
        let pinned = rtd_system(&rhs, &opts);
        // e and g go, three pin rows arrive
        assert_eq!(pinned.constraints.len(), full.constraints.len() - 2 + 3);
    }
}
