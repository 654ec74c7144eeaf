//! Row-by-row comparison of the rate-splitting region against earlier
//! schemes, and of the one-auxiliary outer bound against the marginal one.
//!
//! Each comparison evaluates both sets of right-hand sides at one assignment,
//! maps rows through the variable correspondence of the two schemes and
//! reports the signed differences next to their closed-form values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::assignment::{AuxAssignment, Factorization, FACTOR_TOL};
use super::rtd::rtd_rhs;
use super::sample::dirichlet;
use super::{joint_with, BoundsError, Ev};
use crate::channel::CifcChannel;
use crate::prob::{JointPmf, Role};

/// Agreement tolerance for row differences.
pub const ROW_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Comparison {
    /// Rate splitting with superposition and sequential binning.
    DmtInRtd,
    /// Common messages with `X2` a function of `U2c`.
    CcInRtd,
    /// Independently generated common messages.
    JiangInRtd,
    /// One-auxiliary outer bound inside the marginal outer bound.
    WuInMarginal,
}

impl Comparison {
    pub const ALL: [Comparison; 4] = [
        Comparison::DmtInRtd,
        Comparison::CcInRtd,
        Comparison::JiangInRtd,
        Comparison::WuInMarginal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Comparison::DmtInRtd => "dmt_in_rtd",
            Comparison::CcInRtd => "cc_in_rtd",
            Comparison::JiangInRtd => "jiang_in_rtd",
            Comparison::WuInMarginal => "wu_in_marginal",
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Comparison {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Comparison::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| BoundsError::UnsupportedBound(format!("unknown comparison '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `difference == expected`
    Equal,
    /// `difference >= expected`
    AtLeast,
    /// Reported only.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowCheck {
    pub label: String,
    /// Right-hand side in the containing region.
    pub ours: f64,
    /// Right-hand side in the contained region.
    pub theirs: f64,
    pub difference: f64,
    pub expected: f64,
    pub relation: Relation,
    pub holds: bool,
}

impl RowCheck {
    fn new(label: &str, ours: f64, theirs: f64, expected: f64, relation: Relation) -> Self {
        let difference = ours - theirs;
        let holds = match relation {
            Relation::Equal => (difference - expected).abs() <= ROW_TOL,
            Relation::AtLeast => difference >= expected - ROW_TOL,
            Relation::Info => true,
        };
        RowCheck {
            label: label.into(),
            ours,
            theirs,
            difference,
            expected,
            relation,
            holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominanceReport {
    pub comparison: Comparison,
    pub rows: Vec<RowCheck>,
    /// Named side conditions (e.g. when an inequality is tight).
    pub flags: BTreeMap<String, bool>,
    pub all_hold: bool,
}

fn require_ci(
    pmf: &JointPmf,
    a: &[Role],
    b: &[Role],
    c: &[Role],
    what: &str,
) -> Result<(), BoundsError> {
    if pmf.is_conditionally_independent(a, b, c, FACTOR_TOL)? {
        Ok(())
    } else {
        Err(BoundsError::FactorizationMismatch(what.into()))
    }
}

/// Compares both sides at one assignment.
pub fn dominance_check(
    ch: &CifcChannel,
    comparison: Comparison,
    a: &AuxAssignment,
) -> Result<DominanceReport, BoundsError> {
    let mut flags = BTreeMap::new();
    let rows = match comparison {
        Comparison::DmtInRtd => dmt_rows(ch, a)?,
        Comparison::CcInRtd => cc_rows(ch, a)?,
        Comparison::JiangInRtd => jiang_rows(ch, a)?,
        Comparison::WuInMarginal => wu_rows(ch, a, &mut flags)?,
    };
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(DominanceReport {
        comparison,
        rows,
        flags,
        all_hold,
    })
}

fn dmt_rows(ch: &CifcChannel, a: &AuxAssignment) -> Result<Vec<RowCheck>, BoundsError> {
    use Role::*;
    a.require(Factorization::Rtd)?;
    let p = a.pmf();
    if p.entropy(&[U2pb], &[])?.value() > FACTOR_TOL {
        return Err(BoundsError::FactorizationMismatch(
            "U2pb must be constant".into(),
        ));
    }
    require_ci(p, &[U1c], &[U2c], &[X2], "U1c depends on U2c given X2")?;
    require_ci(
        p,
        &[U1pb],
        &[U2c, U1c],
        &[X2],
        "U1pb depends on (U2c, U1c) given X2",
    )?;
    require_ci(
        p,
        &[X1],
        &[U2c],
        &[X2, U1c, U1pb],
        "X1 depends on U2c given (X2, U1c, U1pb)",
    )?;
    let r = rtd_rhs(ch, a)?;
    let joint = joint_with(ch, p)?;
    let mut ev = Ev::new(&joint);
    let bin_c = ev.i(&[U1c], &[X2, U2c], &[])?;
    let bin_p = ev.i(&[U1pb], &[X2, U2c], &[])?;
    let rx2_all = ev.i(&[Y2], &[U1c, U2c, X2], &[])? + ev.i(&[X2, U2c], &[U1c], &[])?;
    let rx2_x2 = ev.i(&[Y2], &[X2, U1c], &[U2c])? + ev.i(&[X2], &[U1c], &[])?;
    let rx2_c = ev.i(&[Y2, X2, U2c], &[U1c], &[])?;
    let rx2_own = ev.i(&[Y2], &[X2], &[U2c, U1c])? + r.i1;
    let rx1_all = ev.i(&[Y1], &[U1pb, U1c, U2c], &[])? + ev.i(&[U1pb, U1c], &[U2c], &[])?;
    let rx1_c = ev.i(&[Y1, U2c], &[U1pb, U1c], &[])? + ev.i(&[U1pb], &[U1c], &[])?;
    let rx1_p = ev.i(&[Y1, U2c, U1c], &[U1pb], &[])?;
    let u2c_u1c = ev.i(&[U2c], &[U1c], &[X2])?;
    let u1c_u1pb = ev.i(&[U1c], &[U1pb], &[])?;
    let eq = Relation::Equal;
    Ok(vec![
        RowCheck::new("d-a", r.d - r.a, rx2_all - bin_c, 0.0, eq),
        RowCheck::new("e-a", r.e - r.a, rx2_x2 - bin_c, u2c_u1c, eq),
        RowCheck::new("g-a", r.g - r.a, rx2_c - bin_c, 0.0, eq),
        RowCheck::new("f", r.f, rx2_own, 0.0, eq),
        RowCheck::new("i-b", r.i - r.b, rx1_all - bin_p - bin_c, u1c_u1pb, eq),
        RowCheck::new("j-b", r.j - r.b, rx1_c - bin_p - bin_c, 0.0, eq),
        RowCheck::new("k-b+a", r.k - r.b + r.a, rx1_p - bin_p, 0.0, eq),
    ])
}

fn cc_rows(ch: &CifcChannel, a: &AuxAssignment) -> Result<Vec<RowCheck>, BoundsError> {
    use Role::*;
    a.require(Factorization::Rtd)?;
    if a.pmf().entropy(&[X2], &[U2c])?.value() > FACTOR_TOL {
        return Err(BoundsError::FactorizationMismatch(
            "X2 must be a function of U2c".into(),
        ));
    }
    let r = rtd_rhs(ch, a)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let theirs = [
        ("a", r.a, 0.0),
        ("b", r.b, 0.0),
        ("c", r.c, ev.i(&[U1pb], &[U2pb], &[U2c, U1c])?),
        ("h", r.h, ev.i(&[Y2], &[U2pb], &[U2c, U1c])?),
        ("g", r.g, ev.i(&[Y2], &[U1c, U2pb], &[U2c])?),
        ("d", r.d, ev.i(&[Y2], &[U1c, U2c, U2pb], &[])?),
        ("k", r.k, ev.i(&[Y1], &[U1pb], &[U2c, U1c])?),
        ("j", r.j, ev.i(&[Y1], &[U1pb, U1c], &[U2c])?),
        ("i", r.i, ev.i(&[Y1], &[U1pb, U1c, U2c], &[])?),
    ];
    Ok(theirs
        .iter()
        .map(|&(label, ours, cc)| RowCheck::new(label, ours, cc, 0.0, Relation::Equal))
        .collect())
}

fn jiang_rows(ch: &CifcChannel, a: &AuxAssignment) -> Result<Vec<RowCheck>, BoundsError> {
    use Role::*;
    a.require(Factorization::Rtd)?;
    require_ci(a.pmf(), &[U1c], &[U2c, X2], &[], "U1c depends on (U2c, X2)")?;
    let r = rtd_rhs(ch, a)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let i1 = r.i1;
    let eq = Relation::Equal;
    Ok(vec![
        RowCheck::new("b", r.b - i1, ev.i(&[U1pb], &[X2], &[U2c, U1c])?, 0.0, eq),
        RowCheck::new(
            "c",
            r.c - i1,
            ev.i(&[U1pb], &[U2pb, X2], &[U2c, U1c])?,
            0.0,
            eq,
        ),
        RowCheck::new("f", r.f, ev.i(&[X2, U2pb], &[Y2], &[U2c, U1c])?, 0.0, eq),
        RowCheck::new(
            "e",
            r.e - i1,
            ev.i(&[U1c, X2, U2pb], &[Y2], &[U2c])?,
            0.0,
            eq,
        ),
        RowCheck::new(
            "d",
            r.d - i1,
            ev.i(&[U2c, X2, U1c, U2pb], &[Y2], &[])?,
            0.0,
            eq,
        ),
        RowCheck::new("k", r.k, ev.i(&[U1pb], &[Y1], &[U2c, U1c])?, 0.0, eq),
        RowCheck::new("j", r.j - i1, ev.i(&[U1c, U1pb], &[Y1], &[U2c])?, 0.0, eq),
        RowCheck::new("i", r.i - i1, ev.i(&[U2c, U1c, U1pb], &[Y1], &[])?, 0.0, eq),
        RowCheck::new(
            "extra rx2",
            0.0,
            ev.i(&[U2c, X2, U2pb], &[Y2], &[U1c])?,
            0.0,
            Relation::Info,
        ),
        RowCheck::new(
            "extra rx1",
            0.0,
            ev.i(&[U2c, U1pb], &[Y1], &[U1c])?,
            0.0,
            Relation::Info,
        ),
    ])
}

fn wu_rows(
    ch: &CifcChannel,
    a: &AuxAssignment,
    flags: &mut BTreeMap<String, bool>,
) -> Result<Vec<RowCheck>, BoundsError> {
    use Role::*;
    a.require(Factorization::Wu)?;
    let joint = joint_with(ch, a.pmf())?;
    let mut ev = Ev::new(&joint);
    let wu_r1 = ev.i(&[X1], &[Y1], &[X2])?;
    let wu_r2 = ev.i(&[X2, U], &[Y2], &[])?;
    let wu_s = wu_r2 + ev.i(&[X1], &[Y1], &[X2, U])?;
    let m_r1 = ev.i(&[Y1], &[X1], &[X2])?;
    let m_r2 = ev.i(&[X1, X2], &[Y2], &[])?;
    let coupled = ev.i(&[Y1], &[X1], &[Y2, X2])?;
    let m_s = m_r2 + coupled;
    let leak = ev.i(&[Y2], &[X1], &[U, X2])?;
    flags.insert("y2_x1_given_u_x2_zero".into(), leak <= ROW_TOL);
    let with_u = ev.i(&[Y1], &[X1], &[Y2, U, X2])?;
    flags.insert(
        "u_does_not_help_y1".into(),
        (with_u - coupled).abs() <= ROW_TOL,
    );
    Ok(vec![
        RowCheck::new("R1", m_r1, wu_r1, 0.0, Relation::Equal),
        RowCheck::new("R2", m_r2, wu_r2, leak, Relation::Equal),
        RowCheck::new("R1+R2", m_s, wu_s, 0.0, Relation::AtLeast),
    ])
}

/// Draws a random assignment conforming to the comparison's factorization,
/// with auxiliary alphabets `|U1c| = |U1pb| = |X1|`, `|U2c| = |X2|`,
/// `|U2pb| = |X1|` (1 when it must be constant), `|U| = |X1|·|X2|`.
pub fn sample_conforming(
    ch: &CifcChannel,
    comparison: Comparison,
    rng: &mut impl Rng,
) -> Result<AuxAssignment, BoundsError> {
    use Role::*;
    let c = ch.cards();
    let (x1, x2) = (c.x1, c.x2);
    let rtd_axes = |u2pb: usize| {
        [
            (U2c, x2),
            (X2, x2),
            (U1c, x1),
            (U1pb, x1),
            (U2pb, u2pb),
            (X1, x1),
        ]
    };
    let pmf = match comparison {
        Comparison::DmtInRtd => {
            let p_u2c_x2 = dirichlet(rng, x2 * x2);
            let p_u1c: Vec<Vec<f64>> = (0..x2).map(|_| dirichlet(rng, x1)).collect();
            let p_u1pb: Vec<Vec<f64>> = (0..x2).map(|_| dirichlet(rng, x1)).collect();
            let p_x1: Vec<Vec<f64>> = (0..x2 * x1 * x1).map(|_| dirichlet(rng, x1)).collect();
            JointPmf::from_fn(&rtd_axes(1), |i| {
                let (u2c, v2, u1c, u1pb, x) = (i[0], i[1], i[2], i[3], i[5]);
                p_u2c_x2[u2c * x2 + v2]
                    * p_u1c[v2][u1c]
                    * p_u1pb[v2][u1pb]
                    * p_x1[(v2 * x1 + u1c) * x1 + u1pb][x]
            })?
        }
        Comparison::CcInRtd => {
            let p_u2c = dirichlet(rng, x2);
            let rest: Vec<Vec<f64>> = (0..x2).map(|_| dirichlet(rng, x1 * x1 * x1 * x1)).collect();
            JointPmf::from_fn(&rtd_axes(x1), |i| {
                if i[1] != i[0] {
                    return 0.0;
                }
                let k = ((i[2] * x1 + i[3]) * x1 + i[4]) * x1 + i[5];
                p_u2c[i[0]] * rest[i[0]][k]
            })?
        }
        Comparison::JiangInRtd => {
            let p_u1c = dirichlet(rng, x1);
            let p_u2c_x2 = dirichlet(rng, x2 * x2);
            let rest: Vec<Vec<f64>> = (0..x2 * x2 * x1)
                .map(|_| dirichlet(rng, x1 * x1 * x1))
                .collect();
            JointPmf::from_fn(&rtd_axes(x1), |i| {
                let parent = (i[0] * x2 + i[1]) * x1 + i[2];
                let k = (i[3] * x1 + i[4]) * x1 + i[5];
                p_u1c[i[2]] * p_u2c_x2[i[0] * x2 + i[1]] * rest[parent][k]
            })?
        }
        Comparison::WuInMarginal => JointPmf::from_table(
            dirichlet(rng, x1 * x2 * x1 * x2),
            &[(U, x1 * x2), (X1, x1), (X2, x2)],
        )?,
    };
    let f = if comparison == Comparison::WuInMarginal {
        Factorization::Wu
    } else {
        Factorization::Rtd
    };
    AuxAssignment::new(pmf, f)
}

/// Runs the comparison on `samples` random conforming assignments.
pub fn dominance_sweep(
    ch: &CifcChannel,
    comparison: Comparison,
    samples: usize,
    seed: u64,
) -> Result<Vec<DominanceReport>, BoundsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let a = sample_conforming(ch, comparison, &mut rng)?;
            dominance_check(ch, comparison, &a)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{BuiltinChannel, Cards};

    fn noisy() -> CifcChannel {
        let cards = Cards {
            x1: 2,
            x2: 2,
            y1: 2,
            y2: 3,
        };
        CifcChannel::from_fn(cards, |a, b, y1, y2| {
            let p1 = if y1 == (a ^ b) { 0.85 } else { 0.15 };
            let p2 = match (y2 as isize - (a + b) as isize).abs() {
                0 => 0.7,
                1 => 0.3 / if a + b == 1 { 2.0 } else { 1.0 },
                _ => 0.0,
            };
            p1 * p2
        })
        .unwrap()
    }

    fn run(comparison: Comparison) {
        for ch in [noisy(), BuiltinChannel::SymmetricClipper.channel()] {
            for r in dominance_sweep(&ch, comparison, 8, 11).unwrap() {
                for row in &r.rows {
                    assert!(row.holds, "{comparison}: {row:?}");
                }
            }
        }
    }

    #[test]
    fn dmt_identities() {
        run(Comparison::DmtInRtd);
    }

    #[test]
    fn dmt_private_gap_is_positive_somewhere() {
        let r = dominance_sweep(&noisy(), Comparison::DmtInRtd, 4, 2).unwrap();
        assert!(r.iter().any(|r| r.rows[4].difference > 1e-6));
    }

    #[test]
    fn cc_rows_identical() {
        run(Comparison::CcInRtd);
    }

    #[test]
    fn jiang_rows_identical() {
        run(Comparison::JiangInRtd);
    }

    #[test]
    fn wu_inside_marginal() {
        run(Comparison::WuInMarginal);
    }

    #[test]
    fn nonconforming_assignment_is_rejected() {
        let ch = noisy();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = sample_conforming(&ch, Comparison::JiangInRtd, &mut rng).unwrap();
        let err = dominance_check(&ch, Comparison::DmtInRtd, &a).unwrap_err();
        assert!(matches!(err, BoundsError::FactorizationMismatch(_)));
    }
}
