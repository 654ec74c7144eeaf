//! Falsification search for the interference-regime conditions.
//!
//! Every condition is quantified over all input (and auxiliary) laws, so the
//! most a finite search can say is "violated, here is a witness" or "held for
//! every law tried".

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sample::{ascend, map_ordered, support_sweep, Family, Param};
use super::{BoundsError, Ev};
use crate::channel::CifcChannel;
use crate::prob::{compose_with_channel_keeping, JointPmf, Role};

/// A condition counts as violated only above this margin.
pub const VIOLATION_TOL: f64 = 1e-7;

/// Largest support sweep enumerated in full before falling back to
/// singletons and full alphabets.
pub const REGIME_SWEEP_CAP: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `I(U;Y2|X2) ≤ I(U;Y1|X2)` for all `p(u,x1,x2)`
    Weak,
    /// `I(X1;Y1|X2) ≤ I(X1;Y2|X2)` for all `p(x1,x2)`
    Strong,
    /// weak plus `I(X2;Y2) ≤ I(X2;Y1)`
    VeryWeak,
    /// strong plus `I(Y2;X1,X2) ≤ I(Y1;X1,X2)`
    VeryStrong,
    /// `I(Y2;U,X2) ≤ I(Y1;U,X2)` for all `p(u,x1,x2)`
    BetterCognition,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Weak,
        Condition::Strong,
        Condition::VeryWeak,
        Condition::VeryStrong,
        Condition::BetterCognition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Weak => "weak",
            Condition::Strong => "strong",
            Condition::VeryWeak => "very_weak",
            Condition::VeryStrong => "very_strong",
            Condition::BetterCognition => "better_cognition",
        }
    }

    pub fn needs_aux(self) -> bool {
        matches!(
            self,
            Condition::Weak | Condition::VeryWeak | Condition::BetterCognition
        )
    }

    /// Amount by which the condition fails at `pmf` (positive means violated).
    pub fn violation(self, ch: &CifcChannel, pmf: &JointPmf) -> Result<f64, BoundsError> {
        use Role::*;
        // conditions over U never look at X1, so it is summed out early
        let keep: &[Role] = if self.needs_aux() {
            &[U, X2]
        } else {
            &[X1, X2]
        };
        let joint = compose_with_channel_keeping(pmf, ch, keep)?;
        let mut ev = Ev::new(&joint);
        let weak = |ev: &mut Ev| -> Result<f64, BoundsError> {
            Ok(ev.i(&[U], &[Y2], &[X2])? - ev.i(&[U], &[Y1], &[X2])?)
        };
        let strong = |ev: &mut Ev| -> Result<f64, BoundsError> {
            Ok(ev.i(&[X1], &[Y1], &[X2])? - ev.i(&[X1], &[Y2], &[X2])?)
        };
        Ok(match self {
            Condition::Weak => weak(&mut ev)?,
            Condition::Strong => strong(&mut ev)?,
            Condition::VeryWeak => {
                weak(&mut ev)?.max(ev.i(&[X2], &[Y2], &[])? - ev.i(&[X2], &[Y1], &[])?)
            }
            Condition::VeryStrong => {
                strong(&mut ev)?.max(ev.i(&[Y2], &[X1, X2], &[])? - ev.i(&[Y1], &[X1, X2], &[])?)
            }
            Condition::BetterCognition => {
                ev.i(&[Y2], &[U, X2], &[])? - ev.i(&[Y1], &[U, X2], &[])?
            }
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    HoldsAtBudget,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionRecord {
    pub condition: Condition,
    pub status: Status,
    /// Largest violation found (may be negative when the condition holds
    /// strictly at every law tried).
    pub violation: f64,
    /// Present iff `status` is `Violated`.
    pub witness: Option<JointPmf>,
    pub budget: usize,
    /// Auxiliary alphabet size, absent for conditions over inputs only.
    pub aux_cardinality: Option<usize>,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport {
    pub seed: u64,
    pub deterministic: bool,
    pub conditions: Vec<ConditionRecord>,
}

impl RegimeReport {
    pub fn get(&self, c: Condition) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|r| r.condition == c)
    }
}

/// Runs a sweep over uniform product supports (with `U` set to a constant,
/// `X1` or `X2`), `budget` Dirichlet samples, then coordinate ascent on the
/// violation from the best law found. Condition `k` uses ChaCha stream `k`.
pub fn classify_regime(
    ch: &CifcChannel,
    aux_card: usize,
    budget: usize,
    seed: u64,
) -> Result<RegimeReport, BoundsError> {
    let aux_card = aux_card.max(1);
    let budget = budget.max(1);
    let conditions = Condition::ALL
        .iter()
        .enumerate()
        .map(|(k, &c)| falsify(ch, c, aux_card, budget, seed, k as u64))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RegimeReport {
        seed,
        deterministic: ch.is_deterministic(),
        conditions,
    })
}

fn falsify(
    ch: &CifcChannel,
    cond: Condition,
    aux_card: usize,
    budget: usize,
    seed: u64,
    stream: u64,
) -> Result<ConditionRecord, BoundsError> {
    let cards = ch.cards();
    let mut axes = vec![(Role::X1, cards.x1), (Role::X2, cards.x2)];
    if cond.needs_aux() {
        axes.push((Role::U, aux_card));
    }
    let family = Family::Joint(axes);

    let mut cands: Vec<Param> = Vec::new();
    for p in support_sweep(cards.x1, cards.x2, REGIME_SWEEP_CAP) {
        if cond.needs_aux() {
            for pick in 0..3 {
                let q = p.extend_deterministic(Role::U, aux_card, |i| match pick {
                    0 => 0,
                    1 => i[0] % aux_card,
                    _ => i[1] % aux_card,
                })?;
                cands.push(Family::param_of(&q));
            }
        } else {
            cands.push(Family::param_of(&p));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    cands.extend((0..budget).map(|_| family.sample(&mut rng)));

    let score = |p: &Param| -> Option<f64> {
        let pmf = family.build(p).ok()?;
        cond.violation(ch, &pmf).ok()
    };
    let values = map_ordered(&cands, score);
    let mut evaluations = values.len();
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
    }
    let (k, v0) = best.ok_or_else(|| {
        BoundsError::UnsupportedBound(format!("no law could be evaluated for {cond}"))
    })?;
    let mut counted = 0;
    let (param, violation) = ascend(cands[k].clone(), v0, budget, |p| {
        counted += 1;
        score(p)
    });
    evaluations += counted;
    let violated = violation > VIOLATION_TOL;
    Ok(ConditionRecord {
        condition: cond,
        status: if violated {
            Status::Violated
        } else {
            Status::HoldsAtBudget
        },
        violation,
        witness: if violated {
            Some(family.build(&param)?)
        } else {
            None
        },
        budget,
        aux_cardinality: cond.needs_aux().then_some(aux_card),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{BuiltinChannel, Cards};

    #[test]
    fn known_witnesses_violate_very_strong() {
        let asym = BuiltinChannel::AsymmetricClipper.channel();
        let w = JointPmf::from_fn(&[(Role::X1, 4), (Role::X2, 8)], |i| {
            if i[0] == 0 {
                0.125
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(Condition::VeryStrong.violation(&asym, &w).unwrap(), 1.0);

        let sym = BuiltinChannel::SymmetricClipper.channel();
        let w = JointPmf::from_fn(&[(Role::X1, 4), (Role::X2, 3)], |i| {
            if i[0] == 3 && i[1] > 0 {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(Condition::VeryStrong.violation(&sym, &w).unwrap(), 1.0);
    }

    #[test]
    fn built_in_channels_are_not_very_strong() {
        for b in BuiltinChannel::ALL {
            let r = classify_regime(&b.channel(), 2, 50, 7).unwrap();
            let rec = r.get(Condition::VeryStrong).unwrap();
            assert_eq!(rec.status, Status::Violated, "{}", b.name());
            let w = rec.witness.as_ref().unwrap();
            assert!(Condition::VeryStrong.violation(&b.channel(), w).unwrap() > VIOLATION_TOL);
        }
    }

    #[test]
    fn identical_outputs_hold() {
        let cards = Cards {
            x1: 2,
            x2: 2,
            y1: 2,
            y2: 2,
        };
        let ch = CifcChannel::from_fn(cards, |a, b, y1, y2| {
            let y = a ^ b;
            let p = if y1 == y { 0.8 } else { 0.2 };
            if y1 == y2 {
                p
            } else {
                0.0
            }
        })
        .unwrap();
        let r = classify_regime(&ch, 2, 30, 1).unwrap();
        for c in [Condition::Strong, Condition::VeryStrong] {
            assert_eq!(r.get(c).unwrap().status, Status::HoldsAtBudget);
            assert!(r.get(c).unwrap().witness.is_none());
        }
    }

    #[test]
    fn classification_is_reproducible() {
        let ch = BuiltinChannel::SymmetricClipper.channel();
        assert_eq!(
            classify_regime(&ch, 2, 20, 5).unwrap(),
            classify_regime(&ch, 2, 20, 5).unwrap()
        );
    }
}
