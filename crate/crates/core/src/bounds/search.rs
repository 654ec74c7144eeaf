//! Weighted-sum frontier of a bound taken over the union of input and
//! auxiliary laws.
//!
//! Candidates come from a deterministic support sweep, then `budget`
//! Dirichlet samples; for every weight the best candidate is refined by
//! coordinate ascent. The candidate list is fixed by the seed before any
//! evaluation, and reductions run in list order, so results do not depend on
//! the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::assignment::{AuxAssignment, Factorization};
use super::capacity::{capacity_better_cognitive, capacity_det, capacity_semidet};
use super::outer::{outer_bound_bc, outer_bound_marginal, outer_bound_wu};
use super::rtd::{inner_bound_rtd, Binning};
use super::sample::{ascend, map_ordered, support_sweep, Family, Param};
use super::BoundsError;
use crate::channel::{Cards, CifcChannel};
use crate::polytope::{linspace_weights, RatePolytope2D};
use crate::prob::{JointPmf, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    RtdInner,
    WuOuter,
    BcOuter,
    MarginalOuter,
    BetterCognitive,
    Semidet,
    Det,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::Det,
        BoundKind::Semidet,
        BoundKind::WuOuter,
        BoundKind::BcOuter,
        BoundKind::MarginalOuter,
        BoundKind::RtdInner,
        BoundKind::BetterCognitive,
    ];

    /// Short name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Det => "det",
            BoundKind::Semidet => "semidet",
            BoundKind::WuOuter => "wu",
            BoundKind::BcOuter => "bc",
            BoundKind::MarginalOuter => "marginal",
            BoundKind::RtdInner => "rtd",
            BoundKind::BetterCognitive => "better-cog",
        }
    }

    pub fn factorization(self) -> Factorization {
        match self {
            BoundKind::Det | BoundKind::MarginalOuter => Factorization::Generic,
            BoundKind::Semidet | BoundKind::WuOuter | BoundKind::BetterCognitive => {
                Factorization::Wu
            }
            BoundKind::BcOuter => Factorization::Bc,
            BoundKind::RtdInner => Factorization::Rtd,
        }
    }

    /// Checks channel preconditions.
    pub fn supports(self, ch: &CifcChannel) -> Result<(), BoundsError> {
        match self {
            BoundKind::Det if !ch.is_deterministic() => Err(BoundsError::UnsupportedBound(
                "det needs a deterministic channel".into(),
            )),
            BoundKind::Semidet if !ch.is_semideterministic() => Err(BoundsError::UnsupportedBound(
                "semidet needs Y1 to be a function of the inputs".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Evaluates the bound at one assignment.
    pub fn evaluate(
        self,
        ch: &CifcChannel,
        a: &AuxAssignment,
        binning: Binning,
    ) -> Result<RatePolytope2D, BoundsError> {
        match self {
            BoundKind::Det => capacity_det(ch, a.pmf()),
            BoundKind::Semidet => capacity_semidet(ch, a),
            BoundKind::WuOuter => outer_bound_wu(ch, a),
            BoundKind::BcOuter => outer_bound_bc(ch, a),
            BoundKind::MarginalOuter => outer_bound_marginal(ch, a.pmf(), &[]),
            BoundKind::RtdInner => inner_bound_rtd(ch, a, binning),
            BoundKind::BetterCognitive => capacity_better_cognitive(ch, a),
        }
    }

    /// Auxiliary roles and their default alphabet sizes.
    pub fn default_aux_cards(self, c: Cards) -> Vec<(Role, usize)> {
        match self {
            BoundKind::Det | BoundKind::MarginalOuter => vec![],
            BoundKind::Semidet | BoundKind::WuOuter | BoundKind::BetterCognitive => {
                vec![(Role::U, c.x1 * c.x2)]
            }
            BoundKind::BcOuter => vec![(Role::U1, c.x1), (Role::U2, c.x2), (Role::V, c.x2)],
            BoundKind::RtdInner => vec![
                (Role::U2c, c.x2),
                (Role::U1c, c.x1),
                (Role::U1pb, c.x1),
                (Role::U2pb, c.x1),
            ],
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        let key = key
            .strip_suffix("-inner")
            .or_else(|| key.strip_suffix("-outer"))
            .unwrap_or(&key);
        let key = if key == "better-cognitive" {
            "better-cog"
        } else {
            key
        };
        BoundKind::ALL
            .into_iter()
            .find(|b| b.name() == key)
            .ok_or_else(|| BoundsError::UnsupportedBound(format!("unknown bound '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Overrides of the default auxiliary alphabet sizes.
    pub aux_cards: BTreeMap<Role, usize>,
    pub weights: Vec<f64>,
    /// Number of Dirichlet samples; also caps ascent evaluations per weight.
    pub budget: usize,
    pub seed: u64,
    pub binning: Binning,
    /// Largest support sweep enumerated in full.
    pub sweep_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            aux_cards: BTreeMap::new(),
            weights: linspace_weights(33),
            budget: 200,
            seed: 0,
            binning: Binning::Joint,
            sweep_cap: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub lambda: f64,
    pub point: (f64, f64),
    pub value: f64,
    /// The law whose region attains `point`.
    pub assignment: JointPmf,
    pub seed: u64,
}

/// Best `λR1 + (1-λ)R2` over the bound's union of regions, one point per
/// weight.
pub fn search_frontier(
    ch: &CifcChannel,
    bound: BoundKind,
    cfg: &SearchConfig,
) -> Result<Vec<FrontierPoint>, BoundsError> {
    bound.supports(ch)?;
    let c = ch.cards();
    let mut aux = bound.default_aux_cards(c);
    for (role, card) in aux.iter_mut() {
        if let Some(&k) = cfg.aux_cards.get(role) {
            *card = k.max(1);
        }
    }
    if let Some(r) = cfg
        .aux_cards
        .keys()
        .find(|r| !aux.iter().any(|a| a.0 == **r))
    {
        return Err(BoundsError::UnsupportedBound(format!(
            "bound {bound} has no auxiliary {r}"
        )));
    }
    let card_of = |r: Role| aux.iter().find(|a| a.0 == r).map(|a| a.1).unwrap_or(1);
    let family = match bound {
        BoundKind::BcOuter => Family::Bc {
            u1: card_of(Role::U1),
            u2: card_of(Role::U2),
            v: card_of(Role::V),
            x1: c.x1,
            x2: c.x2,
        },
        _ => {
            let mut axes = vec![(Role::X1, c.x1), (Role::X2, c.x2)];
            axes.extend(aux.iter().copied());
            Family::Joint(axes)
        }
    };

    let mut cands = sweep(ch, bound, &aux, cfg.sweep_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let budget = cfg.budget.max(1);
    cands.extend((0..budget).map(|_| family.sample(&mut rng)));

    let eval = |p: &Param| -> Option<RatePolytope2D> {
        let pmf = family.build(p).ok()?;
        let a = AuxAssignment::new(pmf, bound.factorization()).ok()?;
        bound.evaluate(ch, &a, cfg.binning).ok()
    };
    let regions = map_ordered(&cands, eval);

    let refine = |&lambda: &f64| -> Option<(Param, (f64, f64), f64)> {
        let mut best: Option<(usize, (f64, f64), f64)> = None;
        for (k, r) in regions.iter().enumerate() {
            if let Some((pt, v)) = r.as_ref().and_then(|r| r.support(lambda)) {
                if best.is_none_or(|b| v > b.2) {
                    best = Some((k, pt, v));
                }
            }
        }
        let (k, pt, v) = best?;
        let (param, value) = ascend(cands[k].clone(), v, budget, |p| {
            eval(p).and_then(|r| r.support(lambda)).map(|s| s.1)
        });
        if value > v {
            let (pt2, v2) = eval(&param)?.support(lambda)?;
            Some((param, pt2, v2))
        } else {
            Some((cands[k].clone(), pt, v))
        }
    };
    let refined = map_ordered(&cfg.weights, refine);

    cfg.weights
        .iter()
        .zip(refined)
        .map(|(&lambda, r)| {
            let (param, point, value) = r.ok_or(crate::polytope::PolytopeError::EmptyRegion)?;
            Ok(FrontierPoint {
                lambda,
                point,
                value,
                assignment: family.build(&param)?,
                seed: cfg.seed,
            })
        })
        .collect()
}

/// Deterministic candidates: uniform product supports on the inputs, with a
/// few canonical auxiliary maps.
fn sweep(
    ch: &CifcChannel,
    bound: BoundKind,
    aux: &[(Role, usize)],
    cap: usize,
) -> Result<Vec<Param>, BoundsError> {
    let c = ch.cards();
    let (f1, f2) = (ch.f1(), ch.f2());
    // functions of (x1, x2) an auxiliary may copy
    let mut maps: Vec<Box<dyn Fn(usize, usize) -> usize>> =
        vec![Box::new(|_, _| 0), Box::new(|a, _| a), Box::new(|_, b| b)];
    if let Some(f) = f1.clone() {
        maps.push(Box::new(move |a, b| f[a][b]));
    }
    if let Some(f) = f2.clone() {
        maps.push(Box::new(move |a, b| f[a][b]));
    }
    // one map index per auxiliary role
    let combos: Vec<Vec<usize>> = match bound {
        BoundKind::Det | BoundKind::MarginalOuter => vec![vec![]],
        BoundKind::BcOuter => return Ok(vec![]),
        BoundKind::RtdInner => {
            // (U2c, U1c, U1pb, U2pb)
            vec![
                vec![0, 0, 0, 0],
                vec![2, 1, 1, 2],
                vec![2, 0, 1, 0],
                vec![0, 0, 1, 2],
                vec![2, 1, 0, 0],
            ]
        }
        _ => (0..maps.len()).map(|m| vec![m]).collect(),
    };
    let inputs = support_sweep(c.x1, c.x2, cap / combos.len().max(1));
    let mut out = Vec::with_capacity(inputs.len() * combos.len());
    for p in &inputs {
        for combo in &combos {
            let mut q = p.clone();
            for (&(role, card), &m) in aux.iter().zip(combo) {
                let f = &maps[m];
                q = q.extend_deterministic(role, card, |i| f(i[0], i[1]) % card)?;
            }
            out.push(Family::param_of(&q));
        }
    }
    Ok(out)
}
