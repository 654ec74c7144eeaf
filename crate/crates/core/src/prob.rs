//! Exact finite-alphabet probability engine.
//!
//! A [`JointPmf`] is a dense tensor over role-labelled axes. Every entropy
//! and mutual-information quantity in the crate is evaluated here, in bits,
//! with the convention `0 · log 0 = 0`.

use std::collections::HashMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::CifcChannel;

/// Values above this are clamped to zero at construction.
pub const NEGATIVE_CLAMP: f64 = -1e-15;
/// Maximum tolerated deviation of the total mass from one.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("negative probability mass {value} at cell {cell}")]
    NegativeMass { cell: usize, value: f64 },
    #[error("total mass {sum} differs from one")]
    MassNotOne { sum: f64 },
    #[error("shape mismatch: expected {expected} cells, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("axis cardinality must be at least one (role {0})")]
    ZeroCardinality(Role),
    #[error("role {0} appears more than once")]
    DuplicateRole(Role),
    #[error("unknown role {0}")]
    UnknownRole(Role),
    #[error("role {0} appears in more than one argument set")]
    OverlappingSets(Role),
    #[error("alphabet mismatch on {role}: pmf has {pmf}, channel has {channel}")]
    AlphabetMismatch {
        role: Role,
        pmf: usize,
        channel: usize,
    },
    #[error("role {0} is already present")]
    RoleCollision(Role),
}

/// Random-variable labels used across the bounds.
///
/// `Other(n)` covers anything not named by the bounds (time sharing, copies
/// built in tests, ...). It prints as `T{n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Role {
    U,
    U1,
    U2,
    V,
    U1c,
    U2c,
    U1pb,
    U2pb,
    X1,
    X2,
    Y1,
    Y2,
    /// `Y2'`: a coupled copy of `Y2` with the same conditional marginal.
    Y2p,
    W1,
    W2,
    Other(u8),
}

impl Role {
    pub const NAMED: [Role; 15] = [
        Role::U,
        Role::U1,
        Role::U2,
        Role::V,
        Role::U1c,
        Role::U2c,
        Role::U1pb,
        Role::U2pb,
        Role::X1,
        Role::X2,
        Role::Y1,
        Role::Y2,
        Role::Y2p,
        Role::W1,
        Role::W2,
    ];

    pub fn is_output(self) -> bool {
        matches!(self, Role::Y1 | Role::Y2 | Role::Y2p)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::U => f.write_str("U"),
            Role::U1 => f.write_str("U1"),
            Role::U2 => f.write_str("U2"),
            Role::V => f.write_str("V"),
            Role::U1c => f.write_str("U1c"),
            Role::U2c => f.write_str("U2c"),
            Role::U1pb => f.write_str("U1pb"),
            Role::U2pb => f.write_str("U2pb"),
            Role::X1 => f.write_str("X1"),
            Role::X2 => f.write_str("X2"),
            Role::Y1 => f.write_str("Y1"),
            Role::Y2 => f.write_str("Y2"),
            Role::Y2p => f.write_str("Y2P"),
            Role::W1 => f.write_str("W1"),
            Role::W2 => f.write_str("W2"),
            Role::Other(n) => write!(f, "T{n}"),
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix('T') {
            if let Ok(n) = rest.parse::<u8>() {
                return Ok(Role::Other(n));
            }
        }
        Role::NAMED
            .iter()
            .copied()
            .find(|r| r.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown role '{s}'"))
    }
}

impl TryFrom<String> for Role {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Role> for String {
    fn from(r: Role) -> String {
        r.to_string()
    }
}

/// An information quantity in bits.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bits(pub f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// `[x]^+`
    pub fn positive_part(self) -> Bits {
        Bits(self.0.max(0.0))
    }

    pub fn min(self, other: Bits) -> Bits {
        Bits(self.0.min(other.0))
    }

    pub fn max(self, other: Bits) -> Bits {
        Bits(self.0.max(other.0))
    }
}

impl Add for Bits {
    type Output = Bits;
    fn add(self, rhs: Bits) -> Bits {
        Bits(self.0 + rhs.0)
    }
}

impl Sub for Bits {
    type Output = Bits;
    fn sub(self, rhs: Bits) -> Bits {
        Bits(self.0 - rhs.0)
    }
}

impl Neg for Bits {
    type Output = Bits;
    fn neg(self) -> Bits {
        Bits(-self.0)
    }
}

impl AddAssign for Bits {
    fn add_assign(&mut self, rhs: Bits) {
        self.0 += rhs.0;
    }
}

impl Sum for Bits {
    fn sum<I: Iterator<Item = Bits>>(iter: I) -> Bits {
        Bits(iter.map(|b| b.0).sum())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Axis {
    pub role: Role,
    pub card: usize,
}

/// Dense joint probability mass function over role-labelled axes.
///
/// Values are stored row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    axes: Vec<Axis>,
    values: Vec<f64>,
}

fn check_axes(axes: &[(Role, usize)]) -> Result<Vec<Axis>, ProbError> {
    let mut out: Vec<Axis> = Vec::with_capacity(axes.len());
    for &(role, card) in axes {
        if card == 0 {
            return Err(ProbError::ZeroCardinality(role));
        }
        if out.iter().any(|a| a.role == role) {
            return Err(ProbError::DuplicateRole(role));
        }
        out.push(Axis { role, card });
    }
    Ok(out)
}

impl JointPmf {
    /// Validates and wraps a flat row-major table.
    pub fn from_table(values: Vec<f64>, axes: &[(Role, usize)]) -> Result<Self, ProbError> {
        let axes = check_axes(axes)?;
        let expected: usize = axes.iter().map(|a| a.card).product();
        if values.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                got: values.len(),
            });
        }
        let mut values = values;
        for (cell, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || *v < NEGATIVE_CLAMP {
                return Err(ProbError::NegativeMass { cell, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(ProbError::MassNotOne { sum });
        }
        if sum != 1.0 {
            values.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(JointPmf { axes, values })
    }

    /// Builds a PMF cell by cell from a function of the multi-index.
    pub fn from_fn(
        axes: &[(Role, usize)],
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self, ProbError> {
        let checked = check_axes(axes)?;
        let cards: Vec<usize> = checked.iter().map(|a| a.card).collect();
        let total: usize = cards.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; cards.len()];
        for _ in 0..total {
            values.push(f(&idx));
            advance(&mut idx, &cards);
        }
        Self::from_table(values, axes)
    }

    pub fn uniform(axes: &[(Role, usize)]) -> Result<Self, ProbError> {
        let checked = check_axes(axes)?;
        let total: usize = checked.iter().map(|a| a.card).product();
        Self::from_table(vec![1.0 / total as f64; total], axes)
    }

    pub fn point_mass(axes: &[(Role, usize)], at: &[usize]) -> Result<Self, ProbError> {
        Self::from_fn(axes, |idx| if idx == at { 1.0 } else { 0.0 })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn roles(&self) -> Vec<Role> {
        self.axes.iter().map(|a| a.role).collect()
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.axis_of(role).is_some()
    }

    pub fn axis_of(&self, role: Role) -> Option<usize> {
        self.axes.iter().position(|a| a.role == role)
    }

    pub fn card(&self, role: Role) -> Option<usize> {
        self.axis_of(role).map(|i| self.axes[i].card)
    }

    pub fn cards(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.card).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn strides(&self) -> Vec<usize> {
        strides_of(&self.cards())
    }

    /// Probability at a full multi-index.
    pub fn prob(&self, idx: &[usize]) -> f64 {
        let strides = self.strides();
        let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.values[flat]
    }

    /// Iterates over `(multi-index, probability)` for every cell.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[usize], f64)) {
        let cards = self.cards();
        let mut idx = vec![0usize; cards.len()];
        for &v in &self.values {
            f(&idx, v);
            advance(&mut idx, &cards);
        }
    }

    fn mask_of(&self, roles: &[Role]) -> Result<u64, ProbError> {
        let mut mask = 0u64;
        for &r in roles {
            let i = self.axis_of(r).ok_or(ProbError::UnknownRole(r))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// Sums out every axis not in `keep`. Kept axes retain their original order.
    pub fn marginalize(&self, keep: &[Role]) -> Result<JointPmf, ProbError> {
        let mask = self.mask_of(keep)?;
        let values = self.marginal_by_mask(mask);
        let axes = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| *a)
            .collect();
        Ok(JointPmf { axes, values })
    }

    pub(crate) fn marginal_by_mask(&self, mask: u64) -> Vec<f64> {
        let cards = self.cards();
        let mut out_stride = vec![0usize; cards.len()];
        let mut size = 1usize;
        for i in (0..cards.len()).rev() {
            if mask & (1 << i) != 0 {
                out_stride[i] = size;
                size *= cards[i];
            }
        }
        let mut out = vec![0.0; size];
        if mask == 0 {
            out[0] = self.values.iter().sum();
            return out;
        }
        let mut idx = vec![0usize; cards.len()];
        let mut pos = 0usize;
        for &v in &self.values {
            out[pos] += v;
            // odometer step, keeping the output offset in sync
            let mut k = cards.len();
            while k > 0 {
                k -= 1;
                idx[k] += 1;
                pos += out_stride[k];
                if idx[k] < cards[k] {
                    break;
                }
                pos -= out_stride[k] * cards[k];
                idx[k] = 0;
            }
        }
        out
    }

    pub(crate) fn entropy_by_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        shannon(&self.marginal_by_mask(mask))
    }

    /// `H(targets | given)` in bits.
    pub fn entropy(&self, targets: &[Role], given: &[Role]) -> Result<Bits, ProbError> {
        disjoint(&[targets, given])?;
        let t = self.mask_of(targets)?;
        let g = self.mask_of(given)?;
        let h = self.entropy_by_mask(t | g) - self.entropy_by_mask(g);
        Ok(Bits(h.max(0.0)))
    }

    /// `I(a; b | given)` in bits, clamped at zero.
    pub fn mutual_information(
        &self,
        a: &[Role],
        b: &[Role],
        given: &[Role],
    ) -> Result<Bits, ProbError> {
        disjoint(&[a, b, given])?;
        let ma = self.mask_of(a)?;
        let mb = self.mask_of(b)?;
        let mg = self.mask_of(given)?;
        let i = self.entropy_by_mask(ma | mg) + self.entropy_by_mask(mb | mg)
            - self.entropy_by_mask(ma | mb | mg)
            - self.entropy_by_mask(mg);
        Ok(Bits(i.max(0.0)))
    }

    /// Appends a new axis `role` whose conditional law given the existing
    /// axes is `cond(idx)` (a distribution over `card` values).
    pub fn extend_with(
        &self,
        role: Role,
        card: usize,
        mut cond: impl FnMut(&[usize]) -> Vec<f64>,
    ) -> Result<JointPmf, ProbError> {
        if self.has_role(role) {
            return Err(ProbError::RoleCollision(role));
        }
        if card == 0 {
            return Err(ProbError::ZeroCardinality(role));
        }
        let mut values = Vec::with_capacity(self.values.len() * card);
        let mut bad = None;
        self.for_each_cell(|idx, p| {
            let row = cond(idx);
            if row.len() != card {
                bad = Some(row.len());
            }
            values.extend(row.iter().take(card).map(|q| p * q));
            values.extend(std::iter::repeat_n(0.0, card.saturating_sub(row.len())));
        });
        if let Some(got) = bad {
            return Err(ProbError::ShapeMismatch {
                expected: card,
                got,
            });
        }
        let mut axes: Vec<(Role, usize)> = self.axes.iter().map(|a| (a.role, a.card)).collect();
        axes.push((role, card));
        JointPmf::from_table(values, &axes)
    }

    /// Appends a deterministic function of the existing axes as a new axis.
    pub fn extend_deterministic(
        &self,
        role: Role,
        card: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<JointPmf, ProbError> {
        self.extend_with(role, card, |idx| {
            let mut row = vec![0.0; card];
            let v = f(idx);
            if v < card {
                row[v] = 1.0;
            }
            row
        })
    }

    /// Product law of two PMFs over disjoint roles.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf, ProbError> {
        for a in &other.axes {
            if self.has_role(a.role) {
                return Err(ProbError::RoleCollision(a.role));
            }
        }
        let mut values = Vec::with_capacity(self.values.len() * other.values.len());
        for &p in &self.values {
            values.extend(other.values.iter().map(|q| p * q));
        }
        let axes: Vec<(Role, usize)> = self
            .axes
            .iter()
            .chain(&other.axes)
            .map(|a| (a.role, a.card))
            .collect();
        JointPmf::from_table(values, &axes)
    }

    /// Renames one axis.
    pub fn rename(&self, from: Role, to: Role) -> Result<JointPmf, ProbError> {
        let i = self.axis_of(from).ok_or(ProbError::UnknownRole(from))?;
        if from != to && self.has_role(to) {
            return Err(ProbError::RoleCollision(to));
        }
        let mut out = self.clone();
        out.axes[i].role = to;
        Ok(out)
    }

    /// Reorders axes to match `order` (which must be a permutation of the roles).
    pub fn permute(&self, order: &[Role]) -> Result<JointPmf, ProbError> {
        if order.len() != self.axes.len() {
            return Err(ProbError::ShapeMismatch {
                expected: self.axes.len(),
                got: order.len(),
            });
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|&r| self.axis_of(r).ok_or(ProbError::UnknownRole(r)))
            .collect::<Result<_, _>>()?;
        let new_axes: Vec<(Role, usize)> = perm
            .iter()
            .map(|&i| (self.axes[i].role, self.axes[i].card))
            .collect();
        let mut src = vec![0usize; perm.len()];
        JointPmf::from_fn(&new_axes, |idx| {
            for (k, &i) in perm.iter().enumerate() {
                src[i] = idx[k];
            }
            self.prob(&src)
        })
    }

    /// Replaces the axes `roles` by one compound axis `into` whose value is
    /// the row-major index of the merged tuple.
    pub fn merge_axes(&self, roles: &[Role], into: Role) -> Result<JointPmf, ProbError> {
        if roles.is_empty() {
            return self.extend_deterministic(into, 1, |_| 0);
        }
        if !roles.contains(&into) && self.has_role(into) {
            return Err(ProbError::RoleCollision(into));
        }
        disjoint(&[roles])?;
        let mut order: Vec<Role> = self
            .roles()
            .into_iter()
            .filter(|r| !roles.contains(r))
            .collect();
        order.extend_from_slice(roles);
        let permuted = self.permute(&order)?;
        let card: usize = roles.iter().map(|r| self.card(*r).unwrap()).product();
        let mut axes: Vec<Axis> = permuted.axes[..permuted.axes.len() - roles.len()].to_vec();
        axes.push(Axis { role: into, card });
        Ok(JointPmf {
            axes,
            values: permuted.values,
        })
    }

    /// Checks `A ⟂ B | C` pointwise: `p(a,b,c) p(c) = p(a,c) p(b,c)`.
    pub fn is_conditionally_independent(
        &self,
        a: &[Role],
        b: &[Role],
        given: &[Role],
        tol: f64,
    ) -> Result<bool, ProbError> {
        disjoint(&[a, b, given])?;
        let ma = self.mask_of(a)?;
        let mb = self.mask_of(b)?;
        let mc = self.mask_of(given)?;
        let abc = self.marginalize_mask_pmf(ma | mb | mc);
        let ac = self.marginalize_mask_pmf(ma | mc);
        let bc = self.marginalize_mask_pmf(mb | mc);
        let c = self.marginalize_mask_pmf(mc);
        let mut ok = true;
        let roles_abc = abc.roles();
        let pos = |pmf: &JointPmf, idx: &[usize]| -> f64 {
            let sub: Vec<usize> = pmf
                .axes
                .iter()
                .map(|ax| idx[roles_abc.iter().position(|r| *r == ax.role).unwrap()])
                .collect();
            if sub.is_empty() {
                pmf.values[0]
            } else {
                pmf.prob(&sub)
            }
        };
        abc.for_each_cell(|idx, p| {
            if !ok {
                return;
            }
            let lhs = p * pos(&c, idx);
            let rhs = pos(&ac, idx) * pos(&bc, idx);
            if (lhs - rhs).abs() > tol {
                ok = false;
            }
        });
        Ok(ok)
    }

    fn marginalize_mask_pmf(&self, mask: u64) -> JointPmf {
        let values = self.marginal_by_mask(mask);
        let axes = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| *a)
            .collect();
        JointPmf { axes, values }
    }

    /// Caching evaluator for repeated information quantities on one PMF.
    pub fn info(&self) -> InfoEval<'_> {
        InfoEval {
            pmf: self,
            cache: HashMap::new(),
        }
    }
}

/// Memoizes subset entropies of one joint PMF.
pub struct InfoEval<'a> {
    pmf: &'a JointPmf,
    cache: HashMap<u64, f64>,
}

impl InfoEval<'_> {
    pub fn pmf(&self) -> &JointPmf {
        self.pmf
    }

    fn mask(&self, roles: &[Role]) -> Result<u64, ProbError> {
        self.pmf.mask_of(roles)
    }

    fn h_mask(&mut self, mask: u64) -> f64 {
        if let Some(&h) = self.cache.get(&mask) {
            return h;
        }
        let h = self.pmf.entropy_by_mask(mask);
        self.cache.insert(mask, h);
        h
    }

    /// `H(targets | given)`.
    pub fn h(&mut self, targets: &[Role], given: &[Role]) -> Result<Bits, ProbError> {
        disjoint(&[targets, given])?;
        let t = self.mask(targets)?;
        let g = self.mask(given)?;
        Ok(Bits((self.h_mask(t | g) - self.h_mask(g)).max(0.0)))
    }

    /// `I(a; b | given)`, clamped at zero.
    pub fn i(&mut self, a: &[Role], b: &[Role], given: &[Role]) -> Result<Bits, ProbError> {
        disjoint(&[a, b, given])?;
        let ma = self.mask(a)?;
        let mb = self.mask(b)?;
        let mg = self.mask(given)?;
        let v = self.h_mask(ma | mg) + self.h_mask(mb | mg)
            - self.h_mask(ma | mb | mg)
            - self.h_mask(mg);
        Ok(Bits(v.max(0.0)))
    }
}

/// Joint law of the input axes and the channel outputs `Y1`, `Y2`.
pub fn compose_with_channel(input: &JointPmf, ch: &CifcChannel) -> Result<JointPmf, ProbError> {
    let cards = ch.cards();
    check_composable(input, ch)?;
    let ix1 = input.axis_of(Role::X1).unwrap();
    let ix2 = input.axis_of(Role::X2).unwrap();
    let ny = cards.y1 * cards.y2;
    let mut values = Vec::with_capacity(input.len() * ny);
    input.for_each_cell(|idx, p| {
        let row = ch.row(idx[ix1], idx[ix2]);
        values.extend(row.iter().map(|q| p * q));
    });
    let mut axes: Vec<(Role, usize)> = input.axes.iter().map(|a| (a.role, a.card)).collect();
    axes.push((Role::Y1, cards.y1));
    axes.push((Role::Y2, cards.y2));
    JointPmf::from_table(values, &axes)
}

fn check_composable(input: &JointPmf, ch: &CifcChannel) -> Result<(), ProbError> {
    let cards = ch.cards();
    for (role, card) in [(Role::X1, cards.x1), (Role::X2, cards.x2)] {
        let got = input.card(role).ok_or(ProbError::UnknownRole(role))?;
        if got != card {
            return Err(ProbError::AlphabetMismatch {
                role,
                pmf: got,
                channel: card,
            });
        }
    }
    for role in [Role::Y1, Role::Y2] {
        if input.has_role(role) {
            return Err(ProbError::RoleCollision(role));
        }
    }
    Ok(())
}

/// Joint law of the `keep` input axes and the outputs, with every other
/// input axis summed out. Only cells of positive probability are visited.
pub fn compose_with_channel_keeping(
    input: &JointPmf,
    ch: &CifcChannel,
    keep: &[Role],
) -> Result<JointPmf, ProbError> {
    check_composable(input, ch)?;
    disjoint(&[keep])?;
    let cards = ch.cards();
    let kept: Vec<usize> = keep
        .iter()
        .map(|&r| input.axis_of(r).ok_or(ProbError::UnknownRole(r)))
        .collect::<Result<_, _>>()?;
    let kept_cards: Vec<usize> = kept.iter().map(|&a| input.axes[a].card).collect();
    let strides = strides_of(&kept_cards);
    let ix1 = input.axis_of(Role::X1).unwrap();
    let ix2 = input.axis_of(Role::X2).unwrap();
    let ny = cards.y1 * cards.y2;
    let mut values = vec![0.0; kept_cards.iter().product::<usize>() * ny];
    input.for_each_cell(|idx, p| {
        if p <= 0.0 {
            return;
        }
        let base: usize = kept
            .iter()
            .zip(&strides)
            .map(|(&a, s)| idx[a] * s)
            .sum::<usize>()
            * ny;
        for (y, &q) in ch.row(idx[ix1], idx[ix2]).iter().enumerate() {
            if q > 0.0 {
                values[base + y] += p * q;
            }
        }
    });
    let mut axes: Vec<(Role, usize)> = keep.iter().copied().zip(kept_cards).collect();
    axes.push((Role::Y1, cards.y1));
    axes.push((Role::Y2, cards.y2));
    JointPmf::from_table(values, &axes)
}

fn disjoint(sets: &[&[Role]]) -> Result<(), ProbError> {
    let mut seen: Vec<Role> = Vec::new();
    for set in sets {
        let mut local: Vec<Role> = Vec::new();
        for &r in *set {
            if seen.contains(&r) {
                return Err(ProbError::OverlappingSets(r));
            }
            if !local.contains(&r) {
                local.push(r);
            }
        }
        seen.extend(local);
    }
    Ok(())
}

fn strides_of(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    strides
}

fn advance(idx: &mut [usize], cards: &[usize]) {
    let mut k = idx.len();
    while k > 0 {
        k -= 1;
        idx[k] += 1;
        if idx[k] < cards[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// `-Σ p log2 p` with `0 log 0 = 0`.
pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex2() -> JointPmf {
        crate::channel::example_two_input()
    }

    #[test]
    fn uniform_eight_is_valid_and_has_three_bits() {
        let p = JointPmf::from_table(vec![0.125; 8], &[(Role::Y2, 8)]).unwrap();
        assert_eq!(p.entropy(&[Role::Y2], &[]).unwrap(), Bits(3.0));
    }

    #[test]
    fn example_two_table_marginals() {
        let p = ex2();
        let x1 = p.marginalize(&[Role::X1]).unwrap();
        assert_eq!(x1.values(), &[0.375, 0.375, 0.125, 0.125]);
        let x2 = p.marginalize(&[Role::X2]).unwrap();
        assert_eq!(x2.values(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn mass_not_one_is_rejected() {
        let err = JointPmf::from_table(vec![0.3, 0.3, 0.3], &[(Role::X1, 3)]).unwrap_err();
        assert!(matches!(err, ProbError::MassNotOne { .. }));
    }

    #[test]
    fn tiny_negative_values_are_clamped() {
        let p = JointPmf::from_table(vec![1.0, -1e-16], &[(Role::X1, 2)]).unwrap();
        assert_eq!(p.values()[1], 0.0);
        let err = JointPmf::from_table(vec![1.1, -0.1], &[(Role::X1, 2)]).unwrap_err();
        assert!(matches!(err, ProbError::NegativeMass { cell: 1, .. }));
    }

    #[test]
    fn shape_and_role_errors() {
        assert!(matches!(
            JointPmf::from_table(vec![0.5, 0.5], &[(Role::X1, 3)]),
            Err(ProbError::ShapeMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert!(matches!(
            JointPmf::uniform(&[(Role::X1, 2), (Role::X1, 2)]),
            Err(ProbError::DuplicateRole(Role::X1))
        ));
        let p = ex2();
        assert!(matches!(
            p.marginalize(&[Role::U]),
            Err(ProbError::UnknownRole(Role::U))
        ));
        assert!(matches!(
            p.entropy(&[Role::X1], &[Role::X1]),
            Err(ProbError::OverlappingSets(Role::X1))
        ));
    }

    #[test]
    fn marginalize_all_axes_is_identity() {
        let p = ex2();
        assert_eq!(p.marginalize(&[Role::X1, Role::X2]).unwrap(), p);
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let a = JointPmf::from_table(vec![0.2, 0.8], &[(Role::X1, 2)]).unwrap();
        let b = JointPmf::from_table(vec![0.5, 0.25, 0.25], &[(Role::X2, 3)]).unwrap();
        let ab = a.product(&b).unwrap();
        let back = ab.marginalize(&[Role::X1]).unwrap();
        for (x, y) in back.values().iter().zip(a.values()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn entropy_examples() {
        let point = JointPmf::point_mass(&[(Role::X1, 3)], &[1]).unwrap();
        assert_eq!(point.entropy(&[Role::X1], &[]).unwrap(), Bits(0.0));
        let p = JointPmf::from_table(vec![0.5, 0.25, 0.25], &[(Role::X2, 3)]).unwrap();
        assert_eq!(p.entropy(&[Role::X2], &[]).unwrap(), Bits(1.5));
    }

    #[test]
    fn mutual_information_examples() {
        let a = JointPmf::uniform(&[(Role::X1, 2)]).unwrap();
        let b = JointPmf::uniform(&[(Role::X2, 4)]).unwrap();
        let ab = a.product(&b).unwrap();
        assert_eq!(
            ab.mutual_information(&[Role::X1], &[Role::X2], &[])
                .unwrap(),
            Bits(0.0)
        );

        let copy = JointPmf::from_fn(&[(Role::X1, 4), (Role::Other(0), 4)], |i| {
            if i[0] == i[1] {
                0.25
            } else {
                0.0
            }
        })
        .unwrap();
        let i = copy
            .mutual_information(&[Role::X1], &[Role::Other(0)], &[])
            .unwrap();
        assert_eq!(i, Bits(2.0));

        // H(X1) + H(X2) - H(X1,X2) by direct summation over the table
        let h1 = -(2.0 * 0.375 * 0.375f64.log2() + 2.0 * 0.125 * 0.125f64.log2());
        let expected = h1 + 1.5 - 3.0;
        let got = ex2()
            .mutual_information(&[Role::X1], &[Role::X2], &[])
            .unwrap()
            .value();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.3113).abs() < 1e-4);
    }

    #[test]
    fn conditional_independence_check() {
        let a = JointPmf::from_table(vec![0.3, 0.7], &[(Role::U1, 2)]).unwrap();
        let b = JointPmf::from_table(vec![0.6, 0.4], &[(Role::U2, 2)]).unwrap();
        let ab = a.product(&b).unwrap();
        assert!(ab
            .is_conditionally_independent(&[Role::U1], &[Role::U2], &[], 1e-12)
            .unwrap());
        let corr = JointPmf::from_table(vec![0.5, 0.0, 0.0, 0.5], &[(Role::U1, 2), (Role::U2, 2)])
            .unwrap();
        assert!(!corr
            .is_conditionally_independent(&[Role::U1], &[Role::U2], &[], 1e-9)
            .unwrap());
    }

    #[test]
    fn permute_roundtrip() {
        let p = ex2();
        let q = p.permute(&[Role::X2, Role::X1]).unwrap();
        assert_eq!(q.prob(&[1, 0]), p.prob(&[0, 1]));
        assert_eq!(q.permute(&[Role::X1, Role::X2]).unwrap(), p);
    }

    #[test]
    fn merged_axes_keep_joint_entropy() {
        let p = ex2()
            .extend_deterministic(Role::U, 2, |i| i[0] % 2)
            .unwrap();
        let m = p.merge_axes(&[Role::X1, Role::U], Role::Other(1)).unwrap();
        assert_eq!(m.roles(), vec![Role::X2, Role::Other(1)]);
        assert_eq!(m.card(Role::Other(1)), Some(8));
        let h1 = p
            .entropy(&[Role::X1, Role::U], &[Role::X2])
            .unwrap()
            .value();
        let h2 = m.entropy(&[Role::Other(1)], &[Role::X2]).unwrap().value();
        assert!((h1 - h2).abs() < 1e-12);
    }

    #[test]
    fn role_text_roundtrip() {
        for r in Role::NAMED.iter().copied().chain([Role::Other(7)]) {
            assert_eq!(r.to_string().parse::<Role>().unwrap(), r);
        }
    }

    #[test]
    fn composing_with_summed_inputs_matches_marginal() {
        let ch = crate::channel::BuiltinChannel::SymmetricClipper.channel();
        let p = ex2()
            .extend_deterministic(Role::U, 2, |i| i[0] % 2)
            .unwrap();
        let full = compose_with_channel(&p, &ch)
            .unwrap()
            .marginalize(&[Role::U, Role::X2, Role::Y1, Role::Y2])
            .unwrap()
            .permute(&[Role::U, Role::X2, Role::Y1, Role::Y2])
            .unwrap();
        let kept = compose_with_channel_keeping(&p, &ch, &[Role::U, Role::X2]).unwrap();
        assert_eq!(kept.roles(), full.roles());
        for (a, b) in kept.values().iter().zip(full.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(compose_with_channel_keeping(&p, &ch, &[Role::V]).is_err());
    }
}
