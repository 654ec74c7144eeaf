//! Linear rate systems, Fourier-Motzkin projection and 2-D rate regions.
//!
//! Coefficients are exact rationals; right-hand sides are `f64` bits.
//! Every variable carries an implicit non-negativity constraint.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{fmt_num, round_json};

/// Feasibility / slack tolerance for geometric tests.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("variable {0} does not appear in the system")]
    UnknownVariable(RateVar),
    #[error("projected region is unbounded")]
    Unbounded,
    #[error("constraint over {0} cannot enter a 2-D (R1,R2) region")]
    NotTwoDimensional(RateVar),
    #[error("every region in the union is empty")]
    EmptyRegion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RateVar {
    R1,
    R2,
    R1c,
    R1pb,
    R2c,
    R2pa,
    R2pb,
    /// `R'_{1c}`
    R1cP,
    /// `R'_{1pb}`
    R1pbP,
    /// `R'_{2pb}`
    R2pbP,
}

const NVARS: usize = 10;

impl RateVar {
    pub const ALL: [RateVar; NVARS] = [
        RateVar::R1,
        RateVar::R2,
        RateVar::R1c,
        RateVar::R1pb,
        RateVar::R2c,
        RateVar::R2pa,
        RateVar::R2pb,
        RateVar::R1cP,
        RateVar::R1pbP,
        RateVar::R2pbP,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            RateVar::R1 => "R1",
            RateVar::R2 => "R2",
            RateVar::R1c => "R1c",
            RateVar::R1pb => "R1pb",
            RateVar::R2c => "R2c",
            RateVar::R2pa => "R2pa",
            RateVar::R2pb => "R2pb",
            RateVar::R1cP => "R1cP",
            RateVar::R1pbP => "R1pbP",
            RateVar::R2pbP => "R2pbP",
        }
    }

    pub fn is_binning(self) -> bool {
        matches!(self, RateVar::R1cP | RateVar::R1pbP | RateVar::R2pbP)
    }
}

impl fmt::Display for RateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RateVar {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RateVar::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown rate variable '{s}'"))
    }
}

impl TryFrom<String> for RateVar {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RateVar> for String {
    fn from(v: RateVar) -> String {
        v.name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// `Σ coeffs[v]·v  (sense)  rhs`.
///
/// A row with no coefficients is a feasibility condition `0 (sense) rhs`;
/// elimination produces these.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: BTreeMap<RateVar, Rational64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(terms: &[(RateVar, i64)], sense: Sense, rhs: f64) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(v, c) in terms {
            *coeffs.entry(v).or_insert_with(Rational64::zero) += Rational64::from_integer(c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        LinearConstraint { coeffs, sense, rhs }
    }

    pub fn le(terms: &[(RateVar, i64)], rhs: f64) -> Self {
        Self::new(terms, Sense::Le, rhs)
    }

    pub fn ge(terms: &[(RateVar, i64)], rhs: f64) -> Self {
        Self::new(terms, Sense::Ge, rhs)
    }

    pub fn eq(terms: &[(RateVar, i64)], rhs: f64) -> Self {
        Self::new(terms, Sense::Eq, rhs)
    }

    /// Unit-coefficient sum `Σ vars (sense) rhs`.
    pub fn sum(vars: &[RateVar], sense: Sense, rhs: f64) -> Self {
        let terms: Vec<(RateVar, i64)> = vars.iter().map(|&v| (v, 1)).collect();
        Self::new(&terms, sense, rhs)
    }

    pub fn coeff(&self, v: RateVar) -> Rational64 {
        self.coeffs
            .get(&v)
            .copied()
            .unwrap_or_else(Rational64::zero)
    }

    pub fn coeff_f64(&self, v: RateVar) -> f64 {
        self.coeff(v).to_f64().unwrap_or(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluates `lhs - rhs` for `≤`-type slack at a point given as a lookup.
    pub fn lhs_at(&self, value: impl Fn(RateVar) -> f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(v, c)| c.to_f64().unwrap_or(0.0) * value(*v))
            .sum()
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            f.write_str("0")?;
        }
        for (i, (v, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mag != Rational64::from_integer(1) {
                write!(f, "{mag}·")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, " {} {}", self.sense, fmt_num(self.rhs))
    }
}

/// A list of constraints over rate variables, all implicitly non-negative.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RateSystem {
    pub constraints: Vec<LinearConstraint>,
}

impl RateSystem {
    pub fn new(constraints: Vec<LinearConstraint>) -> Self {
        RateSystem { constraints }
    }

    pub fn push(&mut self, c: LinearConstraint) {
        self.constraints.push(c);
    }

    pub fn variables(&self) -> BTreeSet<RateVar> {
        self.constraints
            .iter()
            .flat_map(|c| c.coeffs.keys().copied())
            .collect()
    }

    /// Rows of the form `0 ≤ b` with `b < -tol`.
    pub fn has_infeasible_constant(&self, tol: f64) -> bool {
        self.constraints.iter().any(|c| {
            c.is_constant()
                && match c.sense {
                    Sense::Le => c.rhs < -tol,
                    Sense::Ge => c.rhs > tol,
                    Sense::Eq => c.rhs.abs() > tol,
                }
        })
    }

    /// Membership test with slack `tol` (non-negativity included).
    pub fn contains_point(&self, point: &BTreeMap<RateVar, f64>, tol: f64) -> bool {
        let val = |v: RateVar| point.get(&v).copied().unwrap_or(0.0);
        if self.variables().into_iter().any(|v| val(v) < -tol) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = c.lhs_at(val);
            match c.sense {
                Sense::Le => lhs <= c.rhs + tol,
                Sense::Ge => lhs >= c.rhs - tol,
                Sense::Eq => (lhs - c.rhs).abs() <= tol,
            }
        })
    }
}

impl fmt::Display for RateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Internal ≤-form rows

type Coeffs = [Rational64; NVARS];

#[derive(Clone, Debug)]
struct Row {
    a: Coeffs,
    b: f64,
    hist: u128,
}

fn zero_coeffs() -> Coeffs {
    [Rational64::zero(); NVARS]
}

impl Row {
    fn from_constraint(c: &LinearConstraint, negate: bool) -> Row {
        let mut a = zero_coeffs();
        for (v, k) in &c.coeffs {
            a[v.index()] = if negate { -*k } else { *k };
        }
        let b = if negate { -c.rhs } else { c.rhs };
        let mut r = Row { a, b, hist: 0 };
        r.normalize();
        r
    }

    fn nonneg(v: RateVar) -> Row {
        let mut a = zero_coeffs();
        a[v.index()] = Rational64::from_integer(-1);
        Row { a, b: 0.0, hist: 0 }
    }

    fn is_constant(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// Scales to primitive integer coefficients (positive factor).
    fn normalize(&mut self) {
        if self.is_constant() {
            return;
        }
        let mut den: i64 = 1;
        for c in &self.a {
            if !c.is_zero() {
                den = den.lcm(c.denom());
            }
        }
        let mut g: i64 = 0;
        for c in &self.a {
            if !c.is_zero() {
                let n = (*c * Rational64::from_integer(den)).to_integer();
                g = g.gcd(&n);
            }
        }
        let scale = Rational64::new(den, g.abs().max(1));
        for c in self.a.iter_mut() {
            *c *= scale;
        }
        self.b *= scale.to_f64().unwrap_or(1.0);
    }

    fn into_constraint(self) -> LinearConstraint {
        let coeffs = RateVar::ALL
            .iter()
            .filter(|v| !self.a[v.index()].is_zero())
            .map(|v| (*v, self.a[v.index()]))
            .collect();
        LinearConstraint {
            coeffs,
            sense: Sense::Le,
            rhs: self.b,
        }
    }
}

/// Collapses rows with identical coefficients, keeping the smallest rhs.
fn dedup(rows: Vec<Row>) -> Vec<Row> {
    let mut index: HashMap<Coeffs, usize> = HashMap::new();
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    for r in rows {
        match index.get(&r.a) {
            Some(&i) => {
                if r.b < out[i].b {
                    out[i] = r;
                }
            }
            None => {
                index.insert(r.a, out.len());
                out.push(r);
            }
        }
    }
    out
}

/// One Fourier-Motzkin step on ≤-rows. `chernikov` is the bound on history
/// size, if pruning is active.
fn eliminate_rows(rows: Vec<Row>, j: usize, chernikov: Option<u32>) -> Vec<Row> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for r in rows {
        let c = r.a[j];
        if c.is_positive() {
            pos.push(r);
        } else if c.is_negative() {
            neg.push(r);
        } else {
            out.push(r);
        }
    }
    for p in &pos {
        for n in &neg {
            let hist = p.hist | n.hist;
            if let Some(limit) = chernikov {
                if hist.count_ones() > limit {
                    continue;
                }
            }
            let wp = -n.a[j];
            let wn = p.a[j];
            let mut a = zero_coeffs();
            for (k, ak) in a.iter_mut().enumerate() {
                *ak = p.a[k] * wp + n.a[k] * wn;
            }
            a[j] = Rational64::zero();
            let b = p.b * wp.to_f64().unwrap_or(0.0) + n.b * wn.to_f64().unwrap_or(0.0);
            let mut r = Row { a, b, hist };
            r.normalize();
            out.push(r);
        }
    }
    dedup(out)
}

fn rows_of(sys: &RateSystem) -> (Vec<Row>, Vec<Row>) {
    let mut ineq = Vec::new();
    let mut eqs = Vec::new();
    for c in &sys.constraints {
        match c.sense {
            Sense::Le => ineq.push(Row::from_constraint(c, false)),
            Sense::Ge => ineq.push(Row::from_constraint(c, true)),
            Sense::Eq => eqs.push(Row::from_constraint(c, false)),
        }
    }
    (ineq, eqs)
}

fn to_system(rows: Vec<Row>) -> RateSystem {
    RateSystem::new(rows.into_iter().map(Row::into_constraint).collect())
}

/// Eliminates one variable exactly. Equalities are split into two
/// inequalities and `var ≥ 0` is added before combining.
pub fn fme_eliminate(sys: &RateSystem, var: RateVar) -> Result<RateSystem, PolytopeError> {
    if !sys.variables().contains(&var) {
        return Err(PolytopeError::UnknownVariable(var));
    }
    let (mut rows, eqs) = rows_of(sys);
    for e in eqs {
        let mut neg = e.clone();
        neg.a.iter_mut().for_each(|c| *c = -*c);
        neg.b = -neg.b;
        rows.push(e);
        rows.push(neg);
    }
    rows.push(Row::nonneg(var));
    Ok(to_system(eliminate_rows(dedup(rows), var.index(), None)))
}

/// Substitutes equalities away, solving each for a variable outside `keep`.
/// Equalities over kept variables only are returned as inequality pairs.
fn substitute_equalities(mut rows: Vec<Row>, mut eqs: Vec<Row>, keep: &[RateVar]) -> Vec<Row> {
    while let Some(e) = eqs.pop() {
        let pivot = RateVar::ALL
            .iter()
            .rev()
            .find(|v| !keep.contains(v) && !e.a[v.index()].is_zero())
            .copied();
        let Some(v) = pivot else {
            let mut neg = e.clone();
            neg.a.iter_mut().for_each(|c| *c = -*c);
            neg.b = -neg.b;
            rows.push(e);
            rows.push(neg);
            continue;
        };
        let j = v.index();
        let av = e.a[j];
        let subst = |r: &mut Row| {
            let c = r.a[j];
            if c.is_zero() {
                return;
            }
            let f = c / av;
            for k in 0..NVARS {
                r.a[k] -= e.a[k] * f;
            }
            r.a[j] = Rational64::zero();
            r.b -= e.b * f.to_f64().unwrap_or(0.0);
            r.normalize();
        };
        rows.iter_mut().for_each(subst);
        eqs.iter_mut().for_each(subst);
        // v ≥ 0 becomes sign(av)·(Σ_{k≠v} a_k x_k) ≤ sign(av)·b
        let mut implied = e.clone();
        implied.a[j] = Rational64::zero();
        if av.is_negative() {
            implied.a.iter_mut().for_each(|c| *c = -*c);
            implied.b = -implied.b;
        }
        implied.normalize();
        rows.push(implied);
    }
    dedup(rows)
}

fn pair_count(rows: &[Row], j: usize) -> usize {
    let p = rows.iter().filter(|r| r.a[j].is_positive()).count();
    let n = rows.iter().filter(|r| r.a[j].is_negative()).count();
    p * n
}

fn eliminate_with_order(
    sys: &RateSystem,
    keep: &[RateVar],
    fixed_order: Option<&[RateVar]>,
) -> Vec<Row> {
    let (rows, eqs) = rows_of(sys);
    let mut rows = substitute_equalities(rows, eqs, keep);
    let present: BTreeSet<RateVar> = RateVar::ALL
        .into_iter()
        .filter(|v| rows.iter().any(|r| !r.a[v.index()].is_zero()))
        .collect();
    let mut to_go: Vec<RateVar> = present
        .iter()
        .copied()
        .filter(|v| !keep.contains(v))
        .collect();
    for v in &present {
        rows.push(Row::nonneg(*v));
    }
    let mut rows = dedup(rows);
    let pruning = rows.len() <= 128;
    if pruning {
        for (i, r) in rows.iter_mut().enumerate() {
            r.hist = 1u128 << i;
        }
    }
    let mut step = 0u32;
    let mut order: std::collections::VecDeque<RateVar> = fixed_order
        .map(|o| o.iter().copied().filter(|v| to_go.contains(v)).collect())
        .unwrap_or_default();
    while !to_go.is_empty() {
        let v = match order.pop_front() {
            Some(v) => v,
            None => *to_go
                .iter()
                .min_by_key(|v| pair_count(&rows, v.index()))
                .expect("non-empty"),
        };
        to_go.retain(|x| *x != v);
        step += 1;
        let limit = pruning.then_some(step + 1);
        rows = eliminate_rows(rows, v.index(), limit);
    }
    rows
}

/// Eliminates every variable not in `keep` (greedy order, Chernikov pruning).
pub fn eliminate_all(sys: &RateSystem, keep: &[RateVar]) -> RateSystem {
    to_system(eliminate_with_order(sys, keep, None))
}

/// Eliminates the variables in `order`, then any remaining non-kept ones.
pub fn eliminate_in_order(sys: &RateSystem, order: &[RateVar], keep: &[RateVar]) -> RateSystem {
    to_system(eliminate_with_order(sys, keep, Some(order)))
}

/// Whether the system (with implicit non-negativity) has a solution, up to `tol`.
pub fn is_feasible(sys: &RateSystem, tol: f64) -> bool {
    let rows = eliminate_with_order(sys, &[], None);
    rows.iter().all(|r| !r.is_constant() || r.b >= -tol)
}

/// Drops constraints implied by the others.
///
/// Systems over `{R1, R2}` use exact vertex maximization; larger systems
/// certify each removal by infeasibility of the row's violation with slack
/// [`GEOM_TOL`].
pub fn remove_redundant(sys: &RateSystem) -> RateSystem {
    let vars = sys.variables();
    if vars.iter().all(|v| matches!(v, RateVar::R1 | RateVar::R2)) {
        let (rows, eqs) = rows_of(sys);
        if eqs.is_empty() {
            let rows = reduce_2d(rows.iter().map(|r| (r.a, r.b)).collect());
            return RateSystem::new(
                rows.into_iter()
                    .map(|(a, b)| Row { a, b, hist: 0 }.into_constraint())
                    .collect(),
            );
        }
    }
    let mut kept = sys.constraints.clone();
    let mut i = 0;
    while i < kept.len() {
        let c = &kept[i];
        if c.sense == Sense::Eq {
            i += 1;
            continue;
        }
        let mut others: Vec<LinearConstraint> = kept
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, c)| c.clone())
            .collect();
        let violated = match c.sense {
            Sense::Le => LinearConstraint {
                sense: Sense::Ge,
                rhs: c.rhs + GEOM_TOL,
                ..c.clone()
            },
            _ => LinearConstraint {
                sense: Sense::Le,
                rhs: c.rhs - GEOM_TOL,
                ..c.clone()
            },
        };
        others.push(violated);
        if is_feasible(&RateSystem::new(others), 1e-12) {
            i += 1;
        } else {
            kept.remove(i);
        }
    }
    RateSystem::new(kept)
}

/// Substitutes the rate split, eliminates everything but `R1`, `R2`, and
/// returns the reduced 2-D region.
pub fn project_to_r1_r2(sys: &RateSystem) -> Result<RatePolytope2D, PolytopeError> {
    use RateVar::*;
    let vars = sys.variables();
    let mut full = sys.clone();
    if vars.contains(&R1c) || vars.contains(&R1pb) {
        full.push(LinearConstraint::new(
            &[(R1, 1), (R1c, -1), (R1pb, -1)],
            Sense::Eq,
            0.0,
        ));
    }
    if vars.contains(&R2c) || vars.contains(&R2pa) || vars.contains(&R2pb) {
        full.push(LinearConstraint::new(
            &[(R2, 1), (R2c, -1), (R2pa, -1), (R2pb, -1)],
            Sense::Eq,
            0.0,
        ));
    }
    let projected = eliminate_all(&full, &[R1, R2]);
    RatePolytope2D::new(projected.constraints)
}

// ---------------------------------------------------------------------------
// 2-D geometry

type Row2 = (Coeffs, f64);

fn ab(a: &Coeffs) -> (f64, f64) {
    (
        a[RateVar::R1.index()].to_f64().unwrap_or(0.0),
        a[RateVar::R2.index()].to_f64().unwrap_or(0.0),
    )
}

/// Vertices of `{x ≥ 0, a·x ≤ b}` or `None` if unbounded. Empty regions give
/// `Some(vec![])`.
fn vertices_of(rows: &[(f64, f64, f64)]) -> Option<Vec<(f64, f64)>> {
    let mut lines: Vec<(f64, f64, f64)> = rows.to_vec();
    lines.push((-1.0, 0.0, 0.0));
    lines.push((0.0, -1.0, 0.0));
    let feasible = |x: f64, y: f64| {
        x >= -GEOM_TOL
            && y >= -GEOM_TOL
            && rows
                .iter()
                .all(|&(a1, a2, b)| a1 * x + a2 * y <= b + GEOM_TOL)
    };
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, a2, b) = lines[i];
            let (c1, c2, d) = lines[j];
            let det = a1 * c2 - a2 * c1;
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (b * c2 - a2 * d) / det;
            let y = (a1 * d - b * c1) / det;
            if feasible(x, y) {
                pts.push((clean(x), clean(y)));
            }
        }
    }
    if pts.is_empty() {
        return Some(vec![]);
    }
    let mut dirs = vec![(1.0, 0.0), (0.0, 1.0)];
    for &(a1, a2, _) in rows {
        dirs.push((a2, -a1));
        dirs.push((-a2, a1));
    }
    for (dx, dy) in dirs {
        if dx < 0.0 || dy < 0.0 || (dx == 0.0 && dy == 0.0) {
            continue;
        }
        if rows.iter().all(|&(a1, a2, _)| a1 * dx + a2 * dy <= 1e-12) {
            return None;
        }
    }
    Some(convex_hull(pts))
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-13 {
        0.0
    } else {
        v
    }
}

/// Andrew's monotone chain; ccw, starting at the lexicographically smallest
/// point, collinear points removed.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    pts.dedup_by(|p, q| (p.0 - q.0).abs() <= GEOM_TOL && (p.1 - q.1).abs() <= GEOM_TOL);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-12 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-12 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Sequential 2-D redundancy removal. Constant rows are dropped when
/// satisfied; an infeasible constant row empties the region, so rows are
/// then returned untouched.
fn reduce_2d(rows: Vec<Row2>) -> Vec<Row2> {
    let rows = {
        let dedup_rows = dedup(
            rows.into_iter()
                .map(|(a, b)| Row { a, b, hist: 0 })
                .collect::<Vec<_>>(),
        );
        dedup_rows
            .into_iter()
            .map(|r| (r.a, r.b))
            .collect::<Vec<_>>()
    };
    if rows
        .iter()
        .any(|(a, b)| a.iter().all(Zero::is_zero) && *b < -GEOM_TOL)
    {
        return rows;
    }
    let mut kept: Vec<Row2> = rows
        .into_iter()
        .filter(|(a, _)| !a.iter().all(Zero::is_zero))
        .collect();
    let floats = |rs: &[Row2]| -> Vec<(f64, f64, f64)> {
        rs.iter().map(|(a, b)| (ab(a).0, ab(a).1, *b)).collect()
    };
    if matches!(vertices_of(&floats(&kept)), Some(v) if v.is_empty()) {
        return kept;
    }
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Row2> = kept
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| *r)
            .collect();
        let (a1, a2) = ab(&kept[i].0);
        let redundant = match vertices_of(&floats(&others)) {
            Some(vs) if !vs.is_empty() => {
                vs.iter()
                    .map(|&(x, y)| a1 * x + a2 * y)
                    .fold(f64::NEG_INFINITY, f64::max)
                    <= kept[i].1 + GEOM_TOL
            }
            _ => false,
        };
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// A projected rate region `{R1, R2 ≥ 0, a·R ≤ b}` with cached vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct RatePolytope2D {
    constraints: Vec<LinearConstraint>,
    vertices: Vec<(f64, f64)>,
}

impl RatePolytope2D {
    /// Builds a reduced region from constraints over `R1`, `R2` only.
    pub fn new(constraints: Vec<LinearConstraint>) -> Result<Self, PolytopeError> {
        Self::build(constraints, true)
    }

    /// Like [`RatePolytope2D::new`] but keeps every non-constant row.
    pub fn without_reduction(constraints: Vec<LinearConstraint>) -> Result<Self, PolytopeError> {
        Self::build(constraints, false)
    }

    fn build(constraints: Vec<LinearConstraint>, reduce: bool) -> Result<Self, PolytopeError> {
        let mut rows: Vec<Row2> = Vec::new();
        for c in &constraints {
            if let Some(v) = c
                .coeffs
                .keys()
                .find(|v| !matches!(v, RateVar::R1 | RateVar::R2))
            {
                return Err(PolytopeError::NotTwoDimensional(*v));
            }
            let mut push = |negate: bool| {
                let r = Row::from_constraint(c, negate);
                rows.push((r.a, r.b));
            };
            match c.sense {
                Sense::Le => push(false),
                Sense::Ge => push(true),
                Sense::Eq => {
                    push(false);
                    push(true);
                }
            }
        }
        let empty_const = rows
            .iter()
            .any(|(a, b)| a.iter().all(Zero::is_zero) && *b < -GEOM_TOL);
        let rows = if reduce {
            reduce_2d(rows)
        } else {
            rows.into_iter()
                .filter(|(a, b)| !a.iter().all(Zero::is_zero) || *b < -GEOM_TOL)
                .collect()
        };
        let constraints: Vec<LinearConstraint> = rows
            .iter()
            .map(|(a, b)| {
                Row {
                    a: *a,
                    b: *b,
                    hist: 0,
                }
                .into_constraint()
            })
            .collect();
        if empty_const {
            return Ok(RatePolytope2D {
                constraints,
                vertices: vec![],
            });
        }
        let floats: Vec<(f64, f64, f64)> =
            rows.iter().map(|(a, b)| (ab(a).0, ab(a).1, *b)).collect();
        let vertices = vertices_of(&floats).ok_or(PolytopeError::Unbounded)?;
        Ok(RatePolytope2D {
            constraints,
            vertices,
        })
    }

    /// The empty region.
    pub fn empty() -> Self {
        RatePolytope2D {
            constraints: vec![LinearConstraint::le(&[], -1.0)],
            vertices: vec![],
        }
    }

    /// Constraints in `≤` form.
    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Point membership with slack `tol`.
    pub fn contains_point(&self, p: (f64, f64), tol: f64) -> bool {
        if self.is_empty() || p.0 < -tol || p.1 < -tol {
            return false;
        }
        self.constraints
            .iter()
            .all(|c| c.coeff_f64(RateVar::R1) * p.0 + c.coeff_f64(RateVar::R2) * p.1 <= c.rhs + tol)
    }

    /// `max λR1 + (1-λ)R2` and a maximizing vertex (first found on ties).
    pub fn support(&self, lambda: f64) -> Option<((f64, f64), f64)> {
        let mut best: Option<((f64, f64), f64)> = None;
        for &(x, y) in &self.vertices {
            let v = lambda * x + (1.0 - lambda) * y;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some(((x, y), v));
            }
        }
        best
    }

    /// Right-hand side of the row whose coefficients are `(a1, a2)`, if present.
    pub fn rhs_of(&self, a1: i64, a2: i64) -> Option<f64> {
        let want = LinearConstraint::le(&[(RateVar::R1, a1), (RateVar::R2, a2)], 0.0).coeffs;
        self.constraints
            .iter()
            .find(|c| c.coeffs == want)
            .map(|c| c.rhs)
    }

    /// Vertex sets agree within `tol`.
    pub fn same_vertices(&self, other: &RatePolytope2D, tol: f64) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(p, q)| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let constraints: Vec<serde_json::Value> = self
            .constraints
            .iter()
            .map(|c| {
                serde_json::json!({
                    "coeffs": {"R1": c.coeff_f64(RateVar::R1), "R2": c.coeff_f64(RateVar::R2)},
                    "sense": c.sense.to_string(),
                    "rhs": c.rhs,
                })
            })
            .collect();
        let vertices: Vec<[f64; 2]> = self.vertices.iter().map(|&(x, y)| [x, y]).collect();
        let mut v = serde_json::json!({"constraints": constraints, "vertices": vertices});
        round_json(&mut v);
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("json values serialize")
    }
}

/// `true` iff every vertex of `inner` satisfies every row of `outer` with
/// slack `≥ -1e-9`. An empty `inner` is contained in anything.
pub fn contains(outer: &RatePolytope2D, inner: &RatePolytope2D) -> bool {
    contains_with_tol(outer, inner, GEOM_TOL)
}

pub fn contains_with_tol(outer: &RatePolytope2D, inner: &RatePolytope2D, tol: f64) -> bool {
    inner.vertices.iter().all(|&p| outer.contains_point(p, tol))
}

pub fn vertices_2d(poly: &RatePolytope2D) -> Vec<(f64, f64)> {
    poly.vertices.clone()
}

/// One sampled point of the upper concave envelope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierSample {
    pub lambda: f64,
    pub point: (f64, f64),
    pub value: f64,
    /// Index of the maximizing region in the input list.
    pub region: usize,
}

/// For each weight, the best `λR1 + (1-λ)R2` over all regions.
pub fn union_frontier(
    polys: &[RatePolytope2D],
    weights: &[f64],
) -> Result<Vec<FrontierSample>, PolytopeError> {
    weights
        .iter()
        .map(|&lambda| {
            let mut best: Option<FrontierSample> = None;
            for (region, p) in polys.iter().enumerate() {
                if let Some((point, value)) = p.support(lambda) {
                    if best.is_none_or(|b| value > b.value) {
                        best = Some(FrontierSample {
                            lambda,
                            point,
                            value,
                            region,
                        });
                    }
                }
            }
            best.ok_or(PolytopeError::EmptyRegion)
        })
        .collect()
}

/// `n` evenly spaced weights in `[0, 1]`.
pub fn linspace_weights(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Frontier CSV with header `lambda,R1,R2,value`.
pub fn frontier_csv(points: &[FrontierSample]) -> String {
    let mut s = String::from("lambda,R1,R2,value\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(p.lambda),
            fmt_num(p.point.0),
            fmt_num(p.point.1),
            fmt_num(p.value)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use RateVar::*;

    fn region(rows: &[(&[(RateVar, i64)], f64)]) -> RatePolytope2D {
        RatePolytope2D::new(
            rows.iter()
                .map(|(t, b)| LinearConstraint::le(t, *b))
                .collect(),
        )
        .unwrap()
    }

    fn example_one() -> RatePolytope2D {
        region(&[
            (&[(R1, 1)], 2.0),
            (&[(R2, 1)], 3.0),
            (&[(R1, 1), (R2, 1)], 4.0),
        ])
    }

    #[test]
    fn single_pair_elimination_gives_constant_row() {
        let sys = RateSystem::new(vec![LinearConstraint::le(&[(R2c, 1)], 0.7)]);
        let out = fme_eliminate(&sys, R2c).unwrap();
        assert_eq!(out.constraints, vec![LinearConstraint::le(&[], 0.7)]);
    }

    #[test]
    fn hand_projection() {
        let sys = RateSystem::new(vec![
            LinearConstraint::le(&[(R1, 1), (R2c, 1)], 4.0),
            LinearConstraint::ge(&[(R2c, 1)], 1.0),
        ]);
        let out = fme_eliminate(&sys, R2c).unwrap();
        assert!(out
            .constraints
            .contains(&LinearConstraint::le(&[(R1, 1)], 3.0)));
        assert!(out.variables().iter().all(|v| *v == R1));
    }

    #[test]
    fn unknown_variable() {
        let sys = RateSystem::new(vec![LinearConstraint::le(&[(R1, 1)], 1.0)]);
        assert_eq!(
            fme_eliminate(&sys, R2),
            Err(PolytopeError::UnknownVariable(R2))
        );
    }

    #[test]
    fn redundancy_examples() {
        let sys = RateSystem::new(vec![
            LinearConstraint::le(&[(R1, 1)], 1.0),
            LinearConstraint::le(&[(R1, 1)], 2.0),
        ]);
        assert_eq!(
            remove_redundant(&sys).constraints,
            vec![LinearConstraint::le(&[(R1, 1)], 1.0)]
        );

        let boxed = RateSystem::new(vec![
            LinearConstraint::le(&[(R1, 1)], 2.0),
            LinearConstraint::le(&[(R2, 1)], 3.0),
            LinearConstraint::le(&[(R1, 1), (R2, 1)], 6.0),
        ]);
        assert_eq!(remove_redundant(&boxed).constraints.len(), 2);

        let active = RateSystem::new(vec![
            LinearConstraint::le(&[(R1, 1)], 2.0),
            LinearConstraint::le(&[(R2, 1)], 3.0),
            LinearConstraint::le(&[(R1, 1), (R2, 1)], 4.0),
        ]);
        assert_eq!(remove_redundant(&active).constraints.len(), 3);
    }

    #[test]
    fn n_dimensional_redundancy() {
        let sys = RateSystem::new(vec![
            LinearConstraint::le(&[(R1c, 1)], 1.0),
            LinearConstraint::le(&[(R1pb, 1)], 1.0),
            LinearConstraint::le(&[(R1c, 1), (R1pb, 1)], 3.0),
            LinearConstraint::le(&[(R1c, 1), (R1pb, 1)], 1.5),
        ]);
        let out = remove_redundant(&sys);
        assert_eq!(out.constraints.len(), 3);
        assert!(!out
            .constraints
            .contains(&LinearConstraint::le(&[(R1c, 1), (R1pb, 1)], 3.0)));
    }

    #[test]
    fn projection_of_split_box() {
        let sys = RateSystem::new(vec![
            LinearConstraint::sum(&[R1c, R1pb], Sense::Le, 2.0),
            LinearConstraint::sum(&[R2c, R2pa, R2pb], Sense::Le, 3.0),
        ]);
        let p = project_to_r1_r2(&sys).unwrap();
        assert_eq!(
            p.vertices(),
            &[(0.0, 0.0), (2.0, 0.0), (2.0, 3.0), (0.0, 3.0)]
        );
        assert_eq!(p.rhs_of(1, 0), Some(2.0));
        assert_eq!(p.rhs_of(0, 1), Some(3.0));
        assert_eq!(p.constraints().len(), 2);
    }

    #[test]
    fn projection_of_zero_system() {
        let sys = RateSystem::new(vec![
            LinearConstraint::sum(&[R1c, R1pb], Sense::Le, 0.0),
            LinearConstraint::sum(&[R2c, R2pa, R2pb], Sense::Le, 0.0),
            LinearConstraint::sum(&[R1cP], Sense::Eq, 0.0),
        ]);
        let p = project_to_r1_r2(&sys).unwrap();
        assert_eq!(p.vertices(), &[(0.0, 0.0)]);
    }

    #[test]
    fn unbounded_projection() {
        let sys = RateSystem::new(vec![LinearConstraint::sum(&[R1c, R1pb], Sense::Le, 2.0)]);
        assert!(matches!(
            project_to_r1_r2(&sys),
            Err(PolytopeError::Unbounded)
        ));
    }

    #[test]
    fn infeasible_system_is_empty_region() {
        let sys = RateSystem::new(vec![
            LinearConstraint::le(&[(R1, 1)], 1.0),
            LinearConstraint::le(&[(R2, 1)], 1.0),
            LinearConstraint::ge(&[(R1, 1), (R2, 1)], 3.0),
        ]);
        let p = project_to_r1_r2(&sys).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn vertex_examples() {
        assert_eq!(
            example_one().vertices(),
            &[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 3.0), (0.0, 3.0)]
        );
        let b = region(&[(&[(R1, 1)], 1.0), (&[(R2, 1)], 2.0)]);
        assert_eq!(
            b.vertices(),
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 2.0), (0.0, 2.0)]
        );
        let z = region(&[(&[(R1, 1)], 0.0), (&[(R2, 1)], 0.0)]);
        assert_eq!(z.vertices(), &[(0.0, 0.0)]);
    }

    #[test]
    fn containment() {
        let e1 = example_one();
        assert!(contains(&e1, &e1));
        let small = region(&[(&[(R1, 1)], 1.0), (&[(R2, 1)], 2.0)]);
        assert!(contains(&e1, &small));
        assert!(!contains(&small, &e1));
        let wide = region(&[(&[(R1, 1)], 3.0), (&[(R2, 1)], 0.0)]);
        assert!(!contains(&e1, &wide));
        assert!(contains(&small, &RatePolytope2D::empty()));
    }

    #[test]
    fn frontier_examples() {
        let b = region(&[(&[(R1, 1)], 1.0), (&[(R2, 1)], 2.0)]);
        let f = union_frontier(&[b], &[0.5]).unwrap();
        assert_eq!(f[0].value, 1.5);
        assert_eq!(f[0].point, (1.0, 2.0));

        let a = region(&[(&[(R1, 1)], 2.0), (&[(R2, 1)], 0.0)]);
        let c = region(&[(&[(R1, 1)], 0.0), (&[(R2, 1)], 3.0)]);
        let f = union_frontier(&[a, c], &[0.5]).unwrap();
        assert_eq!(f[0].value, 1.5);

        let f = union_frontier(&[example_one()], &[0.5]).unwrap();
        assert_eq!(f[0].value, 2.0);
        assert!(f[0].point == (2.0, 2.0) || f[0].point == (1.0, 3.0));

        assert_eq!(
            union_frontier(&[RatePolytope2D::empty()], &[0.5]),
            Err(PolytopeError::EmptyRegion)
        );
    }

    #[test]
    fn json_export_shape() {
        let v = example_one().to_json_value();
        assert_eq!(v["constraints"][2]["coeffs"]["R1"], 1);
        assert_eq!(v["constraints"][2]["sense"], "<=");
        assert_eq!(v["vertices"][3], serde_json::json!([1, 3]));
    }

    #[test]
    fn csv_export() {
        let f = union_frontier(&[example_one()], &[0.0, 1.0]).unwrap();
        assert_eq!(frontier_csv(&f), "lambda,R1,R2,value\n0,1,3,3\n1,2,0,2\n");
    }

    #[test]
    fn rational_rows_are_normalized() {
        let sys = RateSystem::new(vec![LinearConstraint::le(&[(R1, 2), (R2, 4)], 2.0)]);
        let c = &remove_redundant(&sys).constraints[0];
        assert_eq!(c.coeff(R1), Rational64::from_integer(1));
        assert_eq!(c.coeff(R2), Rational64::from_integer(2));
        assert_eq!(c.rhs, 1.0);
    }
}
