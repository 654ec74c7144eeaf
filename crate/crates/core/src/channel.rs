//! Channel kernels `p(y1,y2|x1,x2)` and the built-in example channels.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::prob::{JointPmf, Role};
use thiserror::Error;

/// Maximum deviation of a kernel row sum from one.
pub const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("kernel row (x1={x1}, x2={x2}) is not stochastic (sum {sum})")]
    RowNotStochastic { x1: usize, x2: usize, sum: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown built-in channel '{0}'")]
    UnknownName(String),
    #[error("channel JSON parse error: {0}")]
    ParseError(#[from] serde_json::Error),
    #[error("channel JSON schema violation: {0}")]
    SchemaViolation(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cards {
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
}

impl Cards {
    fn validate(&self) -> Result<(), ChannelError> {
        if self.x1 == 0 || self.x2 == 0 || self.y1 == 0 || self.y2 == 0 {
            return Err(ChannelError::ShapeMismatch(format!(
                "all cardinalities must be positive, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Dense DM-CIFC kernel, stored row-major as `[x1][x2][y1][y2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CifcChannel {
    cards: Cards,
    kernel: Vec<f64>,
}

impl CifcChannel {
    /// Validates a flat `[x1][x2][y1][y2]` kernel.
    pub fn from_kernel(kernel: Vec<f64>, cards: Cards) -> Result<Self, ChannelError> {
        cards.validate()?;
        let expected = cards.x1 * cards.x2 * cards.y1 * cards.y2;
        if kernel.len() != expected {
            return Err(ChannelError::ShapeMismatch(format!(
                "kernel has {} entries, cards imply {expected}",
                kernel.len()
            )));
        }
        let ny = cards.y1 * cards.y2;
        for x1 in 0..cards.x1 {
            for x2 in 0..cards.x2 {
                let start = (x1 * cards.x2 + x2) * ny;
                let row = &kernel[start..start + ny];
                let sum: f64 = row.iter().sum();
                let negative = row.iter().any(|v| !v.is_finite() || *v < 0.0);
                if negative || (sum - 1.0).abs() > ROW_TOLERANCE {
                    return Err(ChannelError::RowNotStochastic { x1, x2, sum });
                }
            }
        }
        Ok(CifcChannel { cards, kernel })
    }

    /// Deterministic channel `y1 = f1(x1,x2)`, `y2 = f2(x1,x2)`.
    pub fn from_maps(
        cards: Cards,
        f1: impl Fn(usize, usize) -> usize,
        f2: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, ChannelError> {
        cards.validate()?;
        let ny = cards.y1 * cards.y2;
        let mut kernel = vec![0.0; cards.x1 * cards.x2 * ny];
        for x1 in 0..cards.x1 {
            for x2 in 0..cards.x2 {
                let (y1, y2) = (f1(x1, x2), f2(x1, x2));
                if y1 >= cards.y1 || y2 >= cards.y2 {
                    return Err(ChannelError::ShapeMismatch(format!(
                        "map output ({y1},{y2}) at ({x1},{x2}) outside output alphabets"
                    )));
                }
                kernel[(x1 * cards.x2 + x2) * ny + y1 * cards.y2 + y2] = 1.0;
            }
        }
        CifcChannel::from_kernel(kernel, cards)
    }

    /// Kernel from a function of `(x1, x2, y1, y2)`.
    pub fn from_fn(
        cards: Cards,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self, ChannelError> {
        cards.validate()?;
        let mut kernel = Vec::with_capacity(cards.x1 * cards.x2 * cards.y1 * cards.y2);
        for x1 in 0..cards.x1 {
            for x2 in 0..cards.x2 {
                for y1 in 0..cards.y1 {
                    for y2 in 0..cards.y2 {
                        kernel.push(f(x1, x2, y1, y2));
                    }
                }
            }
        }
        CifcChannel::from_kernel(kernel, cards)
    }

    pub fn cards(&self) -> Cards {
        self.cards
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// Row `p(·,·|x1,x2)` laid out as `[y1][y2]`.
    pub fn row(&self, x1: usize, x2: usize) -> &[f64] {
        let ny = self.cards.y1 * self.cards.y2;
        let start = (x1 * self.cards.x2 + x2) * ny;
        &self.kernel[start..start + ny]
    }

    pub fn prob(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
        self.row(x1, x2)[y1 * self.cards.y2 + y2]
    }

    /// `p(y1|x1,x2)`
    pub fn y1_marginal(&self, x1: usize, x2: usize) -> Vec<f64> {
        let row = self.row(x1, x2);
        (0..self.cards.y1)
            .map(|y1| {
                row[y1 * self.cards.y2..(y1 + 1) * self.cards.y2]
                    .iter()
                    .sum()
            })
            .collect()
    }

    /// `p(y2|x1,x2)`
    pub fn y2_marginal(&self, x1: usize, x2: usize) -> Vec<f64> {
        let row = self.row(x1, x2);
        (0..self.cards.y2)
            .map(|y2| {
                (0..self.cards.y1)
                    .map(|y1| row[y1 * self.cards.y2 + y2])
                    .sum()
            })
            .collect()
    }

    fn marginal_map(&self, which: impl Fn(usize, usize) -> Vec<f64>) -> Option<Vec<Vec<usize>>> {
        let mut out = vec![vec![0usize; self.cards.x2]; self.cards.x1];
        for (x1, line) in out.iter_mut().enumerate() {
            for (x2, slot) in line.iter_mut().enumerate() {
                let m = which(x1, x2);
                // single-point support (the row sum is validated separately)
                let mut nz = m.iter().enumerate().filter(|(_, &v)| v > 0.0);
                let (y, _) = nz.next()?;
                if nz.next().is_some() {
                    return None;
                }
                *slot = y;
            }
        }
        Some(out)
    }

    /// `f1` as a table `[x1][x2]` when `Y1` is deterministic.
    pub fn f1(&self) -> Option<Vec<Vec<usize>>> {
        self.marginal_map(|a, b| self.y1_marginal(a, b))
    }

    /// `f2` as a table `[x1][x2]` when `Y2` is deterministic.
    pub fn f2(&self) -> Option<Vec<Vec<usize>>> {
        self.marginal_map(|a, b| self.y2_marginal(a, b))
    }

    pub fn is_semideterministic(&self) -> bool {
        self.f1().is_some()
    }

    pub fn is_deterministic(&self) -> bool {
        self.is_semideterministic() && self.f2().is_some()
    }

    pub fn builtin(name: &str) -> Result<Self, ChannelError> {
        Ok(name.parse::<BuiltinChannel>()?.channel())
    }

    pub fn to_json(&self) -> Result<String, ChannelError> {
        let doc = match (self.f1(), self.f2()) {
            (Some(f1), Some(f2)) => ChannelDoc {
                card: self.cards,
                kernel: None,
                maps: Some(Maps { f1, f2 }),
            },
            _ => ChannelDoc {
                card: self.cards,
                kernel: Some(self.nested_kernel()),
                maps: None,
            },
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ChannelError> {
        let doc: ChannelDoc = serde_json::from_str(text)?;
        doc.into_channel()
    }

    pub fn save(&self, mut sink: impl Write) -> Result<(), ChannelError> {
        sink.write_all(self.to_json()?.as_bytes())?;
        sink.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(mut source: impl Read) -> Result<Self, ChannelError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    fn nested_kernel(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let c = self.cards;
        (0..c.x1)
            .map(|x1| {
                (0..c.x2)
                    .map(|x2| {
                        let row = self.row(x1, x2);
                        row.chunks(c.y2).map(<[f64]>::to_vec).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct Maps {
    f1: Vec<Vec<usize>>,
    f2: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelDoc {
    card: Cards,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<Vec<Vec<Vec<Vec<f64>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    maps: Option<Maps>,
}

impl ChannelDoc {
    fn into_channel(self) -> Result<CifcChannel, ChannelError> {
        let c = self.card;
        c.validate()
            .map_err(|e| ChannelError::SchemaViolation(e.to_string()))?;
        match (self.kernel, self.maps) {
            (Some(_), Some(_)) => Err(ChannelError::SchemaViolation(
                "exactly one of \"kernel\" and \"maps\" must be given, found both".into(),
            )),
            (None, None) => Err(ChannelError::SchemaViolation(
                "exactly one of \"kernel\" and \"maps\" must be given, found neither".into(),
            )),
            (Some(k), None) => {
                let shape_ok = k.len() == c.x1
                    && k.iter().all(|a| {
                        a.len() == c.x2
                            && a.iter()
                                .all(|b| b.len() == c.y1 && b.iter().all(|r| r.len() == c.y2))
                    });
                if !shape_ok {
                    return Err(ChannelError::SchemaViolation(
                        "\"kernel\" shape does not match \"card\"".into(),
                    ));
                }
                let flat = k.into_iter().flatten().flatten().flatten().collect();
                CifcChannel::from_kernel(flat, c)
            }
            (None, Some(m)) => {
                let shape_ok = |t: &Vec<Vec<usize>>, bound: usize| {
                    t.len() == c.x1
                        && t.iter()
                            .all(|r| r.len() == c.x2 && r.iter().all(|&v| v < bound))
                };
                if !shape_ok(&m.f1, c.y1) || !shape_ok(&m.f2, c.y2) {
                    return Err(ChannelError::SchemaViolation(
                        "\"maps\" shape or values do not match \"card\"".into(),
                    ));
                }
                CifcChannel::from_maps(c, |a, b| m.f1[a][b], |a, b| m.f2[a][b])
            }
        }
    }
}

/// The two example channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinChannel {
    /// `Y1 = X1 ⊕4 X2`, `Y2 = 1{2,3}(X1) ⊕8 X2`.
    AsymmetricClipper,
    /// `Y1 = 1{1,2}(X1) ⊕2 1{1,2}(X2)`, `Y2 = 1{0,1}(X1) + X2`.
    SymmetricClipper,
}

impl BuiltinChannel {
    pub const ALL: [BuiltinChannel; 2] = [
        BuiltinChannel::AsymmetricClipper,
        BuiltinChannel::SymmetricClipper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinChannel::AsymmetricClipper => "asymmetric_clipper",
            BuiltinChannel::SymmetricClipper => "symmetric_clipper",
        }
    }

    pub fn cards(self) -> Cards {
        match self {
            BuiltinChannel::AsymmetricClipper => Cards {
                x1: 4,
                x2: 8,
                y1: 4,
                y2: 8,
            },
            BuiltinChannel::SymmetricClipper => Cards {
                x1: 4,
                x2: 3,
                y1: 2,
                y2: 4,
            },
        }
    }

    /// Closed-form outputs `(y1, y2)`.
    pub fn eval(self, x1: usize, x2: usize) -> (usize, usize) {
        let ind = |x: usize, set: &[usize]| usize::from(set.contains(&x));
        match self {
            BuiltinChannel::AsymmetricClipper => ((x1 + x2) % 4, (ind(x1, &[2, 3]) + x2) % 8),
            BuiltinChannel::SymmetricClipper => (
                (ind(x1, &[1, 2]) + ind(x2, &[1, 2])) % 2,
                ind(x1, &[0, 1]) + x2,
            ),
        }
    }

    pub fn channel(self) -> CifcChannel {
        CifcChannel::from_maps(
            self.cards(),
            |a, b| self.eval(a, b).0,
            |a, b| self.eval(a, b).1,
        )
        .expect("built-in maps stay inside their alphabets")
    }
}

/// The eight-cell input law paired with the symmetric clipper: mass 1/8 on
/// `x2 = 0` for every `x1`, and on `x2 ∈ {1, 2}` for `x1 ∈ {0, 1}`.
pub fn example_two_input() -> JointPmf {
    JointPmf::from_fn(&[(Role::X1, 4), (Role::X2, 3)], |i| {
        if i[1] == 0 || i[0] < 2 {
            0.125
        } else {
            0.0
        }
    })
    .expect("table sums to one")
}

impl fmt::Display for BuiltinChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinChannel {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinChannel::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| ChannelError::UnknownName(s.to_string()))
    }
}
