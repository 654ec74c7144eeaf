//! Single-letter zero-error codes for the example channels.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::channel::{BuiltinChannel, CifcChannel};
use crate::prob::{JointPmf, Role};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("zero-error verification needs a deterministic channel")]
    NotDeterministic,
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid scheme table: {0}")]
    InvalidTable(String),
    #[error("unknown scheme '{0}'")]
    UnknownName(String),
}

/// Message sets, encoder and per-receiver decoders of a one-shot code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeTable {
    name: String,
    m1: usize,
    m2: usize,
    /// `(x1, x2)` for message pair `(w1, w2)` at index `w1 * m2 + w2`.
    enc: Vec<(usize, usize)>,
    dec1: Vec<usize>,
    dec2: Vec<usize>,
}

impl SchemeTable {
    /// Checks table sizes and that `x2` depends on `w2` only.
    pub fn new(
        name: &str,
        m1: usize,
        m2: usize,
        enc: Vec<(usize, usize)>,
        dec1: Vec<usize>,
        dec2: Vec<usize>,
    ) -> Result<Self, SchemeError> {
        if m1 == 0 || m2 == 0 {
            return Err(SchemeError::InvalidTable(
                "message sets must be non-empty".into(),
            ));
        }
        if enc.len() != m1 * m2 {
            return Err(SchemeError::InvalidTable(format!(
                "encoder has {} entries, expected {}",
                enc.len(),
                m1 * m2
            )));
        }
        for w2 in 0..m2 {
            let x2 = enc[w2].1;
            if let Some(w1) = (0..m1).find(|&w1| enc[w1 * m2 + w2].1 != x2) {
                return Err(SchemeError::InvalidTable(format!(
                    "x2 changes with w1 at (w1={w1}, w2={w2})"
                )));
            }
        }
        Ok(SchemeTable {
            name: name.into(),
            m1,
            m2,
            enc,
            dec1,
            dec2,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn messages(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    /// `(log2 m1, log2 m2)`
    pub fn rates(&self) -> (f64, f64) {
        ((self.m1 as f64).log2(), (self.m2 as f64).log2())
    }

    pub fn encode(&self, w1: usize, w2: usize) -> (usize, usize) {
        self.enc[w1 * self.m2 + w2]
    }

    /// Decoded messages, `None` when an output is outside a decoder table.
    pub fn decode(&self, y1: usize, y2: usize) -> (Option<usize>, Option<usize>) {
        (self.dec1.get(y1).copied(), self.dec2.get(y2).copied())
    }

    /// Input law induced by uniform, independent messages.
    pub fn induced_input(&self, x1: usize, x2: usize) -> Result<JointPmf, SchemeError> {
        let mut t = vec![0.0; x1 * x2];
        let w = 1.0 / (self.m1 * self.m2) as f64;
        for &(a, b) in &self.enc {
            if a >= x1 || b >= x2 {
                return Err(SchemeError::AlphabetMismatch(format!(
                    "input ({a}, {b}) out of range"
                )));
            }
            t[a * x2 + b] += w;
        }
        JointPmf::from_table(t, &[(Role::X1, x1), (Role::X2, x2)])
            .map_err(|e| SchemeError::InvalidTable(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub w1: usize,
    pub w2: usize,
    pub x1: usize,
    pub x2: usize,
    pub y1: usize,
    pub y2: usize,
    pub w1_hat: Option<usize>,
    pub w2_hat: Option<usize>,
}

impl TableRow {
    pub fn correct(&self) -> bool {
        self.w1_hat == Some(self.w1) && self.w2_hat == Some(self.w2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub ok: bool,
    pub rates: (f64, f64),
    /// Rows decoded incorrectly.
    pub failures: Vec<TableRow>,
    /// Distinct message pairs sent with the same input pair.
    pub collisions: Vec<((usize, usize), (usize, usize))>,
}

fn check_channel(
    ch: &CifcChannel,
    s: &SchemeTable,
) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>), SchemeError> {
    let (Some(f1), Some(f2)) = (ch.f1(), ch.f2()) else {
        return Err(SchemeError::NotDeterministic);
    };
    let c = ch.cards();
    if let Some(&(a, b)) = s.enc.iter().find(|&&(a, b)| a >= c.x1 || b >= c.x2) {
        return Err(SchemeError::AlphabetMismatch(format!(
            "input ({a}, {b}) outside {}x{}",
            c.x1, c.x2
        )));
    }
    if s.dec1.len() != c.y1 || s.dec2.len() != c.y2 {
        return Err(SchemeError::AlphabetMismatch(format!(
            "decoders cover {}x{} outputs, channel has {}x{}",
            s.dec1.len(),
            s.dec2.len(),
            c.y1,
            c.y2
        )));
    }
    Ok((f1, f2))
}

/// All message pairs with `w1` in the outer loop, as in the printed tables.
pub fn emit_table(ch: &CifcChannel, s: &SchemeTable) -> Result<Vec<TableRow>, SchemeError> {
    let (f1, f2) = check_channel(ch, s)?;
    let mut rows = Vec::with_capacity(s.m1 * s.m2);
    for w1 in 0..s.m1 {
        for w2 in 0..s.m2 {
            let (x1, x2) = s.encode(w1, w2);
            let (y1, y2) = (f1[x1][x2], f2[x1][x2]);
            let (w1_hat, w2_hat) = s.decode(y1, y2);
            rows.push(TableRow {
                w1,
                w2,
                x1,
                x2,
                y1,
                y2,
                w1_hat,
                w2_hat,
            });
        }
    }
    Ok(rows)
}

/// Exhaustive check that both receivers recover their message for every pair.
pub fn verify_zero_error(ch: &CifcChannel, s: &SchemeTable) -> Result<Verification, SchemeError> {
    let rows = emit_table(ch, s)?;
    let failures: Vec<TableRow> = rows.iter().filter(|r| !r.correct()).copied().collect();
    let mut collisions = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if (a.x1, a.x2) == (b.x1, b.x2) {
                collisions.push(((a.w1, a.w2), (b.w1, b.w2)));
            }
        }
    }
    Ok(Verification {
        ok: failures.is_empty() && collisions.is_empty(),
        rates: s.rates(),
        failures,
        collisions,
    })
}

/// CSV with header `w1,w2,x1,x2,y1,y2,w1_hat,w2_hat`; undecodable outputs
/// are left empty.
pub fn table_csv(rows: &[TableRow]) -> String {
    let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
    let mut s = String::from("w1,w2,x1,x2,y1,y2,w1_hat,w2_hat\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.w1,
            r.w2,
            r.x1,
            r.x2,
            r.y1,
            r.y2,
            opt(r.w1_hat),
            opt(r.w2_hat)
        ));
    }
    s
}

/// Reads a scheme from the CSV layout written by [`table_csv`]. Encoder
/// entries come from the `w1,w2,x1,x2` columns; decoder entries are keyed on
/// the listed outputs, first occurrence wins, and outputs never listed decode
/// to 0. Message sets are sized by the largest listed message.
pub fn scheme_from_csv(
    name: &str,
    text: &str,
    ch: &CifcChannel,
) -> Result<SchemeTable, SchemeError> {
    let bad = |line: usize, what: &str| SchemeError::InvalidTable(format!("line {line}: {what}"));
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |n: &str| cols.iter().position(|c| *c == n);
    let need = |n: &str| col(n).ok_or_else(|| bad(1, &format!("missing column {n}")));
    let (cw1, cw2, cx1, cx2) = (need("w1")?, need("w2")?, need("x1")?, need("x2")?);
    let opt = [col("y1"), col("y2"), col("w1_hat"), col("w2_hat")];

    let mut rows = Vec::new();
    for (i, l) in lines {
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        let get = |c: usize| -> Result<Option<usize>, SchemeError> {
            match f.get(c).copied() {
                None | Some("") => Ok(None),
                Some(v) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| bad(i + 1, &format!("'{v}' is not a symbol index"))),
            }
        };
        let req = |c: usize| get(c)?.ok_or_else(|| bad(i + 1, "missing value"));
        let extra = opt.map(|c| c.map_or(Ok(None), get));
        let [y1, y2, h1, h2] = extra;
        rows.push((
            req(cw1)?,
            req(cw2)?,
            req(cx1)?,
            req(cx2)?,
            y1?,
            y2?,
            h1?,
            h2?,
        ));
    }
    if rows.is_empty() {
        return Err(bad(2, "no rows"));
    }
    let m1 = rows.iter().map(|r| r.0).max().unwrap_or(0) + 1;
    let m2 = rows.iter().map(|r| r.1).max().unwrap_or(0) + 1;
    let mut enc = vec![None; m1 * m2];
    for r in &rows {
        let slot = &mut enc[r.0 * m2 + r.1];
        if slot.is_some() {
            return Err(SchemeError::InvalidTable(format!(
                "message pair ({}, {}) listed twice",
                r.0, r.1
            )));
        }
        *slot = Some((r.2, r.3));
    }
    let enc = enc
        .into_iter()
        .enumerate()
        .map(|(k, e)| {
            e.ok_or_else(|| {
                SchemeError::InvalidTable(format!("message pair ({}, {}) missing", k / m2, k % m2))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let c = ch.cards();
    let mut dec1 = vec![None; c.y1];
    let mut dec2 = vec![None; c.y2];
    for r in &rows {
        if let (Some(y), Some(w)) = (r.4, r.6) {
            if let Some(d) = dec1.get_mut(y) {
                d.get_or_insert(w);
            }
        }
        if let (Some(y), Some(w)) = (r.5, r.7) {
            if let Some(d) = dec2.get_mut(y) {
                d.get_or_insert(w);
            }
        }
    }
    let fill = |d: Vec<Option<usize>>| d.into_iter().map(|v| v.unwrap_or(0)).collect();
    SchemeTable::new(name, m1, m2, enc, fill(dec1), fill(dec2))
}

fn build(
    name: &str,
    m1: usize,
    m2: usize,
    enc: impl Fn(usize, usize) -> (usize, usize),
    dec1: Vec<usize>,
    dec2: Vec<usize>,
) -> SchemeTable {
    let enc = (0..m1)
        .flat_map(|w1| (0..m2).map(move |w2| (w1, w2)))
        .map(|(a, b)| enc(a, b))
        .collect();
    SchemeTable::new(name, m1, m2, enc, dec1, dec2).expect("built-in schemes are well formed")
}

/// Rates (1, 3) on the asymmetric clipper: `x2 = w2`, `x1 = (w1 − w2) mod 2`,
/// receiver 1 reads the parity of `y1`, receiver 2 reads `y2`.
pub fn scheme_clipper_13() -> SchemeTable {
    build(
        "clipper13",
        2,
        8,
        |w1, w2| ((w1 + 2 - w2 % 2) % 2, w2),
        (0..4).map(|y| y % 2).collect(),
        (0..8).collect(),
    )
}

/// Rates (2, 2) on the asymmetric clipper: `x2 = 2·w2`, `x1 = (w1 − x2) mod 4`,
/// receiver 1 reads `y1`, receiver 2 reads `⌊y2/2⌋`.
pub fn scheme_clipper_22() -> SchemeTable {
    build(
        "clipper22",
        4,
        4,
        |w1, w2| ((w1 + 8 - 2 * w2) % 4, 2 * w2),
        (0..4).collect(),
        (0..8).map(|y| y / 2).collect(),
    )
}

/// Rates (1, 2) on the symmetric clipper: `x2 = [w2 − 1]^+` and `x1` is the
/// smallest input that makes `(y1, y2) = (w1, w2)`.
pub fn scheme_symmetric_12() -> SchemeTable {
    let ch = BuiltinChannel::SymmetricClipper;
    build(
        "symmetric12",
        2,
        4,
        |w1, w2| {
            let x2 = w2.saturating_sub(1);
            let x1 = (0..4)
                .find(|&x1| ch.eval(x1, x2) == (w1, w2))
                .expect("every message pair is reachable");
            (x1, x2)
        },
        (0..2).collect(),
        (0..4).collect(),
    )
}

/// Built-in schemes paired with their channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinScheme {
    Clipper13,
    Clipper22,
    Symmetric12,
}

impl BuiltinScheme {
    pub const ALL: [BuiltinScheme; 3] = [
        BuiltinScheme::Clipper13,
        BuiltinScheme::Clipper22,
        BuiltinScheme::Symmetric12,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinScheme::Clipper13 => "clipper13",
            BuiltinScheme::Clipper22 => "clipper22",
            BuiltinScheme::Symmetric12 => "symmetric12",
        }
    }

    pub fn table(self) -> SchemeTable {
        match self {
            BuiltinScheme::Clipper13 => scheme_clipper_13(),
            BuiltinScheme::Clipper22 => scheme_clipper_22(),
            BuiltinScheme::Symmetric12 => scheme_symmetric_12(),
        }
    }

    pub fn channel(self) -> BuiltinChannel {
        match self {
            BuiltinScheme::Symmetric12 => BuiltinChannel::SymmetricClipper,
            _ => BuiltinChannel::AsymmetricClipper,
        }
    }
}

impl fmt::Display for BuiltinScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinScheme {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinScheme::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| SchemeError::UnknownName(s.to_string()))
    }
}
