//! Structure functions and the expression language used to compose them.
//!
//! The three basic multistate structures are series (minimum), parallel
//! (maximum) and k-out-of-n (the `(n-k+1)`-th smallest child level). They nest
//! into trees written in a small DSL:
//!
//! ```text
//! expr := "c" INT
//!       | "series(" expr ("," expr)+ ")"
//!       | "parallel(" expr ("," expr)+ ")"
//!       | "koon(" INT ";" expr ("," expr)* ")"
//! ```
//!
//! Component indices in the DSL are 1-based; whitespace is ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Level, StateVector};

/// A map from component levels to a system level.
///
/// Callers guarantee `x.len() >= self.min_arity()`; the exhaustive checkers do
/// so before evaluating anything.
pub trait StructureFunction {
    fn eval(&self, x: &[Level]) -> Level;

    /// Smallest vector length this function can be evaluated on.
    fn min_arity(&self) -> usize {
        1
    }
}

impl<F: ?Sized> StructureFunction for F
where
    F: Fn(&[Level]) -> Level,
{
    fn eval(&self, x: &[Level]) -> Level {
        self(x)
    }
}

/// The two structures that come with closed-form distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Series,
    Parallel,
}

impl SystemKind {
    /// The structure over components `1..=n`, each used once.
    pub fn expr(self, n: usize) -> Result<StructureExpr> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        if n == 1 {
            return Ok(StructureExpr::Component(1));
        }
        let children = (1..=n).map(StructureExpr::Component).collect();
        Ok(match self {
            SystemKind::Series => StructureExpr::Series(children),
            SystemKind::Parallel => StructureExpr::Parallel(children),
        })
    }
}

impl StructureFunction for SystemKind {
    fn eval(&self, x: &[Level]) -> Level {
        let it = x.iter().copied();
        match self {
            SystemKind::Series => it.min(),
            SystemKind::Parallel => it.max(),
        }
        .expect("structure evaluated on an empty vector")
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Series => "series",
            SystemKind::Parallel => "parallel",
        })
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(SystemKind::Series),
            "parallel" => Ok(SystemKind::Parallel),
            other => Err(Error::parse(
                1,
                format!("expected `series` or `parallel`, found `{other}`"),
            )),
        }
    }
}

/// Minimum level of `x`.
pub fn eval_series(x: &StateVector) -> Result<Level> {
    x.iter().copied().min().ok_or(Error::EmptyVector)
}

/// Maximum level of `x`.
pub fn eval_parallel(x: &StateVector) -> Result<Level> {
    x.iter().copied().max().ok_or(Error::EmptyVector)
}

/// The `(n-k+1)`-th smallest level of `x`.
pub fn eval_k_out_of_n(k: usize, x: &StateVector) -> Result<Level> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    if k == 0 || k > x.len() {
        return Err(Error::InvalidK { k, n: x.len() });
    }
    let mut sorted = x.as_slice().to_vec();
    sorted.sort_unstable();
    Ok(sorted[x.len() - k])
}

/// Expression tree over components. `Component` indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructureExpr {
    Component(usize),
    Series(Vec<StructureExpr>),
    Parallel(Vec<StructureExpr>),
    KOutOfN(usize, Vec<StructureExpr>),
}

impl StructureExpr {
    /// Builds a k-out-of-n node, rejecting `k` outside `1..=children.len()`.
    pub fn k_out_of_n(k: usize, children: Vec<StructureExpr>) -> Result<Self> {
        if k == 0 || k > children.len() {
            return Err(Error::InvalidK { k, n: children.len() });
        }
        Ok(StructureExpr::KOutOfN(k, children))
    }

    /// Largest component index referenced.
    pub fn arity(&self) -> usize {
        match self {
            StructureExpr::Component(i) => *i,
            StructureExpr::Series(cs) | StructureExpr::Parallel(cs) | StructureExpr::KOutOfN(_, cs) => {
                cs.iter().map(StructureExpr::arity).max().unwrap_or(0)
            }
        }
    }

    /// Whether this is a plain series or parallel system over `c1..cn`, each
    /// component used exactly once (a bare `c1` counts as both).
    pub fn basic_kind(&self) -> Option<SystemKind> {
        let children = match self {
            StructureExpr::Component(1) => return Some(SystemKind::Series),
            StructureExpr::Series(cs) | StructureExpr::Parallel(cs) => cs,
            _ => return None,
        };
        let mut seen = vec![false; children.len()];
        for c in children {
            match c {
                StructureExpr::Component(i) if *i >= 1 && *i <= seen.len() && !seen[i - 1] => {
                    seen[i - 1] = true
                }
                _ => return None,
            }
        }
        match self {
            StructureExpr::Series(_) => Some(SystemKind::Series),
            _ => Some(SystemKind::Parallel),
        }
    }

    /// Evaluates on `x`, which must have exactly `arity()` entries.
    pub fn eval_expr(&self, x: &StateVector) -> Result<Level> {
        if x.len() != self.arity() {
            return Err(Error::ArityMismatch {
                arity: self.arity(),
                given: x.len(),
            });
        }
        Ok(self.eval_unchecked(x.as_slice()))
    }

    fn eval_unchecked(&self, x: &[Level]) -> Level {
        match self {
            StructureExpr::Component(i) => x[i - 1],
            StructureExpr::Series(cs) => cs.iter().map(|c| c.eval_unchecked(x)).min().unwrap(),
            StructureExpr::Parallel(cs) => cs.iter().map(|c| c.eval_unchecked(x)).max().unwrap(),
            StructureExpr::KOutOfN(k, cs) => {
                let mut vals: Vec<Level> = cs.iter().map(|c| c.eval_unchecked(x)).collect();
                let pick = vals.len() - k;
                *vals.select_nth_unstable(pick).1
            }
        }
    }

    /// Canonical text; `parse_expr(&e.to_string()) == Ok(e)`.
    pub fn format_expr(&self) -> String {
        self.to_string()
    }
}

impl StructureFunction for StructureExpr {
    fn eval(&self, x: &[Level]) -> Level {
        self.eval_unchecked(x)
    }

    fn min_arity(&self) -> usize {
        self.arity()
    }
}

impl fmt::Display for StructureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, cs: &[StructureExpr]) -> fmt::Result {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")
        }
        match self {
            StructureExpr::Component(i) => write!(f, "c{i}"),
            StructureExpr::Series(cs) => {
                f.write_str("series(")?;
                list(f, cs)
            }
            StructureExpr::Parallel(cs) => {
                f.write_str("parallel(")?;
                list(f, cs)
            }
            StructureExpr::KOutOfN(k, cs) => {
                write!(f, "koon({k}; ")?;
                list(f, cs)
            }
        }
    }
}

impl FromStr for StructureExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

impl Serialize for StructureExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StructureExpr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_expr(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses the structure DSL. Errors carry a 1-based byte offset.
pub fn parse_expr(text: &str) -> Result<StructureExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("expected end of input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let found = match self.src.get(self.pos) {
            Some(_) => {
                let rest = String::from_utf8_lossy(&self.src[self.pos..]);
                let tok: String = rest.chars().take(8).collect();
                format!("`{tok}`")
            }
            None => "end of input".to_string(),
        };
        Error::parse(self.pos + 1, format!("{message}, found {found}"))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", byte as char)))
        }
    }

    fn keyword(&mut self) -> &[u8] {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    /// Decimal integer >= 1.
    fn int(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a positive integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match digits.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(v as usize),
            _ => {
                self.pos = start;
                Err(self.error("expected a positive integer below 2^32"))
            }
        }
    }

    fn expr(&mut self) -> Result<StructureExpr> {
        self.skip_ws();
        let start = self.pos;
        let kw = self.keyword();
        match kw {
            b"c" => {
                if !self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    return Err(self.error("expected a component index after `c`"));
                }
                Ok(StructureExpr::Component(self.int()?))
            }
            b"series" | b"parallel" => {
                let series = kw == b"series";
                self.expect(b'(')?;
                let children = self.list()?;
                if children.len() < 2 {
                    return Err(self.error("expected `,` (series and parallel need at least two children)"));
                }
                self.expect(b')')?;
                Ok(if series {
                    StructureExpr::Series(children)
                } else {
                    StructureExpr::Parallel(children)
                })
            }
            b"koon" => {
                self.expect(b'(')?;
                self.skip_ws();
                let k_at = self.pos;
                let k = self.int()?;
                self.expect(b';')?;
                let children = self.list()?;
                self.expect(b')')?;
                if k > children.len() {
                    self.pos = k_at;
                    return Err(self.error(&format!(
                        "expected k <= {} (the number of children)",
                        children.len()
                    )));
                }
                StructureExpr::k_out_of_n(k, children)
            }
            _ => {
                self.pos = start;
                Err(self.error("expected `c<index>`, `series(`, `parallel(` or `koon(`"))
            }
        }
    }

    fn list(&mut self) -> Result<Vec<StructureExpr>> {
        let mut children = vec![self.expr()?];
        while self.eat(b',') {
            children.push(self.expr()?);
        }
        Ok(children)
    }
}
