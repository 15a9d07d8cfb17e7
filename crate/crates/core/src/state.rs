//! State-space primitives: component levels, state vectors and the lattice
//! operations on them.
//!
//! Levels run from `0` (complete failure) to `M` (perfect functioning). Vectors
//! are compared componentwise; `meet` and `join` are the elementwise minimum
//! and maximum, which makes `{0..M}^n` a distributive lattice.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A component or system performance level.
pub type Level = u8;

/// Default ceiling on the number of vectors an exhaustive pass may visit.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 100_000_000;

/// The ordered state set `{0, 1, .., M}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSpace {
    max_state: Level,
}

impl StateSpace {
    pub fn new(max_state: usize) -> Result<Self> {
        if max_state == 0 || max_state > Level::MAX as usize {
            return Err(Error::InvalidMaxState(max_state));
        }
        Ok(StateSpace {
            max_state: max_state as Level,
        })
    }

    pub fn max_state(&self) -> Level {
        self.max_state
    }

    pub fn levels(&self) -> impl Iterator<Item = Level> {
        0..=self.max_state
    }

    pub fn contains(&self, x: &StateVector) -> bool {
        x.iter().all(|&l| l <= self.max_state)
    }

    pub fn check_level(&self, level: usize) -> Result<Level> {
        if level > self.max_state as usize {
            return Err(Error::LevelOutOfRange {
                level,
                max_state: self.max_state as usize,
            });
        }
        Ok(level as Level)
    }

    /// `(M+1)^n`, or `None` on overflow.
    pub fn size(&self, n: usize) -> Option<u64> {
        let base = self.max_state as u64 + 1;
        let exp = u32::try_from(n).ok()?;
        base.checked_pow(exp)
    }

    /// Fails with [`Error::ExplosionLimit`] when `(M+1)^n` exceeds `limit`.
    pub fn guard(&self, n: usize, limit: u64) -> Result<u64> {
        match self.size(n) {
            Some(size) if size <= limit => Ok(size),
            Some(size) => Err(Error::ExplosionLimit {
                size: size.to_string(),
                limit,
            }),
            None => Err(Error::ExplosionLimit {
                size: format!("{}^{}", self.max_state as u64 + 1, n),
                limit,
            }),
        }
    }

    /// Visits every vector of length `n` in lexicographic order, component 1
    /// being the most significant digit. The callback may stop the walk early.
    pub fn try_for_each<B, F>(&self, n: usize, f: F) -> ControlFlow<B>
    where
        F: FnMut(&[Level]) -> ControlFlow<B>,
    {
        for_each_in_box(&vec![0; n], &vec![self.max_state; n], f)
    }

    /// All vectors of length `n`, lexicographically ordered.
    pub fn vectors(&self, n: usize) -> Vec<StateVector> {
        let mut out = Vec::new();
        let _ = self.try_for_each::<(), _>(n, |x| {
            out.push(StateVector(x.to_vec()));
            ControlFlow::Continue(())
        });
        out
    }
}

/// Lexicographic walk over the box `lo <= x <= hi`.
pub(crate) fn for_each_in_box<B, F>(lo: &[Level], hi: &[Level], mut f: F) -> ControlFlow<B>
where
    F: FnMut(&[Level]) -> ControlFlow<B>,
{
    debug_assert_eq!(lo.len(), hi.len());
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return ControlFlow::Continue(());
    }
    let mut x = lo.to_vec();
    loop {
        f(&x)?;
        let mut pos = x.len();
        loop {
            if pos == 0 {
                return ControlFlow::Continue(());
            }
            pos -= 1;
            if x[pos] < hi[pos] {
                x[pos] += 1;
                break;
            }
            x[pos] = lo[pos];
        }
    }
}

/// Levels `x_1..x_n` of the system's components.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Level>", into = "Vec<Level>")]
pub struct StateVector(Vec<Level>);

impl StateVector {
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(StateVector(levels))
    }

    /// Builds a vector and checks every level against `space`.
    pub fn within(levels: Vec<Level>, space: StateSpace) -> Result<Self> {
        let v = Self::new(levels)?;
        if let Some(&bad) = v.iter().find(|&&l| l > space.max_state()) {
            return Err(Error::LevelOutOfRange {
                level: bad as usize,
                max_state: space.max_state() as usize,
            });
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Level] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Level> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Level> {
        self.0
    }
}

impl TryFrom<Vec<Level>> for StateVector {
    type Error = Error;

    fn try_from(levels: Vec<Level>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<StateVector> for Vec<Level> {
    fn from(v: StateVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = Level;

    fn index(&self, index: usize) -> &Level {
        &self.0[index]
    }
}

impl AsRef<[Level]> for StateVector {
    fn as_ref(&self) -> &[Level] {
        &self.0
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

/// Parses comma-separated levels such as `2,0,3` (brackets optional).
impl FromStr for StateVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let body = trimmed
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .unwrap_or(trimmed);
        if body.trim().is_empty() {
            return Err(Error::EmptyVector);
        }
        let mut levels = Vec::new();
        let mut offset = 1 + (s.len() - s.trim_start().len());
        if body.len() != trimmed.len() {
            offset += 1;
        }
        for part in body.split(',') {
            let token = part.trim();
            let level = token
                .parse::<Level>()
                .map_err(|_| Error::parse(offset, format!("expected a level in 0..=255, found `{token}`")))?;
            levels.push(level);
            offset += part.len() + 1;
        }
        StateVector::new(levels)
    }
}

fn same_len(x: &StateVector, y: &StateVector) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyVector);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Elementwise minimum `x ∧ y`.
pub fn meet(x: &StateVector, y: &StateVector) -> Result<StateVector> {
    same_len(x, y)?;
    Ok(StateVector(
        x.iter().zip(y.iter()).map(|(a, b)| *a.min(b)).collect(),
    ))
}

/// Elementwise maximum `x ∨ y`.
pub fn join(x: &StateVector, y: &StateVector) -> Result<StateVector> {
    same_len(x, y)?;
    Ok(StateVector(
        x.iter().zip(y.iter()).map(|(a, b)| *a.max(b)).collect(),
    ))
}

/// Componentwise order: `x[i] <= y[i]` for every `i`.
pub fn leq(x: &StateVector, y: &StateVector) -> Result<bool> {
    same_len(x, y)?;
    Ok(slice_leq(x.as_slice(), y.as_slice()))
}

/// `x <= y` and `x != y`.
pub fn strictly_below(x: &StateVector, y: &StateVector) -> Result<bool> {
    same_len(x, y)?;
    Ok(slice_leq(x.as_slice(), y.as_slice()) && x != y)
}

pub(crate) fn slice_leq(x: &[Level], y: &[Level]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

/// The vector `(j_i, x)`: a copy of `x` with position `i` (0-based) set to `j`.
pub fn update_at(x: &StateVector, i: usize, j: Level) -> Result<StateVector> {
    if i >= x.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: x.len(),
        });
    }
    let mut levels = x.0.clone();
    levels[i] = j;
    Ok(StateVector(levels))
}

/// The constant vector `(j, j, .., j)` of length `n`.
pub fn constant_vector(n: usize, j: Level) -> Result<StateVector> {
    StateVector::new(vec![j; n])
}

/// `(min entry, max entry)`.
pub fn extreme_levels(x: &StateVector) -> Result<(Level, Level)> {
    let lo = x.iter().copied().min().ok_or(Error::EmptyVector)?;
    let hi = x.iter().copied().max().ok_or(Error::EmptyVector)?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(levels: &[Level]) -> StateVector {
        StateVector::new(levels.to_vec()).unwrap()
    }

    #[test]
    fn meet_and_join() {
        assert_eq!(meet(&v(&[2, 0, 3]), &v(&[1, 4, 3])).unwrap(), v(&[1, 0, 3]));
        assert_eq!(join(&v(&[2, 0, 3]), &v(&[1, 4, 3])).unwrap(), v(&[2, 4, 3]));
        let x = v(&[3, 1, 4]);
        assert_eq!(meet(&x, &x).unwrap(), x);
        assert_eq!(join(&x, &x).unwrap(), x);
        assert_eq!(meet(&x, &constant_vector(3, 4).unwrap()).unwrap(), x);
        assert_eq!(join(&x, &constant_vector(3, 0).unwrap()).unwrap(), x);
    }

    #[test]
    fn length_errors() {
        assert!(matches!(
            meet(&v(&[1]), &v(&[1, 2])),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            leq(&v(&[1, 2]), &v(&[1])),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(StateVector::new(vec![]), Err(Error::EmptyVector)));
        assert!(matches!(constant_vector(0, 1), Err(Error::EmptyVector)));
    }

    #[test]
    fn orderings() {
        assert!(leq(&v(&[0, 1]), &v(&[1, 1])).unwrap());
        assert!(!leq(&v(&[2, 0]), &v(&[1, 3])).unwrap());
        assert!(leq(&v(&[2, 2]), &v(&[2, 2])).unwrap());
        assert!(strictly_below(&v(&[0, 1]), &v(&[1, 1])).unwrap());
        assert!(!strictly_below(&v(&[1, 1]), &v(&[1, 1])).unwrap());
        assert!(!strictly_below(&v(&[2, 0]), &v(&[1, 3])).unwrap());
    }

    #[test]
    fn updates() {
        assert_eq!(update_at(&v(&[2, 2, 2]), 1, 0).unwrap(), v(&[2, 0, 2]));
        assert_eq!(update_at(&v(&[1]), 0, 4).unwrap(), v(&[4]));
        let x = v(&[3, 1]);
        assert_eq!(update_at(&x, 1, x[1]).unwrap(), x);
        assert!(matches!(
            update_at(&x, 2, 0),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn constants_and_extremes() {
        assert_eq!(constant_vector(3, 4).unwrap(), v(&[4, 4, 4]));
        assert_eq!(constant_vector(1, 0).unwrap(), v(&[0]));
        assert_eq!(extreme_levels(&v(&[2, 0, 3])).unwrap(), (0, 3));
        assert_eq!(extreme_levels(&v(&[2, 2, 2])).unwrap(), (2, 2));
        assert_eq!(extreme_levels(&v(&[5])).unwrap(), (5, 5));
    }

    #[test]
    fn parse_and_display() {
        let x: StateVector = "2,0,3".parse().unwrap();
        assert_eq!(x, v(&[2, 0, 3]));
        assert_eq!(x.to_string(), "[2,0,3]");
        assert_eq!(" [1, 4] ".parse::<StateVector>().unwrap(), v(&[1, 4]));
        assert!(matches!("".parse::<StateVector>(), Err(Error::EmptyVector)));
        match "1,x".parse::<StateVector>() {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let space = StateSpace::new(2).unwrap();
        let all = space.vectors(2);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], v(&[0, 0]));
        assert_eq!(all[1], v(&[0, 1]));
        assert_eq!(all[3], v(&[1, 0]));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn guard_rejects_large_spaces() {
        let space = StateSpace::new(4).unwrap();
        assert_eq!(space.guard(4, 1000).unwrap(), 625);
        assert!(matches!(space.guard(4, 624), Err(Error::ExplosionLimit { .. })));
        assert!(matches!(
            space.guard(1000, u64::MAX),
            Err(Error::ExplosionLimit { .. })
        ));
        assert!(StateSpace::new(0).is_err());
        assert!(StateSpace::new(256).is_err());
    }

    fn pair(n: usize) -> impl Strategy<Value = (StateVector, StateVector, StateVector)> {
        (
            prop::collection::vec(0u8..=6, n),
            prop::collection::vec(0u8..=6, n),
            prop::collection::vec(0u8..=6, n),
        )
            .prop_map(|(a, b, c)| (StateVector(a), StateVector(b), StateVector(c)))
    }

    proptest! {
        #[test]
        fn lattice_laws((x, y, z) in (1usize..6).prop_flat_map(pair)) {
            prop_assert_eq!(meet(&x, &y)?, meet(&y, &x)?);
            prop_assert_eq!(join(&x, &y)?, join(&y, &x)?);
            prop_assert_eq!(meet(&meet(&x, &y)?, &z)?, meet(&x, &meet(&y, &z)?)?);
            prop_assert_eq!(join(&join(&x, &y)?, &z)?, join(&x, &join(&y, &z)?)?);
            prop_assert_eq!(meet(&x, &join(&x, &y)?)?, x.clone());
            prop_assert_eq!(join(&x, &meet(&x, &y)?)?, x.clone());

            let le = leq(&x, &y)?;
            prop_assert_eq!(le, meet(&x, &y)? == x);
            prop_assert_eq!(le, join(&x, &y)? == y);
            prop_assert_eq!(strictly_below(&x, &y)?, le && x != y);
        }

        #[test]
        fn repeated_update_keeps_last(levels in prop::collection::vec(0u8..=4, 1..6), a in 0u8..=4, b in 0u8..=4, i in 0usize..6) {
            let x = StateVector(levels);
            let i = i % x.len();
            prop_assert_eq!(update_at(&update_at(&x, i, a)?, i, b)?, update_at(&x, i, b)?);
        }
    }
}
