//! Exhaustive checking of the coherence conditions and of the deterministic
//! properties of series and parallel structures.
//!
//! A structure function `φ` on `{0..M}^n` is coherent when
//!
//! 1. it is monotone: `x <= y` implies `φ(x) <= φ(y)`;
//! 2. every component is relevant at every level: for each `i` and `j` there is
//!    a context `x` with `φ(j_i, x) = j` and `φ(l_i, x) != j` for all `l != j`;
//! 3. it fixes constant vectors: `φ(j, .., j) = j`.
//!
//! All enumeration is lexicographic with component 1 as the most significant
//! digit, so every reported counterexample is the first one in that order.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::state::{
    constant_vector, extreme_levels, for_each_in_box, join, meet, slice_leq, Level, StateSpace, StateVector,
    DEFAULT_ENUMERATION_LIMIT,
};
use crate::structure::{StructureFunction, SystemKind};

/// Exhaustive analysis of one structure function over `{0..M}^n`.
pub struct CoherenceChecker<'a, F: ?Sized> {
    phi: &'a F,
    n: usize,
    space: StateSpace,
    limit: u64,
}

impl<'a, F: StructureFunction + ?Sized> CoherenceChecker<'a, F> {
    pub fn new(phi: &'a F, n: usize, space: StateSpace) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        if n < phi.min_arity() {
            return Err(Error::ArityMismatch {
                arity: phi.min_arity(),
                given: n,
            });
        }
        Ok(CoherenceChecker {
            phi,
            n,
            space,
            limit: DEFAULT_ENUMERATION_LIMIT,
        })
    }

    pub fn with_limit(mut self, limit: u64) -> Self {
        self.limit = limit;
        self
    }

    pub fn components(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    fn m(&self) -> Level {
        self.space.max_state()
    }

    fn check_vector(&self, x: &StateVector) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::ArityMismatch {
                arity: self.n,
                given: x.len(),
            });
        }
        if let Some(&l) = x.iter().find(|&&l| l > self.m()) {
            return Err(Error::LevelOutOfRange {
                level: l as usize,
                max_state: self.m() as usize,
            });
        }
        Ok(())
    }

    /// φ evaluated at every vector, indexed in lexicographic order.
    fn table(&self) -> Result<Vec<Level>> {
        let size = self.space.guard(self.n, self.limit)?;
        let mut values = Vec::with_capacity(size as usize);
        let _ = self.space.try_for_each::<(), _>(self.n, |x| {
            values.push(self.phi.eval(x));
            ControlFlow::Continue(())
        });
        Ok(values)
    }

    /// Lexicographic index strides: component `i` contributes `x[i] * stride[i]`.
    fn strides(&self) -> Vec<usize> {
        let base = self.m() as usize + 1;
        let mut strides = vec![1usize; self.n];
        for i in (0..self.n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * base;
        }
        strides
    }

    /// Monotonicity. Checking covering pairs `x < x + e_i` suffices by
    /// transitivity; when one fails, the lexicographically least violating
    /// pair over *all* comparable pairs is located and reported.
    pub fn check_monotonicity(&self) -> Result<MonotonicityResult> {
        let values = self.table()?;
        let strides = self.strides();
        let m = self.m();

        let mut index = 0usize;
        let broken = self
            .space
            .try_for_each(self.n, |x| {
                let here = values[index];
                for (i, &xi) in x.iter().enumerate() {
                    if xi < m && values[index + strides[i]] < here {
                        return ControlFlow::Break(());
                    }
                }
                index += 1;
                ControlFlow::Continue(())
            })
            .is_break();
        if !broken {
            return Ok(MonotonicityResult {
                pass: true,
                counterexample: None,
            });
        }

        // up_min[k] = min of φ over the up-set of vector k
        let mut up_min = values.clone();
        let base = m as usize + 1;
        for k in (0..values.len()).rev() {
            for &s in &strides {
                if (k / s) % base < m as usize {
                    up_min[k] = up_min[k].min(up_min[k + s]);
                }
            }
        }
        let k = (0..values.len())
            .find(|&k| up_min[k] < values[k])
            .expect("covering violation implies a violating pair");
        let x = self.decode(k, &strides);
        let fx = values[k];
        let top = vec![m; self.n];
        let y = match for_each_in_box(&x, &top, |y| {
            if self.phi.eval(y) < fx {
                ControlFlow::Break(y.to_vec())
            } else {
                ControlFlow::Continue(())
            }
        }) {
            ControlFlow::Break(y) => y,
            ControlFlow::Continue(()) => unreachable!("up-set minimum below φ(x)"),
        };
        let fy = self.phi.eval(&y);
        Ok(MonotonicityResult {
            pass: false,
            counterexample: Some(MonotoneViolation {
                x: StateVector::new(x).unwrap(),
                y: StateVector::new(y).unwrap(),
                phi_x: fx,
                phi_y: fy,
            }),
        })
    }

    fn decode(&self, mut k: usize, strides: &[usize]) -> Vec<Level> {
        strides
            .iter()
            .map(|&s| {
                let d = k / s;
                k %= s;
                d as Level
            })
            .collect()
    }

    /// Relevance of every component at every level.
    ///
    /// Contexts are tried in a fixed order: the constant-`M` context, the
    /// constant-`0` context, then every context lexicographically. The reported
    /// witness is the full vector `(j_i, x)`.
    pub fn check_relevance(&self) -> Result<Vec<RelevanceResult>> {
        self.space.guard(self.n, self.limit)?;
        let m = self.m();
        let levels = m as usize + 1;
        let mut results = Vec::with_capacity(self.n * levels);
        let mut probe = vec![0 as Level; self.n];
        let mut outcomes = vec![0 as Level; levels];

        for i in 0..self.n {
            let mut witness: Vec<Option<Vec<Level>>> = vec![None; levels];
            let mut missing = levels;

            let mut visit = |context: &[Level], witness: &mut Vec<Option<Vec<Level>>>| {
                probe.copy_from_slice(context);
                for (l, out) in outcomes.iter_mut().enumerate() {
                    probe[i] = l as Level;
                    *out = self.phi.eval(&probe);
                }
                for j in 0..levels {
                    if witness[j].is_some() || outcomes[j] as usize != j {
                        continue;
                    }
                    let unique = outcomes
                        .iter()
                        .enumerate()
                        .all(|(l, &o)| l == j || o as usize != j);
                    if unique {
                        let mut w = context.to_vec();
                        w[i] = j as Level;
                        witness[j] = Some(w);
                        missing -= 1;
                    }
                }
                missing
            };

            let mut left = visit(&vec![m; self.n], &mut witness);
            if left > 0 {
                left = visit(&vec![0; self.n], &mut witness);
            }
            if left > 0 {
                let mut lo = vec![0; self.n];
                let mut hi = vec![m; self.n];
                lo[i] = 0;
                hi[i] = 0;
                let _ = for_each_in_box(&lo, &hi, |ctx| {
                    if visit(ctx, &mut witness) == 0 {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
            }

            for (j, w) in witness.into_iter().enumerate() {
                let pass = w.is_some();
                results.push(RelevanceResult {
                    component: i + 1,
                    level: j as Level,
                    pass,
                    note: (!pass).then(|| {
                        format!(
                            "no context makes component {} alone decide system level {j}",
                            i + 1
                        )
                    }),
                    witness: w.map(|w| StateVector::new(w).unwrap()),
                });
            }
        }
        Ok(results)
    }

    /// Boundary condition: `φ(j, .., j) = j` for every level.
    pub fn check_boundary(&self) -> Vec<BoundaryResult> {
        self.space
            .levels()
            .map(|j| {
                let witness = constant_vector(self.n, j).unwrap();
                let value = self.phi.eval(witness.as_slice());
                BoundaryResult {
                    level: j,
                    pass: value == j,
                    value,
                    witness,
                }
            })
            .collect()
    }

    pub fn coherence_report(&self) -> Result<CoherenceReport> {
        let monotone = self.check_monotonicity()?;
        let relevance = self.check_relevance()?;
        let boundary = self.check_boundary();

        let mut counterexamples = Vec::new();
        if let Some(v) = &monotone.counterexample {
            counterexamples.push(Counterexample {
                condition: Condition::Monotone,
                component: None,
                level: None,
                vectors: vec![v.x.clone(), v.y.clone()],
                detail: format!("{} <= {} but φ = {} > {}", v.x, v.y, v.phi_x, v.phi_y),
            });
        }
        for r in relevance.iter().filter(|r| !r.pass) {
            counterexamples.push(Counterexample {
                condition: Condition::Relevance,
                component: Some(r.component),
                level: Some(r.level),
                vectors: Vec::new(),
                detail: r.note.clone().unwrap_or_default(),
            });
        }
        for b in boundary.iter().filter(|b| !b.pass) {
            counterexamples.push(Counterexample {
                condition: Condition::Boundary,
                component: None,
                level: Some(b.level),
                vectors: vec![b.witness.clone()],
                detail: format!("φ({}) = {} != {}", b.witness, b.value, b.level),
            });
        }

        let overall = monotone.pass && relevance.iter().all(|r| r.pass) && boundary.iter().all(|b| b.pass);
        Ok(CoherenceReport {
            components: self.n,
            max_state: self.m(),
            monotone,
            relevance,
            boundary,
            overall,
            counterexamples,
        })
    }

    /// `φ(x) = j`.
    pub fn is_connection_vector(&self, x: &StateVector, j: Level) -> Result<bool> {
        self.check_vector(x)?;
        Ok(self.phi.eval(x.as_slice()) == j)
    }

    /// Brute-force test of upper criticality: `φ(x) = j` and every vector
    /// strictly below `x` maps below `j`. Returns the first offending vector
    /// when the test fails.
    pub fn upper_critical_violation(&self, x: &StateVector, j: Level) -> Result<Option<UcvViolation>> {
        self.check_vector(x)?;
        let value = self.phi.eval(x.as_slice());
        if value != j {
            return Ok(Some(UcvViolation::NotConnection { value }));
        }
        let down: u128 = x.iter().map(|&l| l as u128 + 1).product();
        if down > self.limit as u128 {
            return Err(Error::ExplosionLimit {
                size: down.to_string(),
                limit: self.limit,
            });
        }
        let zero = vec![0; self.n];
        let hit = for_each_in_box(&zero, x.as_slice(), |y| {
            if y != x.as_slice() {
                let fy = self.phi.eval(y);
                if fy >= j {
                    return ControlFlow::Break((y.to_vec(), fy));
                }
            }
            ControlFlow::Continue(())
        });
        Ok(match hit {
            ControlFlow::Break((y, value)) => Some(UcvViolation::Dominated {
                below: StateVector::new(y).unwrap(),
                value,
            }),
            ControlFlow::Continue(()) => None,
        })
    }

    pub fn is_upper_critical(&self, x: &StateVector, j: Level) -> Result<bool> {
        Ok(self.upper_critical_violation(x, j)?.is_none())
    }

    /// Every upper critical connection vector to level `j`, lexicographically.
    ///
    /// Uses a single pass computing, for each vector, the largest φ over its
    /// strict down-set (the union of the down-sets of its immediate
    /// predecessors); this is exact for any φ, coherent or not.
    pub fn enumerate_ucv(&self, j: Level) -> Result<UcvSet> {
        self.space.check_level(j as usize)?;
        let values = self.table()?;
        let strides = self.strides();
        let base = self.m() as usize + 1;
        // below_max[k] = max φ over vectors strictly below k, or None
        let mut below_max: Vec<Option<Level>> = vec![None; values.len()];
        let mut vectors = Vec::new();
        for k in 0..values.len() {
            let mut best: Option<Level> = None;
            for &s in &strides {
                if (k / s) % base > 0 {
                    let p = k - s;
                    let cand = below_max[p].map_or(values[p], |b| b.max(values[p]));
                    best = Some(best.map_or(cand, |b| b.max(cand)));
                }
            }
            below_max[k] = best;
            if values[k] == j && best.is_none_or(|b| b < j) {
                vectors.push(StateVector::new(self.decode(k, &strides)).unwrap());
            }
        }
        debug_assert!(vectors.iter().enumerate().all(|(a, u)| vectors
            .iter()
            .skip(a + 1)
            .all(|v| !slice_leq(u.as_slice(), v.as_slice()) && !slice_leq(v.as_slice(), u.as_slice()))));
        Ok(UcvSet { level: j, vectors })
    }

    /// If `ucv <= x` then `φ(x) >= j`. The hypothesis that `ucv` is upper
    /// critical for level `j` is checked first.
    pub fn level_lower_bound_check(&self, ucv: &StateVector, j: Level, x: &StateVector) -> Result<bool> {
        self.check_vector(x)?;
        if let Some(v) = self.upper_critical_violation(ucv, j)? {
            return Err(Error::PreconditionViolated(format!(
                "{ucv} is not an upper critical connection vector to level {j} ({v})"
            )));
        }
        Ok(self.lower_bound_holds(ucv, j, x))
    }

    fn lower_bound_holds(&self, ucv: &StateVector, j: Level, x: &StateVector) -> bool {
        !slice_leq(ucv.as_slice(), x.as_slice()) || self.phi.eval(x.as_slice()) >= j
    }
}

/// Why a vector fails to be upper critical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum UcvViolation {
    NotConnection { value: Level },
    Dominated { below: StateVector, value: Level },
}

impl std::fmt::Display for UcvViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UcvViolation::NotConnection { value } => write!(f, "φ maps it to {value}"),
            UcvViolation::Dominated { below, value } => {
                write!(f, "{below} lies strictly below it with φ = {value}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneViolation {
    pub x: StateVector,
    pub y: StateVector,
    pub phi_x: Level,
    pub phi_y: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityResult {
    pub pass: bool,
    pub counterexample: Option<MonotoneViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceResult {
    /// 1-based.
    pub component: usize,
    pub level: Level,
    pub pass: bool,
    pub witness: Option<StateVector>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryResult {
    pub level: Level,
    pub pass: bool,
    pub value: Level,
    pub witness: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Monotone,
    Relevance,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub condition: Condition,
    pub component: Option<usize>,
    pub level: Option<Level>,
    pub vectors: Vec<StateVector>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub components: usize,
    pub max_state: Level,
    pub monotone: MonotonicityResult,
    pub relevance: Vec<RelevanceResult>,
    pub boundary: Vec<BoundaryResult>,
    pub overall: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl CoherenceReport {
    /// Plain-text table for terminals.
    pub fn to_table(&self) -> String {
        use std::fmt::Write;
        let mark = |p: bool| if p { "pass" } else { "FAIL" };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "components: {}  max state: {}",
            self.components, self.max_state
        );
        let _ = writeln!(out, "condition   component  level  result  witness");
        let mono = self
            .monotone
            .counterexample
            .as_ref()
            .map(|v| format!("{} <= {}, φ {} > {}", v.x, v.y, v.phi_x, v.phi_y))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "monotone    -          -      {:<6}  {mono}",
            mark(self.monotone.pass)
        );
        for r in &self.relevance {
            let w = r
                .witness
                .as_ref()
                .map(ToString::to_string)
                .or_else(|| r.note.clone())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "relevance   {:<9}  {:<5}  {:<6}  {w}",
                r.component,
                r.level,
                mark(r.pass)
            );
        }
        for b in &self.boundary {
            let _ = writeln!(
                out,
                "boundary    -          {:<5}  {:<6}  φ{} = {}",
                b.level,
                mark(b.pass),
                b.witness,
                b.value
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.overall { "coherent" } else { "NOT coherent" }
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UcvSet {
    pub level: Level,
    pub vectors: Vec<StateVector>,
}

/// `(min entry, φ(x), max entry)`.
pub fn structure_bounds<F: StructureFunction + ?Sized>(
    phi: &F,
    x: &StateVector,
) -> Result<(Level, Level, Level)> {
    let (lo, hi) = extreme_levels(x)?;
    if x.len() < phi.min_arity() {
        return Err(Error::ArityMismatch {
            arity: phi.min_arity(),
            given: x.len(),
        });
    }
    Ok((lo, phi.eval(x.as_slice()), hi))
}

/// Redundancy or concatenation applied at the component level versus the
/// system level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub component_level: Level,
    pub system_level: Level,
}

/// `φ(x ∨ y)` against `φ(x) ∨ φ(y)`.
pub fn redundancy_comparison(kind: SystemKind, x: &StateVector, y: &StateVector) -> Result<LevelComparison> {
    let j = join(x, y)?;
    let (fx, fy) = (kind.eval(x.as_slice()), kind.eval(y.as_slice()));
    Ok(LevelComparison {
        component_level: kind.eval(j.as_slice()),
        system_level: fx.max(fy),
    })
}

/// `φ(x ∧ y)` against `φ(x) ∧ φ(y)`.
pub fn composition_comparison(kind: SystemKind, x: &StateVector, y: &StateVector) -> Result<LevelComparison> {
    let m = meet(x, y)?;
    let (fx, fy) = (kind.eval(x.as_slice()), kind.eval(y.as_slice()));
    Ok(LevelComparison {
        component_level: kind.eval(m.as_slice()),
        system_level: fx.min(fy),
    })
}

/// Deterministic property of series/parallel structures exercised by
/// [`check_theorems`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// `min x <= φ(x) <= max x`.
    Bounds,
    /// Series: `φ(x ∨ y) >= φ(x) ∨ φ(y)`. Parallel: equality.
    Redundancy,
    /// Series: `φ(x ∧ y) = φ(x) ∧ φ(y)`. Parallel: `<=`.
    Composition,
    /// `ucv <= x` implies `φ(x) >= j` for upper critical `ucv` to level `j`.
    UcvLowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyViolation {
    pub property: Property,
    pub x: StateVector,
    pub y: Option<StateVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub kind: SystemKind,
    pub components: usize,
    pub max_state: Level,
    pub vectors_checked: u64,
    pub pairs_checked: u64,
    pub violations: Vec<PropertyViolation>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// How vector pairs are chosen by [`check_theorems`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// All `(M+1)^(2n)` ordered pairs.
    Exhaustive,
    /// Uniformly drawn pairs from a seeded stream.
    Sampled { pairs: u64, seed: u64 },
}

struct TheoremContext {
    kind: SystemKind,
    ucvs: Vec<UcvSet>,
}

impl TheoremContext {
    fn check_vector(&self, x: &StateVector, out: &mut Vec<PropertyViolation>) {
        let (lo, val, hi) = structure_bounds(&self.kind, x).expect("nonempty vector");
        if !(lo <= val && val <= hi) {
            out.push(PropertyViolation {
                property: Property::Bounds,
                x: x.clone(),
                y: None,
            });
        }
        let fx = self.kind.eval(x.as_slice());
        let ucv_ok = self.ucvs.iter().all(|set| {
            set.vectors
                .iter()
                .all(|u| !slice_leq(u.as_slice(), x.as_slice()) || fx >= set.level)
        });
        if !ucv_ok {
            out.push(PropertyViolation {
                property: Property::UcvLowerBound,
                x: x.clone(),
                y: None,
            });
        }
    }

    fn check_pair(&self, x: &StateVector, y: &StateVector, out: &mut Vec<PropertyViolation>) {
        let r = redundancy_comparison(self.kind, x, y).expect("equal lengths");
        let c = composition_comparison(self.kind, x, y).expect("equal lengths");
        let (redundancy_ok, composition_ok) = match self.kind {
            SystemKind::Series => (
                r.component_level >= r.system_level,
                c.component_level == c.system_level,
            ),
            SystemKind::Parallel => (
                r.component_level == r.system_level,
                c.component_level <= c.system_level,
            ),
        };
        for (ok, property) in [
            (redundancy_ok, Property::Redundancy),
            (composition_ok, Property::Composition),
        ] {
            if !ok {
                out.push(PropertyViolation {
                    property,
                    x: x.clone(),
                    y: Some(y.clone()),
                });
            }
        }
    }
}

/// Checks the deterministic properties of a series or parallel structure:
/// the min/max sandwich, component- versus system-level redundancy and
/// concatenation, and the lower bound implied by upper critical connection
/// vectors. The UCV sets are enumerated exhaustively in both coverage modes.
pub fn check_theorems(
    kind: SystemKind,
    n: usize,
    space: StateSpace,
    coverage: Coverage,
    limit: u64,
) -> Result<TheoremReport> {
    let checker = CoherenceChecker::new(&kind, n, space)?.with_limit(limit);
    let ucvs = space
        .levels()
        .map(|j| checker.enumerate_ucv(j))
        .collect::<Result<Vec<_>>>()?;
    let ctx = TheoremContext { kind, ucvs };
    let mut violations = Vec::new();
    let mut vectors_checked = 0u64;
    let mut pairs_checked = 0u64;

    match coverage {
        Coverage::Exhaustive => {
            let size = space.guard(n, limit)?;
            if size.checked_mul(size).is_none_or(|s| s > limit) {
                return Err(Error::ExplosionLimit {
                    size: format!("{size}^2 pairs"),
                    limit,
                });
            }
            let all = space.vectors(n);
            for x in &all {
                ctx.check_vector(x, &mut violations);
                vectors_checked += 1;
                for y in &all {
                    ctx.check_pair(x, y, &mut violations);
                    pairs_checked += 1;
                }
            }
        }
        Coverage::Sampled { pairs, seed } => {
            let mut stream = Stream::new(seed);
            let m = space.max_state();
            let mut draw = || StateVector::new((0..n).map(|_| stream.level(m)).collect()).unwrap();
            for _ in 0..pairs {
                let x = draw();
                let y = draw();
                ctx.check_vector(&x, &mut violations);
                ctx.check_vector(&y, &mut violations);
                ctx.check_pair(&x, &y, &mut violations);
                vectors_checked += 2;
                pairs_checked += 1;
            }
        }
    }

    Ok(TheoremReport {
        kind,
        components: n,
        max_state: space.max_state(),
        vectors_checked,
        pairs_checked,
        violations,
    })
}
