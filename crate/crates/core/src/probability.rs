//! Component and system performance distributions.
//!
//! Components are assumed mutually independent: the probability of a state
//! vector is the product of its components' marginal masses. That assumption
//! cannot be checked from marginals and is taken as given everywhere below.
//!
//! For a level `j`, `P_i(j)` is component `i`'s CDF and `P(j) = P[φ(X) <= j]`
//! the system's. Series systems satisfy `P(j) = 1 - Π(1 - P_i(j))` and parallel
//! systems `P(j) = Π P_i(j)`; any coherent system lies between the two.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::state::{Level, StateSpace};
use crate::structure::{StructureExpr, StructureFunction, SystemKind};

/// Tolerance on `|Σ pmf - 1|` for input distributions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Tolerance used when comparing two exact routes to the same probability.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmfError {
    #[error("need at least two states, got {0}")]
    TooFewStates(usize),
    #[error("at most 256 states are supported, got {0}")]
    TooManyStates(usize),
    #[error("mass {value} at state {index} is not a finite number")]
    NotFinite { index: usize, value: f64 },
    #[error("negative mass {value} at state {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("mass {value} at state {index} exceeds 1")]
    ExcessMass { index: usize, value: f64 },
    #[error("masses sum to {sum}, off by {residual:e}")]
    Normalization { sum: f64, residual: f64 },
}

/// Checks that `pmf` is a probability vector over at least two states.
pub fn validate_pmf(pmf: &[f64]) -> Result<(), PmfError> {
    if pmf.len() < 2 {
        return Err(PmfError::TooFewStates(pmf.len()));
    }
    if pmf.len() > Level::MAX as usize + 1 {
        return Err(PmfError::TooManyStates(pmf.len()));
    }
    for (index, &value) in pmf.iter().enumerate() {
        if !value.is_finite() {
            return Err(PmfError::NotFinite { index, value });
        }
        if value < 0.0 {
            return Err(PmfError::NegativeMass { index, value });
        }
        if value > 1.0 {
            return Err(PmfError::ExcessMass { index, value });
        }
    }
    let sum: f64 = pmf.iter().sum();
    let residual = sum - 1.0;
    if residual.abs() > NORMALIZATION_TOLERANCE {
        return Err(PmfError::Normalization { sum, residual });
    }
    Ok(())
}

/// State distribution `p_i0, .., p_iM` of a single component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ComponentDistribution {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl ComponentDistribution {
    pub fn new(pmf: Vec<f64>) -> Result<Self, PmfError> {
        validate_pmf(&pmf)?;
        let cdf = accumulate(&pmf);
        Ok(ComponentDistribution { pmf, cdf })
    }

    /// Mass `1 - p` at state `0` and `p` at state `max_state`.
    pub fn two_point(max_state: Level, p: f64) -> Result<Self, PmfError> {
        let mut pmf = vec![0.0; max_state as usize + 1];
        pmf[0] = 1.0 - p;
        pmf[max_state as usize] += p;
        Self::new(pmf)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn max_state(&self) -> Level {
        (self.pmf.len() - 1) as Level
    }

    /// `P_i(j)`, read from the running sum `p_i0 + .. + p_ij`.
    pub fn cdf(&self, j: Level) -> Result<f64> {
        self.cdf.get(j as usize).copied().ok_or(Error::LevelOutOfRange {
            level: j as usize,
            max_state: self.max_state() as usize,
        })
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    /// Inverse-CDF lookup for `u` in `[0, 1)`.
    pub(crate) fn quantile(&self, u: f64) -> Level {
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.pmf.len() - 1) as Level
    }
}

impl TryFrom<Vec<f64>> for ComponentDistribution {
    type Error = PmfError;

    fn try_from(pmf: Vec<f64>) -> Result<Self, PmfError> {
        Self::new(pmf)
    }
}

impl From<ComponentDistribution> for Vec<f64> {
    fn from(d: ComponentDistribution) -> Self {
        d.pmf
    }
}

fn accumulate(pmf: &[f64]) -> Vec<f64> {
    let mut total = 0.0;
    pmf.iter()
        .map(|p| {
            total += p;
            total
        })
        .collect()
}

/// `P_i(j)` for component distribution `d`.
pub fn component_cdf(d: &ComponentDistribution, j: Level) -> Result<f64> {
    d.cdf(j)
}

/// System PMF `p_0..p_M` and CDF `P(0)..P(M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDistribution {
    pub pmf: Vec<f64>,
    pub cdf: Vec<f64>,
}

impl SystemDistribution {
    pub fn from_pmf(pmf: Vec<f64>) -> Self {
        let cdf = accumulate(&pmf);
        SystemDistribution { pmf, cdf }
    }

    pub fn max_state(&self) -> Level {
        (self.pmf.len() - 1) as Level
    }
}

/// Shared state count of a nonempty list of distributions.
fn common_space(dists: &[ComponentDistribution]) -> Result<StateSpace> {
    let first = dists.first().ok_or(Error::EmptyVector)?;
    let expected = first.pmf.len();
    if let Some(d) = dists.iter().find(|d| d.pmf.len() != expected) {
        return Err(Error::StateCountMismatch {
            expected,
            found: d.pmf.len(),
        });
    }
    StateSpace::new(expected - 1)
}

fn check_arity(e: &StructureExpr, dists: &[ComponentDistribution]) -> Result<()> {
    if e.arity() != dists.len() {
        return Err(Error::ArityMismatch {
            arity: e.arity(),
            given: dists.len(),
        });
    }
    Ok(())
}

/// Exact system distribution by summing `Π p_{i,x_i}` over every state vector.
///
/// Vectors are visited lexicographically and each probability is built from
/// cached prefix products, so the summation order (and therefore the result)
/// is fixed.
pub fn exact_system_distribution(
    e: &StructureExpr,
    dists: &[ComponentDistribution],
    limit: u64,
) -> Result<SystemDistribution> {
    check_arity(e, dists)?;
    let space = common_space(dists)?;
    let n = dists.len();
    space.guard(n, limit)?;
    let m = space.max_state();

    let mut pmf = vec![0.0; m as usize + 1];
    let mut x = vec![0 as Level; n];
    // prefix[k] = Π_{i<k} p_{i,x_i}
    let mut prefix = vec![1.0; n + 1];
    let mut dirty = 0;
    loop {
        for k in dirty..n {
            prefix[k + 1] = prefix[k] * dists[k].pmf[x[k] as usize];
        }
        let p = prefix[n];
        if p != 0.0 {
            pmf[e.eval(&x) as usize] += p;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(SystemDistribution::from_pmf(pmf));
            }
            pos -= 1;
            if x[pos] < m {
                x[pos] += 1;
                break;
            }
            x[pos] = 0;
        }
        dirty = pos;
    }
}

/// `P(j)` for a series or parallel system from component CDFs alone.
pub fn closed_form_cdf(kind: SystemKind, dists: &[ComponentDistribution], j: Level) -> Result<f64> {
    common_space(dists)?.check_level(j as usize)?;
    let cdfs = dists.iter().map(|d| d.cdf[j as usize]);
    Ok(match kind {
        SystemKind::Series => 1.0 - cdfs.map(|c| 1.0 - c).product::<f64>(),
        SystemKind::Parallel => cdfs.product(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CdfBounds {
    /// `lower - tol <= p <= upper + tol`.
    pub fn contains(&self, p: f64, tol: f64) -> bool {
        self.lower - tol <= p && p <= self.upper + tol
    }
}

/// `Π P_i(j) <= P(j) <= 1 - Π(1 - P_i(j))`.
///
/// The lower bound is the parallel CDF and the upper bound the series CDF, so
/// the pair brackets every coherent structure over the same components.
pub fn cdf_bounds(dists: &[ComponentDistribution], j: Level) -> Result<CdfBounds> {
    Ok(CdfBounds {
        lower: closed_form_cdf(SystemKind::Parallel, dists, j)?,
        upper: closed_form_cdf(SystemKind::Series, dists, j)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceOutcome {
    pub holds: bool,
    /// `P(j)` for the dominated (worse) components.
    pub cdf: Vec<f64>,
    /// `P'(j)` for the dominating (better) components.
    pub cdf_primed: Vec<f64>,
}

/// If `P_i(j) >= P'_i(j)` for every component and level, then the system CDFs
/// satisfy `P(j) >= P'(j)` at every level. The hypothesis is verified first;
/// the conclusion is compared with [`ORACLE_TOLERANCE`] slack.
pub fn dominance_check(
    e: &StructureExpr,
    dists_primed: &[ComponentDistribution],
    dists: &[ComponentDistribution],
    limit: u64,
) -> Result<DominanceOutcome> {
    check_arity(e, dists)?;
    check_arity(e, dists_primed)?;
    let space = common_space(dists)?;
    let primed_space = common_space(dists_primed)?;
    if space != primed_space {
        return Err(Error::StateCountMismatch {
            expected: space.max_state() as usize + 1,
            found: primed_space.max_state() as usize + 1,
        });
    }
    for (i, (d, dp)) in dists.iter().zip(dists_primed).enumerate() {
        for (j, (c, cp)) in d.cdf.iter().zip(&dp.cdf).enumerate() {
            if *c < *cp - ORACLE_TOLERANCE {
                return Err(Error::HypothesisViolated(format!(
                    "component {} at level {j}: P({j}) = {c} < P'({j}) = {cp}",
                    i + 1
                )));
            }
        }
    }
    let cdf = exact_system_distribution(e, dists, limit)?.cdf;
    let cdf_primed = exact_system_distribution(e, dists_primed, limit)?.cdf;
    let holds = cdf
        .iter()
        .zip(&cdf_primed)
        .all(|(p, pp)| *p >= *pp - ORACLE_TOLERANCE);
    Ok(DominanceOutcome {
        holds,
        cdf,
        cdf_primed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub level: Level,
    pub estimate: f64,
    pub samples: u64,
    pub seed: u64,
    pub std_error: f64,
}

impl MonteCarloEstimate {
    fn new(level: Level, hits: u64, samples: u64, seed: u64) -> Self {
        let estimate = hits as f64 / samples as f64;
        MonteCarloEstimate {
            level,
            estimate,
            samples,
            seed,
            std_error: (estimate * (1.0 - estimate) / samples as f64).sqrt(),
        }
    }
}

/// Draws `samples` state vectors and histograms the system level. Within a
/// trial components are sampled in order 1..n, each by inverse CDF on one
/// uniform from the seeded stream.
fn sample_levels(
    e: &StructureExpr,
    dists: &[ComponentDistribution],
    samples: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    check_arity(e, dists)?;
    let space = common_space(dists)?;
    if samples == 0 {
        return Err(Error::PreconditionViolated(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    let mut stream = Stream::new(seed);
    let mut counts = vec![0u64; space.max_state() as usize + 1];
    let mut x = vec![0 as Level; dists.len()];
    for _ in 0..samples {
        for (slot, d) in x.iter_mut().zip(dists) {
            *slot = d.quantile(stream.unit());
        }
        counts[e.eval(&x) as usize] += 1;
    }
    Ok(counts)
}

/// Monte Carlo estimate of `P(j)`; bit-reproducible for fixed inputs and seed.
pub fn monte_carlo_cdf(
    e: &StructureExpr,
    dists: &[ComponentDistribution],
    j: Level,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    common_space(dists)?.check_level(j as usize)?;
    let counts = sample_levels(e, dists, samples, seed)?;
    let hits = counts[..=j as usize].iter().sum();
    Ok(MonteCarloEstimate::new(j, hits, samples, seed))
}

/// Estimates of `P(j)` at every level from one sample run. Entry `j` equals
/// `monte_carlo_cdf(e, dists, j, samples, seed)`.
pub fn monte_carlo_distribution(
    e: &StructureExpr,
    dists: &[ComponentDistribution],
    samples: u64,
    seed: u64,
) -> Result<Vec<MonteCarloEstimate>> {
    let counts = sample_levels(e, dists, samples, seed)?;
    let mut hits = 0;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(j, c)| {
            hits += c;
            MonteCarloEstimate::new(j as Level, hits, samples, seed)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DEFAULT_ENUMERATION_LIMIT as LIMIT;
    use crate::structure::parse_expr;

    fn d(p: &[f64]) -> ComponentDistribution {
        ComponentDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(validate_pmf(&[0.2, 0.3, 0.5]).is_ok());
        match validate_pmf(&[0.5, 0.6]) {
            Err(PmfError::Normalization { residual, .. }) => assert!((residual - 0.1).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            validate_pmf(&[-0.1, 1.1]),
            Err(PmfError::NegativeMass { index: 0, .. })
        ));
        assert!(matches!(
            validate_pmf(&[1.5, -0.5]),
            Err(PmfError::ExcessMass { index: 0, .. })
        ));
        assert!(matches!(validate_pmf(&[1.0]), Err(PmfError::TooFewStates(1))));
        assert!(matches!(
            validate_pmf(&[f64::NAN, 1.0]),
            Err(PmfError::NotFinite { .. })
        ));
        assert!(validate_pmf(&[0.5, 0.5 + 5e-10]).is_ok());
    }

    #[test]
    fn component_cdfs() {
        let x = d(&[0.2, 0.3, 0.5]);
        assert!((component_cdf(&x, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(component_cdf(&x, 2).unwrap(), 1.0);
        assert_eq!(component_cdf(&d(&[1.0, 0.0, 0.0]), 0).unwrap(), 1.0);
        assert!(matches!(
            component_cdf(&x, 3),
            Err(Error::LevelOutOfRange {
                level: 3,
                max_state: 2
            })
        ));
    }

    #[test]
    fn exact_distribution_small_cases() {
        let half = d(&[0.5, 0.5]);
        let s = exact_system_distribution(
            &parse_expr("series(c1, c2)").unwrap(),
            &[half.clone(), half.clone()],
            LIMIT,
        )
        .unwrap();
        assert_eq!(s.pmf, vec![0.75, 0.25]);
        assert_eq!(s.cdf, vec![0.75, 1.0]);
        let p = exact_system_distribution(
            &parse_expr("parallel(c1, c2)").unwrap(),
            &[half.clone(), half.clone()],
            LIMIT,
        )
        .unwrap();
        assert_eq!(p.pmf, vec![0.25, 0.75]);
        let c = d(&[0.1, 0.2, 0.3, 0.4]);
        let id =
            exact_system_distribution(&parse_expr("c1").unwrap(), std::slice::from_ref(&c), LIMIT).unwrap();
        assert_eq!(id.pmf, c.pmf());
    }

    #[test]
    fn exact_distribution_errors() {
        let half = d(&[0.5, 0.5]);
        let e = parse_expr("series(c1, c2)").unwrap();
        assert!(matches!(
            exact_system_distribution(&e, std::slice::from_ref(&half), LIMIT),
            Err(Error::ArityMismatch { arity: 2, given: 1 })
        ));
        assert!(matches!(
            exact_system_distribution(&e, &[half.clone(), d(&[0.2, 0.3, 0.5])], LIMIT),
            Err(Error::StateCountMismatch { .. })
        ));
        assert!(matches!(
            exact_system_distribution(&e, &[half.clone(), half.clone()], 3),
            Err(Error::ExplosionLimit { .. })
        ));
    }

    #[test]
    fn closed_forms() {
        let c = d(&[0.0, 0.1, 0.3, 0.3, 0.3]);
        let ten = vec![c.clone(); 10];
        let v = closed_form_cdf(SystemKind::Series, &ten, 1).unwrap();
        assert!((v - 0.6513215599).abs() < 1e-10);
        let half = d(&[0.5, 0.5]);
        assert_eq!(
            closed_form_cdf(SystemKind::Parallel, &[half.clone(), half.clone()], 0).unwrap(),
            0.25
        );
        for j in 0..=4 {
            let one = closed_form_cdf(SystemKind::Series, std::slice::from_ref(&c), j).unwrap();
            assert!((one - c.cdf(j).unwrap()).abs() < 1e-15);
        }
        assert!(matches!(
            closed_form_cdf(SystemKind::Series, &ten, 5),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn bounds() {
        let half = d(&[0.5, 0.5]);
        let b = cdf_bounds(&[half.clone(), half.clone()], 0).unwrap();
        assert_eq!((b.lower, b.upper), (0.25, 0.75));
        let c = d(&[0.2, 0.3, 0.5]);
        let b = cdf_bounds(std::slice::from_ref(&c), 1).unwrap();
        assert!((b.lower - b.upper).abs() < 1e-15);
        assert!((b.lower - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dominance() {
        let better = d(&[0.1, 0.9]);
        let worse = d(&[0.5, 0.5]);
        for text in ["series(c1, c2)", "parallel(c1, c2)"] {
            let e = parse_expr(text).unwrap();
            let out = dominance_check(
                &e,
                &[better.clone(), better.clone()],
                &[worse.clone(), worse.clone()],
                LIMIT,
            )
            .unwrap();
            assert!(out.holds);
            let same = dominance_check(
                &e,
                &[worse.clone(), worse.clone()],
                &[worse.clone(), worse.clone()],
                LIMIT,
            )
            .unwrap();
            assert!(same.holds);
            assert!(matches!(
                dominance_check(
                    &e,
                    &[worse.clone(), worse.clone()],
                    &[better.clone(), better.clone()],
                    LIMIT
                ),
                Err(Error::HypothesisViolated(_))
            ));
        }
    }

    #[test]
    fn monte_carlo() {
        let half = d(&[0.5, 0.5]);
        let e = parse_expr("series(c1, c2)").unwrap();
        let dists = [half.clone(), half.clone()];
        let a = monte_carlo_cdf(&e, &dists, 0, 100_000, 42).unwrap();
        assert!((a.estimate - 0.75).abs() < 0.01, "{a:?}");
        assert!((a.estimate - 0.75).abs() <= 6.0 * a.std_error);
        let b = monte_carlo_cdf(&e, &dists, 0, 100_000, 42).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let one = monte_carlo_cdf(&e, &dists, 0, 1, 9).unwrap();
        assert!(one.estimate == 0.0 || one.estimate == 1.0);
        assert!(monte_carlo_cdf(&e, &dists, 0, 0, 9).is_err());

        let all = monte_carlo_distribution(&e, &dists, 5000, 11).unwrap();
        for est in &all {
            let single = monte_carlo_cdf(&e, &dists, est.level, 5000, 11).unwrap();
            assert_eq!(single, *est);
        }
        assert_eq!(all.last().unwrap().estimate, 1.0);
    }

    #[test]
    fn serde_validates() {
        let ok: ComponentDistribution = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(ok.pmf(), &[0.25, 0.75]);
        assert!(serde_json::from_str::<ComponentDistribution>("[0.25, 0.25]").is_err());
        assert_eq!(serde_json::to_string(&ok).unwrap(), "[0.25,0.75]");
    }
}
