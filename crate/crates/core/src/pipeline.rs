//! Series oil-and-gas pipeline model.
//!
//! A pipeline is a series system of segments, each with its own state
//! distribution over `0..=M`. Its CDF is
//! `P_pipeline(j) = 1 - Π_i (1 - (p_i0 + .. + p_ij))`, and when no segment
//! carries mass at complete failure (`p_i0 = 0`) the state-1 value reduces to
//! `1 - Π_i (1 - p_i1)`.
//!
//! Spec files are JSON:
//!
//! ```json
//! { "max_state": 4,
//!   "segments": [ { "name": "S1", "pmf": [0.0, 0.1, 0.3, 0.3, 0.3] } ] }
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::{closed_form_cdf, ComponentDistribution, SystemDistribution};
use crate::rng::Stream;
use crate::state::Level;
use crate::structure::SystemKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub pmf: ComponentDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineSpec {
    pub max_state: Level,
    pub segments: Vec<Segment>,
}

#[derive(Deserialize)]
struct RawSpec {
    max_state: usize,
    segments: Vec<RawSegment>,
}

#[derive(Deserialize)]
struct RawSegment {
    name: String,
    pmf: Vec<f64>,
}

impl PipelineSpec {
    /// Validates segment count, PMF lengths and every PMF.
    pub fn new(max_state: Level, segments: Vec<(String, Vec<f64>)>) -> Result<Self> {
        Self::build(Path::new("<memory>"), max_state as usize, segments)
    }

    fn build(origin: &Path, max_state: usize, segments: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let format = |message: String| Error::Format {
            path: origin.to_path_buf(),
            message,
        };
        if max_state == 0 || max_state > Level::MAX as usize {
            return Err(format(format!(
                "field `max_state`: must be in 1..=255, got {max_state}"
            )));
        }
        if segments.is_empty() {
            return Err(format(
                "field `segments`: at least one segment is required".into(),
            ));
        }
        let segments = segments
            .into_iter()
            .enumerate()
            .map(|(i, (name, pmf))| {
                if pmf.len() != max_state + 1 {
                    return Err(format(format!(
                        "field `segments[{i}].pmf` ({name}): expected {} entries for max_state {max_state}, found {}",
                        max_state + 1,
                        pmf.len()
                    )));
                }
                let pmf = ComponentDistribution::new(pmf).map_err(|source| Error::InvalidPmf {
                    subject: format!("segment `{name}`"),
                    source,
                })?;
                Ok(Segment { name, pmf })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PipelineSpec {
            max_state: max_state as Level,
            segments,
        })
    }

    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Format {
            path: origin.to_path_buf(),
            message: format!("line {} column {}: {e}", e.line(), e.column()),
        })?;
        let segments = raw.segments.into_iter().map(|s| (s.name, s.pmf)).collect();
        Self::build(origin, raw.max_state, segments)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn distributions(&self) -> Vec<ComponentDistribution> {
        self.segments.iter().map(|s| s.pmf.clone()).collect()
    }
}

/// Reads and validates a pipeline spec file.
pub fn load_pipeline_spec(path: impl AsRef<Path>) -> Result<PipelineSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    PipelineSpec::from_json_str(&text, path)
}

/// `P_pipeline(j)`.
pub fn pipeline_cdf(spec: &PipelineSpec, j: Level) -> Result<f64> {
    closed_form_cdf(SystemKind::Series, &spec.distributions(), j)
}

/// `P_pipeline(j)` at every level, as a distribution.
pub fn pipeline_distribution(spec: &PipelineSpec) -> Result<SystemDistribution> {
    let dists = spec.distributions();
    let cdf = (0..=spec.max_state)
        .map(|j| closed_form_cdf(SystemKind::Series, &dists, j))
        .collect::<Result<Vec<_>>>()?;
    let pmf = cdf
        .iter()
        .enumerate()
        .map(|(j, c)| if j == 0 { *c } else { c - cdf[j - 1] })
        .collect();
    Ok(SystemDistribution { pmf, cdf })
}

/// `1 - Π (1 - p_i1)`, multiplied in segment order.
pub fn state1_from_masses(masses: impl IntoIterator<Item = f64>) -> f64 {
    1.0 - masses.into_iter().map(|p| 1.0 - p).product::<f64>()
}

fn require_no_failure_mass<'a>(segments: impl IntoIterator<Item = &'a Segment>) -> Result<()> {
    for s in segments {
        let p0 = s.pmf.pmf()[0];
        if p0 != 0.0 {
            return Err(Error::PreconditionViolated(format!(
                "segment `{}` has p_0 = {p0}; the state-1 form needs zero mass at complete failure",
                s.name
            )));
        }
    }
    Ok(())
}

/// `P_pipeline(1)` in the reduced form `1 - Π (1 - p_i1)`, which requires
/// `p_i0 = 0` for every segment.
pub fn pipeline_state1_cdf(spec: &PipelineSpec) -> Result<f64> {
    require_no_failure_mass(&spec.segments)?;
    Ok(state1_from_masses(spec.segments.iter().map(|s| s.pmf.pmf()[1])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// 1-based.
    pub trial: u64,
    pub p_1_1: f64,
    pub p_2_1: f64,
    #[serde(rename = "P_pipeline_1")]
    pub p_pipeline_1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub seed: u64,
    pub trials: u64,
    /// `p_i1` for segments 3.. held fixed during the sweep.
    pub fixed_masses: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// `P_pipeline(1)` for arbitrary state-1 masses of segments 1 and 2.
    pub fn evaluate(&self, p_1_1: f64, p_2_1: f64) -> f64 {
        state1_from_masses(
            [p_1_1, p_2_1]
                .into_iter()
                .chain(self.fixed_masses.iter().copied()),
        )
    }

    /// Row with the largest `P_pipeline(1)`; the first one on ties.
    pub fn argmax(&self) -> &SweepRow {
        self.rows
            .iter()
            .reduce(|best, r| {
                if r.p_pipeline_1 > best.p_pipeline_1 {
                    r
                } else {
                    best
                }
            })
            .expect("a sweep has at least one row")
    }

    /// Supremum over the open unit square, approached at the corner
    /// `p_1_1 = p_2_1 = 1`.
    pub fn supremum(&self) -> f64 {
        self.evaluate(1.0, 1.0)
    }

    /// The spec a row corresponds to: segments 1 and 2 get `p_1 = draw`, the
    /// remaining mass on state `M`, nothing elsewhere.
    pub fn spec_for_row(&self, base: &PipelineSpec, row: &SweepRow) -> Result<PipelineSpec> {
        let m = base.max_state;
        let mut spec = base.clone();
        for (seg, p) in spec.segments.iter_mut().zip([row.p_1_1, row.p_2_1]) {
            let mut pmf = vec![0.0; m as usize + 1];
            pmf[1] = p;
            pmf[m as usize] = 1.0 - p;
            seg.pmf = ComponentDistribution::new(pmf).map_err(|source| Error::InvalidPmf {
                subject: format!("segment `{}` in trial {}", seg.name, row.trial),
                source,
            })?;
        }
        Ok(spec)
    }
}

/// Sweeps the state-1 masses of segments 1 and 2 uniformly over `(0, 1)`
/// while holding the others at their spec values, recording `P_pipeline(1)`
/// per trial. Each trial draws `p_1_1` then `p_2_1` from one seeded stream.
pub fn sweep_state1(spec: &PipelineSpec, trials: u64, seed: u64) -> Result<SweepResult> {
    if trials == 0 {
        return Err(Error::PreconditionViolated(
            "a sweep needs at least one trial".into(),
        ));
    }
    if spec.segments.len() < 2 {
        return Err(Error::PreconditionViolated(
            "a sweep varies segments 1 and 2, so the spec needs at least two".into(),
        ));
    }
    if spec.max_state < 2 {
        return Err(Error::PreconditionViolated(
            "a sweep needs max_state >= 2 to keep state 1 apart from the top state".into(),
        ));
    }
    require_no_failure_mass(&spec.segments[2..])?;

    let mut result = SweepResult {
        seed,
        trials,
        fixed_masses: spec.segments[2..].iter().map(|s| s.pmf.pmf()[1]).collect(),
        rows: Vec::with_capacity(trials as usize),
    };
    let mut stream = Stream::new(seed);
    for trial in 1..=trials {
        let p_1_1 = stream.open_unit();
        let p_2_1 = stream.open_unit();
        let p_pipeline_1 = result.evaluate(p_1_1, p_2_1);
        result.rows.push(SweepRow {
            trial,
            p_1_1,
            p_2_1,
            p_pipeline_1,
        });
    }
    Ok(result)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// Writes `trial,p_1_1,p_2_1,P_pipeline_1`, one row per trial, numbers with 17
/// significant digits.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "p_1_1", "p_2_1", "P_pipeline_1"])?;
    for r in &result.rows {
        w.write_record([
            r.trial.to_string(),
            num(r.p_1_1),
            num(r.p_2_1),
            num(r.p_pipeline_1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `level,pmf,cdf`, one row per level.
pub fn write_distribution_csv<W: Write>(dist: &SystemDistribution, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "pmf", "cdf"])?;
    for (j, (p, c)) in dist.pmf.iter().zip(&dist.cdf).enumerate() {
        w.write_record([j.to_string(), num(*p), num(*c)])?;
    }
    w.flush()?;
    Ok(())
}

/// Something that can be exported as CSV.
pub enum Export<'a> {
    Sweep(&'a SweepResult),
    Distribution(&'a SystemDistribution),
}

pub fn export_results(what: Export<'_>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(io_err(path))?;
    match what {
        Export::Sweep(r) => write_sweep_csv(r, file),
        Export::Distribution(d) => write_distribution_csv(d, file),
    }
    .map_err(csv_err(path))
}

/// Reads a sweep CSV back into rows.
pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().map(|row| row.map_err(csv_err(path))).collect()
}
