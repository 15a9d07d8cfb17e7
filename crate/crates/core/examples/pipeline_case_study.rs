//! The ten-segment pipeline: probability of being in state 1 or worse, and
//! the full performance distribution.

use mscs::pipeline::{load_pipeline_spec, pipeline_distribution, pipeline_state1_cdf};

fn main() -> mscs::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/case_study.json");
    let spec = load_pipeline_spec(path)?;
    println!("{} segments, max state {}", spec.segments.len(), spec.max_state);
    println!("P_pipeline(1) = {:.10}", pipeline_state1_cdf(&spec)?);

    let d = pipeline_distribution(&spec)?;
    for (j, c) in d.cdf.iter().enumerate() {
        println!("  P({j}) = {c:.10}");
    }
    Ok(())
}
