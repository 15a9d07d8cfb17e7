//! Coherence reports for a composed structure and for a closure that is not
//! coherent (component 2 never matters).

use mscs::coherence::CoherenceChecker;
use mscs::{parse_expr, Level, StateSpace};

fn main() -> mscs::Result<()> {
    let space = StateSpace::new(3)?;

    let e = parse_expr("parallel(series(c1, c2), c3)")?;
    let report = CoherenceChecker::new(&e, 3, space)?.coherence_report()?;
    println!("{e}\n{}", report.to_table());

    let lazy = |x: &[Level]| x[0];
    let report = CoherenceChecker::new(&lazy, 2, space)?.coherence_report()?;
    println!("φ(x) = x1 on two components\n{}", report.to_table());
    for c in &report.counterexamples {
        println!("  {}", c.detail);
    }
    Ok(())
}
