//! Upper critical connection vectors of a 2-out-of-3 system at every level,
//! and the lower bound they give on φ.

use mscs::coherence::CoherenceChecker;
use mscs::{parse_expr, StateSpace};

fn main() -> mscs::Result<()> {
    let e = parse_expr("koon(2; c1, c2, c3)")?;
    let space = StateSpace::new(2)?;
    let checker = CoherenceChecker::new(&e, 3, space)?;
    for j in space.levels() {
        let set = checker.enumerate_ucv(j)?;
        let shown: Vec<String> = set.vectors.iter().map(ToString::to_string).collect();
        println!("level {j}: {}", shown.join(" "));
    }

    let ucvs = checker.enumerate_ucv(2)?;
    let u = &ucvs.vectors[0];
    let above = space
        .vectors(3)
        .into_iter()
        .filter(|x| checker.level_lower_bound_check(u, 2, x).unwrap())
        .count();
    println!("every one of the {above} vectors satisfies: {u} <= x implies φ(x) >= 2");
    Ok(())
}
