//! Product bounds on the CDF of an arbitrary coherent structure, and the
//! effect of improving every component.

use mscs::parse_expr;
use mscs::probability::{cdf_bounds, dominance_check, exact_system_distribution, ComponentDistribution};
use mscs::state::DEFAULT_ENUMERATION_LIMIT as LIMIT;

fn main() -> mscs::Result<()> {
    let e = parse_expr("koon(2; c1, c2, c3)")?;
    let worn = vec![ComponentDistribution::new(vec![0.2, 0.3, 0.5]).unwrap(); 3];
    let serviced = vec![ComponentDistribution::new(vec![0.05, 0.25, 0.7]).unwrap(); 3];

    let exact = exact_system_distribution(&e, &worn, LIMIT)?;
    println!("{e}: parallel bound <= P(j) <= series bound");
    for j in 0..=2 {
        let b = cdf_bounds(&worn, j)?;
        println!(
            "  j={j}: {:.4} <= {:.4} <= {:.4}",
            b.lower, exact.cdf[j as usize], b.upper
        );
    }

    let outcome = dominance_check(&e, &serviced, &worn, LIMIT)?;
    println!("servicing every component lowers the CDF: {}", outcome.holds);
    for (j, (p, pp)) in outcome.cdf.iter().zip(&outcome.cdf_primed).enumerate() {
        println!("  P({j}) = {p:.4}  P'({j}) = {pp:.4}");
    }
    Ok(())
}
