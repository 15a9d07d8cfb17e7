//! Parse a structure expression, print its canonical form and evaluate it.
//!
//!     cargo run --example structure_eval -- "series(c1, koon(2; c2, c3, c4))" 3,1,4,2

use mscs::{parse_expr, StateVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = args
        .next()
        .unwrap_or_else(|| "series(c1, koon(2; c2, c3, c4))".into());
    let state: StateVector = args.next().as_deref().unwrap_or("3,1,4,2").parse()?;

    let e = parse_expr(&text)?;
    println!("canonical: {e}");
    println!("arity:     {}", e.arity());
    println!("φ{state} = {}", e.eval_expr(&state)?);
    Ok(())
}
