//! Analysis of multistate coherent systems.
//!
//! Components and the system take performance levels `0..=M`, from complete
//! failure to perfect functioning. The crate covers
//!
//! - [`state`]: state vectors and their lattice operations;
//! - [`structure`]: series, parallel and k-out-of-n structure functions and a
//!   small DSL (`series(c1, parallel(c2, c3))`) for composing them;
//! - [`coherence`]: exhaustive checks of monotonicity, relevance and the
//!   boundary condition, upper critical connection vectors, and the
//!   deterministic properties of series and parallel systems;
//! - [`probability`]: exact, closed-form, bounded and Monte Carlo system
//!   performance distributions for independent components;
//! - [`pipeline`]: the series oil-and-gas pipeline model and its state-1 sweep;
//! - [`cli`]: the `mscs` command-line front end.
//!
//! ```
//! use mscs::structure::parse_expr;
//! use mscs::probability::{exact_system_distribution, ComponentDistribution};
//! use mscs::state::DEFAULT_ENUMERATION_LIMIT;
//!
//! let e = parse_expr("series(c1, c2)").unwrap();
//! let half = ComponentDistribution::new(vec![0.5, 0.5]).unwrap();
//! let d = exact_system_distribution(&e, &[half.clone(), half], DEFAULT_ENUMERATION_LIMIT).unwrap();
//! assert_eq!(d.pmf, vec![0.75, 0.25]);
//! ```

pub mod cli;
pub mod coherence;
pub mod error;
pub mod pipeline;
pub mod probability;
pub mod rng;
pub mod state;
pub mod structure;

pub use error::{Error, Result};
pub use state::{Level, StateSpace, StateVector};
pub use structure::{parse_expr, StructureExpr, StructureFunction, SystemKind};
