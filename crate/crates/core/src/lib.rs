//! Maximum k-nice subsets of Z², i.e. maximum k-systems of simple closed
//! curves on the torus.
//!
//! A set of lattice points is *k-nice* when it consists of non-zero coprime
//! pairs, never holds both `p` and `-p`, and every two of its points span a
//! parallelogram of area at most `k`. The crate computes the maximum size of
//! such a set for a given `k` and carries every auxiliary quantity needed to
//! certify the answer:
//!
//! * [`numtheory`]: the coprime-density constants `rho`, `alpha`, `beta`;
//! * [`lattice`]: points, nice sets, unimodular maps, hulls;
//! * [`lp`]: an exact rational simplex for the strip linear programs and
//!   the explicit dual certificates bounding their optima;
//! * [`heightred`]: the height-reduction verifier and the constructive
//!   `sqrt(2k)` reducer;
//! * [`search`]: the exact branch-and-bound over row intervals;
//! * [`closedform`]: closed forms for low heights, the exceptional table,
//!   and explicit extremal constructions;
//! * [`oracle`]: an independent brute-force maximum for tiny `k`;
//! * [`bounds`]: the inequality suites that tie everything together.

pub mod bounds;
pub mod cache;
pub mod closedform;
pub mod error;
pub mod heightred;
pub mod lattice;
pub mod lp;
pub mod numtheory;
pub mod oracle;
pub mod rational;
pub mod search;

pub use error::{Error, Result};
pub use lattice::{NiceSet, Point, UnimodularMatrix};
pub use rational::Rational;
