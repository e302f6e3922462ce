//! Qualitative resource allocation of indivisible goods.
//!
//! No utility numbers anywhere: the inputs are a hierarchy preorder over the
//! agents, a likelihood preorder over the resources with a plausibility
//! lifting to resource sets, and a 0/1 request matrix. On top of those this
//! crate implements:
//!
//! - the dominance-plausible welfare comparison between allocations
//!   ([`welfare`]);
//! - rational one-resource deals and the negotiation loop that reaches a
//!   good (equivalently, optimal) allocation ([`deals`]);
//! - dispersion vectors that discriminate good allocations by how evenly
//!   each resource class is spread, with an exactly-minimal balanced
//!   construction ([`fairness`]);
//! - a brute-force oracle that replays every theorem by enumeration at desk
//!   scale ([`oracle`]);
//! - a JSON problem-file format ([`io`]).

pub mod deals;
pub mod error;
pub mod fairness;
pub mod io;
pub mod oracle;
pub mod plausibility;
pub mod problem;
pub mod relations;
pub mod welfare;

pub use error::{Error, LiftingViolation};
pub use plausibility::{Lifting, LiftingKind, Plausibility};
pub use problem::{Allocation, Problem};
pub use relations::{Permutation, TotalPreorder};
