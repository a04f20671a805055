//! Exact enumeration of trees embedded in the integer line.
//!
//! The crate counts S-embedded Cayley trees and S-ary trees by vertical
//! profile and by vertex types using closed product formulas, recounts them by
//! brute force, realizes the bijections between such trees and constrained
//! functions, cross-checks everything with cycle-sum identities and matrix-tree
//! determinants, and samples uniformly at random.

pub mod algebra;
pub mod arith;
pub mod bijection;
pub mod cayley;
pub mod conditions;
pub mod error;
pub mod formulas;
pub mod function;
pub mod oracle;
pub mod profile;
pub mod sampler;
pub mod sary;
pub mod steps;
pub mod tree;
pub mod types;
pub mod verify;
pub mod vertex;

pub use arith::{BigCount, Ratio};
pub use cayley::EmbeddedCayleyTree;
pub use error::{Error, Result};
pub use function::SFunction;
pub use profile::{validate_profile_for, Profile, Regime};
pub use sary::SAryTree;
pub use steps::StepSet;
pub use tree::MarkedSTree;
pub use types::TypeDistribution;
pub use vertex::{Vertex, VertexSet};
