//! Closed-form counting formulas, evaluated exactly.
//!
//! Every formula is computed in exact rationals following its displayed
//! product form; integrality of the final value is asserted.

mod family;
mod profile;
mod tree_in_tree;
mod types;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::arith::{to_count, BigCount, Ratio};
use crate::error::Result;

pub use family::{count_function_family, FunctionFamily};
pub use profile::{
    count_binary_horizontal, count_binary_profile, count_cayley_profile, count_cayley_profile_ell1,
    count_cayley_profile_ell2, count_sary_profile, eval_out_gf, explain_binary_profile,
    explain_cayley_profile, explain_sary_profile,
};
pub use tree_in_tree::{count_tree_in_tree, TargetTree};
pub use types::{count_cayley_complete, count_cayley_in, count_cayley_out, count_sary_in, count_sary_out};

/// Exact weights `x_{i,s}`; unspecified weights are 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightAssignment {
    weights: BTreeMap<(i64, i64), Ratio>,
}

impl WeightAssignment {
    pub fn ones() -> Self {
        WeightAssignment::default()
    }

    pub fn set(&mut self, i: i64, s: i64, x: Ratio) -> &mut Self {
        self.weights.insert((i, s), x);
        self
    }

    pub fn get(&self, i: i64, s: i64) -> Ratio {
        self.weights.get(&(i, s)).cloned().unwrap_or_else(Ratio::one)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Ratio)> {
        self.weights.iter()
    }
}

/// One labeled factor of a product formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub role: String,
    pub expr: String,
    #[serde(serialize_with = "ser_ratio")]
    pub value: Ratio,
}

fn ser_ratio<Se: serde::Serializer>(r: &Ratio, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
    s.serialize_str(&r.to_string())
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<28} {} = {}", self.role, self.expr, self.value)
    }
}

pub(crate) fn factor(role: &str, expr: impl Into<String>, value: Ratio) -> Factor {
    Factor { role: role.into(), expr: expr.into(), value }
}

/// Multiplies factors and asserts the product is a nonnegative integer.
pub fn product_of(factors: &[Factor], what: &str) -> Result<BigCount> {
    let v = factors.iter().fold(Ratio::one(), |acc, f| acc * &f.value);
    to_count(&v, what)
}
