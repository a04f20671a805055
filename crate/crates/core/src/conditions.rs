//! Path conditions (T), (T₁), (T₂′), (T₂″) on marked S-trees.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::Regime;
use crate::tree::MarkedSTree;

/// Which of the four general-regime cases a tree (or function) falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Case {
    A1,
    A2,
    A3,
    B,
}

/// Outcome of evaluating every path condition on one marked tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// (T) in the non-negative regime, (T₁) in the general one.
    pub t1: bool,
    pub t2_prime: bool,
    pub t2_double: bool,
    /// `ℓ¹ ∧ r^q`.
    pub meet: usize,
    /// Vertex following `1¹` on the path from the mark (the mark itself when `r = 0`).
    pub w0: Option<usize>,
}

impl ConditionReport {
    /// Case of a tree satisfying (T₁) and (T₂).
    pub fn case(&self, zero_one: usize) -> Option<Case> {
        if !self.t1 {
            return None;
        }
        if self.t2_prime {
            Some(if Some(self.meet) == self.w0 {
                Case::A3
            } else if self.meet == zero_one {
                Case::A2
            } else {
                Case::A1
            })
        } else if self.t2_double {
            Some(Case::B)
        } else {
            None
        }
    }
}

/// Deepest common ancestor of `a` and `b`.
pub fn meet(t: &MarkedSTree, a: usize, b: usize) -> usize {
    let up = t.path_to_root(a);
    let mut on = vec![false; t.parents().len()];
    for &v in &up {
        on[v] = true;
    }
    let mut v = b;
    loop {
        if on[v] {
            return v;
        }
        v = t.parent(v).expect("a and b share the root");
    }
}

/// On `path`, the first vertex of `V_{i−1}` is immediately preceded by `i¹`, for `i ∈ [1, r]`.
fn first_preceded(t: &MarkedSTree, path: &[usize]) -> bool {
    let vs = t.vertices();
    (1..=vs.r()).all(|i| match path.iter().position(|&v| vs.abscissa(v) == i - 1) {
        Some(pos) => pos > 0 && path[pos - 1] == vs.first(i),
        None => false,
    })
}

/// On `path`, the last vertex of `V_{i−1}` is immediately followed by `i¹`, for `i ∈ range`.
fn last_followed(t: &MarkedSTree, path: &[usize], range: std::ops::RangeInclusive<i64>) -> bool {
    let vs = t.vertices();
    range.into_iter().all(|i| match path.iter().rposition(|&v| vs.abscissa(v) == i - 1) {
        Some(pos) => path.get(pos + 1) == Some(&vs.first(i)),
        None => false,
    })
}

/// Evaluates (T₁), (T₂′), (T₂″) and the meet on a tree of the general regime.
/// The same (T₁) walk is condition (T) when `ℓ = 0`.
pub fn evaluate(t: &MarkedSTree) -> ConditionReport {
    let vs = t.vertices();
    let (ell, r) = (vs.ell(), vs.r());
    let up = t.path_to_root(t.mark());
    let t1 = first_preceded(t, &up);
    let ell1 = vs.first(ell);
    let m = meet(t, ell1, t.mark());
    let pos_meet = up.iter().position(|&v| v == m).expect("meet lies on the mark's path");
    let (w0, pos_one) = if r == 0 {
        (Some(t.mark()), None)
    } else {
        let p1 = up.iter().position(|&v| v == vs.first(1));
        (p1.and_then(|p| up.get(p + 1).copied()), p1)
    };
    let ell_up = t.path_to_root(ell1);

    let t2_prime = ell < 0
        && match pos_one {
            Some(p) => p < pos_meet,
            None => r == 0,
        }
        && last_followed(t, &ell_up, ell + 1..=0);

    let t2_double = ell < 0 && r > 0 && {
        let weakly_after = pos_one.is_some_and(|p| p >= pos_meet);
        let positive = vs.abscissa(m) > 0;
        let to_meet = &ell_up[..=ell_up.iter().position(|&v| v == m).expect("meet is an ancestor")];
        let records = last_followed(t, to_meet, ell + 1..=-1);
        let zero = match up.iter().position(|&v| vs.abscissa(v) == -1) {
            Some(p) => p > 0 && up[p - 1] == vs.first(0),
            None => t.root() == vs.first(0),
        };
        weakly_after && positive && records && zero
    };
    ConditionReport { t1, t2_prime, t2_double, meet: m, w0 }
}

/// Checks the conditions characterizing the image of the bijection for `regime`.
pub fn check_tree_conditions(t: &MarkedSTree, regime: Regime) -> Result<ConditionReport> {
    let vs = t.vertices();
    let rep = evaluate(t);
    match regime {
        Regime::Nonneg => {
            if vs.ell() != 0 {
                return Err(Error::HypothesisViolation("non-negative regime requires ell = 0".into()));
            }
            if t.root() != vs.first(0) {
                return Err(Error::condition("T", "the tree must be rooted at 0^1"));
            }
            if !rep.t1 {
                return Err(Error::condition(
                    "T",
                    "on the path from the mark to 0^1, some first visit to V_{i-1} is not preceded by i^1",
                ));
            }
        }
        Regime::General => {
            if !rep.t1 {
                return Err(Error::condition(
                    "T1",
                    "on the path from the mark to the root, some first visit to V_{i-1} is not preceded by i^1",
                ));
            }
            if !rep.t2_prime && !rep.t2_double {
                return Err(Error::condition("T2", "neither (T2') nor (T2'') holds"));
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::Vertex;

    fn v(i: i64, k: u32) -> Vertex {
        Vertex::new(i, k)
    }

    #[test]
    fn smallest_general_tree() {
        let t = MarkedSTree::from_pairs("1;1".parse().unwrap(), "-1,1".parse().unwrap(), &[(v(-1, 1), v(0, 1))], v(0, 1))
            .unwrap();
        let rep = check_tree_conditions(&t, Regime::General).unwrap();
        assert!(rep.t2_prime && !rep.t2_double);
        assert_eq!(rep.case(t.vertices().first(0)), Some(Case::A3));
    }

    #[test]
    fn condition_t_on_path() {
        let p = "1,1".parse().unwrap();
        let t = MarkedSTree::from_pairs(p, "-1,1".parse().unwrap(), &[(v(1, 1), v(0, 1))], v(1, 1)).unwrap();
        assert!(check_tree_conditions(&t, Regime::Nonneg).is_ok());
    }
}
