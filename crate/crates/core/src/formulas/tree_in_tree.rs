use serde::{Deserialize, Serialize};

use crate::arith::{factorial, ratio_int, ratio_pow, ratio_uint, to_count, BigCount};
use crate::error::{Error, Result};

/// A rooted target tree `𝒯` on abscissas `0..k`, with a vertex count per abscissa.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTarget", into = "RawTarget")]
pub struct TargetTree {
    counts: Vec<u64>,
    root: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawTarget {
    counts: Vec<u64>,
    root: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawTarget> for TargetTree {
    type Error = Error;

    fn try_from(r: RawTarget) -> Result<Self> {
        TargetTree::new(r.counts, r.root, r.edges)
    }
}

impl From<TargetTree> for RawTarget {
    fn from(t: TargetTree) -> Self {
        RawTarget { counts: t.counts, root: t.root, edges: t.edges }
    }
}

impl TargetTree {
    /// Checks that `edges` form a tree on `0..counts.len()`.
    pub fn new(counts: Vec<u64>, root: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let k = counts.len();
        let bad = |m: String| Error::InvalidStructure(format!("target tree: {m}"));
        if k == 0 || root >= k {
            return Err(bad("root out of range".into()));
        }
        if edges.len() != k - 1 {
            return Err(bad(format!("{} edges for {k} abscissas", edges.len())));
        }
        let mut adjacency = vec![Vec::new(); k];
        for &(a, b) in &edges {
            if a >= k || b >= k || a == b {
                return Err(bad(format!("invalid edge ({a},{b})")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut seen = vec![false; k];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.contains(&false) {
            return Err(bad("not connected".into()));
        }
        Ok(TargetTree { counts, root, edges, adjacency })
    }

    /// The path `0 − 1 − … − (k−1)` rooted at `root`.
    pub fn path(counts: Vec<u64>, root: usize) -> Result<Self> {
        let edges = (1..counts.len()).map(|i| (i - 1, i)).collect();
        TargetTree::new(counts, root, edges)
    }

    /// A star with center 0.
    pub fn star(counts: Vec<u64>, root: usize) -> Result<Self> {
        let edges = (1..counts.len()).map(|i| (0, i)).collect();
        TargetTree::new(counts, root, edges)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Surjective `𝒯`-embedded Cayley trees with the target's profile.
pub fn count_tree_in_tree(target: &TargetTree) -> Result<BigCount> {
    if let Some(i) = target.counts.iter().position(|&c| c == 0) {
        return Err(Error::NonSurjectiveProfile(format!("abscissa {i} has no vertex")));
    }
    let n = target.total();
    let mut acc = ratio_int(target.counts[target.root]) * ratio_uint(&factorial(n));
    for (i, &ni) in target.counts.iter().enumerate() {
        acc /= ratio_uint(&factorial(ni));
        let around: u64 = target.neighbours(i).iter().map(|&j| target.counts[j]).sum();
        acc *= ratio_pow(&ratio_int(around), ni as i64 - 1)?;
        acc *= ratio_pow(&ratio_int(ni), target.degree(i) as i64 - 1)?;
    }
    to_count(&acc, "tree-in-tree count")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_matches_step_set_count() {
        let t = TargetTree::path(vec![2, 2, 1], 1).unwrap();
        assert_eq!(count_tree_in_tree(&t).unwrap(), 720u32.into());
    }

    #[test]
    fn single_vertex_target() {
        let one = TargetTree::new(vec![1], 0, vec![]).unwrap();
        assert_eq!(count_tree_in_tree(&one).unwrap(), 1u32.into());
        // no edge of a tree with two vertices can map onto a one-vertex target
        let two = TargetTree::new(vec![2], 0, vec![]).unwrap();
        assert_eq!(count_tree_in_tree(&two).unwrap(), 0u32.into());
    }

    #[test]
    fn rejects_non_trees() {
        assert!(TargetTree::new(vec![1, 1, 1], 0, vec![(0, 1), (0, 1)]).is_err());
        let t = TargetTree::path(vec![1, 0], 0).unwrap();
        assert!(matches!(count_tree_in_tree(&t), Err(Error::NonSurjectiveProfile(_))));
    }
}
