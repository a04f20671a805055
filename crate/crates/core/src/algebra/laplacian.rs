//! Matrix-tree route: S-trees are spanning trees of the digraph `K` on `V`.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::cycles::{eval_p_refined_closed, CycleGraph};
use super::det::{bareiss_det, MAX_DIM};
use crate::arith::{factorial, ratio_int, ratio_pow, ratio_uint, to_count, BigCount, Ratio};
use crate::error::{Error, Result};
use crate::formulas::{TargetTree, WeightAssignment};
use crate::oracle::WeightedArcs;
use crate::profile::Profile;
use crate::steps::StepSet;
use crate::vertex::VertexSet;

/// `K` on `V`: an arc `i^p → j^q` of weight `x_{i,s}` whenever the two vertices differ
/// and `j = i − s` with `s ∈ S`.
#[derive(Debug, Clone)]
pub struct LaplacianSystem {
    pub vertices: Arc<VertexSet>,
    pub steps: StepSet,
    pub weights: WeightAssignment,
}

impl LaplacianSystem {
    pub fn new(profile: &Profile, steps: &StepSet, weights: &WeightAssignment) -> Result<Self> {
        let vertices = Arc::new(VertexSet::new(profile.clone()));
        if vertices.len() > MAX_DIM + 1 {
            return Err(Error::BudgetExceeded(format!("Laplacian on {} vertices (limit {})", vertices.len(), MAX_DIM + 1)));
        }
        Ok(LaplacianSystem { vertices, steps: steps.clone(), weights: weights.clone() })
    }

    /// `0^{n_0}`, the root of the counted spanning trees.
    pub fn root(&self) -> usize {
        self.vertices.level(0).end - 1
    }

    pub fn arcs(&self) -> WeightedArcs {
        let vs = &self.vertices;
        (0..vs.len())
            .map(|v| {
                let i = vs.abscissa(v);
                self.steps
                    .iter()
                    .flat_map(|s| vs.level(i - s).filter(move |&w| w != v).map(move |w| (w, s)))
                    .map(|(w, s)| (w, self.weights.get(i, s)))
                    .collect()
            })
            .collect()
    }

    /// The weighted Laplacian: out-degree on the diagonal, minus arc weights elsewhere.
    pub fn matrix(&self) -> Vec<Vec<Ratio>> {
        let n = self.vertices.len();
        let mut m = vec![vec![Ratio::zero(); n]; n];
        for (v, out) in self.arcs().into_iter().enumerate() {
            for (w, x) in out {
                m[v][v] += &x;
                m[v][w] -= x;
            }
        }
        m
    }

    /// `M̃`: the Laplacian without the row and column of the root.
    pub fn minor(&self) -> Vec<Vec<Ratio>> {
        let root = self.root();
        self.matrix()
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != root)
            .map(|(_, row)| row.into_iter().enumerate().filter(|&(j, _)| j != root).map(|(_, x)| x).collect())
            .collect()
    }
}

/// Generating function of spanning trees of `K` rooted at `0^{n_0}`, as `det M̃`.
pub fn laplacian_minor_det(profile: &Profile, steps: &StepSet, weights: &WeightAssignment) -> Result<Ratio> {
    bareiss_det(LaplacianSystem::new(profile, steps, weights)?.minor())
}

/// The factored value of `det M̃`: the refined cycle polynomial at `y = n` times
/// `∏_j (Σ_s x_{j,s} n_{j−s})^{ñ_j − 1}`. The level-0 factor of the polynomial is merged
/// into its power so that `ñ_0 = 0` needs no inverse.
pub fn laplacian_minor_closed(profile: &Profile, steps: &StepSet, weights: &WeightAssignment) -> Result<Ratio> {
    let g = CycleGraph::new(profile.ell(), profile.r(), steps.clone())?;
    if profile.total() == 1 {
        return Ok(Ratio::one());
    }
    let lin = |j: i64| steps.iter().fold(Ratio::zero(), |a, s| a + weights.get(j, s) * ratio_int(profile.n(j - s)));
    let tilde = |j: i64| profile.n(j) as i64 - i64::from(j == 0);
    let mut acc = if g.ell == 0 && g.r == 0 {
        let y = [ratio_int(profile.n(0))];
        eval_p_refined_closed(&g, &y, weights)? * ratio_pow(&lin(0), tilde(0) - 1)?
    } else {
        let mut a = ratio_pow(&lin(0), tilde(0))?;
        for i in g.ell..0 {
            a *= weights.get(i, -1);
        }
        for i in 1..=g.r {
            a *= weights.get(i, 1);
        }
        for i in g.ell + 1..g.r {
            a *= ratio_int(profile.n(i));
        }
        a
    };
    for j in profile.abscissas().filter(|&j| j != 0) {
        acc *= ratio_pow(&lin(j), tilde(j) - 1)?;
    }
    Ok(acc)
}

/// `n_0 · n! / ∏_{i=ℓ}^{r} n_i!` times `det M̃`: the weighted count of embedded Cayley trees.
pub fn cayley_from_spanning(profile: &Profile, steps: &StepSet, weights: &WeightAssignment) -> Result<Ratio> {
    Ok(conversion(profile.counts(), profile.n(0)) * laplacian_minor_det(profile, steps, weights)?)
}

fn conversion(counts: &[u64], n_root: u64) -> Ratio {
    let n: u64 = counts.iter().sum();
    let mut acc = ratio_int(n_root) * ratio_uint(&factorial(n));
    for &c in counts {
        acc /= ratio_uint(&factorial(c));
    }
    acc
}

/// Tree-in-tree count by the matrix-tree theorem on the blow-up of the target: `n_a`
/// copies of each node, copies of adjacent nodes joined.
pub fn tree_in_tree_det(target: &TargetTree) -> Result<BigCount> {
    let n = target.total() as usize;
    if n > MAX_DIM + 1 {
        return Err(Error::BudgetExceeded(format!("blow-up on {n} vertices (limit {})", MAX_DIM + 1)));
    }
    if target.counts().contains(&0) {
        return Err(Error::NonSurjectiveProfile("every node of the target needs a vertex".into()));
    }
    let node: Vec<usize> = target
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat(a).take(c as usize))
        .collect();
    let root = node.iter().position(|&a| a == target.root()).expect("root node is populated");
    let mut m = vec![vec![Ratio::zero(); n]; n];
    for u in 0..n {
        for w in 0..n {
            if u != w && target.neighbours(node[u]).contains(&node[w]) {
                m[u][u] += Ratio::one();
                m[u][w] -= Ratio::one();
            }
        }
    }
    let minor: Vec<Vec<Ratio>> = m
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != root)
        .map(|(_, row)| row.into_iter().enumerate().filter(|&(j, _)| j != root).map(|(_, x)| x).collect())
        .collect();
    let det = bareiss_det(minor)?;
    to_count(&(conversion(target.counts(), target.counts()[target.root()]) * det), "tree-in-tree determinant")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: &str) -> Profile {
        x.parse().unwrap()
    }

    fn s(x: &str) -> StepSet {
        x.parse().unwrap()
    }

    #[test]
    fn small_spanning_counts() {
        let w = WeightAssignment::ones();
        assert_eq!(laplacian_minor_det(&p("2;2,1"), &s("-1,1"), &w).unwrap(), ratio_int(12));
        assert_eq!(laplacian_minor_det(&p("1"), &s("0,1"), &w).unwrap(), ratio_int(1));
        assert_eq!(cayley_from_spanning(&p("2;2,1"), &s("-1,1"), &w).unwrap(), ratio_int(720));
        assert_eq!(cayley_from_spanning(&p("3"), &s("0,1"), &w).unwrap(), ratio_int(9));
        assert_eq!(laplacian_minor_closed(&p("3"), &s("0,1"), &w).unwrap(), ratio_int(3));
    }

    #[test]
    fn blow_up_of_a_path() {
        let t = TargetTree::path(vec![2, 2, 1], 1).unwrap();
        assert_eq!(tree_in_tree_det(&t).unwrap(), 720u32.into());
        let single = TargetTree::new(vec![4], 0, vec![]).unwrap();
        assert_eq!(tree_in_tree_det(&single).unwrap(), 0u32.into());
    }
}
