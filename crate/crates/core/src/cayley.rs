use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::sary::SAryTree;
use crate::steps::StepSet;
use crate::tree::is_acyclic;

/// A rooted tree on labels `1..=n` embedded in ℤ: the root sits at 0 and every
/// child–parent abscissa difference lies in `S`. Stored 0-based internally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddedCayleyTree {
    steps: StepSet,
    root: usize,
    parent: Vec<Option<usize>>,
    abscissa: Vec<i64>,
}

impl EmbeddedCayleyTree {
    /// `parent` and `abscissa` are indexed by label − 1; `parent` holds 0-based labels.
    pub fn new(steps: StepSet, parent: Vec<Option<usize>>, abscissa: Vec<i64>) -> Result<Self> {
        let n = parent.len();
        if n == 0 || abscissa.len() != n {
            return Err(Error::InvalidStructure("size mismatch or empty tree".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidStructure(format!("expected one root, found {}", roots.len())));
        }
        let root = roots[0];
        if abscissa[root] != 0 {
            return Err(Error::InvalidStructure("root must have abscissa 0".into()));
        }
        for v in 0..n {
            if let Some(p) = parent[v] {
                if p >= n {
                    return Err(Error::InvalidStructure(format!("parent label {} out of range", p + 1)));
                }
                if !steps.contains(abscissa[v] - abscissa[p]) {
                    return Err(Error::InvalidStructure(format!(
                        "label {} sits at step {} from its parent, not in S",
                        v + 1,
                        abscissa[v] - abscissa[p]
                    )));
                }
            }
        }
        if !is_acyclic(&parent) {
            return Err(Error::InvalidStructure("parent map contains a cycle".into()));
        }
        Ok(EmbeddedCayleyTree { steps, root, parent, abscissa })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> &StepSet {
        &self.steps
    }

    /// 0-based root label.
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn abscissas(&self) -> &[i64] {
        &self.abscissa
    }

    /// Vertex counts per abscissa; fails when some abscissa between the extremes is empty.
    pub fn profile(&self) -> Result<Profile> {
        let lo = *self.abscissa.iter().min().expect("nonempty");
        let hi = *self.abscissa.iter().max().expect("nonempty");
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for &a in &self.abscissa {
            counts[(a - lo) as usize] += 1;
        }
        Profile::new(lo, counts)
    }

    /// At most one child per abscissa at every vertex.
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        (0..self.len()).filter_map(|v| self.parent[v].map(|p| (p, self.abscissa[v]))).all(|k| seen.insert(k))
    }

    /// The S-ary tree of an injective tree (its class under relabeling).
    pub fn to_sary(&self) -> Result<SAryTree> {
        if !self.is_injective() {
            return Err(Error::NotInjective("tree has two children at the same abscissa".into()));
        }
        Ok(SAryTree::from_parent_map(&self.parent, &self.abscissa))
    }

    pub fn to_json_value(&self) -> Value {
        let parent: Vec<usize> = self.parent.iter().map(|p| p.map_or(0, |p| p + 1)).collect();
        json!({
            "abscissa": self.abscissa,
            "n": self.len(),
            "parent": parent,
            "root": self.root + 1,
        })
    }

    /// Canonical JSON `{"abscissa":[..],"n":..,"parent":[..],"root":..}`; the root's parent is 0.
    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &Value, steps: StepSet) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("EmbeddedCayleyTree JSON: {m}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let root = v["root"].as_u64().ok_or_else(|| bad("missing root"))? as usize;
        let parent: Vec<usize> = serde_json::from_value(v["parent"].clone()).map_err(|e| bad(&e.to_string()))?;
        let abscissa: Vec<i64> =
            serde_json::from_value(v["abscissa"].clone()).map_err(|e| bad(&e.to_string()))?;
        if parent.len() != n || abscissa.len() != n || root == 0 || root > n {
            return Err(bad("inconsistent sizes"));
        }
        let parent: Vec<Option<usize>> = parent.into_iter().map(|p| p.checked_sub(1)).collect();
        let t = EmbeddedCayleyTree::new(steps, parent, abscissa)?;
        if t.root + 1 != root {
            return Err(bad("declared root does not match the parent map"));
        }
        Ok(t)
    }

    pub fn from_json(s: &str, steps: StepSet) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        EmbeddedCayleyTree::from_json_value(&v, steps)
    }
}
