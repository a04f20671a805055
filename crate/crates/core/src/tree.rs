use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::steps::StepSet;
use crate::vertex::{Vertex, VertexSet};

/// A marked S-tree `(T, r^q)` on `V`. `parent[v]` is `None` exactly at the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedSTree {
    vertices: Arc<VertexSet>,
    steps: StepSet,
    parent: Vec<Option<usize>>,
    root: usize,
    mark: usize,
}

impl MarkedSTree {
    pub fn new(
        vertices: Arc<VertexSet>,
        steps: StepSet,
        parent: Vec<Option<usize>>,
        mark: usize,
    ) -> Result<Self> {
        let n = vertices.len();
        if parent.len() != n {
            return Err(Error::InvalidStructure("parent map has the wrong length".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidStructure(format!("tree must have one root, found {}", roots.len())));
        }
        let root = roots[0];
        if vertices.abscissa(root) != 0 {
            return Err(Error::InvalidStructure(format!("root {} is not in V_0", vertices.vertex(root))));
        }
        if mark >= n || vertices.abscissa(mark) != vertices.r() {
            return Err(Error::InvalidStructure("mark must lie in V_r".into()));
        }
        for v in 0..n {
            if let Some(p) = parent[v] {
                if p >= n {
                    return Err(Error::InvalidStructure(format!("parent id {p} out of range")));
                }
                let s = vertices.abscissa(v) - vertices.abscissa(p);
                if !steps.contains(s) {
                    return Err(Error::InvalidStructure(format!(
                        "edge {} -> {} uses step {s} not in S",
                        vertices.vertex(v),
                        vertices.vertex(p)
                    )));
                }
            }
        }
        if !is_acyclic(&parent) {
            return Err(Error::InvalidStructure("parent map contains a cycle".into()));
        }
        Ok(MarkedSTree { vertices, steps, parent, root, mark })
    }

    pub(crate) fn new_unchecked(
        vertices: Arc<VertexSet>,
        steps: StepSet,
        parent: Vec<Option<usize>>,
        mark: usize,
    ) -> Self {
        let root = parent.iter().position(|p| p.is_none()).expect("tree has a root");
        MarkedSTree { vertices, steps, parent, root, mark }
    }

    pub fn from_pairs(
        profile: Profile,
        steps: StepSet,
        edges: &[(Vertex, Vertex)],
        mark: Vertex,
    ) -> Result<Self> {
        let vertices = Arc::new(VertexSet::new(profile));
        let mut parent = vec![None; vertices.len()];
        for &(a, b) in edges {
            let (a, b) = (vertices.resolve(a)?, vertices.resolve(b)?);
            if parent[a].replace(b).is_some() {
                return Err(Error::InvalidStructure(format!("parent of {} given twice", vertices.vertex(a))));
            }
        }
        let mark = vertices.resolve(mark)?;
        MarkedSTree::new(vertices, steps, parent, mark)
    }

    pub fn vertices(&self) -> &Arc<VertexSet> {
        &self.vertices
    }

    pub fn steps(&self) -> &StepSet {
        &self.steps
    }

    pub fn profile(&self) -> &Profile {
        self.vertices.profile()
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn mark(&self) -> usize {
        self.mark
    }

    pub fn out_step(&self, v: usize) -> Option<i64> {
        self.parent[v].map(|p| self.vertices.abscissa(v) - self.vertices.abscissa(p))
    }

    /// Vertices from `v` up to and including the root.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        path_to_root(&self.parent, v)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        children_lists(&self.parent)
    }

    /// Whether each vertex has at most one child per abscissa (the S-ary case).
    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, self.vertices.abscissa(v))))
            .all(|key| seen.insert(key))
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (self.vertices.vertex(v), self.vertices.vertex(p))))
            .collect()
    }

    pub fn to_json_value(&self) -> Value {
        let parent: Vec<[i64; 4]> = self
            .edges()
            .into_iter()
            .map(|(a, b)| [a.abscissa, a.index as i64, b.abscissa, b.index as i64])
            .collect();
        json!({
            "mark": self.vertices.vertex(self.mark),
            "parent": parent,
            "profile": self.profile().to_string(),
            "root": self.vertices.vertex(self.root),
            "steps": self.steps.steps(),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("MarkedSTree JSON: {m}"));
        let profile: Profile = v["profile"].as_str().ok_or_else(|| bad("missing profile"))?.parse()?;
        let steps: StepSet = serde_json::from_value(v["steps"].clone()).map_err(|e| bad(&e.to_string()))?;
        let quads: Vec<[i64; 4]> =
            serde_json::from_value(v["parent"].clone()).map_err(|e| bad(&e.to_string()))?;
        let mark: Vertex = serde_json::from_value(v["mark"].clone()).map_err(|e| bad(&e.to_string()))?;
        let root: Vertex = serde_json::from_value(v["root"].clone()).map_err(|e| bad(&e.to_string()))?;
        let mut edges = Vec::with_capacity(quads.len());
        for q in quads {
            let a = Vertex::try_from([q[0], q[1]]).map_err(|e| bad(&e))?;
            let b = Vertex::try_from([q[2], q[3]]).map_err(|e| bad(&e))?;
            edges.push((a, b));
        }
        let t = MarkedSTree::from_pairs(profile, steps, &edges, mark)?;
        if t.vertices.vertex(t.root) != root {
            return Err(bad("declared root does not match the parent map"));
        }
        Ok(t)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        MarkedSTree::from_json_value(&v)
    }
}

pub(crate) fn path_to_root(parent: &[Option<usize>], mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while let Some(p) = parent[v] {
        path.push(p);
        v = p;
    }
    path
}

pub(crate) fn children_lists(parent: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut ch = vec![Vec::new(); parent.len()];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            ch[p].push(v);
        }
    }
    ch
}

/// Whether following `parent` from every vertex terminates.
pub(crate) fn is_acyclic(parent: &[Option<usize>]) -> bool {
    // 0 = unseen, 1 = on current walk, 2 = reaches a root
    let mut state = vec![0u8; parent.len()];
    let mut walk = Vec::new();
    for start in 0..parent.len() {
        let mut v = start;
        walk.clear();
        loop {
            match state[v] {
                2 => break,
                1 => return false,
                _ => {}
            }
            state[v] = 1;
            walk.push(v);
            match parent[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        for &w in &walk {
            state[w] = 2;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let t = MarkedSTree::from_pairs(
            "2,1".parse().unwrap(),
            "-1,1".parse().unwrap(),
            &[(Vertex::new(1, 1), Vertex::new(0, 1)), (Vertex::new(0, 2), Vertex::new(1, 1))],
            Vertex::new(1, 1),
        )
        .unwrap();
        assert_eq!(MarkedSTree::from_json(&t.to_json()).unwrap(), t);
        assert_eq!(t.path_to_root(2), vec![2, 0]);
    }

    #[test]
    fn rejects_cycles() {
        let r = MarkedSTree::from_pairs(
            "1,2".parse().unwrap(),
            "0,1".parse().unwrap(),
            &[(Vertex::new(1, 1), Vertex::new(1, 2)), (Vertex::new(1, 2), Vertex::new(1, 1))],
            Vertex::new(1, 1),
        );
        assert!(r.is_err());
    }
}
