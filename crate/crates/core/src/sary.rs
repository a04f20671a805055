use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::profile::Profile;

/// An S-ary tree: a plane tree where each node has at most one child per step.
///
/// Nodes are kept in an arena in canonical preorder (children visited by
/// increasing step), so structural equality is plain equality of the arena.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SAryTree {
    nodes: Vec<SAryNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SAryNode {
    pub abscissa: i64,
    /// `(step, child node id)` sorted by step.
    pub children: Vec<(i64, usize)>,
}

impl SAryTree {
    /// The single-node tree.
    pub fn leaf() -> Self {
        SAryTree { nodes: vec![SAryNode { abscissa: 0, children: Vec::new() }] }
    }

    /// Canonicalizes a tree given by a parent map with abscissas. The caller
    /// guarantees injectivity (one child per abscissa below each vertex).
    pub(crate) fn from_parent_map(parent: &[Option<usize>], abscissa: &[i64]) -> Self {
        let mut kids = vec![Vec::new(); parent.len()];
        let mut root = 0;
        for (v, p) in parent.iter().enumerate() {
            match p {
                Some(p) => kids[*p].push((abscissa[v] - abscissa[*p], v)),
                None => root = v,
            }
        }
        for k in &mut kids {
            k.sort_unstable();
        }
        let mut nodes = Vec::with_capacity(parent.len());
        // iterative preorder; each stack entry is (vertex, slot in parent's child list)
        let mut stack = vec![(root, None::<(usize, i64)>)];
        while let Some((v, slot)) = stack.pop() {
            let id = nodes.len();
            nodes.push(SAryNode { abscissa: abscissa[v], children: Vec::with_capacity(kids[v].len()) });
            if let Some((pid, s)) = slot {
                nodes[pid].children.push((s, id));
            }
            for &(s, c) in kids[v].iter().rev() {
                stack.push((c, Some((id, s))));
            }
        }
        SAryTree { nodes }
    }

    pub fn nodes(&self) -> &[SAryNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn profile(&self) -> Result<Profile> {
        let lo = self.nodes.iter().map(|n| n.abscissa).min().unwrap_or(0);
        let hi = self.nodes.iter().map(|n| n.abscissa).max().unwrap_or(0);
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for n in &self.nodes {
            counts[(n.abscissa - lo) as usize] += 1;
        }
        Profile::new(lo, counts)
    }

    /// Parent map and abscissas in arena order (node 0 is the root).
    pub fn parent_map(&self) -> (Vec<Option<usize>>, Vec<i64>) {
        let mut parent = vec![None; self.nodes.len()];
        for (id, n) in self.nodes.iter().enumerate() {
            for &(_, c) in &n.children {
                parent[c] = Some(id);
            }
        }
        (parent, self.nodes.iter().map(|n| n.abscissa).collect())
    }

    pub fn to_json_value(&self) -> Value {
        fn go(t: &SAryTree, id: usize) -> Value {
            let node = &t.nodes[id];
            let mut children = Map::new();
            for &(s, c) in &node.children {
                children.insert(s.to_string(), go(t, c));
            }
            let mut m = Map::new();
            m.insert("abscissa".into(), Value::from(node.abscissa));
            m.insert("children".into(), Value::Object(children));
            Value::Object(m)
        }
        go(self, 0)
    }

    /// Nested `{"abscissa":i,"children":{"s":subtree}}`.
    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("SAryTree JSON: {m}"));
        let mut parent = Vec::new();
        let mut abscissa = Vec::new();
        let mut stack = vec![(v, None::<usize>)];
        while let Some((node, p)) = stack.pop() {
            let a = node["abscissa"].as_i64().ok_or_else(|| bad("missing abscissa"))?;
            let id = parent.len();
            parent.push(p);
            abscissa.push(a);
            let children = node["children"].as_object().ok_or_else(|| bad("missing children"))?;
            let mut by_step = BTreeMap::new();
            for (k, c) in children {
                let s: i64 = k.parse().map_err(|_| bad("child key is not an integer"))?;
                by_step.insert(s, c);
            }
            for (s, c) in by_step {
                let ca = c["abscissa"].as_i64().ok_or_else(|| bad("missing abscissa"))?;
                if ca - a != s {
                    return Err(bad("child abscissa disagrees with its step key"));
                }
                stack.push((c, Some(id)));
            }
        }
        if abscissa[0] != 0 {
            return Err(bad("root abscissa must be 0"));
        }
        Ok(SAryTree::from_parent_map(&parent, &abscissa))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        SAryTree::from_json_value(&v)
    }
}
