use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;

/// The vertex `i^k`. The derived order is the total order used for lower records:
/// by abscissa first, then by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 2]", try_from = "[i64; 2]")]
pub struct Vertex {
    pub abscissa: i64,
    pub index: u32,
}

impl Vertex {
    pub fn new(abscissa: i64, index: u32) -> Self {
        Vertex { abscissa, index }
    }
}

impl From<Vertex> for [i64; 2] {
    fn from(v: Vertex) -> Self {
        [v.abscissa, v.index as i64]
    }
}

impl TryFrom<[i64; 2]> for Vertex {
    type Error = String;

    fn try_from(p: [i64; 2]) -> std::result::Result<Self, String> {
        if p[1] < 1 || p[1] > u32::MAX as i64 {
            return Err(format!("vertex index must be positive, got {}", p[1]));
        }
        Ok(Vertex::new(p[0], p[1] as u32))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.abscissa, self.index)
    }
}

/// `V = ∪ V_i` with `V_i = {i^1, …, i^{n_i}}`. Vertices are numbered densely in
/// increasing order, so comparing ids compares vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    profile: Profile,
    offsets: Vec<usize>,
    abscissa: Vec<i64>,
    index: Vec<u32>,
}

impl VertexSet {
    pub fn new(profile: Profile) -> Self {
        let mut offsets = Vec::with_capacity(profile.counts().len() + 1);
        let mut abscissa = Vec::new();
        let mut index = Vec::new();
        for i in profile.abscissas() {
            offsets.push(abscissa.len());
            for k in 1..=profile.n(i) {
                abscissa.push(i);
                index.push(k as u32);
            }
        }
        offsets.push(abscissa.len());
        VertexSet { profile, offsets, abscissa, index }
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn ell(&self) -> i64 {
        self.profile.ell()
    }

    pub fn r(&self) -> i64 {
        self.profile.r()
    }

    /// Dense id of `i^k`. Panics when out of range.
    pub fn id(&self, i: i64, k: u32) -> usize {
        self.try_id(Vertex::new(i, k)).unwrap_or_else(|| panic!("vertex {i}^{k} not in V"))
    }

    pub fn try_id(&self, v: Vertex) -> Option<usize> {
        if v.abscissa < self.ell() || v.abscissa > self.r() || v.index == 0 {
            return None;
        }
        let j = (v.abscissa - self.ell()) as usize;
        let id = self.offsets[j] + v.index as usize - 1;
        (id < self.offsets[j + 1]).then_some(id)
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        Vertex::new(self.abscissa[id], self.index[id])
    }

    pub fn abscissa(&self, id: usize) -> i64 {
        self.abscissa[id]
    }

    pub fn index(&self, id: usize) -> u32 {
        self.index[id]
    }

    /// Id of the spine vertex `i^1`.
    pub fn first(&self, i: i64) -> usize {
        self.id(i, 1)
    }

    pub fn is_first(&self, id: usize) -> bool {
        self.index[id] == 1
    }

    /// Ids of `V_i` (empty outside `[ℓ, r]`).
    pub fn level(&self, i: i64) -> std::ops::Range<usize> {
        if i < self.ell() || i > self.r() {
            return 0..0;
        }
        let j = (i - self.ell()) as usize;
        self.offsets[j]..self.offsets[j + 1]
    }

    pub(crate) fn resolve(&self, v: Vertex) -> Result<usize> {
        self.try_id(v).ok_or_else(|| {
            Error::InvalidStructure(format!("vertex {v} is not in V for profile {}", self.profile))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_ids_follow_vertex_order() {
        let vs = VertexSet::new("2;2,1".parse().unwrap());
        assert_eq!(vs.len(), 5);
        let all: Vec<Vertex> = (0..vs.len()).map(|i| vs.vertex(i)).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(vs.id(0, 2), 3);
        assert_eq!(vs.try_id(Vertex::new(1, 2)), None);
        assert_eq!(vs.level(0), 2..4);
    }

    #[test]
    fn vertex_json() {
        let v = Vertex::new(-1, 2);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[-1,2]");
        assert_eq!(serde_json::from_str::<Vertex>("[-1,2]").unwrap(), v);
        assert!(serde_json::from_str::<Vertex>("[0,0]").is_err());
    }
}
