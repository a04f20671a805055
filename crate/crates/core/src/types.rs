//! Out-, in- and complete-type distributions of trees and functions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cayley::EmbeddedCayleyTree;
use crate::error::{Error, Result};
use crate::function::SFunction;
use crate::profile::Profile;
use crate::sary::SAryTree;
use crate::tree::MarkedSTree;

/// Dense child-count vector `(c^m, …, c^1)`; entry `k` counts children at step `m + k`.
pub type CVec = Vec<u32>;
/// `n(i, s)`.
pub type OutCounts = BTreeMap<(i64, i64), u64>;
/// `n(i, c)`.
pub type InCounts = BTreeMap<(i64, CVec), u64>;
/// `n(i, s, c)` over non-root vertices.
pub type CompleteCounts = BTreeMap<(i64, i64, CVec), u64>;

/// Type census of a tree or function. The root (for functions: `0¹`) has out-type
/// ε: it is absent from `out_counts` and `complete_counts`, and its in-type is
/// kept in `root_in_type` as well as in `in_counts`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeDistribution {
    pub min_step: i64,
    #[serde(with = "entries")]
    pub out_counts: OutCounts,
    #[serde(with = "entries")]
    pub in_counts: InCounts,
    #[serde(with = "entries")]
    pub complete_counts: CompleteCounts,
    pub root_in_type: Option<(i64, CVec)>,
}

/// Maps with compound keys serialize as `[key, value]` lists, since JSON keys must be strings.
mod entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Vec::<(K, V)>::deserialize(d).map(|v| v.into_iter().collect())
    }
}

impl TypeDistribution {
    /// Census of the digraph `v → next[v]`, with c-vectors indexed from `min_step`.
    pub fn from_graph(min_step: i64, abscissa: &[i64], next: &[Option<usize>]) -> Self {
        let width = (2 - min_step) as usize;
        let mut cvecs = vec![vec![0u32; width]; next.len()];
        for (v, p) in next.iter().enumerate() {
            if let Some(p) = *p {
                let s = abscissa[v] - abscissa[p];
                cvecs[p][(s - min_step) as usize] += 1;
            }
        }
        let mut d = TypeDistribution {
            min_step,
            out_counts: BTreeMap::new(),
            in_counts: BTreeMap::new(),
            complete_counts: BTreeMap::new(),
            root_in_type: None,
        };
        for (v, c) in cvecs.into_iter().enumerate() {
            let i = abscissa[v];
            match next[v] {
                Some(p) => {
                    let s = i - abscissa[p];
                    *d.out_counts.entry((i, s)).or_default() += 1;
                    *d.complete_counts.entry((i, s, c.clone())).or_default() += 1;
                }
                None => d.root_in_type = Some((i, c.clone())),
            }
            *d.in_counts.entry((i, c)).or_default() += 1;
        }
        d
    }

    /// `n_i = χ_{i=0} + Σ_s n(i, s)` read off the out-part.
    pub fn profile_from_out(out: &OutCounts) -> Result<Profile> {
        let mut per: BTreeMap<i64, u64> = BTreeMap::new();
        per.insert(0, 1);
        for (&(i, _), &k) in out {
            if k > 0 {
                *per.entry(i).or_default() += k;
            }
        }
        let lo = *per.keys().next().expect("contains 0");
        let hi = *per.keys().next_back().expect("contains 0");
        let counts: Vec<u64> = (lo..=hi).map(|i| per.get(&i).copied().unwrap_or(0)).collect();
        Profile::new(lo, counts).map_err(|e| Error::IncompatibleDistribution(e.to_string()))
    }

    /// Profile read off the in-part (`n_i = Σ_c n(i, c)`).
    pub fn profile_from_in(inc: &InCounts) -> Result<Profile> {
        let mut per: BTreeMap<i64, u64> = BTreeMap::new();
        for ((i, _), &k) in inc {
            if k > 0 {
                *per.entry(*i).or_default() += k;
            }
        }
        let (Some(&lo), Some(&hi)) = (per.keys().next(), per.keys().next_back()) else {
            return Err(Error::IncompatibleDistribution("empty in-distribution".into()));
        };
        let counts: Vec<u64> = (lo..=hi).map(|i| per.get(&i).copied().unwrap_or(0)).collect();
        Profile::new(lo, counts).map_err(|e| Error::IncompatibleDistribution(e.to_string()))
    }

    pub fn profile(&self) -> Result<Profile> {
        TypeDistribution::profile_from_out(&self.out_counts)
    }

    /// Verifies the three compatibility identities linking the parts.
    pub fn check_compatibility(&self) -> Result<()> {
        let p = self.profile()?;
        check_in_compatibility(self.min_step, &self.in_counts, &p)?;
        let from_in = TypeDistribution::profile_from_in(&self.in_counts)?;
        if from_in != p {
            return Err(Error::IncompatibleDistribution("in-part and out-part disagree on the profile".into()));
        }
        let root = self.root_in_type.as_ref();
        check_complete_compatibility(self.min_step, root, &self.complete_counts)?;
        let mut out_from_complete = OutCounts::new();
        for ((i, s, _), &k) in &self.complete_counts {
            *out_from_complete.entry((*i, *s)).or_default() += k;
        }
        let nonzero: OutCounts = self.out_counts.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (*a, *b)).collect();
        if out_from_complete != nonzero {
            return Err(Error::IncompatibleDistribution("complete part does not refine out part".into()));
        }
        Ok(())
    }
}

/// `χ_{i=0} + Σ_{s,c} c^s n(i−s, c) = Σ_c n(i, c)` for every abscissa.
pub fn check_in_compatibility(min_step: i64, inc: &InCounts, profile: &Profile) -> Result<()> {
    let mut arriving: BTreeMap<i64, u64> = BTreeMap::new();
    for ((j, c), &k) in inc {
        for (idx, &cs) in c.iter().enumerate() {
            let s = min_step + idx as i64;
            if cs > 0 {
                *arriving.entry(j + s).or_default() += cs as u64 * k;
            }
        }
    }
    for i in profile.abscissas().chain(arriving.keys().copied()) {
        let lhs = u64::from(i == 0) + arriving.get(&i).copied().unwrap_or(0);
        if lhs != profile.n(i) {
            return Err(Error::IncompatibleDistribution(format!(
                "abscissa {i}: {lhs} vertices expected from in-types, profile has {}",
                profile.n(i)
            )));
        }
    }
    Ok(())
}

/// `χ_{i=s} c₀^s + Σ_{t,c} c^s n(i−s, t, c) = Σ_c n(i, s, c)`.
pub fn check_complete_compatibility(
    min_step: i64,
    root: Option<&(i64, CVec)>,
    complete: &CompleteCounts,
) -> Result<()> {
    let mut arriving: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    let mut add = |j: i64, c: &CVec, k: u64| {
        for (idx, &cs) in c.iter().enumerate() {
            if cs > 0 {
                let s = min_step + idx as i64;
                *arriving.entry((j + s, s)).or_default() += cs as u64 * k;
            }
        }
    };
    if let Some((j, c)) = root {
        add(*j, c, 1);
    }
    for ((j, _, c), &k) in complete {
        add(*j, c, k);
    }
    let mut present: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for ((i, s, _), &k) in complete {
        if k > 0 {
            *present.entry((*i, *s)).or_default() += k;
        }
    }
    if arriving != present {
        return Err(Error::IncompatibleDistribution(
            "children counted by parents' in-types disagree with children's out-types".into(),
        ));
    }
    Ok(())
}

impl MarkedSTree {
    pub fn type_distribution(&self) -> TypeDistribution {
        let vs = self.vertices();
        let abs: Vec<i64> = (0..vs.len()).map(|v| vs.abscissa(v)).collect();
        TypeDistribution::from_graph(self.steps().min(), &abs, self.parents())
    }
}

impl SFunction {
    pub fn type_distribution(&self) -> TypeDistribution {
        let vs = self.vertices();
        let abs: Vec<i64> = (0..vs.len()).map(|v| vs.abscissa(v)).collect();
        TypeDistribution::from_graph(self.steps().min(), &abs, self.image())
    }
}

impl EmbeddedCayleyTree {
    pub fn type_distribution(&self) -> TypeDistribution {
        TypeDistribution::from_graph(self.steps().min(), self.abscissas(), self.parents())
    }
}

impl SAryTree {
    /// Type census with c-vectors indexed from `min_step`.
    pub fn type_distribution(&self, min_step: i64) -> TypeDistribution {
        let (parent, abs) = self.parent_map();
        TypeDistribution::from_graph(min_step, &abs, &parent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::Vertex;

    #[test]
    fn single_vertex() {
        let d = TypeDistribution::from_graph(-1, &[0], &[None]);
        assert!(d.out_counts.is_empty() && d.complete_counts.is_empty());
        assert_eq!(d.in_counts, BTreeMap::from([((0, vec![0, 0, 0]), 1)]));
        assert_eq!(d.root_in_type, Some((0, vec![0, 0, 0])));
        d.check_compatibility().unwrap();
    }

    #[test]
    fn three_vertex_path() {
        // root at 0, child at 1, grandchild at 0
        let t = MarkedSTree::from_pairs(
            "2,1".parse().unwrap(),
            "-1,1".parse().unwrap(),
            &[(Vertex::new(1, 1), Vertex::new(0, 1)), (Vertex::new(0, 2), Vertex::new(1, 1))],
            Vertex::new(1, 1),
        )
        .unwrap();
        let d = t.type_distribution();
        assert_eq!(d.out_counts, BTreeMap::from([((1, 1), 1), ((0, -1), 1)]));
        d.check_compatibility().unwrap();
    }
}
