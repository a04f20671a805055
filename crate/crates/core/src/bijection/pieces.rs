//! Pieces: paths cut out of cycles and spines, their concatenation into chains,
//! and the lower-record splitting that undoes it.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::graph::FunctionalGraph;
use crate::tree::children_lists;
use crate::vertex::{Vertex, VertexSet};

/// A distinguished path `source → … → sink` (following parent edges) with trees
/// attached to it. The attached trees stay implicit in the parent map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Segment {
    pub path: Vec<usize>,
}

impl Segment {
    pub fn source(&self) -> usize {
        self.path[0]
    }

    pub fn sink(&self) -> usize {
        *self.path.last().expect("segments are non-empty")
    }
}

/// Serialized form of a piece.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub source: Vertex,
    pub sink: Vertex,
    pub path: Vec<Vertex>,
}

pub(crate) fn describe(vs: &VertexSet, segs: &[Segment]) -> Vec<Piece> {
    segs.iter()
        .map(|s| Piece {
            source: vs.vertex(s.source()),
            sink: vs.vertex(s.sink()),
            path: s.path.iter().map(|&v| vs.vertex(v)).collect(),
        })
        .collect()
}

/// Links `parent(sink_j) = source_{j+1}`; the last sink keeps no parent.
fn link(parent: &mut [Option<usize>], segs: &[Segment]) {
    for w in segs.windows(2) {
        parent[w[0].sink()] = Some(w[1].source());
    }
}

/// Left concatenation over `levels`, highest level first. Each level contributes the
/// cycles whose minimum lies in it, split at the edge entering the minimum and sorted
/// by decreasing source, followed by the component of `i¹`. The chain runs from the
/// largest source to `lo¹`.
pub(crate) fn left_chain(
    vs: &VertexSet,
    g: &FunctionalGraph,
    parent: &mut [Option<usize>],
    levels: RangeInclusive<i64>,
) -> Vec<Segment> {
    let mut segs = Vec::new();
    for i in levels.rev() {
        let mut cycles: Vec<Segment> = g
            .comps
            .iter()
            .filter(|c| c.root.is_none() && vs.abscissa(c.cycle[0]) == i)
            .map(|c| Segment { path: c.cycle.clone() })
            .collect();
        cycles.sort_by(|a, b| b.source().cmp(&a.source()));
        for s in &cycles {
            parent[s.sink()] = None;
        }
        segs.extend(cycles);
        let spine = vs.first(i);
        debug_assert_eq!(g.component_of(spine).root, Some(spine));
        segs.push(Segment { path: vec![spine] });
    }
    link(parent, &segs);
    segs
}

/// Right concatenation over `levels`, lowest level first. Each level contributes the
/// component of `i¹`, then the cycles whose minimum lies in it, split at the edge
/// leaving the minimum and sorted by increasing sink. The chain runs from `lo¹` to
/// the last sink.
pub(crate) fn right_chain(
    vs: &VertexSet,
    g: &FunctionalGraph,
    parent: &mut [Option<usize>],
    levels: RangeInclusive<i64>,
) -> Vec<Segment> {
    let mut segs = Vec::new();
    for i in levels {
        let spine = vs.first(i);
        debug_assert_eq!(g.component_of(spine).root, Some(spine));
        segs.push(Segment { path: vec![spine] });
        let mut cycles: Vec<Segment> = g
            .comps
            .iter()
            .filter(|c| c.root.is_none() && vs.abscissa(c.cycle[0]) == i)
            .map(|c| {
                let mut path = c.cycle.clone();
                path.rotate_left(1);
                Segment { path }
            })
            .collect();
        cycles.sort_by_key(|s| s.sink());
        for s in &cycles {
            parent[s.sink()] = None;
        }
        segs.extend(cycles);
    }
    link(parent, &segs);
    segs
}

/// Splits `path` before each left-to-right lower record.
pub(crate) fn split_at_sources(path: &[usize]) -> Vec<Segment> {
    let mut segs: Vec<Segment> = Vec::new();
    let mut min = usize::MAX;
    for &v in path {
        if v < min {
            min = v;
            segs.push(Segment { path: vec![v] });
        } else {
            segs.last_mut().expect("first vertex is a record").path.push(v);
        }
    }
    segs
}

/// Splits `path` after each lower record met when walking it backwards.
pub(crate) fn split_at_sinks(path: &[usize]) -> Vec<Segment> {
    let mut is_sink = vec![false; path.len()];
    let mut min = usize::MAX;
    for (k, &v) in path.iter().enumerate().rev() {
        if v < min {
            min = v;
            is_sink[k] = true;
        }
    }
    let mut segs = Vec::new();
    let mut cur = Vec::new();
    for (k, &v) in path.iter().enumerate() {
        cur.push(v);
        if is_sink[k] {
            segs.push(Segment { path: std::mem::take(&mut cur) });
        }
    }
    debug_assert!(cur.is_empty());
    segs
}

/// A source whose in-type differs between the function and the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frustrated {
    pub vertex: Vertex,
    /// Abscissa of the edge entering the source in the function: its own sink, or
    /// `(i+1)¹` for `i¹`. This is the `i`- or `(i+1)`-frustration tag.
    pub function_arc: Option<i64>,
    /// Abscissa of the edge entering the source in the tree: the previous sink.
    pub tree_arc: Option<i64>,
}

/// Frustrated sources per abscissa, in path order, and the swaps they induce.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FrustrationRecord {
    pub levels: BTreeMap<i64, Vec<Frustrated>>,
    pub swaps: Vec<(Vertex, Vertex)>,
}

impl FrustrationRecord {
    /// For `i < r` tags alternate `i, i+1, …` ending with `i+1`; at `r` the record is
    /// empty or `{r^q, r¹}`.
    pub fn is_well_formed(&self, r: i64) -> bool {
        self.levels.iter().all(|(&i, fr)| {
            if i == r {
                fr.len() == 2 && fr[1].vertex == Vertex::new(r, 1) && fr[0].tree_arc.is_none()
            } else {
                fr.len() % 2 == 0
                    && fr.iter().enumerate().all(|(k, x)| {
                        x.function_arc == Some(if k % 2 == 0 { i } else { i + 1 })
                    })
            }
        })
    }
}

/// Pairs consecutive frustrated sources on the distinguished `path` (from the mark to a
/// spine vertex) and lists the pairs to swap.
pub(crate) fn frustration(vs: &VertexSet, path: &[usize]) -> (FrustrationRecord, Vec<(usize, usize)>) {
    let r = vs.r();
    let segs = split_at_sources(path);
    let mut per: BTreeMap<i64, Vec<(usize, Frustrated)>> = BTreeMap::new();
    for (j, s) in segs.iter().enumerate() {
        let v = s.source();
        let i = vs.abscissa(v);
        let function_arc = if vs.is_first(v) {
            (i < r).then_some(i + 1)
        } else {
            Some(vs.abscissa(s.sink()))
        };
        let tree_arc = j.checked_sub(1).map(|p| vs.abscissa(segs[p].sink()));
        if function_arc != tree_arc {
            per.entry(i).or_default().push((v, Frustrated { vertex: vs.vertex(v), function_arc, tree_arc }));
        }
    }
    let mut rec = FrustrationRecord::default();
    let mut pairs = Vec::new();
    for (i, list) in per {
        assert!(list.len() % 2 == 0, "odd number of frustrated sources at abscissa {i}");
        for w in list.chunks(2) {
            pairs.push((w[0].0, w[1].0));
            rec.swaps.push((w[0].1.vertex, w[1].1.vertex));
        }
        rec.levels.insert(i, list.into_iter().map(|(_, f)| f).collect());
    }
    (rec, pairs)
}

/// Exchanges the children of `a` and `b` that are not flagged in `keep`.
pub(crate) fn swap_attached(parent: &mut [Option<usize>], a: usize, b: usize, keep: &[bool]) {
    if a == b {
        return;
    }
    let ch = children_lists(parent);
    for &c in ch[a].iter().filter(|&&c| !keep[c]) {
        parent[c] = Some(b);
    }
    for &c in ch[b].iter().filter(|&&c| !keep[c]) {
        parent[c] = Some(a);
    }
}

pub(crate) fn flags(n: usize, sets: &[&[usize]]) -> Vec<bool> {
    let mut f = vec![false; n];
    for s in sets {
        for &v in *s {
            f[v] = true;
        }
    }
    f
}

/// Applies the path swaps of a frustration record.
pub(crate) fn rearrange_path(vs: &VertexSet, parent: &mut [Option<usize>], path: &[usize]) -> FrustrationRecord {
    let (rec, pairs) = frustration(vs, path);
    let keep = flags(parent.len(), &[path]);
    for (a, b) in pairs {
        swap_attached(parent, a, b, &keep);
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_splits() {
        let s = split_at_sources(&[5, 7, 3, 4, 6, 1, 2, 0]);
        let paths: Vec<_> = s.iter().map(|s| s.path.clone()).collect();
        assert_eq!(paths, vec![vec![5, 7], vec![3, 4, 6], vec![1, 2], vec![0]]);
        let s = split_at_sinks(&[0, 3, 1, 4, 2, 5]);
        let paths: Vec<_> = s.iter().map(|s| s.path.clone()).collect();
        assert_eq!(paths, vec![vec![0], vec![3, 1], vec![4, 2], vec![5]]);
    }
}
