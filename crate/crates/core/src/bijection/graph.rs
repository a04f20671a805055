//! Connected components of a partial functional graph.

/// One component of `v → next[v]`: either a tree rooted at a vertex without image,
/// or a tree of cycles hanging on one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Cycle listed from its minimum along the edges, empty for rooted components.
    pub cycle: Vec<usize>,
    pub root: Option<usize>,
}

impl Component {
    /// Minimum of the cycle, or the root.
    pub fn source(&self) -> usize {
        self.root.unwrap_or_else(|| self.cycle[0])
    }
}

#[derive(Debug, Clone)]
pub struct FunctionalGraph {
    pub next: Vec<Option<usize>>,
    /// Component index of every vertex.
    pub comp: Vec<usize>,
    pub comps: Vec<Component>,
}

impl FunctionalGraph {
    pub fn new(next: Vec<Option<usize>>) -> Self {
        let n = next.len();
        const UNSEEN: usize = usize::MAX;
        let mut comp = vec![UNSEEN; n];
        let mut comps: Vec<Component> = Vec::new();
        let mut on_walk = vec![false; n];
        for start in 0..n {
            if comp[start] != UNSEEN {
                continue;
            }
            let mut walk = Vec::new();
            let mut v = start;
            let id = loop {
                if comp[v] != UNSEEN {
                    break comp[v];
                }
                if on_walk[v] {
                    let pos = walk.iter().position(|&w| w == v).expect("v is on the walk");
                    let mut cycle = walk[pos..].to_vec();
                    let m = (0..cycle.len()).min_by_key(|&k| cycle[k]).expect("non-empty cycle");
                    cycle.rotate_left(m);
                    comps.push(Component { cycle, root: None });
                    break comps.len() - 1;
                }
                on_walk[v] = true;
                walk.push(v);
                match next[v] {
                    Some(w) => v = w,
                    None => {
                        comps.push(Component { cycle: Vec::new(), root: Some(v) });
                        break comps.len() - 1;
                    }
                }
            };
            for &w in &walk {
                comp[w] = id;
                on_walk[w] = false;
            }
        }
        FunctionalGraph { next, comp, comps }
    }

    pub fn component_of(&self, v: usize) -> &Component {
        &self.comps[self.comp[v]]
    }

    pub fn on_cycle(&self, v: usize) -> bool {
        self.component_of(v).cycle.contains(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles_start_at_their_minimum() {
        // 0 -> 2 -> 3 -> 1 -> 2, 4 root, 5 -> 4
        let g = FunctionalGraph::new(vec![Some(2), Some(2), Some(3), Some(1), None, Some(4)]);
        assert_eq!(g.comps.len(), 2);
        assert_eq!(g.component_of(0).cycle, vec![1, 2, 3]);
        assert_eq!(g.component_of(5).root, Some(4));
        assert!(!g.on_cycle(0) && g.on_cycle(3));
    }
}
