//! `Ψ` between S-functions with (F) and marked S-trees with (T₁) and (T₂), for
//! `ℓ < 0` and `min S = −1`. The construction depends on where `v₀ = f(−1¹)` lives.

use serde::Serialize;
use serde_json::Value;

use super::graph::FunctionalGraph;
use super::pieces::{
    describe, flags, left_chain, rearrange_path, right_chain, split_at_sinks, split_at_sources, swap_attached,
    FrustrationRecord, Piece,
};
use super::spine_cut;
use crate::conditions::{check_tree_conditions, evaluate, Case};
use crate::error::Result;
use crate::function::SFunction;
use crate::profile::Regime;
use crate::tree::MarkedSTree;
use crate::vertex::{Vertex, VertexSet};

/// Staged record of one application of `Ψ`.
#[derive(Debug, Clone, Serialize)]
pub struct PsiTrace {
    pub case: Case,
    pub function: Value,
    pub v0: Vertex,
    /// Edge `u → x` redirected before concatenating (cases A2 and A3).
    pub redirected: Option<(Vertex, Vertex)>,
    /// `(x₀, x₋₁, y₋₁, y₀)` in case B when the walk from `v₀` meets `V₋₁`.
    pub split: Option<[Vertex; 4]>,
    pub left_pieces: Vec<Piece>,
    pub right_pieces: Vec<Piece>,
    pub intermediate: Value,
    /// `T(0¹) ↔ T(w₀)` in the A cases.
    pub exchanged: Option<(Vertex, Vertex)>,
    pub frustration: FrustrationRecord,
    pub tree: Value,
}

struct Stage1 {
    case: Case,
    v0: usize,
    redirected: Option<(usize, usize)>,
    split: Option<[usize; 4]>,
    left: Vec<Piece>,
    right: Vec<Piece>,
    tree: MarkedSTree,
}

fn classify(vs: &VertexSet, g: &FunctionalGraph, v0: usize) -> Case {
    let c = g.component_of(v0);
    if vs.abscissa(c.source()) >= 1 {
        Case::B
    } else if g.comp[v0] == g.comp[vs.first(0)] {
        Case::A3
    } else if g.on_cycle(v0) {
        Case::A2
    } else {
        Case::A1
    }
}

/// Which construction applies to `f`.
pub fn classify_case(f: &SFunction) -> Result<Case> {
    f.check_condition_f(Regime::General)?;
    let vs = f.vertices();
    let g = FunctionalGraph::new(spine_cut(f));
    Ok(classify(vs, &g, f.apply(vs.first(-1)).expect("(F) holds")))
}

fn psi1(f: &SFunction) -> Result<Stage1> {
    f.check_condition_f(Regime::General)?;
    let vs = f.vertices();
    let (r, zero) = (vs.r(), vs.first(0));
    let v0 = f.apply(vs.first(-1)).expect("(F) holds");
    let mut next = spine_cut(f);
    let g = FunctionalGraph::new(next.clone());
    let case = classify(vs, &g, v0);
    let mut redirected = None;
    let mut split = None;
    let (parent, left, right, mark) = if case == Case::B {
        let mut parent = next.clone();
        let left = left_chain(vs, &g, &mut parent, 0..=r);
        let right = right_chain(vs, &g, &mut parent, vs.ell()..=-1);
        let b = right.last().expect("R(-1) is non-empty").sink();
        // walk from v0 to the distinguished path of its piece
        let mut walk = vec![v0];
        let c = g.component_of(v0);
        loop {
            let q = *walk.last().expect("non-empty walk");
            if c.root == Some(q) || c.cycle.contains(&q) {
                break;
            }
            walk.push(next[q].expect("q is not a root"));
        }
        match (walk.iter().position(|&q| vs.abscissa(q) < 0), walk.iter().rposition(|&q| vs.abscissa(q) < 0)) {
            (Some(a), Some(z)) => {
                let (x0, xm, ym, y0) = (walk[a - 1], walk[a], walk[z], walk[z + 1]);
                parent[x0] = None;
                parent[ym] = Some(v0);
                parent[zero] = Some(xm);
                parent[b] = Some(y0);
                split = Some([x0, xm, ym, y0]);
            }
            _ => parent[b] = Some(v0),
        }
        let mark = left[0].source();
        (parent, left, right, mark)
    } else {
        match case {
            Case::A2 => {
                let cyc = &g.component_of(v0).cycle;
                let k = cyc.iter().position(|&x| x == v0).expect("v0 is on its cycle");
                let u = cyc[(k + cyc.len() - 1) % cyc.len()];
                next[u] = Some(zero);
                redirected = Some((u, zero));
            }
            Case::A3 if v0 != zero => {
                let mut u = v0;
                while next[u] != Some(zero) {
                    u = next[u].expect("v0 reaches 0^1");
                }
                next[u] = Some(v0);
                redirected = Some((u, v0));
            }
            _ => {}
        }
        let g = FunctionalGraph::new(next.clone());
        let mut parent = next.clone();
        let left = if r >= 1 { left_chain(vs, &g, &mut parent, 1..=r) } else { Vec::new() };
        let right = right_chain(vs, &g, &mut parent, vs.ell()..=0);
        let mark = match left.first() {
            Some(s) => {
                parent[vs.first(1)] = Some(v0);
                s.source()
            }
            None => v0,
        };
        (parent, left, right, mark)
    };
    let tree = MarkedSTree::new(vs.clone(), f.steps().clone(), parent, mark)?;
    debug_assert_eq!(evaluate(&tree).case(zero), Some(case));
    Ok(Stage1 { case, v0, redirected, split, left: describe(vs, &left), right: describe(vs, &right), tree })
}

/// Paths of a tree in the image of `Ψ₁`: the case, `w₀`, and the distinguished path
/// on which frustrated sources are paired.
fn tree_paths(t: &MarkedSTree) -> Result<(Case, usize, Vec<usize>)> {
    let rep = check_tree_conditions(t, Regime::General)?;
    let vs = t.vertices();
    let case = rep.case(vs.first(0)).expect("conditions hold");
    let up = t.path_to_root(t.mark());
    let end = match case {
        Case::B => Some(vs.first(0)),
        _ if vs.r() >= 1 => Some(vs.first(1)),
        _ => None,
    };
    let path = match end.and_then(|e| up.iter().position(|&v| v == e)) {
        Some(p) => up[..=p].to_vec(),
        None => Vec::new(),
    };
    Ok((case, rep.w0.expect("w0 exists under (T1)"), path))
}

fn psi2_parts(t: &MarkedSTree) -> Result<(MarkedSTree, Option<(usize, usize)>, FrustrationRecord)> {
    let (case, w0, path) = tree_paths(t)?;
    let vs = t.vertices();
    let zero = vs.first(0);
    let mut parent = t.parents().to_vec();
    let mut exchanged = None;
    if case != Case::B {
        let keep = flags(parent.len(), &[&t.path_to_root(t.mark()), &t.path_to_root(vs.first(vs.ell()))]);
        swap_attached(&mut parent, zero, w0, &keep);
        exchanged = Some((zero, w0));
    }
    let rec = if path.is_empty() { FrustrationRecord::default() } else { rearrange_path(vs, &mut parent, &path) };
    let out = MarkedSTree::new_unchecked(vs.clone(), t.steps().clone(), parent, t.mark());
    debug_assert!(MarkedSTree::new(vs.clone(), t.steps().clone(), out.parents().to_vec(), t.mark()).is_ok());
    Ok((out, exchanged, rec))
}

/// The subtree exchanges correcting in-types. An involution on trees satisfying
/// (T₁) and (T₂).
pub fn psi2(t: &MarkedSTree) -> Result<MarkedSTree> {
    psi2_parts(t).map(|(t, _, _)| t)
}

pub fn psi1_tree(f: &SFunction) -> Result<MarkedSTree> {
    psi1(f).map(|s| s.tree)
}

pub fn psi(f: &SFunction) -> Result<MarkedSTree> {
    psi2(&psi1(f)?.tree)
}

/// Closes the pieces of a right chain: `i¹ → (i+1)¹` below `−1`, `−1¹ → v₀`, and
/// every other sink back to its source.
fn close_right(vs: &VertexSet, image: &mut [Option<usize>], path: &[usize], v0: usize) {
    for s in split_at_sinks(path) {
        let sink = s.sink();
        image[sink] = if vs.is_first(sink) {
            match vs.abscissa(sink) {
                0 => None,
                -1 => Some(v0),
                i => Some(vs.first(i + 1)),
            }
        } else {
            Some(s.source())
        };
    }
}

/// Closes the pieces of a left chain: `i¹ → (i−1)¹` and sinks back to sources.
fn close_left(vs: &VertexSet, image: &mut [Option<usize>], path: &[usize]) {
    for s in split_at_sources(path) {
        let sink = s.sink();
        image[sink] = if vs.is_first(sink) {
            let i = vs.abscissa(sink);
            (i > 0).then(|| vs.first(i - 1))
        } else {
            Some(s.source())
        };
    }
}

/// Inverse of `Ψ₁` on trees satisfying (T₁) and (T₂).
pub fn psi1_inverse(t: &MarkedSTree) -> Result<SFunction> {
    let rep = check_tree_conditions(t, Regime::General)?;
    let vs = t.vertices();
    let (zero, ell1) = (vs.first(0), vs.first(vs.ell()));
    let case = rep.case(zero).expect("conditions hold");
    let mut image = t.parents().to_vec();
    if case == Case::B {
        let ell_up = t.path_to_root(ell1);
        let to_meet = &ell_up[..=ell_up.iter().position(|&v| v == rep.meet).expect("meet is an ancestor")];
        let k = to_meet.iter().rposition(|&v| vs.abscissa(v) < 0).expect("l^1 is negative");
        let (b, y0) = (to_meet[k], to_meet[k + 1]);
        image[b] = None;
        let v0 = if t.root() != zero {
            let xm = image[zero].expect("0^1 is not the root");
            let up = t.path_to_root(zero);
            let z = up.iter().rposition(|&v| vs.abscissa(v) == -1).expect("x_-1 is on the path");
            let (ym, v0) = (up[z], up[z + 1]);
            let x0 = t.root();
            image[zero] = None;
            image[ym] = Some(y0);
            image[x0] = Some(xm);
            v0
        } else {
            y0
        };
        let mark_path = crate::tree::path_to_root(&image, t.mark());
        close_right(vs, &mut image, &to_meet[..=k], v0);
        close_left(vs, &mut image, &mark_path);
    } else {
        let w0 = rep.w0.expect("w0 exists under (T1)");
        let up = t.path_to_root(t.mark());
        let ell_up = t.path_to_root(ell1);
        close_right(vs, &mut image, &ell_up, w0);
        if vs.r() >= 1 {
            let p1 = up.iter().position(|&v| v == vs.first(1)).expect("1^1 is on the mark's path");
            close_left(vs, &mut image, &up[..=p1]);
        }
        match case {
            Case::A2 => {
                let p0 = up.iter().position(|&v| v == zero).expect("0^1 is the meet");
                image[up[p0 - 1]] = Some(w0);
            }
            Case::A3 if w0 != zero => {
                let mut u = w0;
                while image[u] != Some(w0) {
                    u = image[u].expect("w0 lies on a cycle");
                }
                image[u] = Some(zero);
            }
            _ => {}
        }
    }
    let f = SFunction::new(vs.clone(), t.steps().clone(), image)?;
    f.check_condition_f(Regime::General)?;
    Ok(f)
}

pub fn psi_inverse(t: &MarkedSTree) -> Result<SFunction> {
    psi1_inverse(&psi2(t)?)
}

pub fn psi_trace(f: &SFunction) -> Result<PsiTrace> {
    let s = psi1(f)?;
    let (t, exchanged, frustration) = psi2_parts(&s.tree)?;
    let vs = f.vertices();
    let name = |v: usize| vs.vertex(v);
    Ok(PsiTrace {
        case: s.case,
        function: f.to_json_value(),
        v0: name(s.v0),
        redirected: s.redirected.map(|(a, b)| (name(a), name(b))),
        split: s.split.map(|q| q.map(name)),
        left_pieces: s.left,
        right_pieces: s.right,
        intermediate: s.tree.to_json_value(),
        exchanged: exchanged.map(|(a, b)| (name(a), name(b))),
        frustration,
        tree: t.to_json_value(),
    })
}

/// The trace of `Ψ` applied to `Ψ⁻¹(t)`.
pub fn psi_inverse_trace(t: &MarkedSTree) -> Result<PsiTrace> {
    psi_trace(&psi_inverse(t)?)
}
