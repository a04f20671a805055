//! `Φ = Φ₂ ∘ Φ₁` between S-functions with (F) and marked S-trees with (T), for `ℓ = 0`.

use serde::Serialize;
use serde_json::Value;

use super::graph::FunctionalGraph;
use super::pieces::{describe, left_chain, rearrange_path, split_at_sources, FrustrationRecord, Piece, Segment};
use super::spine_cut;
use crate::conditions::check_tree_conditions;
use crate::error::Result;
use crate::function::SFunction;
use crate::profile::Regime;
use crate::tree::MarkedSTree;
use crate::vertex::Vertex;

/// Staged record of one application of `Φ` or `Φ⁻¹`.
#[derive(Debug, Clone, Serialize)]
pub struct PhiTrace {
    pub function: Value,
    /// Pieces in concatenation order.
    pub pieces: Vec<Piece>,
    /// Sources in concatenation order.
    pub concatenation: Vec<Vertex>,
    /// The tree `Φ₁(f)`.
    pub intermediate: Value,
    pub frustration: FrustrationRecord,
    pub tree: Value,
}

fn phi1_parts(f: &SFunction) -> Result<(MarkedSTree, Vec<Segment>)> {
    f.check_condition_f(Regime::Nonneg)?;
    let vs = f.vertices();
    let g = FunctionalGraph::new(spine_cut(f));
    let mut parent = g.next.clone();
    let segs = left_chain(vs, &g, &mut parent, 0..=vs.r());
    let mark = segs[0].source();
    let t = MarkedSTree::new(vs.clone(), f.steps().clone(), parent, mark)?;
    debug_assert!(check_tree_conditions(&t, Regime::Nonneg).is_ok());
    Ok((t, segs))
}

pub fn phi1(f: &SFunction) -> Result<MarkedSTree> {
    phi1_parts(f).map(|(t, _)| t)
}

pub fn phi1_inverse(t: &MarkedSTree) -> Result<SFunction> {
    check_tree_conditions(t, Regime::Nonneg)?;
    let vs = t.vertices();
    let mut image = t.parents().to_vec();
    for s in split_at_sources(&t.path_to_root(t.mark())) {
        let sink = s.sink();
        image[sink] = if vs.is_first(sink) {
            let i = vs.abscissa(sink);
            (i > 0).then(|| vs.first(i - 1))
        } else {
            Some(s.source())
        };
    }
    let f = SFunction::new(vs.clone(), t.steps().clone(), image)?;
    f.check_condition_f(Regime::Nonneg)?;
    Ok(f)
}

fn phi2_parts(t: &MarkedSTree) -> Result<(MarkedSTree, FrustrationRecord)> {
    check_tree_conditions(t, Regime::Nonneg)?;
    let mut parent = t.parents().to_vec();
    let rec = rearrange_path(t.vertices(), &mut parent, &t.path_to_root(t.mark()));
    let out = MarkedSTree::new_unchecked(t.vertices().clone(), t.steps().clone(), parent, t.mark());
    debug_assert!(MarkedSTree::new(out.vertices().clone(), out.steps().clone(), out.parents().to_vec(), out.mark()).is_ok());
    Ok((out, rec))
}

/// Exchanges the subtrees attached to paired frustrated sources. An involution.
pub fn phi2(t: &MarkedSTree) -> Result<MarkedSTree> {
    phi2_parts(t).map(|(t, _)| t)
}

/// Frustrated sources of the distinguished path of a tree satisfying (T).
pub fn frustration_record(t: &MarkedSTree) -> Result<FrustrationRecord> {
    phi2_parts(t).map(|(_, rec)| rec)
}

pub fn phi(f: &SFunction) -> Result<MarkedSTree> {
    phi2(&phi1(f)?)
}

pub fn phi_inverse(t: &MarkedSTree) -> Result<SFunction> {
    phi1_inverse(&phi2(t)?)
}

pub fn phi_trace(f: &SFunction) -> Result<PhiTrace> {
    let (t1, segs) = phi1_parts(f)?;
    let (t, frustration) = phi2_parts(&t1)?;
    let vs = f.vertices();
    Ok(PhiTrace {
        function: f.to_json_value(),
        concatenation: segs.iter().map(|s| vs.vertex(s.source())).collect(),
        pieces: describe(vs, &segs),
        intermediate: t1.to_json_value(),
        frustration,
        tree: t.to_json_value(),
    })
}

/// The trace of `Φ` applied to `Φ⁻¹(t)`.
pub fn phi_inverse_trace(t: &MarkedSTree) -> Result<PhiTrace> {
    phi_trace(&phi_inverse(t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertex::Vertex;

    fn v(i: i64, k: u32) -> Vertex {
        Vertex::new(i, k)
    }

    #[test]
    fn forced_function_on_two_levels() {
        let f = SFunction::from_pairs("1,1".parse().unwrap(), "0,1".parse().unwrap(), &[(v(1, 1), v(0, 1))]).unwrap();
        let t = phi(&f).unwrap();
        assert_eq!(t.edges(), vec![(v(1, 1), v(0, 1))]);
        assert_eq!(t.vertices().vertex(t.mark()), v(1, 1));
        assert_eq!(phi_inverse(&t).unwrap(), f);
    }

    #[test]
    fn cycle_becomes_a_piece() {
        // 1^2 -> 0^2 -> 1^2 is a cycle with source 0^2 and sink 1^2
        let f = SFunction::from_pairs(
            "2,2".parse().unwrap(),
            "-1,1".parse().unwrap(),
            &[(v(1, 1), v(0, 1)), (v(1, 2), v(0, 2)), (v(0, 2), v(1, 2))],
        )
        .unwrap();
        let trace = phi_trace(&f).unwrap();
        assert_eq!(trace.concatenation, vec![v(1, 1), v(0, 2), v(0, 1)]);
        let t = phi(&f).unwrap();
        assert_eq!(phi_inverse(&t).unwrap(), f);
        assert!(check_tree_conditions(&t, Regime::Nonneg).is_ok());
    }
}
