//! The bijections between S-functions and marked S-trees.

pub mod general;
pub mod graph;
pub mod nonneg;
pub mod pieces;

pub use general::{classify_case, psi, psi1_inverse, psi1_tree, psi2, psi_inverse, psi_inverse_trace, psi_trace, PsiTrace};
pub use nonneg::{
    frustration_record, phi, phi1, phi1_inverse, phi2, phi_inverse, phi_inverse_trace, phi_trace, PhiTrace,
};
pub use pieces::{Frustrated, FrustrationRecord, Piece};

use crate::function::SFunction;

/// Graph of `f` with the spine edges `i¹ → (i∓1)¹`, `i ≠ 0`, removed.
pub(crate) fn spine_cut(f: &SFunction) -> Vec<Option<usize>> {
    let vs = f.vertices();
    let mut next = f.image().to_vec();
    for i in vs.ell()..=vs.r() {
        if i != 0 {
            next[vs.first(i)] = None;
        }
    }
    next
}
