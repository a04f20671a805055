//! Algebraic cross-checks: cycle-configuration identities and matrix-tree determinants.

pub mod cycles;
pub mod det;
pub mod laplacian;

pub use cycles::{
    eval_p, eval_p_closed, eval_p_out, eval_p_out_closed, eval_p_refined, eval_p_refined_closed, Configuration,
    Cycle, CycleGraph,
};
pub use det::bareiss_det;
pub use laplacian::{cayley_from_spanning, laplacian_minor_closed, laplacian_minor_det, tree_in_tree_det, LaplacianSystem};
