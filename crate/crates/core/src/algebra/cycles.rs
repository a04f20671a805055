//! Cycle configurations on `G_{ℓ,r}(S)` and the polynomials they define.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{ratio_int, Ratio};
use crate::error::{Error, Result};
use crate::formulas::WeightAssignment;
use crate::steps::StepSet;
use crate::types::OutCounts;

const MAX_SPAN: i64 = 12;

/// The digraph on `{ℓ, …, r}` with an arc `i → j` whenever `i − j ∈ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleGraph {
    pub ell: i64,
    pub r: i64,
    pub steps: StepSet,
}

/// An elementary cycle, as its arcs `(i, s)` meaning `i → i − s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cycle {
    pub arcs: Vec<(i64, i64)>,
}

impl Cycle {
    pub fn vertices(&self) -> impl Iterator<Item = i64> + '_ {
        self.arcs.iter().map(|&(i, _)| i)
    }

    fn canonical(mut arcs: Vec<(i64, i64)>) -> Cycle {
        arcs.sort_unstable();
        Cycle { arcs }
    }
}

/// A set of vertex-disjoint elementary cycles.
pub type Configuration = Vec<Cycle>;

impl CycleGraph {
    pub fn new(ell: i64, r: i64, steps: StepSet) -> Result<Self> {
        if ell > 0 || r < 0 {
            return Err(Error::InvalidProfile(format!("need ell <= 0 <= r, got [{ell}, {r}]")));
        }
        if StepSet::max(&steps) != 1 {
            return Err(Error::HypothesisViolation("cycle graphs require max S = 1".into()));
        }
        Ok(CycleGraph { ell, r, steps })
    }

    fn contains(&self, i: i64) -> bool {
        (self.ell..=self.r).contains(&i)
    }

    /// Elementary cycles as descending runs: the interval `[a, a+k]` for `−k ∈ S`,
    /// traversed `a+k → … → a → a+k`.
    pub fn cycles(&self) -> Vec<Cycle> {
        let mut out = Vec::new();
        for s in self.steps.iter().filter(|&s| s <= 0) {
            let k = -s;
            for a in self.ell..=self.r - k {
                let mut arcs: Vec<(i64, i64)> = (a + 1..=a + k).map(|j| (j, 1)).collect();
                arcs.push((a, s));
                out.push(Cycle::canonical(arcs));
            }
        }
        out.sort();
        out
    }

    /// Elementary cycles found by a depth-first search from each cycle minimum,
    /// without using the shape of `S`.
    pub fn cycles_generic(&self) -> Vec<Cycle> {
        let mut out = Vec::new();
        for start in self.ell..=self.r {
            let mut path = vec![start];
            let mut arcs = Vec::new();
            self.dfs(start, &mut path, &mut arcs, &mut out);
        }
        out.sort();
        out
    }

    fn dfs(&self, start: i64, path: &mut Vec<i64>, arcs: &mut Vec<(i64, i64)>, out: &mut Vec<Cycle>) {
        let v = *path.last().expect("non-empty path");
        for s in self.steps.iter() {
            let w = v - s;
            if !self.contains(w) || w < start {
                continue;
            }
            arcs.push((v, s));
            if w == start {
                out.push(Cycle::canonical(arcs.clone()));
            } else if !path.contains(&w) {
                path.push(w);
                self.dfs(start, path, arcs, out);
                path.pop();
            }
            arcs.pop();
        }
    }

    /// Every configuration of cycles, the empty one first.
    pub fn configurations(&self) -> Result<Vec<Configuration>> {
        if self.r - self.ell > MAX_SPAN {
            return Err(Error::BudgetExceeded(format!(
                "cycle configurations on {} vertices (limit {})",
                self.r - self.ell + 1,
                MAX_SPAN + 1
            )));
        }
        let cycles = self.cycles();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        collect(&cycles, 0, &mut BTreeSet::new(), &mut chosen, &mut out);
        Ok(out)
    }
}

fn collect(
    cycles: &[Cycle],
    from: usize,
    used: &mut BTreeSet<i64>,
    chosen: &mut Vec<Cycle>,
    out: &mut Vec<Configuration>,
) {
    out.push(chosen.clone());
    for k in from..cycles.len() {
        let c = &cycles[k];
        if c.vertices().any(|v| used.contains(&v)) {
            continue;
        }
        used.extend(c.vertices());
        chosen.push(c.clone());
        collect(cycles, k + 1, used, chosen, out);
        chosen.pop();
        for v in c.vertices() {
            used.remove(&v);
        }
    }
}

fn covered(conf: &Configuration) -> BTreeSet<i64> {
    conf.iter().flat_map(|c| c.vertices()).collect()
}

fn sign(conf: &Configuration) -> Ratio {
    if conf.len() % 2 == 0 {
        Ratio::one()
    } else {
        -Ratio::one()
    }
}

/// Values `y_ℓ, …, y_r`, zero outside the range.
fn at(g: &CycleGraph, y: &[Ratio], i: i64) -> Ratio {
    if g.contains(i) {
        y[(i - g.ell) as usize].clone()
    } else {
        Ratio::zero()
    }
}

fn check_len(g: &CycleGraph, y: &[Ratio]) -> Result<()> {
    if y.len() as i64 != g.r - g.ell + 1 {
        return Err(Error::InvalidProfile(format!("{} values for [{}, {}]", y.len(), g.ell, g.r)));
    }
    Ok(())
}

/// `P_{ℓ,r}(y)` as the signed sum over configurations.
pub fn eval_p(g: &CycleGraph, y: &[Ratio]) -> Result<Ratio> {
    eval_p_refined(g, y, &WeightAssignment::ones())
}

/// The factored form `(Σ_s y_{−s}) ∏_{ℓ<i<r} y_i`, or `χ_{0∈S}` when `ℓ = r = 0`.
pub fn eval_p_closed(g: &CycleGraph, y: &[Ratio]) -> Result<Ratio> {
    eval_p_refined_closed(g, y, &WeightAssignment::ones())
}

/// The configuration sum with arc weights `x_{i,s}`.
pub fn eval_p_refined(g: &CycleGraph, y: &[Ratio], x: &WeightAssignment) -> Result<Ratio> {
    check_len(g, y)?;
    let mut total = Ratio::zero();
    for conf in g.configurations()? {
        let inside = covered(&conf);
        let mut term = sign(&conf);
        for c in &conf {
            for &(i, s) in &c.arcs {
                term *= x.get(i, s);
            }
        }
        for i in g.ell..=g.r {
            term *= if inside.contains(&i) {
                at(g, y, i) - ratio_int(i64::from(i == 0))
            } else {
                g.steps.iter().fold(Ratio::zero(), |acc, s| acc + at(g, y, i - s) * x.get(i, s))
            };
        }
        total += term;
    }
    Ok(total)
}

/// `∏_{i<0} x_{i,−1} ∏_{i>0} x_{i,1} (Σ_s x_{0,s} y_{−s}) ∏_{ℓ<i<r} y_i`, and `x_{0,0} χ_{0∈S}`
/// when `ℓ = r = 0`.
pub fn eval_p_refined_closed(g: &CycleGraph, y: &[Ratio], x: &WeightAssignment) -> Result<Ratio> {
    check_len(g, y)?;
    if g.ell == 0 && g.r == 0 {
        return Ok(if g.steps.contains(0) { x.get(0, 0) } else { Ratio::zero() });
    }
    let mut acc = g.steps.iter().fold(Ratio::zero(), |acc, s| acc + x.get(0, s) * at(g, y, -s));
    for i in g.ell..0 {
        acc *= x.get(i, -1);
    }
    for i in 1..=g.r {
        acc *= x.get(i, 1);
    }
    for i in g.ell + 1..g.r {
        acc *= at(g, y, i);
    }
    Ok(acc)
}

fn out_totals(g: &CycleGraph, out: &OutCounts) -> Result<Vec<Ratio>> {
    let mut n = vec![0u64; (g.r - g.ell + 1) as usize];
    n[(-g.ell) as usize] = 1;
    for (&(i, s), &c) in out {
        if !g.contains(i) || !g.contains(i - s) || !g.steps.contains(s) {
            return Err(Error::IncompatibleDistribution(format!("out-type ({i};{s}) does not fit G")));
        }
        n[(i - g.ell) as usize] += c;
    }
    Ok(n.into_iter().map(ratio_int).collect())
}

/// `Σ_C (−1)^{|C|} ∏_{i∉C} n_i ∏_{(i,i−s)∈C} n(i,s)` with `n_i = χ_{i=0} + Σ_s n(i,s)`.
pub fn eval_p_out(g: &CycleGraph, out: &OutCounts) -> Result<Ratio> {
    let n = out_totals(g, out)?;
    let nis = |i: i64, s: i64| ratio_int(out.get(&(i, s)).copied().unwrap_or(0));
    let mut total = Ratio::zero();
    for conf in g.configurations()? {
        let inside = covered(&conf);
        let mut term = sign(&conf);
        for c in &conf {
            for &(i, s) in &c.arcs {
                term *= nis(i, s);
            }
        }
        for i in (g.ell..=g.r).filter(|i| !inside.contains(i)) {
            term *= at(g, &n, i);
        }
        total += term;
    }
    Ok(total)
}

/// `∏_{i<0} n(i,−1) ∏_{i>0} n(i,1)`.
pub fn eval_p_out_closed(g: &CycleGraph, out: &OutCounts) -> Result<Ratio> {
    out_totals(g, out)?;
    let nis = |i: i64, s: i64| ratio_int(out.get(&(i, s)).copied().unwrap_or(0));
    let mut acc = Ratio::one();
    for i in g.ell..0 {
        acc *= nis(i, -1);
    }
    for i in 1..=g.r {
        acc *= nis(i, 1);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(ell: i64, r: i64, s: &str) -> CycleGraph {
        CycleGraph::new(ell, r, s.parse().unwrap()).unwrap()
    }

    fn ys(v: &[i64]) -> Vec<Ratio> {
        v.iter().map(|&x| ratio_int(x)).collect()
    }

    #[test]
    fn configuration_counts() {
        assert_eq!(g(0, 1, "-1,1").configurations().unwrap().len(), 2);
        assert_eq!(g(0, 0, "0,1").configurations().unwrap().len(), 2);
        assert_eq!(g(0, 2, "-1,1").configurations().unwrap().len(), 3);
    }

    #[test]
    fn descending_runs_are_all_cycles() {
        for s in ["-1,1", "-1,0,1", "1", "-2,-1,1", "-3,0,1", "-2,-1,0,1"] {
            let gr = g(-3, 3, s);
            assert_eq!(gr.cycles(), gr.cycles_generic(), "S = {s}");
        }
    }

    #[test]
    fn two_vertex_polynomial() {
        let gr = g(0, 1, "-1,1");
        let y = ys(&[5, 7]);
        assert_eq!(eval_p(&gr, &y).unwrap(), ratio_int(7));
        assert_eq!(eval_p_closed(&gr, &y).unwrap(), ratio_int(7));
        assert_eq!(eval_p(&g(0, 0, "0,1"), &ys(&[4])).unwrap(), ratio_int(1));
    }

    #[test]
    fn identity_fails_outside_hypotheses() {
        let gr = g(-1, 1, "-2,-1,1");
        let y = ys(&[2, 3, 5]);
        assert_ne!(eval_p(&gr, &y).unwrap(), eval_p_closed(&gr, &y).unwrap());
    }

    #[test]
    fn out_identity_on_a_two_cycle() {
        let gr = g(0, 1, "-1,1");
        let out: OutCounts = [((1, 1), 1), ((0, -1), 1)].into_iter().collect();
        assert_eq!(eval_p_out(&gr, &out).unwrap(), ratio_int(1));
        assert_eq!(eval_p_out_closed(&gr, &out).unwrap(), ratio_int(1));
    }
}
