//! Naive exhaustive enumerators used as ground truth for every formula.
//!
//! Nothing here is clever: objects are generated by plain backtracking over
//! all choices and filtered by the defining predicates.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::arith::{BigCount, Ratio};
use crate::cayley::EmbeddedCayleyTree;
use crate::conditions::{self, Case};
use crate::error::{Error, Result};
use crate::function::SFunction;
use crate::profile::{validate_profile_for, Profile, Regime};
use crate::sary::SAryTree;
use crate::steps::StepSet;
use crate::tree::MarkedSTree;
use crate::types::{CVec, CompleteCounts, InCounts, OutCounts, TypeDistribution};
use crate::vertex::{Vertex, VertexSet};

/// What to do when an enumeration would exceed its budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnExceed {
    Error,
    Skip,
}

/// Size and work limits for the enumerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_size: u64,
    pub max_candidates: u64,
    pub on_exceed: OnExceed,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_size: 7, max_candidates: 200_000_000, on_exceed: OnExceed::Error }
    }
}

impl EnumerationBudget {
    pub fn with_max_size(max_size: u64) -> Self {
        EnumerationBudget { max_size: max_size.max(1), ..Default::default() }
    }

    fn admit_size(&self, n: u64) -> Result<()> {
        if n > self.max_size {
            return Err(Error::BudgetExceeded(format!("size {n} exceeds the enumeration bound {}", self.max_size)));
        }
        Ok(())
    }

    /// Applies the exceed policy to a result: with `Skip`, budget errors become `None`.
    pub fn admit<T>(&self, r: Result<T>) -> Result<Option<T>> {
        match (r, self.on_exceed) {
            (Ok(v), _) => Ok(Some(v)),
            (Err(Error::BudgetExceeded(_)), OnExceed::Skip) => Ok(None),
            (Err(e), _) => Err(e),
        }
    }
}

struct Meter {
    used: u64,
    cap: u64,
}

impl Meter {
    fn new(b: &EnumerationBudget) -> Self {
        Meter { used: 0, cap: b.max_candidates }
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            return Err(Error::BudgetExceeded(format!("more than {} candidates examined", self.cap)));
        }
        Ok(())
    }
}

/// Extra restriction on enumerated functions.
#[derive(Debug, Clone, Copy)]
pub enum FunctionConstraint<'a> {
    None,
    Injective,
    FixedOutTypes(&'a BTreeMap<Vertex, i64>),
    FixedInTypes(&'a BTreeMap<Vertex, CVec>),
    FixedCompleteTypes(&'a BTreeMap<Vertex, (Option<i64>, CVec)>),
    CountedOut(&'a OutCounts),
    CountedInjectiveOut(&'a OutCounts),
    CountedIn(&'a InCounts),
    CountedComplete { root: &'a CVec, counts: &'a CompleteCounts },
}

fn in_types(min_step: i64, vs: &VertexSet, next: &[Option<usize>]) -> Vec<CVec> {
    let mut c = vec![vec![0u32; (2 - min_step) as usize]; next.len()];
    for (v, p) in next.iter().enumerate() {
        if let Some(p) = *p {
            c[p][(vs.abscissa(v) - vs.abscissa(p) - min_step) as usize] += 1;
        }
    }
    c
}

fn positive<K: Ord + Clone>(m: &BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    m.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (a.clone(), *b)).collect()
}

impl FunctionConstraint<'_> {
    fn accepts(&self, f: &SFunction) -> bool {
        let vs = f.vertices();
        let m = f.steps().min();
        match self {
            FunctionConstraint::None => true,
            FunctionConstraint::Injective => f.is_injective_per_level(),
            FunctionConstraint::FixedOutTypes(map) => {
                (0..vs.len()).all(|v| f.out_step(v) == map.get(&vs.vertex(v)).copied())
            }
            FunctionConstraint::FixedInTypes(map) => {
                let c = in_types(m, vs, f.image());
                (0..vs.len()).all(|v| map.get(&vs.vertex(v)) == Some(&c[v]))
            }
            FunctionConstraint::FixedCompleteTypes(map) => {
                let c = in_types(m, vs, f.image());
                (0..vs.len()).all(|v| map.get(&vs.vertex(v)) == Some(&(f.out_step(v), c[v].clone())))
            }
            FunctionConstraint::CountedOut(out) => f.type_distribution().out_counts == positive(out),
            FunctionConstraint::CountedInjectiveOut(out) => {
                f.is_injective_per_level() && f.type_distribution().out_counts == positive(out)
            }
            FunctionConstraint::CountedIn(inc) => f.type_distribution().in_counts == positive(inc),
            FunctionConstraint::CountedComplete { root, counts } => {
                let d = f.type_distribution();
                d.complete_counts == positive(counts) && d.root_in_type.as_ref().map(|r| &r.1) == Some(*root)
            }
        }
    }
}

/// Every S-function on `V ∖ {0¹}` satisfying the regime's condition (F) and the
/// constraint, in lexicographic order of the image vector.
pub fn enumerate_sfunctions(
    steps: &StepSet,
    profile: &Profile,
    regime: Regime,
    constraint: &FunctionConstraint<'_>,
    budget: &EnumerationBudget,
) -> Result<Vec<SFunction>> {
    let mut out = Vec::new();
    for_each_sfunction(steps, profile, regime, budget, |f| {
        if constraint.accepts(&f) {
            out.push(f);
        }
    })?;
    Ok(out)
}

/// Allowed images of each vertex under (F); `None` only for `0¹`.
fn function_codomains(steps: &StepSet, vs: &VertexSet, regime: Regime) -> Vec<Option<Vec<usize>>> {
    (0..vs.len())
        .map(|v| {
            let i = vs.abscissa(v);
            if v == vs.first(0) {
                return None;
            }
            if vs.is_first(v) {
                if i > 0 {
                    return Some(vec![vs.first(i - 1)]);
                }
                if regime == Regime::General && i <= -2 {
                    return Some(vec![vs.first(i + 1)]);
                }
                if regime == Regime::General && i == -1 {
                    return Some(vs.level(0).collect());
                }
            }
            let mut cod: Vec<usize> = steps.iter().flat_map(|s| vs.level(i - s)).collect();
            cod.sort_unstable();
            Some(cod)
        })
        .collect()
}

/// Visits every function satisfying (F) for the regime.
pub fn for_each_sfunction(
    steps: &StepSet,
    profile: &Profile,
    regime: Regime,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(SFunction),
) -> Result<()> {
    validate_profile_for(steps, profile, regime)?;
    budget.admit_size(profile.total())?;
    let vs = Arc::new(VertexSet::new(profile.clone()));
    let cod = function_codomains(steps, &vs, regime);
    let mut meter = Meter::new(budget);
    let mut image: Vec<Option<usize>> = vec![None; vs.len()];
    let mut choice = vec![0usize; vs.len()];
    let free: Vec<usize> = (0..vs.len()).filter(|&v| cod[v].is_some()).collect();
    if free.iter().any(|&v| cod[v].as_ref().is_some_and(|c| c.is_empty())) {
        return Ok(());
    }
    loop {
        meter.tick()?;
        for &v in &free {
            image[v] = Some(cod[v].as_ref().expect("free")[choice[v]]);
        }
        visit(SFunction::new(vs.clone(), steps.clone(), image.clone())?);
        // odometer, last vertex fastest
        let mut k = free.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            let v = free[k];
            choice[v] += 1;
            if choice[v] < cod[v].as_ref().expect("free").len() {
                break;
            }
            choice[v] = 0;
        }
    }
}

/// Every marked S-tree on `V` satisfying (T) (non-negative regime, rooted at `0¹`)
/// or (T₁) ∧ (T₂) (general regime, rooted in `V_0`).
pub fn enumerate_marked_strees(
    steps: &StepSet,
    profile: &Profile,
    regime: Regime,
    budget: &EnumerationBudget,
) -> Result<Vec<MarkedSTree>> {
    let mut out = Vec::new();
    for_each_marked_stree(steps, profile, regime, budget, |t, _| out.push(t))?;
    Ok(out)
}

/// Visits every marked tree of the regime's image set, with its case in the
/// general regime.
pub fn for_each_marked_stree(
    steps: &StepSet,
    profile: &Profile,
    regime: Regime,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(MarkedSTree, Option<Case>),
) -> Result<()> {
    validate_profile_for(steps, profile, regime)?;
    for_each_rooted_stree(steps, profile, budget, |vs, parent| {
        let root = parent.iter().position(|p| p.is_none()).expect("root");
        if regime == Regime::Nonneg && root != vs.first(0) {
            return;
        }
        for mark in vs.level(vs.r()) {
            let t = MarkedSTree::new(vs.clone(), steps.clone(), parent.to_vec(), mark).expect("valid S-tree");
            let rep = conditions::evaluate(&t);
            match regime {
                Regime::Nonneg => {
                    if rep.t1 {
                        visit(t, None);
                    }
                }
                Regime::General => {
                    if let Some(c) = rep.case(vs.first(0)) {
                        visit(t, Some(c));
                    }
                }
            }
        }
    })
}

/// Visits every S-tree on `V` rooted at a vertex of `V_0` (parent maps in
/// lexicographic order).
pub fn for_each_rooted_stree(
    steps: &StepSet,
    profile: &Profile,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(&Arc<VertexSet>, &[Option<usize>]),
) -> Result<()> {
    budget.admit_size(profile.total())?;
    let vs = Arc::new(VertexSet::new(profile.clone()));
    let n = vs.len();
    let cand: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let i = vs.abscissa(v);
            let mut c: Vec<usize> = steps.iter().flat_map(|s| vs.level(i - s)).filter(|&w| w != v).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut meter = Meter::new(budget);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for root in vs.level(0) {
        let order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
        assign_parents(&order, 0, &cand, &mut parent, &mut meter, &mut |p| visit(&vs, p))?;
    }
    Ok(())
}

/// Backtracking over parent choices, rejecting a choice as soon as it closes a cycle.
fn assign_parents(
    order: &[usize],
    k: usize,
    cand: &[Vec<usize>],
    parent: &mut Vec<Option<usize>>,
    meter: &mut Meter,
    visit: &mut dyn FnMut(&[Option<usize>]),
) -> Result<()> {
    if k == order.len() {
        visit(parent);
        return Ok(());
    }
    let v = order[k];
    for &p in &cand[v] {
        meter.tick()?;
        if reaches(parent, p, v) {
            continue;
        }
        parent[v] = Some(p);
        assign_parents(order, k + 1, cand, parent, meter, visit)?;
        parent[v] = None;
    }
    Ok(())
}

fn reaches(parent: &[Option<usize>], mut from: usize, target: usize) -> bool {
    loop {
        if from == target {
            return true;
        }
        match parent[from] {
            Some(p) => from = p,
            None => return false,
        }
    }
}

/// Visits every rooted labeled tree on `0..n` whose labels carry "abscissas" drawn
/// from `node_counts` (label-to-node assignment with exactly `node_counts[a]` labels
/// at node `a`), with the root at node `root_node` and every edge allowed by `edge_ok(child_node, parent_node)`.
pub fn for_each_labeled_embedding(
    node_counts: &[u64],
    root_node: usize,
    edge_ok: &dyn Fn(usize, usize) -> bool,
    budget: &EnumerationBudget,
    visit: &mut dyn FnMut(&[Option<usize>], &[usize]),
) -> Result<()> {
    let n: u64 = node_counts.iter().sum();
    budget.admit_size(n)?;
    let n = n as usize;
    let mut meter = Meter::new(budget);
    let mut remaining = node_counts.to_vec();
    let mut node = vec![0usize; n];
    assign_nodes(0, &mut remaining, &mut node, &mut meter, &mut |node: &[usize], meter: &mut Meter| {
        let cand: Vec<Vec<usize>> = (0..n)
            .map(|v| (0..n).filter(|&w| w != v && edge_ok(node[v], node[w])).collect())
            .collect();
        let mut parent = vec![None; n];
        for root in (0..n).filter(|&v| node[v] == root_node) {
            let order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
            assign_parents(&order, 0, &cand, &mut parent, meter, &mut |p| visit(p, node))?;
        }
        Ok(())
    })
}

fn assign_nodes(
    k: usize,
    remaining: &mut [u64],
    node: &mut [usize],
    meter: &mut Meter,
    done: &mut dyn FnMut(&[usize], &mut Meter) -> Result<()>,
) -> Result<()> {
    if k == node.len() {
        return done(node, meter);
    }
    for a in 0..remaining.len() {
        if remaining[a] == 0 {
            continue;
        }
        meter.tick()?;
        remaining[a] -= 1;
        node[k] = a;
        assign_nodes(k + 1, remaining, node, meter, done)?;
        remaining[a] += 1;
    }
    Ok(())
}

/// Visits every S-embedded Cayley tree with the given profile.
pub fn for_each_embedded_cayley(
    steps: &StepSet,
    profile: &Profile,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(EmbeddedCayleyTree),
) -> Result<()> {
    let ell = profile.ell();
    let counts = profile.counts().to_vec();
    let root_node = (-ell) as usize;
    let edge_ok = |c: usize, p: usize| steps.contains(c as i64 - p as i64);
    for_each_labeled_embedding(&counts, root_node, &edge_ok, budget, &mut |parent, node| {
        let abs: Vec<i64> = node.iter().map(|&a| a as i64 + ell).collect();
        visit(EmbeddedCayleyTree::new(steps.clone(), parent.to_vec(), abs).expect("valid embedded tree"));
    })
}

pub fn enumerate_embedded_cayley(
    steps: &StepSet,
    profile: &Profile,
    budget: &EnumerationBudget,
) -> Result<Vec<EmbeddedCayleyTree>> {
    let mut out = Vec::new();
    for_each_embedded_cayley(steps, profile, budget, |t| out.push(t))?;
    Ok(out)
}

/// Number of surjective `𝒯`-embedded Cayley trees, by brute force over morphisms.
pub fn count_tree_morphisms(target: &crate::formulas::TargetTree, budget: &EnumerationBudget) -> Result<BigCount> {
    let adjacent = |a: usize, b: usize| target.neighbours(a).contains(&b);
    let mut count = 0u64;
    for_each_labeled_embedding(target.counts(), target.root(), &adjacent, budget, &mut |_, _| count += 1)?;
    Ok(count.into())
}

/// Visits every S-ary tree with the given profile. Child slots `(node, step)` are
/// opened in creation order and each is either filled or left empty.
pub fn for_each_sary(
    steps: &StepSet,
    profile: &Profile,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(SAryTree),
) -> Result<()> {
    budget.admit_size(profile.total())?;
    let mut meter = Meter::new(budget);
    let mut remaining: BTreeMap<i64, u64> = profile.abscissas().map(|i| (i, profile.n(i))).collect();
    *remaining.get_mut(&0).expect("0 in profile") -= 1;
    let mut st = SaryState { parent: vec![None], abscissa: vec![0], slots: Vec::new(), next: 0 };
    let steps = steps.steps();
    for &s in steps {
        st.slots.push((0, s));
    }
    sary_rec(steps, &mut st, &mut remaining, &mut meter, &mut visit)
}

struct SaryState {
    parent: Vec<Option<usize>>,
    abscissa: Vec<i64>,
    slots: Vec<(usize, i64)>,
    next: usize,
}

fn sary_rec(
    steps: &[i64],
    st: &mut SaryState,
    remaining: &mut BTreeMap<i64, u64>,
    meter: &mut Meter,
    visit: &mut dyn FnMut(SAryTree),
) -> Result<()> {
    meter.tick()?;
    let left: u64 = remaining.values().sum();
    if left == 0 {
        visit(SAryTree::from_parent_map(&st.parent, &st.abscissa));
        return Ok(());
    }
    if st.next == st.slots.len() {
        return Ok(());
    }
    let (node, s) = st.slots[st.next];
    st.next += 1;
    // leave the slot empty
    sary_rec(steps, st, remaining, meter, visit)?;
    let a = st.abscissa[node] + s;
    if remaining.get(&a).copied().unwrap_or(0) > 0 {
        *remaining.get_mut(&a).expect("present") -= 1;
        let id = st.parent.len();
        st.parent.push(Some(node));
        st.abscissa.push(a);
        let before = st.slots.len();
        for &t in steps {
            st.slots.push((id, t));
        }
        sary_rec(steps, st, remaining, meter, visit)?;
        st.slots.truncate(before);
        st.abscissa.pop();
        st.parent.pop();
        *remaining.get_mut(&a).expect("present") += 1;
    }
    st.next -= 1;
    Ok(())
}

pub fn enumerate_sary(steps: &StepSet, profile: &Profile, budget: &EnumerationBudget) -> Result<Vec<SAryTree>> {
    let mut out = Vec::new();
    for_each_sary(steps, profile, budget, |t| out.push(t))?;
    Ok(out)
}

/// Embedded Cayley trees over an arbitrary step list, including lists whose
/// maximum is not 1.
pub fn count_embedded_cayley_steps(steps: &[i64], profile: &Profile, budget: &EnumerationBudget) -> Result<BigCount> {
    let ell = profile.ell();
    let edge_ok = |c: usize, p: usize| steps.contains(&(c as i64 - p as i64));
    let mut count = 0u64;
    for_each_labeled_embedding(profile.counts(), (-ell) as usize, &edge_ok, budget, &mut |_, _| count += 1)?;
    Ok(count.into())
}

/// S-ary trees over an arbitrary step list.
pub fn count_sary_steps(steps: &[i64], profile: &Profile, budget: &EnumerationBudget) -> Result<BigCount> {
    budget.admit_size(profile.total())?;
    let mut steps = steps.to_vec();
    steps.sort_unstable();
    steps.dedup();
    let mut meter = Meter::new(budget);
    let mut remaining: BTreeMap<i64, u64> = profile.abscissas().map(|i| (i, profile.n(i))).collect();
    *remaining.get_mut(&0).expect("0 in profile") -= 1;
    let mut st = SaryState { parent: vec![None], abscissa: vec![0], slots: steps.iter().map(|&s| (0, s)).collect(), next: 0 };
    let mut count = 0u64;
    sary_rec(&steps, &mut st, &mut remaining, &mut meter, &mut |_| count += 1)?;
    Ok(count.into())
}

/// Granularity of a census.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    Profile,
    Out,
    In,
    Complete,
}

/// Key of a census entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CensusKey {
    Profile(Profile),
    Out(OutCounts),
    In(InCounts),
    /// Root in-type and complete types of the non-root vertices.
    Complete(Option<(i64, CVec)>, CompleteCounts),
}

impl CensusKey {
    pub fn of(d: &TypeDistribution, g: Granularity) -> Result<Self> {
        Ok(match g {
            Granularity::Profile => CensusKey::Profile(d.profile()?),
            Granularity::Out => CensusKey::Out(d.out_counts.clone()),
            Granularity::In => CensusKey::In(d.in_counts.clone()),
            Granularity::Complete => CensusKey::Complete(d.root_in_type.clone(), d.complete_counts.clone()),
        })
    }
}

/// Exact census of a stream of type distributions.
pub fn census_by_type(
    items: impl IntoIterator<Item = TypeDistribution>,
    granularity: Granularity,
) -> Result<BTreeMap<CensusKey, BigCount>> {
    let mut census: BTreeMap<CensusKey, BigCount> = BTreeMap::new();
    for d in items {
        *census.entry(CensusKey::of(&d, granularity)?).or_insert_with(BigCount::zero) += 1u32;
    }
    Ok(census)
}

/// Weighted digraph on `0..n` for spanning-tree enumeration: `arcs[v]` lists `(w, weight)`
/// meaning `v` may take `w` as its parent.
pub type WeightedArcs = Vec<Vec<(usize, Ratio)>>;

/// Sum over spanning trees oriented towards `root` of the product of arc weights.
pub fn spanning_tree_sum(arcs: &WeightedArcs, root: usize, budget: &EnumerationBudget) -> Result<Ratio> {
    let n = arcs.len();
    let mut meter = Meter::new(budget);
    let cand: Vec<Vec<usize>> = arcs.iter().map(|a| a.iter().map(|(w, _)| *w).collect()).collect();
    let order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut parent = vec![None; n];
    let mut total = Ratio::zero();
    assign_parents(&order, 0, &cand, &mut parent, &mut meter, &mut |p| {
        let mut w = Ratio::one();
        for v in 0..n {
            if let Some(q) = p[v] {
                w *= &arcs[v].iter().find(|(x, _)| *x == q).expect("arc").1;
            }
        }
        total += w;
    })?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> StepSet {
        x.parse().unwrap()
    }

    fn p(x: &str) -> Profile {
        x.parse().unwrap()
    }

    #[test]
    fn small_function_sets() {
        let b = EnumerationBudget::default();
        let fs = enumerate_sfunctions(&s("-1,1"), &p("2,1"), Regime::Nonneg, &FunctionConstraint::None, &b).unwrap();
        assert_eq!(fs.len(), 1);
        let one = enumerate_sfunctions(&s("0,1"), &p("1"), Regime::Nonneg, &FunctionConstraint::None, &b).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn small_tree_sets() {
        let b = EnumerationBudget::default();
        let ts = enumerate_marked_strees(&s("-1,1"), &p("1,1"), Regime::Nonneg, &b).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(enumerate_embedded_cayley(&s("-1,1"), &p("2;2,1"), &b).unwrap().len(), 720);
        assert_eq!(enumerate_sary(&s("-1,1"), &p("2;2,1"), &b).unwrap().len(), 3);
        assert_eq!(enumerate_embedded_cayley(&s("0,1"), &p("3"), &b).unwrap().len(), 9);
    }

    #[test]
    fn budget_policy() {
        let b = EnumerationBudget::with_max_size(3);
        let r = enumerate_sary(&s("-1,1"), &p("2;2,1"), &b);
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
        let skip = EnumerationBudget { on_exceed: OnExceed::Skip, ..b };
        assert_eq!(skip.admit(r).unwrap(), None);
    }
}
