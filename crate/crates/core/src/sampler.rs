//! Exact uniform random generation through the function → tree bijections, and
//! the exact law of the vertical profile.
//!
//! Integer draws go through `Rng::gen_range`, which rejects out-of-range words
//! instead of reducing modulo, so every draw is exactly uniform.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith::{BigCount, Ratio};
use crate::bijection::{phi, psi};
use crate::cayley::EmbeddedCayleyTree;
use crate::error::{Error, Result};
use crate::formulas::{count_binary_profile, count_cayley_profile, count_sary_profile};
use crate::function::SFunction;
use crate::profile::{validate_profile_for, Profile, Regime};
use crate::sary::SAryTree;
use crate::steps::StepSet;
use crate::tree::MarkedSTree;
use crate::vertex::VertexSet;

/// Generator for draw `j` of a run seeded with `seed`. Draws use disjoint ChaCha
/// streams, so batches can be split across workers without changing the output.
pub fn rng_for(seed: u64, j: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j);
    rng
}

/// `count` independent draws of `draw`, draw `j` using [`rng_for`]`(seed, j)`.
pub fn sample_batch<T, F>(seed: u64, count: u64, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..count).into_par_iter().map(|j| draw(&mut rng_for(seed, j))).collect()
}

/// Levels `V_{i−s}`, `s ∈ S`, that a vertex at `i` may map to.
fn codomain(vs: &VertexSet, steps: &StepSet, i: i64) -> Vec<Range<usize>> {
    steps.iter().map(|s| vs.level(i - s)).filter(|r| !r.is_empty()).collect()
}

fn pick(ranges: &[Range<usize>], rng: &mut impl Rng) -> Option<usize> {
    let total: usize = ranges.iter().map(|r| r.len()).sum();
    if total == 0 {
        return None;
    }
    let mut k = rng.gen_range(0..total);
    for r in ranges {
        if k < r.len() {
            return Some(r.start + k);
        }
        k -= r.len();
    }
    unreachable!("k < total")
}

/// The image forced by (F), if any. `−1¹` is handled by the callers.
fn forced(vs: &VertexSet, regime: Regime, v: usize) -> Option<usize> {
    let i = vs.abscissa(v);
    if !vs.is_first(v) {
        return None;
    }
    if i > 0 {
        Some(vs.first(i - 1))
    } else if regime == Regime::General && i <= -2 {
        Some(vs.first(i + 1))
    } else {
        None
    }
}

fn is_free_minus_one(vs: &VertexSet, regime: Regime, v: usize) -> bool {
    regime == Regime::General && vs.abscissa(v) == -1 && vs.is_first(v)
}

/// A uniform function among those satisfying (F): each unconstrained image is drawn
/// independently from `∪_s V_{i−s}`, and `−1¹` from `V_0` in the general regime.
pub fn sample_sfunction_with(
    steps: &StepSet,
    profile: &Profile,
    regime: Regime,
    rng: &mut impl Rng,
) -> Result<SFunction> {
    validate_profile_for(steps, profile, regime)?;
    let vs = Arc::new(VertexSet::new(profile.clone()));
    let root = vs.first(0);
    let cods: Vec<Vec<Range<usize>>> = profile.abscissas().map(|i| codomain(&vs, steps, i)).collect();
    let mut image = vec![None; vs.len()];
    for v in 0..vs.len() {
        if v == root {
            continue;
        }
        image[v] = if let Some(w) = forced(&vs, regime, v) {
            Some(w)
        } else if is_free_minus_one(&vs, regime, v) {
            pick(&[vs.level(0)], rng)
        } else {
            let w = pick(&cods[(vs.abscissa(v) - vs.ell()) as usize], rng);
            if w.is_none() {
                return Err(Error::InfeasibleProfile(format!("{} has no possible image", vs.vertex(v))));
            }
            w
        };
    }
    SFunction::new(vs, steps.clone(), image)
}

pub fn sample_sfunction(steps: &StepSet, profile: &Profile, regime: Regime, seed: u64) -> Result<SFunction> {
    sample_sfunction_with(steps, profile, regime, &mut rng_for(seed, 0))
}

/// A uniform function satisfying (F) that is injective on each `V_i`: the free
/// vertices of a level receive a uniform injection into the targets left after
/// the forced images.
pub fn sample_injective_with(
    steps: &StepSet,
    profile: &Profile,
    regime: Regime,
    rng: &mut impl Rng,
) -> Result<SFunction> {
    validate_profile_for(steps, profile, regime)?;
    let vs = Arc::new(VertexSet::new(profile.clone()));
    let root = vs.first(0);
    let mut image = vec![None; vs.len()];
    for i in profile.abscissas() {
        let mut taken = Vec::new();
        let mut free = Vec::new();
        for v in vs.level(i) {
            if v == root {
                continue;
            }
            if let Some(w) = forced(&vs, regime, v) {
                image[v] = Some(w);
                taken.push(w);
            } else if is_free_minus_one(&vs, regime, v) {
                let w = pick(&[vs.level(0)], rng).ok_or_else(|| Error::InfeasibleProfile("V_0 is empty".into()))?;
                image[v] = Some(w);
                taken.push(w);
            } else {
                free.push(v);
            }
        }
        let mut targets: Vec<usize> =
            codomain(&vs, steps, i).into_iter().flatten().filter(|w| !taken.contains(w)).collect();
        if targets.len() < free.len() {
            return Err(Error::InfeasibleProfile(format!(
                "{} vertices of V_{i} need distinct images among {} targets",
                free.len(),
                targets.len()
            )));
        }
        let (chosen, _) = targets.partial_shuffle(rng, free.len());
        for (&v, &w) in free.iter().zip(chosen.iter()) {
            image[v] = Some(w);
        }
    }
    SFunction::new(vs, steps.clone(), image)
}

pub fn sample_injective(steps: &StepSet, profile: &Profile, regime: Regime, seed: u64) -> Result<SFunction> {
    sample_injective_with(steps, profile, regime, &mut rng_for(seed, 0))
}

fn to_tree(f: &SFunction, regime: Regime) -> Result<MarkedSTree> {
    match regime {
        Regime::Nonneg => phi(f),
        Regime::General => psi(f),
    }
}

/// Renames and labels a marked tree: at each abscissa `i`, `i¹` trades names with
/// `i^{swap_i}`; then label `j` (1-based) goes to the next unused vertex of
/// `V_{order[j−1]}` in index order. The mark is dropped.
///
/// `swap` is indexed from `ℓ`; `order` must contain each abscissa `i` exactly `n_i` times.
pub fn name_and_label(t: &MarkedSTree, swap: &[u32], order: &[i64]) -> Result<EmbeddedCayleyTree> {
    let vs = t.vertices();
    let p = vs.profile();
    let n = vs.len();
    if swap.len() != p.counts().len() || order.len() != n {
        return Err(Error::InvalidStructure("renaming data has the wrong length".into()));
    }
    // rename[v]: the vertex id v is called after the swaps
    let mut rename: Vec<usize> = (0..n).collect();
    for (k, i) in p.abscissas().enumerate() {
        if swap[k] == 0 || swap[k] as u64 > p.n(i) {
            return Err(Error::InvalidStructure(format!("swap index {} out of range at abscissa {i}", swap[k])));
        }
        let (a, b) = (vs.first(i), vs.id(i, swap[k]));
        rename.swap(a, b);
    }
    let mut next: Vec<usize> = p.abscissas().map(|i| vs.level(i).start).collect();
    let mut label = vec![usize::MAX; n];
    for (j, &i) in order.iter().enumerate() {
        let k = (i - vs.ell()) as usize;
        if i < vs.ell() || i > vs.r() || next[k] == vs.level(i).end {
            return Err(Error::InvalidStructure("label order does not match the profile".into()));
        }
        label[next[k]] = j;
        next[k] += 1;
    }
    let mut parent = vec![None; n];
    let mut abscissa = vec![0; n];
    for v in 0..n {
        let lv = label[rename[v]];
        parent[lv] = t.parent(v).map(|w| label[rename[w]]);
        abscissa[lv] = vs.abscissa(v);
    }
    EmbeddedCayleyTree::new(t.steps().clone(), parent, abscissa)
}

/// A uniform S-embedded Cayley tree with the given profile.
pub fn sample_embedded_cayley_with(steps: &StepSet, profile: &Profile, rng: &mut impl Rng) -> Result<EmbeddedCayleyTree> {
    let regime = Regime::of(profile);
    let f = sample_sfunction_with(steps, profile, regime, rng)?;
    let t = to_tree(&f, regime)?;
    let swap: Vec<u32> = profile.counts().iter().map(|&c| rng.gen_range(1..=c as u32)).collect();
    let mut order: Vec<i64> =
        profile.abscissas().flat_map(|i| std::iter::repeat(i).take(profile.n(i) as usize)).collect();
    order.shuffle(rng);
    name_and_label(&t, &swap, &order)
}

pub fn sample_embedded_cayley(steps: &StepSet, profile: &Profile, seed: u64) -> Result<EmbeddedCayleyTree> {
    sample_embedded_cayley_with(steps, profile, &mut rng_for(seed, 0))
}

/// A uniform S-ary tree with the given profile.
pub fn sample_sary_with(steps: &StepSet, profile: &Profile, rng: &mut impl Rng) -> Result<SAryTree> {
    let regime = Regime::of(profile);
    let f = sample_injective_with(steps, profile, regime, rng)?;
    let t = to_tree(&f, regime)?;
    debug_assert!(t.is_injective(), "bijection image of an injective function is injective");
    let vs = t.vertices();
    let abscissa: Vec<i64> = (0..vs.len()).map(|v| vs.abscissa(v)).collect();
    Ok(SAryTree::from_parent_map(t.parents(), &abscissa))
}

pub fn sample_sary(steps: &StepSet, profile: &Profile, seed: u64) -> Result<SAryTree> {
    sample_sary_with(steps, profile, &mut rng_for(seed, 0))
}

/// Tree family whose profile law is computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Binary,
    Sary(StepSet),
    Cayley(StepSet),
}

impl Family {
    fn steps(&self) -> StepSet {
        match self {
            Family::Binary => StepSet::new([-1, 1]).expect("valid"),
            Family::Sary(s) | Family::Cayley(s) => s.clone(),
        }
    }

    fn max_n(&self) -> u64 {
        match self {
            Family::Cayley(_) => 8,
            _ => 14,
        }
    }

    fn count(&self, p: &Profile) -> Result<BigCount> {
        match self {
            Family::Binary => count_binary_profile(p),
            Family::Sary(s) => count_sary_profile(s, p),
            Family::Cayley(s) => count_cayley_profile(s, p),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Binary => f.write_str("binary"),
            Family::Sary(s) => write!(f, "sary({s})"),
            Family::Cayley(s) => write!(f, "cayley({s})"),
        }
    }
}

/// Exact law of the vertical profile of a uniform tree of size `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileLaw {
    pub n: u64,
    pub family: Family,
    /// Profiles with a nonzero count.
    pub counts: BTreeMap<Profile, BigCount>,
    /// Total number of trees of size `n` in the family.
    pub normalizer: BigCount,
}

impl ProfileLaw {
    pub fn probability(&self, p: &Profile) -> Ratio {
        match self.counts.get(p) {
            Some(c) => Ratio::new(BigInt::from(c.clone()), BigInt::from(self.normalizer.clone())),
            None => Ratio::zero(),
        }
    }

    pub fn probabilities(&self) -> impl Iterator<Item = (&Profile, Ratio)> + '_ {
        self.counts.keys().map(move |p| (p, self.probability(p)))
    }

    /// `profile,numerator,denominator` rows, probabilities in lowest terms.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("profile,numerator,denominator\n");
        for (p, q) in self.probabilities() {
            out.push_str(&format!("\"{p}\",{},{}\n", q.numer(), q.denom()));
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .probabilities()
            .map(|(p, q)| {
                json!({
                    "count": self.counts[p].to_string(),
                    "probability": q.to_string(),
                    "profile": p.to_string(),
                })
            })
            .collect();
        json!({
            "family": self.family.to_string(),
            "n": self.n,
            "normalizer": self.normalizer.to_string(),
            "profiles": rows,
        })
    }
}

/// Vertices at `i` that need a parent, against the parent slots `Σ_s n_{i−s}`.
fn level_ok(counts: &[u64], zero: usize, k: usize, steps: &StepSet, injective: bool) -> bool {
    let at = |j: i64| if j < 0 || j as usize >= counts.len() { 0 } else { counts[j as usize] };
    let need = counts[k] - u64::from(k == zero);
    let slots: u64 = steps.iter().map(|s| at(k as i64 - s)).sum();
    if injective {
        need <= slots
    } else {
        need == 0 || slots > 0
    }
}

/// Profiles of size `n` passing the slot test at every abscissa, built left to
/// right and cut as soon as an abscissa with both neighbours fixed fails.
fn feasible_profiles(n: u64, steps: &StepSet, injective: bool) -> Vec<Profile> {
    fn rec(
        rest: u64,
        zero: usize,
        counts: &mut Vec<u64>,
        steps: &StepSet,
        injective: bool,
        out: &mut Vec<Profile>,
    ) {
        let len = counts.len();
        if len >= 2 && !level_ok(counts, zero, len - 2, steps, injective) {
            return;
        }
        if rest == 0 {
            if len > zero && level_ok(counts, zero, len - 1, steps, injective) {
                out.push(Profile::new(-(zero as i64), counts.clone()).expect("positive counts"));
            }
            return;
        }
        for c in 1..=rest {
            counts.push(c);
            rec(rest - c, zero, counts, steps, injective, out);
            counts.pop();
        }
    }
    let max_zero = if StepSet::min(steps) < 0 { n as usize - 1 } else { 0 };
    let mut out = Vec::new();
    for zero in 0..=max_zero {
        rec(n, zero, &mut Vec::new(), steps, injective, &mut out);
    }
    out.sort();
    out
}

/// The law of the profile of a uniform tree of size `n` in `family`.
pub fn profile_law(n: u64, family: Family) -> Result<ProfileLaw> {
    if n == 0 {
        return Err(Error::InvalidProfile("size must be positive".into()));
    }
    if n > family.max_n() {
        return Err(Error::BudgetExceeded(format!("{family} profile law for n = {n} (limit {})", family.max_n())));
    }
    let steps = family.steps();
    if StepSet::min(&steps) < -1 {
        return Err(Error::HypothesisViolation(format!(
            "profile law needs a formula for every profile; min S = {} < -1",
            StepSet::min(&steps)
        )));
    }
    let injective = !matches!(family, Family::Cayley(_));
    let mut counts = BTreeMap::new();
    let mut normalizer = BigCount::zero();
    for p in feasible_profiles(n, &steps, injective) {
        let c = family.count(&p)?;
        if !c.is_zero() {
            normalizer += &c;
            counts.insert(p, c);
        }
    }
    Ok(ProfileLaw { n, family, counts, normalizer })
}

/// Exact distribution of `n_i` under the law (`n_i = 0` outside the support).
pub fn occupation_marginal(law: &ProfileLaw, i: i64) -> BTreeMap<u64, Ratio> {
    let mut out: BTreeMap<u64, Ratio> = BTreeMap::new();
    for (p, q) in law.probabilities() {
        *out.entry(p.n(i)).or_insert_with(Ratio::zero) += q;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio_int;

    fn s(x: &str) -> StepSet {
        x.parse().unwrap()
    }

    fn p(x: &str) -> Profile {
        x.parse().unwrap()
    }

    #[test]
    fn forced_function_is_unique() {
        for seed in 0..20 {
            let f = sample_sfunction(&s("-1,1"), &p("2,1"), Regime::Nonneg, seed).unwrap();
            assert_eq!(f.to_json(), r#"{"image":[[0,2,1,1],[1,1,0,1]],"profile":"2,1","steps":[-1,1]}"#);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let a = sample_embedded_cayley(&s("-1,1"), &p("2;2,1"), 7).unwrap();
        assert_eq!(a, sample_embedded_cayley(&s("-1,1"), &p("2;2,1"), 7).unwrap());
        let batch = sample_batch(3, 5, |rng| sample_sary_with(&s("-1,1"), &p("2;2,1"), rng)).unwrap();
        assert_eq!(batch, sample_batch(3, 5, |rng| sample_sary_with(&s("-1,1"), &p("2;2,1"), rng)).unwrap());
    }

    #[test]
    fn single_vertex() {
        let t = sample_embedded_cayley(&s("0,1"), &p("1"), 1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(sample_sary(&s("-1,0,1"), &p("1,1"), 2).unwrap().len(), 2);
    }

    #[test]
    fn small_laws() {
        let law = profile_law(2, Family::Binary).unwrap();
        let half = Ratio::new(1.into(), 2.into());
        assert_eq!(law.probability(&p("1;1")), half);
        assert_eq!(law.probability(&p("1,1")), half);
        assert_eq!(law.normalizer, 2u32.into());
        assert_eq!(occupation_marginal(&law, 0), [(1, ratio_int(1))].into_iter().collect());
        assert_eq!(profile_law(3, Family::Binary).unwrap().normalizer, 5u32.into());
    }

    #[test]
    fn infeasible_injection() {
        assert!(matches!(sample_sary(&s("-1,1"), &p("1,3"), 0), Err(Error::InfeasibleProfile(_))));
    }
}
