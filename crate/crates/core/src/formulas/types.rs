use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::arith::{binomial, factorial, ratio_int, ratio_pow, ratio_uint, to_count, BigCount, Ratio};
use crate::error::{Error, Result};
use crate::profile::{validate_formula_hypotheses, Profile};
use crate::steps::StepSet;
use crate::types::{
    check_complete_compatibility, check_in_compatibility, CVec, CompleteCounts, InCounts, OutCounts,
    TypeDistribution,
};

fn positive(out: &OutCounts) -> OutCounts {
    out.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (*a, *b)).collect()
}

fn check_out(steps: &StepSet, out: &OutCounts) -> Result<Profile> {
    let p = TypeDistribution::profile_from_out(out)?;
    for (&(i, s), _) in out {
        if !steps.contains(s) {
            return Err(Error::IncompatibleDistribution(format!("out-type ({i};{s}) uses a step outside S")));
        }
        if p.n(i - s) == 0 {
            return Err(Error::IncompatibleDistribution(format!(
                "out-type ({i};{s}) points to empty abscissa {}",
                i - s
            )));
        }
    }
    validate_formula_hypotheses(steps, &p)?;
    Ok(p)
}

fn get(out: &OutCounts, i: i64, s: i64) -> u64 {
    out.get(&(i, s)).copied().unwrap_or(0)
}

/// `∏_{i<0} n(i,−1) · ∏_{i>0} n(i,1)`, the count of spine choices.
fn spine_product(p: &Profile, nis: impl Fn(i64, i64) -> u64) -> Ratio {
    p.abscissas()
        .filter(|&i| i != 0)
        .fold(Ratio::one(), |acc, i| acc * ratio_int(nis(i, if i < 0 { -1 } else { 1 })))
}

/// Cayley trees whose non-root vertices have the prescribed out-types.
pub fn count_cayley_out(steps: &StepSet, out: &OutCounts) -> Result<BigCount> {
    let out = positive(out);
    let p = check_out(steps, &out)?;
    let mut acc = ratio_uint(&factorial(p.total()));
    for i in p.abscissas() {
        let c: u64 = steps.iter().map(|s| get(&out, i + s, s)).sum();
        acc *= ratio_pow(&ratio_int(p.n(i)), c as i64 - 1)?;
    }
    acc *= spine_product(&p, |i, s| get(&out, i, s));
    for &k in out.values() {
        acc /= ratio_uint(&factorial(k));
    }
    to_count(&acc, "out-type Cayley count")
}

/// S-ary trees whose non-root vertices have the prescribed out-types.
pub fn count_sary_out(steps: &StepSet, out: &OutCounts) -> Result<BigCount> {
    let out = positive(out);
    let p = check_out(steps, &out)?;
    let mut acc = spine_product(&p, |i, s| get(&out, i, s));
    for i in p.abscissas() {
        acc /= ratio_int(p.n(i));
    }
    for (&(i, s), &k) in &out {
        acc *= ratio_uint(&binomial(p.n(i - s) as i64, k as i64));
    }
    to_count(&acc, "out-type S-ary count")
}

fn check_cvec(steps: &StepSet, c: &CVec) -> Result<()> {
    if c.len() != steps.cvec_len() {
        return Err(Error::IncompatibleDistribution(format!(
            "c-vector has length {}, expected {} for S = {{{steps}}}",
            c.len(),
            steps.cvec_len()
        )));
    }
    for (idx, &cs) in c.iter().enumerate() {
        let s = steps.min() + idx as i64;
        if cs > 0 && !steps.contains(s) {
            return Err(Error::IncompatibleDistribution(format!("c^{s} = {cs} but {s} is not in S")));
        }
    }
    Ok(())
}

/// `∏_v ∏_s (c_v^s)!`, i.e. `∏_{b,s} b!^{n_s(b)}`.
fn child_factorials<'a>(items: impl Iterator<Item = (&'a CVec, u64)>) -> Ratio {
    let mut acc = Ratio::one();
    for (c, k) in items {
        for &cs in c {
            if cs > 1 {
                acc *= ratio_pow(&ratio_uint(&factorial(cs as u64)), k as i64).expect("positive base");
            }
        }
    }
    acc
}

/// Cayley trees with the prescribed in-type census. Any step set with maximum 1 is
/// accepted; it is treated as the interval `⟦m,1⟧` with `c^s = 0` for `s ∉ S`.
pub fn count_cayley_in(steps: &StepSet, inc: &InCounts) -> Result<BigCount> {
    let inc: InCounts = inc.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (a.clone(), *b)).collect();
    for (_, c) in inc.keys() {
        check_cvec(steps, c)?;
    }
    let p = TypeDistribution::profile_from_in(&inc)?;
    validate_formula_hypotheses(steps, &p)?;
    check_in_compatibility(steps.min(), &inc, &p)?;
    let mut nis: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for ((j, c), &k) in &inc {
        for (idx, &cs) in c.iter().enumerate() {
            let s = steps.min() + idx as i64;
            *nis.entry((j + s, s)).or_default() += cs as u64 * k;
        }
    }
    let mut acc = ratio_uint(&factorial(p.total()));
    for i in p.abscissas() {
        acc *= ratio_uint(&factorial(p.n(i) - 1));
    }
    acc *= spine_product(&p, |i, s| nis.get(&(i, s)).copied().unwrap_or(0));
    for &k in inc.values() {
        acc /= ratio_uint(&factorial(k));
    }
    acc /= child_factorials(inc.iter().map(|((_, c), &k)| (c, k)));
    to_count(&acc, "in-type Cayley count")
}

/// S-ary trees with the prescribed in-type census (every `c^s ≤ 1`).
pub fn count_sary_in(steps: &StepSet, inc: &InCounts) -> Result<BigCount> {
    for ((i, c), &k) in inc {
        if k > 0 && c.iter().any(|&cs| cs > 1) {
            return Err(Error::NotInjective(format!("in-type ({i};{c:?}) has a repeated step")));
        }
    }
    let total: u64 = inc.values().sum();
    let v = ratio_uint(&count_cayley_in(steps, inc)?) / ratio_uint(&factorial(total));
    to_count(&v, "in-type S-ary count")
}

/// Cayley trees (`ℓ = 0`, `0 ∉ S`) whose root has in-type `root` and whose
/// non-root vertices have the prescribed complete types.
///
/// When `r = 0` the tree is a single vertex and the factor `c₀¹` is absent:
/// it comes from a product over `i ∈ [0, r−1]`, which is empty.
pub fn count_cayley_complete(steps: &StepSet, root: &CVec, complete: &CompleteCounts) -> Result<BigCount> {
    if steps.contains(0) {
        return Err(Error::HypothesisViolation("complete-type formula requires 0 not in S".into()));
    }
    let complete: CompleteCounts =
        complete.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (a.clone(), *b)).collect();
    check_cvec(steps, root)?;
    for (i, s, c) in complete.keys() {
        check_cvec(steps, c)?;
        if *i < 0 {
            return Err(Error::HypothesisViolation("complete-type formula requires ell = 0".into()));
        }
        if !steps.contains(*s) {
            return Err(Error::IncompatibleDistribution(format!("out-step {s} not in S")));
        }
    }
    let m = steps.min();
    if root.iter().enumerate().any(|(idx, &cs)| cs > 0 && m + idx as i64 != 1) {
        return Err(Error::IncompatibleDistribution("the root can only have children at abscissa 1".into()));
    }
    check_complete_compatibility(m, Some(&(0, root.clone())), &complete)?;
    let mut out = OutCounts::new();
    for ((i, s, _), &k) in &complete {
        *out.entry((*i, *s)).or_default() += k;
    }
    let p = TypeDistribution::profile_from_out(&out)?;
    let c1 = |c: &CVec| c[(1 - m) as usize] as u64;

    let mut acc = ratio_uint(&factorial(p.total()));
    if p.r() >= 1 {
        acc *= ratio_int(c1(root));
    }
    for &k in out.values() {
        acc *= ratio_uint(&factorial(k));
    }
    for i in 1..p.r() {
        let weighted: u64 = complete.iter().filter(|((j, s, _), _)| *j == i && *s == 1).map(|((_, _, c), &k)| c1(c) * k).sum();
        acc *= ratio_int(weighted);
    }
    for &k in complete.values() {
        acc /= ratio_uint(&factorial(k));
    }
    for i in 1..=p.r() {
        let k = out.get(&(i, 1)).copied().unwrap_or(0);
        if k == 0 {
            return Ok(BigCount::zero());
        }
        acc /= ratio_int(k);
    }
    acc /= child_factorials(std::iter::once((root, 1)).chain(complete.iter().map(|((_, _, c), &k)| (c, k))));
    to_count(&acc, "complete-type Cayley count")
}
