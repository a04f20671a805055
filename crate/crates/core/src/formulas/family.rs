//! Counts of S-functions on `V ∖ {0¹}` satisfying condition (F), by family.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::arith::{binomial, factorial, ratio_int, ratio_pow, ratio_uint, to_count, BigCount, Ratio};
use crate::error::{Error, Result};
use crate::profile::{validate_profile_for, Profile, Regime};
use crate::steps::StepSet;
use crate::types::{check_complete_compatibility, check_in_compatibility, CVec, CompleteCounts, InCounts, OutCounts};
use crate::vertex::{Vertex, VertexSet};

/// Which family of functions to count. Fixed variants prescribe a type for every
/// vertex; counted variants prescribe only the census.
#[derive(Debug, Clone, Copy)]
pub enum FunctionFamily<'a> {
    Profile,
    InjectiveProfile,
    /// Out-step of every vertex other than `0¹`.
    OutFixed(&'a BTreeMap<Vertex, i64>),
    OutCounted(&'a OutCounts),
    InjectiveOutFixed(&'a BTreeMap<Vertex, i64>),
    InjectiveOutCounted(&'a OutCounts),
    /// In-type (c-vector indexed from `min S`) of every vertex, `0¹` included.
    InFixed(&'a BTreeMap<Vertex, CVec>),
    InCounted(&'a InCounts),
    /// Complete type of every vertex; the out-step is `None` exactly at `0¹`.
    CompleteFixed(&'a BTreeMap<Vertex, (Option<i64>, CVec)>),
    CompleteCounted { root: &'a CVec, counts: &'a CompleteCounts },
}

impl FunctionFamily<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            FunctionFamily::Profile => "profile",
            FunctionFamily::InjectiveProfile => "injective_profile",
            FunctionFamily::OutFixed(_) => "out_fixed",
            FunctionFamily::OutCounted(_) => "out_counted",
            FunctionFamily::InjectiveOutFixed(_) => "injective_out_fixed",
            FunctionFamily::InjectiveOutCounted(_) => "injective_out_counted",
            FunctionFamily::InFixed(_) => "in_fixed",
            FunctionFamily::InCounted(_) => "in_counted",
            FunctionFamily::CompleteFixed(_) => "complete_fixed",
            FunctionFamily::CompleteCounted { .. } => "complete_counted",
        }
    }
}

fn n(p: &Profile, i: i64) -> Ratio {
    ratio_int(p.n(i))
}

fn fact(k: u64) -> Ratio {
    ratio_uint(&factorial(k))
}

/// Step forced on the spine vertex `i¹` by (F), if any.
fn spine_step(i: i64) -> Option<i64> {
    match i {
        0 => None,
        i if i > 0 => Some(1),
        _ => Some(-1),
    }
}

/// `∏_{i<0} n(i,−1) ∏_{i>0} n(i,1)` for a census.
fn spine_counts(p: &Profile, nis: impl Fn(i64, i64) -> u64) -> Ratio {
    p.abscissas()
        .filter_map(|i| spine_step(i).map(|s| ratio_int(nis(i, s))))
        .fold(Ratio::one(), |a, b| a * b)
}

/// `n_ℓ n_r` in the general regime, `n_r` otherwise.
fn extremity(p: &Profile, regime: Regime) -> Ratio {
    match regime {
        Regime::Nonneg => n(p, p.r()),
        Regime::General => n(p, p.ell()) * n(p, p.r()),
    }
}

fn factorials_minus_one(p: &Profile) -> Ratio {
    p.abscissas().fold(Ratio::one(), |a, i| a * fact(p.n(i) - 1))
}

/// Counts the S-functions of the given family with profile `p`.
pub fn count_function_family(
    steps: &StepSet,
    p: &Profile,
    regime: Regime,
    family: &FunctionFamily<'_>,
) -> Result<BigCount> {
    validate_profile_for(steps, p, regime)?;
    let what = format!("{} function count", family.name());
    let value = match family {
        FunctionFamily::Profile => profile_count(steps, p, regime)?,
        FunctionFamily::InjectiveProfile => injective_profile_count(steps, p, regime),
        FunctionFamily::OutFixed(map) => match out_census(steps, p, map)? {
            Some(out) => out_fixed(steps, p, regime, &out)?,
            None => Ratio::zero(),
        },
        FunctionFamily::OutCounted(out) => {
            let out = check_out_counts(steps, p, out)?;
            out_fixed(steps, p, regime, &out)? * out_assignments(p, &out)
        }
        FunctionFamily::InjectiveOutFixed(map) => match out_census(steps, p, map)? {
            Some(out) => injective_out_fixed(p, regime, &out),
            None => Ratio::zero(),
        },
        FunctionFamily::InjectiveOutCounted(out) => {
            let out = check_out_counts(steps, p, out)?;
            injective_out_fixed(p, regime, &out) * out_assignments(p, &out)
        }
        FunctionFamily::InFixed(map) => in_fixed(steps, p, regime, map)?,
        FunctionFamily::InCounted(inc) => in_counted(steps, p, regime, inc)?,
        FunctionFamily::CompleteFixed(map) => complete_fixed(steps, p, regime, map)?,
        FunctionFamily::CompleteCounted { root, counts } => complete_counted(steps, p, regime, root, counts)?,
    };
    to_count(&value, &what)
}

fn profile_count(steps: &StepSet, p: &Profile, regime: Regime) -> Result<Ratio> {
    let mut acc = match regime {
        Regime::Nonneg => Ratio::one(),
        Regime::General => n(p, 0),
    };
    for i in p.abscissas() {
        acc *= ratio_pow(&ratio_int(p.parent_pool(steps, i)), p.n(i) as i64 - 1)?;
    }
    Ok(acc)
}

fn injective_profile_count(steps: &StepSet, p: &Profile, regime: Regime) -> Ratio {
    let mut acc = match regime {
        Regime::Nonneg => Ratio::one(),
        Regime::General => n(p, 0),
    };
    for i in p.abscissas() {
        let pool = p.parent_pool(steps, i) as i64;
        let k = p.n(i) as i64 - 1;
        let c = if i == 0 { binomial(pool, k) } else { binomial(pool - 1, k) };
        acc *= ratio_uint(&c) * fact(p.n(i) - 1);
    }
    acc
}

/// Resolves a per-vertex out-step prescription into its census. `None` means the
/// prescription contradicts (F) or points outside `V`, so no function exists.
fn out_census(
    steps: &StepSet,
    p: &Profile,
    map: &BTreeMap<Vertex, i64>,
) -> Result<Option<OutCounts>> {
    let vs = VertexSet::new(p.clone());
    let mut seen = vec![false; vs.len()];
    let mut out = OutCounts::new();
    let mut feasible = true;
    for (&v, &s) in map {
        let id = vs.resolve(v)?;
        if id == vs.first(0) {
            return Err(Error::IncompatibleDistribution("0^1 has no out-type".into()));
        }
        if !steps.contains(s) {
            return Err(Error::IncompatibleDistribution(format!("out-step {s} of {v} is not in S")));
        }
        seen[id] = true;
        let i = v.abscissa;
        if p.n(i - s) == 0 {
            feasible = false;
        }
        if vs.is_first(id) {
            if spine_step(i).is_some_and(|f| f != s) {
                feasible = false;
            }
        }
        *out.entry((i, s)).or_default() += 1;
    }
    if let Some(missing) = (0..vs.len()).find(|&id| id != vs.first(0) && !seen[id]) {
        return Err(Error::IncompatibleDistribution(format!(
            "no out-type prescribed for {}",
            vs.vertex(missing)
        )));
    }
    Ok(feasible.then_some(out))
}

fn check_out_counts(steps: &StepSet, p: &Profile, out: &OutCounts) -> Result<OutCounts> {
    let out: OutCounts = out.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (*a, *b)).collect();
    for &(i, s) in out.keys() {
        if !steps.contains(s) {
            return Err(Error::IncompatibleDistribution(format!("out-step {s} is not in S")));
        }
        if p.n(i) == 0 || p.n(i - s) == 0 {
            return Err(Error::IncompatibleDistribution(format!("out-type ({i};{s}) involves an empty abscissa")));
        }
    }
    for i in p.abscissas() {
        let k: u64 = out.iter().filter(|((j, _), _)| *j == i).map(|(_, &k)| k).sum();
        if k + u64::from(i == 0) != p.n(i) {
            return Err(Error::IncompatibleDistribution(format!(
                "abscissa {i}: out-types cover {k} vertices, profile has {}",
                p.n(i)
            )));
        }
    }
    Ok(out)
}

fn get2(out: &OutCounts, i: i64, s: i64) -> u64 {
    out.get(&(i, s)).copied().unwrap_or(0)
}

/// `n_ext ∏ n_i^{c(i)−1}`, where `c(i)` counts vertices mapped into `V_i`.
fn out_fixed(steps: &StepSet, p: &Profile, regime: Regime, out: &OutCounts) -> Result<Ratio> {
    let mut acc = extremity(p, regime);
    for i in p.abscissas() {
        let c: u64 = steps.iter().map(|s| get2(out, i + s, s)).sum();
        acc *= ratio_pow(&n(p, i), c as i64 - 1)?;
    }
    Ok(acc)
}

/// Number of ways to hand out a census of out-types to the non-spine vertices.
fn out_assignments(p: &Profile, out: &OutCounts) -> Ratio {
    let mut acc = factorials_minus_one(p) * spine_counts(p, |i, s| get2(out, i, s));
    for &k in out.values() {
        acc /= fact(k);
    }
    acc
}

fn injective_out_fixed(p: &Profile, regime: Regime, out: &OutCounts) -> Ratio {
    let mut acc = Ratio::one();
    for (&(i, s), &k) in out {
        acc *= fact(k) * ratio_uint(&binomial(p.n(i - s) as i64, k as i64));
    }
    let lo = match regime {
        Regime::Nonneg => 0,
        Regime::General => p.ell() + 1,
    };
    for i in lo..p.r() {
        acc /= n(p, i);
    }
    acc
}

fn check_cvec(steps: &StepSet, c: &CVec) -> Result<()> {
    if c.len() != steps.cvec_len() {
        return Err(Error::IncompatibleDistribution(format!(
            "c-vector has length {}, expected {}",
            c.len(),
            steps.cvec_len()
        )));
    }
    Ok(())
}

/// True if some positive entry sits at a step outside `S`.
fn uses_foreign_step(steps: &StepSet, c: &CVec) -> bool {
    c.iter().enumerate().any(|(idx, &cs)| cs > 0 && !steps.contains(steps.min() + idx as i64))
}

fn entry(steps: &StepSet, c: &CVec, s: i64) -> u64 {
    let idx = s - steps.min();
    if idx < 0 || idx as usize >= c.len() {
        0
    } else {
        c[idx as usize] as u64
    }
}

/// `∏_v ∏_s (c_v^s)!`.
fn child_factorials<'a>(items: impl Iterator<Item = (&'a CVec, u64)>) -> Result<Ratio> {
    let mut acc = Ratio::one();
    for (c, k) in items {
        for &cs in c {
            acc *= ratio_pow(&fact(cs as u64), k as i64)?;
        }
    }
    Ok(acc)
}

fn in_fixed(steps: &StepSet, p: &Profile, regime: Regime, map: &BTreeMap<Vertex, CVec>) -> Result<Ratio> {
    if regime == Regime::General {
        return Err(Error::HypothesisViolation(
            "per-vertex in-type count is only available in the non-negative regime".into(),
        ));
    }
    let vs = VertexSet::new(p.clone());
    let mut cvecs: Vec<Option<&CVec>> = vec![None; vs.len()];
    for (&v, c) in map {
        check_cvec(steps, c)?;
        cvecs[vs.resolve(v)?] = Some(c);
    }
    let mut inc = InCounts::new();
    for (id, c) in cvecs.iter().enumerate() {
        let c = c.ok_or_else(|| {
            Error::IncompatibleDistribution(format!("no in-type prescribed for {}", vs.vertex(id)))
        })?;
        *inc.entry((vs.abscissa(id), c.clone())).or_default() += 1;
    }
    check_in_compatibility(steps.min(), &inc, p)?;
    if inc.keys().any(|(_, c)| uses_foreign_step(steps, c)) {
        return Ok(Ratio::zero());
    }
    let mut acc = factorials_minus_one(p);
    acc /= child_factorials(inc.iter().map(|((_, c), &k)| (c, k)))?;
    for i in 0..p.r() {
        acc *= ratio_int(entry(steps, cvecs[vs.first(i)].expect("checked"), 1));
    }
    Ok(acc)
}

fn in_counted(steps: &StepSet, p: &Profile, regime: Regime, inc: &InCounts) -> Result<Ratio> {
    let inc: InCounts = inc.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (a.clone(), *b)).collect();
    for (_, c) in inc.keys() {
        check_cvec(steps, c)?;
    }
    in_counted_core(steps, p, regime, &inc)
}

fn in_counted_core(steps: &StepSet, p: &Profile, regime: Regime, inc: &InCounts) -> Result<Ratio> {
    let from_in = crate::types::TypeDistribution::profile_from_in(inc)?;
    if &from_in != p {
        return Err(Error::IncompatibleDistribution(format!("in-types describe profile {from_in}, not {p}")));
    }
    check_in_compatibility(steps.min(), inc, p)?;
    if inc.keys().any(|(_, c)| uses_foreign_step(steps, c)) {
        return Ok(Ratio::zero());
    }
    let nis = |i: i64, s: i64| -> u64 { inc.iter().map(|((j, c), &k)| if *j == i - s { entry(steps, c, s) * k } else { 0 }).sum() };
    let mut acc = extremity(p, regime) * factorials_minus_one(p) * factorials_minus_one(p);
    acc *= spine_counts(p, nis);
    for &k in inc.values() {
        acc /= fact(k);
    }
    acc /= child_factorials(inc.iter().map(|((_, c), &k)| (c, k)))?;
    Ok(acc)
}

fn require_complete_steps(steps: &StepSet, regime: Regime) -> Result<()> {
    if steps.contains(0) {
        return Err(Error::HypothesisViolation("complete-type count requires 0 not in S".into()));
    }
    if regime == Regime::General {
        return Err(Error::HypothesisViolation(
            "complete-type count is only available in the non-negative regime".into(),
        ));
    }
    Ok(())
}

fn complete_fixed(
    steps: &StepSet,
    p: &Profile,
    regime: Regime,
    map: &BTreeMap<Vertex, (Option<i64>, CVec)>,
) -> Result<Ratio> {
    require_complete_steps(steps, regime)?;
    let vs = VertexSet::new(p.clone());
    let mut types: Vec<Option<&(Option<i64>, CVec)>> = vec![None; vs.len()];
    for (&v, t) in map {
        check_cvec(steps, &t.1)?;
        let id = vs.resolve(v)?;
        if (id == vs.first(0)) != t.0.is_none() {
            return Err(Error::IncompatibleDistribution("the out-step must be absent exactly at 0^1".into()));
        }
        if let Some(s) = t.0 {
            if !steps.contains(s) {
                return Err(Error::IncompatibleDistribution(format!("out-step {s} of {v} is not in S")));
            }
        }
        types[id] = Some(t);
    }
    let mut counts = CompleteCounts::new();
    let mut root = None;
    for (id, t) in types.iter().enumerate() {
        let (s, c) = t.ok_or_else(|| {
            Error::IncompatibleDistribution(format!("no type prescribed for {}", vs.vertex(id)))
        })?;
        match s {
            Some(s) => *counts.entry((vs.abscissa(id), *s, c.clone())).or_default() += 1,
            None => root = Some((0, c.clone())),
        }
    }
    check_complete_compatibility(steps.min(), root.as_ref(), &counts)?;
    let spine_ok = (1..=p.r()).all(|i| types[vs.first(i)].and_then(|t| t.0) == Some(1));
    if !spine_ok || types.iter().flatten().any(|t| uses_foreign_step(steps, &t.1)) {
        return Ok(Ratio::zero());
    }
    let mut out = OutCounts::new();
    for ((i, s, _), &k) in &counts {
        *out.entry((*i, *s)).or_default() += k;
    }
    let mut acc = Ratio::one();
    for &k in out.values() {
        acc *= fact(k);
    }
    for i in 0..p.r() {
        acc *= ratio_int(entry(steps, &types[vs.first(i)].expect("checked").1, 1));
    }
    acc /= child_factorials(types.iter().map(|t| (&t.expect("checked").1, 1)))?;
    for i in 1..=p.r() {
        acc /= ratio_int(get2(&out, i, 1));
    }
    Ok(acc)
}

fn complete_counted(
    steps: &StepSet,
    p: &Profile,
    regime: Regime,
    root: &CVec,
    counts: &CompleteCounts,
) -> Result<Ratio> {
    require_complete_steps(steps, regime)?;
    check_cvec(steps, root)?;
    let counts: CompleteCounts = counts.iter().filter(|(_, &k)| k > 0).map(|(a, b)| (a.clone(), *b)).collect();
    let mut out = OutCounts::new();
    for ((i, s, c), &k) in &counts {
        check_cvec(steps, c)?;
        if !steps.contains(*s) {
            return Err(Error::IncompatibleDistribution(format!("out-step {s} is not in S")));
        }
        *out.entry((*i, *s)).or_default() += k;
    }
    let from_out = crate::types::TypeDistribution::profile_from_out(&out)?;
    if &from_out != p {
        return Err(Error::IncompatibleDistribution(format!("types describe profile {from_out}, not {p}")));
    }
    check_complete_compatibility(steps.min(), Some(&(0, root.clone())), &counts)?;
    if uses_foreign_step(steps, root) || counts.keys().any(|(_, _, c)| uses_foreign_step(steps, c)) {
        return Ok(Ratio::zero());
    }
    if (1..=p.r()).any(|i| get2(&out, i, 1) == 0) {
        return Ok(Ratio::zero());
    }
    let mut acc = n(p, p.r()) * factorials_minus_one(p);
    if p.r() >= 1 {
        acc *= ratio_int(entry(steps, root, 1));
    }
    for &k in out.values() {
        acc *= fact(k);
    }
    for i in 1..p.r() {
        let w: u64 = counts
            .iter()
            .filter(|((j, s, _), _)| *j == i && *s == 1)
            .map(|((_, _, c), &k)| entry(steps, c, 1) * k)
            .sum();
        acc *= ratio_int(w);
    }
    for &k in counts.values() {
        acc /= fact(k);
    }
    acc /= child_factorials(std::iter::once((root, 1)).chain(counts.iter().map(|((_, _, c), &k)| (c, k))))?;
    for i in 1..=p.r() {
        acc /= ratio_int(get2(&out, i, 1));
    }
    Ok(acc)
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
    fn profile_examples() {
        let c = |st: &str, pr: &str, reg| count_function_family(&s(st), &p(pr), reg, &FunctionFamily::Profile).unwrap();
        assert_eq!(c("-1,1", "2,1", Regime::Nonneg), 1u32.into());
        assert_eq!(c("-1,1", "1,1", Regime::Nonneg), 1u32.into());
        // f(-1^1), f(-1^2) in V_0 and f(0^2) in V_-1 ∪ V_1
        assert_eq!(c("-1,1", "2;2,1", Regime::General), 12u32.into());
    }

    #[test]
    fn regime_mismatch() {
        let r = count_function_family(&s("-1,1"), &p("2;2,1"), Regime::Nonneg, &FunctionFamily::Profile);
        assert!(matches!(r, Err(Error::HypothesisViolation(_))));
    }
}
