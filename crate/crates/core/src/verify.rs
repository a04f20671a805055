//! Cross-checks between the formulas, the oracle, the bijections and the two
//! algebraic routes, gathered into one report.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{
    bareiss_det, cayley_from_spanning, eval_p, eval_p_closed, eval_p_out, eval_p_out_closed, eval_p_refined,
    eval_p_refined_closed, laplacian_minor_closed, laplacian_minor_det, tree_in_tree_det, CycleGraph,
    LaplacianSystem,
};
use crate::arith::{ratio_int, BigCount, Ratio};
use crate::bijection::{classify_case, frustration_record, phi, phi1, phi2, phi_inverse, psi, psi2, psi_inverse};
use crate::conditions;
use crate::error::{Error, Result};
use crate::formulas::{
    count_binary_profile, count_cayley_complete, count_cayley_in, count_cayley_out, count_cayley_profile,
    count_function_family, count_sary_in, count_sary_out, count_sary_profile, count_tree_in_tree, eval_out_gf,
    FunctionFamily, TargetTree, WeightAssignment,
};
use crate::function::SFunction;
use crate::oracle::{
    count_embedded_cayley_steps, count_sary_steps, count_tree_morphisms, enumerate_marked_strees,
    enumerate_sfunctions, for_each_embedded_cayley, for_each_sary, spanning_tree_sum, EnumerationBudget,
    FunctionConstraint,
};
use crate::profile::{all_profiles, validate_formula_hypotheses, Profile, Regime};
use crate::steps::StepSet;
use crate::tree::MarkedSTree;
use crate::types::{CVec, CompleteCounts, InCounts, OutCounts, TypeDistribution};
use crate::vertex::Vertex;

const KEPT_FAILURES: usize = 8;

/// Tally of one named check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub passed: u64,
    pub failed: u64,
    /// The first few failures.
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl CheckOutcome {
    fn new(id: &str) -> Self {
        CheckOutcome { id: id.to_string(), passed: 0, failed: 0, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }

    fn absorb(&mut self, other: CheckOutcome) {
        self.passed += other.passed;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < KEPT_FAILURES {
                self.failures.push(f);
            }
        }
        self.notes.extend(other.notes);
    }
}

/// Outcomes gathered by one task.
#[derive(Debug, Default)]
struct Checks(BTreeMap<String, CheckOutcome>);

impl Checks {
    fn entry(&mut self, id: &str) -> &mut CheckOutcome {
        self.0.entry(id.to_string()).or_insert_with(|| CheckOutcome::new(id))
    }

    fn check(&mut self, id: &str, ok: bool, detail: impl FnOnce() -> String) {
        let e = self.entry(id);
        if ok {
            e.passed += 1;
        } else {
            e.failed += 1;
            if e.failures.len() < KEPT_FAILURES {
                e.failures.push(detail());
            }
        }
    }

    fn note(&mut self, id: &str, note: String) {
        self.entry(id).notes.push(note);
    }

    /// Unwraps `r`, recording other errors as a failure of `id`. Budget errors propagate.
    fn guard<T>(&mut self, id: &str, ctx: impl FnOnce() -> String, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ Error::BudgetExceeded(_)) => Err(e),
            Err(e) => {
                self.check(id, false, || format!("{}: {e}", ctx()));
                Ok(None)
            }
        }
    }

    fn merge(&mut self, other: Checks) {
        for (id, o) in other.0 {
            match self.0.get_mut(&id) {
                Some(e) => e.absorb(o),
                None => {
                    self.0.insert(id, o);
                }
            }
        }
    }
}

/// Outcomes sorted by check id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    fn from_checks(c: Checks) -> Self {
        Report { checks: c.0.into_values().collect() }
    }

    pub fn merge(self, other: Report) -> Report {
        let mut c = Checks::default();
        for o in self.checks.into_iter().chain(other.checks) {
            c.merge(Checks(BTreeMap::from([(o.id.clone(), o)])));
        }
        Report::from_checks(c)
    }

    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckOutcome::ok)
    }

    pub fn get(&self, id: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Outcomes whose id starts with `prefix`.
    pub fn group<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a CheckOutcome> + 'a {
        self.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    pub fn to_json_value(&self) -> Value {
        json!({ "all_passed": self.all_passed(), "checks": self.checks })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.ok() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} ({} passed, {} failed)", c.id, c.passed, c.failed)?;
            for x in &c.failures {
                writeln!(f, "    {x}")?;
            }
            for x in &c.notes {
                writeln!(f, "    note: {x}")?;
            }
        }
        let (ok, total) = (self.checks.iter().filter(|c| c.ok()).count(), self.checks.len());
        write!(f, "{ok}/{total} checks passed")
    }
}

/// What a verification run covers.
#[derive(Debug, Clone)]
pub struct Scope {
    pub max_n: u64,
    pub step_sets: Vec<StepSet>,
    /// Bound on `|ℓ|` and `r` for the identity sweeps.
    pub span: i64,
    /// Random evaluation points per `(S, ℓ, r)`.
    pub points: usize,
    pub seed: u64,
    pub budget: EnumerationBudget,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            max_n: 6,
            step_sets: standard_step_sets(),
            span: 4,
            points: 100,
            seed: 1,
            budget: EnumerationBudget::default(),
        }
    }
}

/// Every `S ⊆ {−2, −1, 0, 1}` containing 1.
pub fn standard_step_sets() -> Vec<StepSet> {
    let mut out = Vec::new();
    for mask in 0..8u32 {
        let steps: Vec<i64> = [-2, -1, 0].iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &s)| s).collect();
        out.push(StepSet::new(steps.into_iter().chain([1])).expect("max 1"));
    }
    out
}

/// Which sweeps to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub formulas: bool,
    pub bijections: bool,
    pub identities: bool,
    pub determinants: bool,
    pub tree_in_tree: bool,
    pub controls: bool,
    pub regressions: bool,
}

impl Selection {
    pub fn all() -> Self {
        Selection {
            formulas: true,
            bijections: true,
            identities: true,
            determinants: true,
            tree_in_tree: true,
            controls: true,
            regressions: true,
        }
    }

    pub fn none() -> Self {
        Selection {
            formulas: false,
            bijections: false,
            identities: false,
            determinants: false,
            tree_in_tree: false,
            controls: false,
            regressions: false,
        }
    }
}

/// Runs the selected sweeps.
pub fn run(scope: &Scope, sel: Selection) -> Result<Report> {
    if scope.max_n > scope.budget.max_size {
        return Err(Error::BudgetExceeded(format!(
            "verification up to n = {} exceeds the enumeration bound {}",
            scope.max_n, scope.budget.max_size
        )));
    }
    let mut report = Report::default();
    if sel.formulas {
        report = report.merge(formula_sweep(scope)?);
    }
    if sel.bijections {
        report = report.merge(bijection_sweep(scope)?);
    }
    if sel.identities {
        report = report.merge(identity_sweep(scope)?);
    }
    if sel.determinants {
        report = report.merge(determinant_sweep(scope)?);
    }
    if sel.tree_in_tree {
        report = report.merge(tree_in_tree_sweep(4, scope.max_n.min(7), &scope.budget)?);
    }
    if sel.controls {
        report = report.merge(negative_controls(&scope.budget)?);
    }
    if sel.regressions {
        report = report.merge(regressions()?);
    }
    Ok(report)
}

/// `(S, profile)` pairs with `n ≤ max_n` satisfying the formula hypotheses.
fn formula_instances(steps: &[StepSet], max_n: u64) -> Vec<(StepSet, Profile)> {
    let mut out = Vec::new();
    for s in steps {
        for n in 1..=max_n {
            for p in all_profiles(n) {
                if validate_formula_hypotheses(s, &p).is_ok() {
                    out.push((s.clone(), p));
                }
            }
        }
    }
    out
}

fn parallel(
    tasks: &[(StepSet, Profile)],
    run: impl Fn(&StepSet, &Profile) -> Result<Checks> + Sync + Send,
) -> Result<Report> {
    let results: Vec<Result<Checks>> = tasks.par_iter().map(|(s, p)| run(s, p)).collect();
    let mut all = Checks::default();
    for r in results {
        all.merge(r?);
    }
    Ok(Report::from_checks(all))
}

fn bump<K: Ord>(m: &mut BTreeMap<K, u64>, k: K) {
    *m.entry(k).or_default() += 1;
}

fn big(k: u64) -> BigCount {
    BigCount::from(k)
}

/// A formula value, with infeasible-but-compatible distributions reading as 0.
fn count_or_zero(r: Result<BigCount>) -> Result<BigCount> {
    match r {
        Err(Error::IncompatibleDistribution(_)) | Err(Error::NotInjective(_)) => Ok(BigCount::from(0u32)),
        r => r,
    }
}

/// Every out-type census of a tree with profile `p`: each level's non-root
/// vertices split over the steps leading back into `[ℓ, r]`.
pub fn out_distributions(steps: &StepSet, p: &Profile) -> Vec<OutCounts> {
    let mut out = vec![OutCounts::new()];
    for i in p.abscissas() {
        let need = p.n(i) - u64::from(i == 0);
        let allowed: Vec<i64> = steps.iter().filter(|&s| p.abscissas().contains(&(i - s))).collect();
        let mut next = Vec::new();
        for base in &out {
            splits(need, &allowed, &mut Vec::new(), &mut |parts| {
                let mut m = base.clone();
                for (&s, &k) in allowed.iter().zip(parts) {
                    if k > 0 {
                        m.insert((i, s), k);
                    }
                }
                next.push(m);
            });
        }
        out = next;
    }
    out
}

fn splits(rest: u64, slots: &[i64], cur: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
    if cur.len() + 1 == slots.len() {
        cur.push(rest);
        visit(cur);
        cur.pop();
        return;
    }
    if slots.is_empty() {
        if rest == 0 {
            visit(cur);
        }
        return;
    }
    for k in 0..=rest {
        cur.push(k);
        splits(rest - k, slots, cur, visit);
        cur.pop();
    }
}

type CompleteKey = (Option<(i64, CVec)>, CompleteCounts);

fn complete_key(d: &TypeDistribution) -> CompleteKey {
    (d.root_in_type.clone(), d.complete_counts.clone())
}

/// Formula against oracle for the Cayley, S-ary, binary and function counts.
pub fn formula_sweep(scope: &Scope) -> Result<Report> {
    let tasks = formula_instances(&scope.step_sets, scope.max_n);
    parallel(&tasks, |s, p| formula_task(s, p, &scope.budget))
}

fn formula_task(steps: &StepSet, p: &Profile, budget: &EnumerationBudget) -> Result<Checks> {
    let mut c = Checks::default();
    let at = || format!("S={{{steps}}} p={p}");

    // embedded Cayley trees
    let (mut total, mut outs, mut ins, mut comps) = (0u64, BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    for_each_embedded_cayley(steps, p, budget, |t| {
        let d = t.type_distribution();
        total += 1;
        bump(&mut outs, d.out_counts.clone());
        bump(&mut ins, d.in_counts.clone());
        bump(&mut comps, complete_key(&d));
    })?;
    if let Some(v) = c.guard("formula/cayley-profile", at, count_cayley_profile(steps, p))? {
        c.check("formula/cayley-profile", v == big(total), || format!("{} formula {v} oracle {total}", at()));
    }
    check_out(&mut c, "formula/cayley-out", steps, p, &outs, |o| count_cayley_out(steps, o))?;
    check_in(&mut c, "formula/cayley-in", &ins, total, |i| count_cayley_in(steps, i), &at)?;
    if !steps.contains(0) && p.ell() == 0 {
        let mut sum = BigCount::from(0u32);
        for ((root, cc), &k) in &comps {
            let root = &root.as_ref().expect("a root").1;
            let ctx = || format!("{} complete {cc:?}", at());
            if let Some(v) = c.guard("formula/cayley-complete", ctx, count_cayley_complete(steps, root, cc))? {
                sum += &v;
                c.check("formula/cayley-complete", v == big(k), || format!("{} {cc:?}: formula {v} oracle {k}", at()));
            }
        }
        c.check("formula/cayley-complete", sum == big(total), || format!("{} complete sum {sum} vs {total}", at()));
    }

    // S-ary trees
    let (mut total, mut outs, mut ins) = (0u64, BTreeMap::new(), BTreeMap::new());
    for_each_sary(steps, p, budget, |t| {
        let d = t.type_distribution(steps.min());
        total += 1;
        bump(&mut outs, d.out_counts);
        bump(&mut ins, d.in_counts);
    })?;
    if let Some(v) = c.guard("formula/sary-profile", at, count_sary_profile(steps, p))? {
        c.check("formula/sary-profile", v == big(total), || format!("{} formula {v} oracle {total}", at()));
    }
    check_out(&mut c, "formula/sary-out", steps, p, &outs, |o| count_sary_out(steps, o))?;
    check_in(&mut c, "formula/sary-in", &ins, total, |i| count_sary_in(steps, i), &at)?;
    if steps.steps() == [-1, 1] {
        if let Some(v) = c.guard("formula/binary-profile", at, count_binary_profile(p))? {
            c.check("formula/binary-profile", v == big(total), || format!("{} formula {v} oracle {total}", at()));
        }
    }

    // functions satisfying (F)
    let regime = Regime::of(p);
    let fs = enumerate_sfunctions(steps, p, regime, &FunctionConstraint::None, budget)?;
    let family = |f: &FunctionFamily<'_>| count_function_family(steps, p, regime, f);
    let injective: Vec<&SFunction> = fs.iter().filter(|f| f.is_injective_per_level()).collect();
    for (id, fam, k) in [
        ("formula/function-profile", FunctionFamily::Profile, fs.len()),
        ("formula/function-injective", FunctionFamily::InjectiveProfile, injective.len()),
    ] {
        if let Some(v) = c.guard(id, at, family(&fam))? {
            c.check(id, v == big(k as u64), || format!("{} formula {v} oracle {k}", at()));
        }
    }
    let (mut outs, mut inj_outs, mut ins, mut comps) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    for f in &fs {
        let d = f.type_distribution();
        if f.is_injective_per_level() {
            bump(&mut inj_outs, d.out_counts.clone());
        }
        bump(&mut outs, d.out_counts.clone());
        bump(&mut ins, d.in_counts.clone());
        bump(&mut comps, complete_key(&d));
    }
    check_out(&mut c, "formula/function-out", steps, p, &outs, |o| family(&FunctionFamily::OutCounted(o)))?;
    check_out(&mut c, "formula/function-injective-out", steps, p, &inj_outs, |o| {
        family(&FunctionFamily::InjectiveOutCounted(o))
    })?;
    check_in(&mut c, "formula/function-in", &ins, fs.len() as u64, |i| family(&FunctionFamily::InCounted(i)), &at)?;
    if regime == Regime::Nonneg && !steps.contains(0) {
        for ((root, cc), &k) in &comps {
            let root = &root.as_ref().expect("0^1 has a type").1;
            let ctx = || format!("{} complete {cc:?}", at());
            let r = family(&FunctionFamily::CompleteCounted { root, counts: cc });
            if let Some(v) = c.guard("formula/function-complete", ctx, r)? {
                c.check("formula/function-complete", v == big(k), || format!("{} {cc:?}: formula {v} oracle {k}", at()));
            }
        }
    }
    Ok(c)
}

/// Pointwise over every out-census of the profile, zeros included.
fn check_out(
    c: &mut Checks,
    id: &str,
    steps: &StepSet,
    p: &Profile,
    census: &BTreeMap<OutCounts, u64>,
    formula: impl Fn(&OutCounts) -> Result<BigCount>,
) -> Result<()> {
    for o in out_distributions(steps, p) {
        let k = census.get(&o).copied().unwrap_or(0);
        let ctx = || format!("S={{{steps}}} p={p} out {o:?}");
        if let Some(v) = c.guard(id, ctx, count_or_zero(formula(&o)))? {
            c.check(id, v == big(k), || format!("S={{{steps}}} p={p} out {o:?}: formula {v} oracle {k}"));
        }
    }
    Ok(())
}

/// Pointwise over the realized in-censuses, plus the total.
fn check_in(
    c: &mut Checks,
    id: &str,
    census: &BTreeMap<InCounts, u64>,
    total: u64,
    formula: impl Fn(&InCounts) -> Result<BigCount>,
    at: &dyn Fn() -> String,
) -> Result<()> {
    let mut sum = BigCount::from(0u32);
    for (inc, &k) in census {
        let ctx = || format!("{} in {inc:?}", at());
        if let Some(v) = c.guard(id, ctx, formula(inc))? {
            sum += &v;
            c.check(id, v == big(k), || format!("{} in {inc:?}: formula {v} oracle {k}", at()));
        }
    }
    c.check(id, sum == big(total), || format!("{} in-type sum {sum} vs {total}", at()));
    Ok(())
}

/// `(out-step, child vector)` of every vertex.
fn vertex_types(min: i64, abs: &[i64], next: &[Option<usize>]) -> Vec<(Option<i64>, CVec)> {
    let mut cv = vec![vec![0u32; (2 - min) as usize]; next.len()];
    for (v, p) in next.iter().enumerate() {
        if let Some(p) = *p {
            cv[p][(abs[v] - abs[p] - min) as usize] += 1;
        }
    }
    next.iter().zip(abs).zip(cv).map(|((p, &i), c)| (p.map(|p| i - abs[p]), c)).collect()
}

fn types_of_function(f: &SFunction) -> Vec<(Option<i64>, CVec)> {
    let vs = f.vertices();
    let abs: Vec<i64> = (0..vs.len()).map(|v| vs.abscissa(v)).collect();
    vertex_types(f.steps().min(), &abs, f.image())
}

fn types_of_tree(t: &MarkedSTree) -> Vec<(Option<i64>, CVec)> {
    let vs = t.vertices();
    let abs: Vec<i64> = (0..vs.len()).map(|v| vs.abscissa(v)).collect();
    vertex_types(t.steps().min(), &abs, t.parents())
}

/// Round trips, image sets, type preservation, involutions and records for Φ and Ψ.
pub fn bijection_sweep(scope: &Scope) -> Result<Report> {
    let tasks = formula_instances(&scope.step_sets, scope.max_n);
    parallel(&tasks, |s, p| bijection_task(s, p, &scope.budget))
}

fn bijection_task(steps: &StepSet, p: &Profile, budget: &EnumerationBudget) -> Result<Checks> {
    let mut c = Checks::default();
    let regime = Regime::of(p);
    let at = || format!("S={{{steps}}} p={p}");
    let (fwd, inv, inv2): (fn(&SFunction) -> Result<MarkedSTree>, fn(&MarkedSTree) -> Result<SFunction>, fn(&MarkedSTree) -> Result<MarkedSTree>) =
        match regime {
            Regime::Nonneg => (phi, phi_inverse, phi2),
            Regime::General => (psi, psi_inverse, psi2),
        };
    let name = match regime {
        Regime::Nonneg => "phi",
        Regime::General => "psi",
    };
    let id = |k: &str| format!("bijection/{name}-{k}");
    let fs = enumerate_sfunctions(steps, p, regime, &FunctionConstraint::None, budget)?;
    let ts = enumerate_marked_strees(steps, p, regime, budget)?;
    let tset: HashSet<&MarkedSTree> = ts.iter().collect();
    let mut images = HashSet::new();
    let first0 = || fs.first().map(|f| f.vertices().first(0));

    for f in &fs {
        let ctx = || format!("{} f={}", at(), f.to_json());
        let Some(t) = c.guard(&id("round-trip"), ctx, fwd(f))? else { continue };
        let back = c.guard(&id("round-trip"), ctx, inv(&t))?;
        if let Some(g) = back {
            c.check(&id("round-trip"), &g == f, || format!("{} f={} came back as {}", at(), f.to_json(), g.to_json()));
        }
        c.check(&id("image"), tset.contains(&t), || format!("{} f={} maps outside the tree set", at(), f.to_json()));

        let (ft, tt) = (types_of_function(f), types_of_tree(&t));
        let (fd, td) = (f.type_distribution(), t.type_distribution());
        match regime {
            Regime::Nonneg => {
                let same = ft.iter().zip(&tt).all(|(a, b)| a.0 == b.0);
                c.check(&id("out-per-vertex"), same, || format!("{} f={}", at(), f.to_json()));
                if !steps.contains(0) {
                    c.check(&id("complete-per-vertex"), ft == tt, || format!("{} f={}", at(), f.to_json()));
                    if let Some(t1) = c.guard(&id("phi2-trivial"), ctx, phi1(f))? {
                        c.check(&id("phi2-trivial"), t1 == t, || format!("{} f={}", at(), f.to_json()));
                    }
                }
                if let Some(t1) = c.guard(&id("record"), ctx, phi1(f))? {
                    if let Some(rec) = c.guard(&id("record"), ctx, frustration_record(&t1))? {
                        c.check(&id("record"), rec.is_well_formed(p.r()), || format!("{} f={}", at(), f.to_json()));
                    }
                }
            }
            Regime::General => {
                c.check(&id("out-census"), fd.out_counts == td.out_counts, || format!("{} f={}", at(), f.to_json()));
                if let Some(case) = c.guard(&id("case"), ctx, classify_case(f))? {
                    let got = conditions::evaluate(&t).case(first0().expect("non-empty"));
                    c.check(&id("case"), got == Some(case), || format!("{} f={}: {case:?} vs {got:?}", at(), f.to_json()));
                }
            }
        }
        c.check(&id("in-census"), fd.in_counts == td.in_counts, || format!("{} f={}", at(), f.to_json()));
        images.insert(t);
    }
    c.check(&id("onto"), images.len() == ts.len() && fs.len() == ts.len(), || {
        format!("{}: {} functions, {} trees, {} images", at(), fs.len(), ts.len(), images.len())
    });
    for t in &ts {
        let ctx = || format!("{} t={}", at(), t.to_json());
        if let Some(g) = c.guard(&id("inverse-round-trip"), ctx, inv(t))? {
            if let Some(u) = c.guard(&id("inverse-round-trip"), ctx, fwd(&g))? {
                c.check(&id("inverse-round-trip"), &u == t, || format!("{} t={}", at(), t.to_json()));
            }
        }
        let twice = inv2(t).and_then(|u| inv2(&u));
        if let Some(u) = c.guard(&id("involution"), ctx, twice)? {
            c.check(&id("involution"), &u == t, || format!("{} t={}", at(), t.to_json()));
        }
    }
    Ok(c)
}

fn random_ratio(rng: &mut ChaCha8Rng) -> Ratio {
    Ratio::new(rng.gen_range(1..20).into(), rng.gen_range(1..7).into())
}

/// Cycle graphs `G_{ℓ,r}(S)` in scope: `ℓ < 0` only when `min S = −1`.
fn cycle_graphs(scope: &Scope) -> Result<Vec<CycleGraph>> {
    let mut out = Vec::new();
    for s in &scope.step_sets {
        let ells: Vec<i64> = if s.min() == -1 { (-scope.span..=0).collect() } else { vec![0] };
        for &ell in &ells {
            for r in 0..=scope.span {
                out.push(CycleGraph::new(ell, r, s.clone())?);
            }
        }
    }
    Ok(out)
}

/// The cycle-sum identities at random points, plus one instance outside the hypotheses.
pub fn identity_sweep(scope: &Scope) -> Result<Report> {
    let graphs = cycle_graphs(scope)?;
    let results: Vec<Result<Checks>> = graphs
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let mut rng = ChaCha8Rng::seed_from_u64(scope.seed);
            rng.set_stream(k as u64);
            identity_task(g, scope.points, &mut rng)
        })
        .collect();
    let mut all = Checks::default();
    for r in results {
        all.merge(r?);
    }
    let g = CycleGraph::new(-1, 1, StepSet::new([-2, -1, 1])?)?;
    let y: Vec<Ratio> = [2, 3, 5].into_iter().map(ratio_int).collect();
    let (lhs, rhs) = (eval_p(&g, &y)?, eval_p_closed(&g, &y)?);
    let id = "identity/out-of-hypothesis-failure";
    all.check(id, lhs != rhs, || "identity unexpectedly holds".into());
    all.note(id, format!("S={{-2,-1,1}}, [ell,r]=[-1,1], y=(2,3,5): cycle sum {lhs}, product {rhs}"));
    Ok(Report::from_checks(all))
}

fn identity_task(g: &CycleGraph, points: usize, rng: &mut ChaCha8Rng) -> Result<Checks> {
    let mut c = Checks::default();
    let at = || format!("S={{{}}} [ell,r]=[{},{}]", g.steps, g.ell, g.r);
    let range = || g.ell..=g.r;
    for _ in 0..points {
        let y: Vec<Ratio> = range().map(|_| ratio_int(rng.gen_range(1..50))).collect();
        let (a, b) = (eval_p(g, &y)?, eval_p_closed(g, &y)?);
        c.check("identity/cycle-polynomial", a == b, || format!("{} y={y:?}: {a} vs {b}", at()));

        let y: Vec<Ratio> = range().map(|_| random_ratio(rng)).collect();
        let mut x = WeightAssignment::ones();
        for i in range() {
            for s in g.steps.iter() {
                x.set(i, s, random_ratio(rng));
            }
        }
        let (a, b) = (eval_p_refined(g, &y, &x)?, eval_p_refined_closed(g, &y, &x)?);
        c.check("identity/refined", a == b, || format!("{} y={y:?}: {a} vs {b}", at()));

        let mut out = OutCounts::new();
        for i in range() {
            for s in g.steps.iter().filter(|&s| range().contains(&(i - s))) {
                let k = rng.gen_range(0..4);
                if k > 0 {
                    out.insert((i, s), k);
                }
            }
        }
        let (a, b) = (eval_p_out(g, &out)?, eval_p_out_closed(g, &out)?);
        c.check("identity/out-polynomial", a == b, || format!("{} out={out:?}: {a} vs {b}", at()));
    }
    Ok(c)
}

/// Laplacian minors against the product form, the generating function, the
/// profile formula and direct spanning-tree enumeration.
pub fn determinant_sweep(scope: &Scope) -> Result<Report> {
    let tasks = formula_instances(&scope.step_sets, scope.max_n);
    let results: Vec<Result<Checks>> = tasks
        .par_iter()
        .enumerate()
        .map(|(k, (s, p))| {
            let mut rng = ChaCha8Rng::seed_from_u64(scope.seed);
            rng.set_stream(k as u64);
            determinant_task(s, p, &mut rng, &scope.budget)
        })
        .collect();
    let mut all = Checks::default();
    for r in results {
        all.merge(r?);
    }
    Ok(Report::from_checks(all))
}

fn determinant_task(steps: &StepSet, p: &Profile, rng: &mut ChaCha8Rng, budget: &EnumerationBudget) -> Result<Checks> {
    let mut c = Checks::default();
    let at = || format!("S={{{steps}}} p={p}");
    let mut x = WeightAssignment::ones();
    for i in p.abscissas() {
        for s in steps.iter() {
            x.set(i, s, random_ratio(rng));
        }
    }
    let (a, b) = (laplacian_minor_det(p, steps, &x)?, laplacian_minor_closed(p, steps, &x)?);
    c.check("determinant/product-form", a == b, || format!("{}: {a} vs {b}", at()));
    let (a, b) = (cayley_from_spanning(p, steps, &x)?, eval_out_gf(steps, p, &x)?);
    c.check("determinant/generating-function", a == b, || format!("{}: {a} vs {b}", at()));
    let ones = cayley_from_spanning(p, steps, &WeightAssignment::ones())?;
    let count = Ratio::from_integer(count_cayley_profile(steps, p)?.into());
    c.check("determinant/cayley-count", ones == count, || format!("{}: {ones} vs {count}", at()));
    if p.total() <= 6 {
        let mut w = WeightAssignment::ones();
        for i in p.abscissas() {
            for s in steps.iter() {
                w.set(i, s, ratio_int(rng.gen_range(1..4)));
            }
        }
        let sys = LaplacianSystem::new(p, steps, &w)?;
        let (a, b) = (bareiss_det(sys.minor())?, spanning_tree_sum(&sys.arcs(), sys.root(), budget)?);
        c.check("determinant/spanning-trees", a == b, || format!("{}: {a} vs {b}", at()));
    }
    Ok(c)
}

/// Every labeled tree on `k` nodes, as edge lists `(parent, child)` rooted at 0.
pub fn labeled_trees(k: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(v: usize, k: usize, parent: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
        if v == k {
            let reaches_root = |start: usize| {
                let mut u = start;
                for _ in 0..k {
                    if u == 0 {
                        return true;
                    }
                    u = parent[u];
                }
                u == 0
            };
            if (1..k).all(reaches_root) {
                out.push((1..k).map(|u| (parent[u], u)).collect());
            }
            return;
        }
        for p in (0..k).filter(|&p| p != v) {
            parent[v] = p;
            rec(v + 1, k, parent, out);
        }
    }
    let mut out = Vec::new();
    rec(1, k, &mut vec![0; k], &mut out);
    out
}

/// Compositions of `total` into `parts` positive parts.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts as u64 - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Product formula, determinant and brute force for every rooted target tree
/// with at most `max_nodes` abscissas and `n ≤ max_n`.
pub fn tree_in_tree_sweep(max_nodes: usize, max_n: u64, budget: &EnumerationBudget) -> Result<Report> {
    let mut targets = Vec::new();
    for k in 1..=max_nodes {
        for edges in labeled_trees(k) {
            for root in 0..k {
                for n in k as u64..=max_n {
                    for counts in compositions(n, k) {
                        targets.push(TargetTree::new(counts, root, edges.clone())?);
                    }
                }
            }
        }
    }
    let results: Vec<Result<Checks>> = targets
        .par_iter()
        .map(|t| {
            let mut c = Checks::default();
            let formula = count_tree_in_tree(t)?;
            let det = tree_in_tree_det(t)?;
            c.check("tree-in-tree/determinant", det == formula, || format!("{t:?}: formula {formula} det {det}"));
            let brute = count_tree_morphisms(t, budget)?;
            c.check("tree-in-tree/brute-force", brute == formula, || format!("{t:?}: formula {formula} brute {brute}"));
            Ok(c)
        })
        .collect();
    let mut all = Checks::default();
    for r in results {
        all.merge(r?);
    }
    Ok(Report::from_checks(all))
}

/// A function whose complete-type census no tree realizes, and a tree whose
/// census no function realizes.
pub fn negative_controls(budget: &EnumerationBudget) -> Result<Report> {
    let mut c = Checks::default();

    let id = "control/function-census-unrealizable";
    let steps = StepSet::new([0, 1])?;
    let p = Profile::nonneg(vec![2, 1])?;
    let f = SFunction::from_pairs(
        p.clone(),
        steps.clone(),
        &[(Vertex::new(1, 1), Vertex::new(0, 1)), (Vertex::new(0, 2), Vertex::new(0, 2))],
    )?;
    let target = complete_key(&f.type_distribution());
    let mut hits = 0u64;
    crate::oracle::for_each_rooted_stree(&steps, &p, budget, |vs, parent| {
        let abs: Vec<i64> = (0..vs.len()).map(|v| vs.abscissa(v)).collect();
        if complete_key(&TypeDistribution::from_graph(StepSet::min(&steps), &abs, parent)) == target {
            hits += 1;
        }
    })?;
    c.check(id, hits == 0, || format!("{hits} trees share the census of f={}", f.to_json()));
    c.note(id, format!("S={{{steps}}} f={}", f.to_json()));

    let id = "control/tree-census-unrealizable";
    match general_control(budget)? {
        Some((steps, t)) => {
            c.check(id, true, String::new);
            c.note(id, format!("S={{{steps}}} t={}", t.to_json()));
        }
        None => c.check(id, false, || "no (T1, T2) tree with an unrealizable census found".into()),
    }
    Ok(Report::from_checks(c))
}

/// First tree satisfying (T₁) ∧ (T₂) whose complete-type census differs from
/// that of every function satisfying (F).
pub fn general_control(budget: &EnumerationBudget) -> Result<Option<(StepSet, MarkedSTree)>> {
    for (s, p) in [("-1,1", "2;2,1"), ("-1,0,1", "2;2,1"), ("-1,1", "1,1;2,1"), ("-1,0,1", "1,1;2,1")] {
        let steps: StepSet = s.parse()?;
        let p: Profile = p.parse()?;
        let fs = enumerate_sfunctions(&steps, &p, Regime::General, &FunctionConstraint::None, budget)?;
        let seen: BTreeSet<CompleteKey> = fs.iter().map(|f| complete_key(&f.type_distribution())).collect();
        for t in enumerate_marked_strees(&steps, &p, Regime::General, budget)? {
            if !seen.contains(&complete_key(&t.type_distribution())) {
                return Ok(Some((steps, t)));
            }
        }
    }
    Ok(None)
}

/// Pinned values: 3, 720, 9, the prime counts 107 and 808920, and the minor 12.
pub fn regressions() -> Result<Report> {
    let mut c = Checks::default();
    let mut pin = |id: &str, got: BigCount, want: u64| {
        c.check(id, got == big(want), || format!("got {got}, expected {want}"));
    };
    let budget = EnumerationBudget::with_max_size(7);
    let p = |s: &str| s.parse::<Profile>();
    let s = |s: &str| s.parse::<StepSet>();
    pin("regression/binary-2;2,1", count_binary_profile(&p("2;2,1")?)?, 3);
    pin("regression/cayley-{-1,1}-2;2,1", count_cayley_profile(&s("-1,1")?, &p("2;2,1")?)?, 720);
    pin("regression/cayley-{0,1}-3", count_cayley_profile(&s("0,1")?, &p("3")?)?, 9);
    let primes: [(&[i64], &str); 2] = [(&[-2, -1, 1], "1,1,1,2,1;1"), (&[-1, 1, 2], "1,1,2,1,1,1")];
    for (steps, q) in primes {
        let list: Vec<String> = steps.iter().map(i64::to_string).collect();
        let tag = format!("{{{}}}-{q}", list.join(","));
        pin(&format!("regression/sary-{tag}"), count_sary_steps(steps, &p(q)?, &budget)?, 107);
        pin(&format!("regression/cayley-{tag}"), count_embedded_cayley_steps(steps, &p(q)?, &budget)?, 808_920);
    }
    let steps = s("-2,-1,1")?;
    let det = cayley_from_spanning(&p("1,1,1,2,1;1")?, &steps, &WeightAssignment::ones())?;
    c.check("regression/determinant-{-2,-1,1}-1,1,1,2,1;1", det == ratio_int(808_920), || format!("got {det}"));
    let ones = WeightAssignment::ones();
    let minor = laplacian_minor_det(&p("2;2,1")?, &s("-1,1")?, &ones)?;
    c.check("regression/laplacian-minor-2;2,1", minor == ratio_int(12), || format!("got {minor}"));
    let spanning = cayley_from_spanning(&p("2;2,1")?, &s("-1,1")?, &ones)?;
    c.check("regression/cayley-from-spanning-2;2,1", spanning == ratio_int(720), || format!("got {spanning}"));
    Ok(Report::from_checks(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_distributions_of_a_small_profile() {
        let s: StepSet = "-1,1".parse().unwrap();
        let p: Profile = "2,1".parse().unwrap();
        // 0² goes to abscissa 1 (step -1); 1¹ goes to abscissa 0 (step 1)
        assert_eq!(out_distributions(&s, &p), vec![OutCounts::from([((0, -1), 1), ((1, 1), 1)])]);
    }

    #[test]
    fn tree_and_composition_counts() {
        assert_eq!(labeled_trees(4).len(), 16);
        assert_eq!(compositions(5, 3).len(), 6);
    }

    #[test]
    fn small_scope_passes() {
        let scope = Scope { max_n: 4, points: 5, span: 2, ..Scope::default() };
        let report = run(&scope, Selection { regressions: false, tree_in_tree: false, ..Selection::all() }).unwrap();
        assert!(report.all_passed(), "{report}");
    }
}
