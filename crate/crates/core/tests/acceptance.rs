//! One line per acceptance criterion. Runs without the test harness so the
//! lines always reach stdout.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::chi_square_uniform;
use embtree::algebra::{cayley_from_spanning, laplacian_minor_det};
use embtree::arith::{binomial, ratio_int};
use embtree::formulas::{count_binary_profile, count_cayley_profile, count_sary_profile, WeightAssignment};
use embtree::oracle::{
    count_embedded_cayley_steps, count_sary_steps, enumerate_embedded_cayley, enumerate_sary, enumerate_sfunctions,
    EnumerationBudget, FunctionConstraint,
};
use embtree::profile::all_profiles;
use embtree::sampler::{
    profile_law, sample_batch, sample_embedded_cayley_with, sample_sary_with, sample_sfunction_with, Family,
};
use embtree::verify::{self, Report, Scope};
use embtree::{BigCount, Profile, Ratio, Regime, StepSet};
use num_traits::One;

/// The printed prime Cayley count that no enumeration reproduces (see `criterion_2`).
const PRINTED_PRIME_CAYLEY: u64 = 115_560;
/// Consistent value from the oracle and the matrix-tree route: `7! · 3 · 107 / 2`.
const PRIME_CAYLEY: u64 = 808_920;

const CHI_SQUARE_LEVEL: f64 = 1e-3;
/// Seeds of the uniformity draws, per support.
const SEED_FUNCTIONS: u64 = 7001;
const SEED_CAYLEY: u64 = 7002;
const SEED_SARY: u64 = 7003;

enum Verdict {
    Pass,
    Fail,
    /// Not attainable as stated; the consistent value is checked instead.
    KnownFail,
}

struct Line {
    verdict: Verdict,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Line {
    Line { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn s(x: &str) -> StepSet {
    x.parse().unwrap()
}

fn p(x: &str) -> Profile {
    x.parse().unwrap()
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let e = start.elapsed();
    (e <= limit, format!("{:.2}s (limit {}s)", e.as_secs_f64(), limit.as_secs()))
}

fn report_line(r: &Report, start: Instant, limit: Duration) -> Line {
    let (fast, time) = within(limit, start);
    let failing: Vec<&str> = r.checks.iter().filter(|c| !c.ok()).map(|c| c.id.as_str()).collect();
    let cases: u64 = r.checks.iter().map(|c| c.passed + c.failed).sum();
    let detail = if failing.is_empty() {
        format!("{} checks, {cases} cases, {time}", r.checks.len())
    } else {
        format!("failing {failing:?}, {time}\n{r}")
    };
    pass_if(failing.is_empty() && fast, detail)
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let b = count_binary_profile(&p("2;2,1")).unwrap();
    let c = count_cayley_profile(&s("-1,1"), &p("2;2,1")).unwrap();
    let n = count_cayley_profile(&s("0,1"), &p("3")).unwrap();
    let (fast, time) = within(Duration::from_secs(1), start);
    let ok = b == 3u32.into() && c == 720u32.into() && n == 9u32.into() && fast;
    pass_if(ok, format!("binary {b}, cayley {c}, n^(n-1) {n}, {time}"))
}

fn criterion_2() -> Line {
    let start = Instant::now();
    let budget = EnumerationBudget::default();
    let instances: [(&[i64], &str); 2] = [(&[-2, -1, 1], "1,1,1,2,1;1"), (&[-1, 1, 2], "1,1,2,1,1,1")];
    let mut sary = Vec::new();
    let mut cayley = Vec::new();
    for (steps, q) in instances {
        sary.push(count_sary_steps(steps, &p(q), &budget).unwrap());
        cayley.push(count_embedded_cayley_steps(steps, &p(q), &budget).unwrap());
    }
    let (fast, time) = within(Duration::from_secs(60), start);
    let sary_ok = sary.iter().all(|c| *c == 107u32.into());
    let consistent = cayley.iter().all(|c| *c == PRIME_CAYLEY.into());
    let literal = cayley.iter().all(|c| *c == PRINTED_PRIME_CAYLEY.into());
    let detail = format!(
        "s-ary {sary:?} (want 107), cayley {cayley:?} (printed value {PRINTED_PRIME_CAYLEY}, \
         consistent value {PRIME_CAYLEY} = 7!*3*107/2), {time}"
    );
    let verdict = match (sary_ok && fast, literal, consistent) {
        (true, true, _) => Verdict::Pass,
        (true, false, true) => Verdict::KnownFail,
        _ => Verdict::Fail,
    };
    Line { verdict, detail }
}

fn criterion_3() -> Line {
    let start = Instant::now();
    let r = verify::formula_sweep(&Scope::default()).unwrap();
    report_line(&r, start, Duration::from_secs(600))
}

fn criterion_4() -> Line {
    let start = Instant::now();
    let scope = Scope::default();
    let r = verify::bijection_sweep(&scope).unwrap().merge(verify::negative_controls(&scope.budget).unwrap());
    report_line(&r, start, Duration::from_secs(600))
}

fn closure_sum(n: u64, count: impl Fn(&Profile) -> BigCount) -> BigCount {
    all_profiles(n).iter().map(count).sum()
}

fn criterion_5() -> Line {
    let catalan: [u64; 10] = [1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
    let ternary: [u64; 7] = [1, 3, 12, 55, 273, 1428, 7752];
    let mut bad = Vec::new();
    for (k, &want) in catalan.iter().enumerate() {
        let n = k as u64 + 1;
        let got = closure_sum(n, |q| count_binary_profile(q).unwrap());
        if got != want.into() {
            bad.push(format!("binary n={n}: {got}"));
        }
    }
    let t = s("-1,0,1");
    for (k, &want) in ternary.iter().enumerate() {
        let n = k as u64 + 1;
        let closed = binomial(3 * n as i64, n as i64) / (2 * n + 1);
        let got = closure_sum(n, |q| count_sary_profile(&t, q).unwrap());
        if got != want.into() || closed != want.into() {
            bad.push(format!("ternary n={n}: {got}"));
        }
    }
    let c = s("-1,1");
    for n in 1..=7u64 {
        let want = BigCount::from(n).pow(n as u32 - 1) * BigCount::from(2u32).pow(n as u32 - 1);
        let got = closure_sum(n, |q| count_cayley_profile(&c, q).unwrap());
        if got != want {
            bad.push(format!("cayley n={n}: {got} vs {want}"));
        }
    }
    let ok = bad.is_empty();
    pass_if(ok, if ok { "Catalan n<=10, ternary n<=7, n^(n-1)2^(n-1) n<=7".into() } else { bad.join("; ") })
}

fn criterion_6() -> Line {
    let start = Instant::now();
    let scope = Scope { span: 4, points: 100, ..Scope::default() };
    let r = verify::identity_sweep(&scope).unwrap().merge(verify::determinant_sweep(&scope).unwrap());
    let ones = WeightAssignment::ones();
    let minor = laplacian_minor_det(&p("2;2,1"), &s("-1,1"), &ones).unwrap();
    let spanning = cayley_from_spanning(&p("2;2,1"), &s("-1,1"), &ones).unwrap();
    let pinned = minor == ratio_int(12) && spanning == ratio_int(720);
    let mut line = report_line(&r, start, Duration::from_secs(300));
    line.detail = format!("minor {minor}, spanning route {spanning}; {}", line.detail);
    if !pinned {
        line.verdict = Verdict::Fail;
    }
    line
}

fn criterion_7() -> Line {
    let budget = EnumerationBudget::default();
    let (steps, profile) = (s("-1,1"), p("2;2,1"));
    let mut pvals = Vec::new();

    let fs: Vec<String> = enumerate_sfunctions(&steps, &profile, Regime::General, &FunctionConstraint::None, &budget)
        .unwrap()
        .iter()
        .map(|f| f.to_json())
        .collect();
    let draws = sample_batch(SEED_FUNCTIONS, 200 * fs.len() as u64, |rng| {
        sample_sfunction_with(&steps, &profile, Regime::General, rng).map(|f| f.to_json())
    })
    .unwrap();
    pvals.push(("functions", fs.len(), chi_square_uniform(&fs, &draws)));

    let trees = enumerate_embedded_cayley(&steps, &profile, &budget).unwrap();
    let draws =
        sample_batch(SEED_CAYLEY, 200 * trees.len() as u64, |rng| sample_embedded_cayley_with(&steps, &profile, rng))
            .unwrap();
    pvals.push(("cayley", trees.len(), chi_square_uniform(&trees, &draws)));

    let sary = enumerate_sary(&s("-1,0,1"), &p("1;2,2"), &budget).unwrap();
    let draws =
        sample_batch(SEED_SARY, 1000 * sary.len() as u64, |rng| sample_sary_with(&s("-1,0,1"), &p("1;2,2"), rng))
            .unwrap();
    pvals.push(("ternary", sary.len(), chi_square_uniform(&sary, &draws)));

    let mut laws_ok = true;
    for n in 1..=10 {
        let law = profile_law(n, Family::Binary).unwrap();
        laws_ok &= law.probabilities().map(|(_, q)| q).sum::<Ratio>().is_one();
    }
    let stats_ok = pvals.iter().all(|&(_, size, pv)| size <= 1000 && pv > CHI_SQUARE_LEVEL);
    let shown: Vec<String> = pvals.iter().map(|(name, size, pv)| format!("{name} |{size}| p={pv:.3}")).collect();
    pass_if(
        stats_ok && laws_ok,
        format!("{} at level {CHI_SQUARE_LEVEL}; binary laws sum to 1 for n<=10: {laws_ok}", shown.join(", ")),
    )
}

fn criterion_8() -> Line {
    let start = Instant::now();
    let r = verify::tree_in_tree_sweep(4, 7, &EnumerationBudget::default()).unwrap();
    report_line(&r, start, Duration::from_secs(600))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Line); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut unexpected = 0;
    for (k, run) in criteria {
        let line = run();
        let tag = match line.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => {
                unexpected += 1;
                "FAIL"
            }
            Verdict::KnownFail => "FAIL (known, not attainable as stated)",
        };
        println!("criterion {k}: {tag}: {}", line.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
