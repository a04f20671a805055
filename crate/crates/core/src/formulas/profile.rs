use num_traits::{One, Zero};

use super::{factor, product_of, Factor, WeightAssignment};
use crate::arith::{binomial, factorial, ratio_int, ratio_pow, ratio_uint, BigCount, Ratio};
use crate::error::{Error, Result};
use crate::profile::{validate_formula_hypotheses, Profile};
use crate::steps::StepSet;

/// Binary trees with horizontal profile `h` (vertices per height): `∏ C(2h_i, h_{i+1})`.
pub fn count_binary_horizontal(h: &[u64]) -> Result<BigCount> {
    if h.first() != Some(&1) {
        return Err(Error::InvalidProfile("horizontal profile must start with h_0 = 1".into()));
    }
    if h.contains(&0) {
        return Err(Error::InvalidProfile("horizontal profile entries must be positive".into()));
    }
    Ok(h.windows(2).fold(BigCount::one(), |acc, w| acc * binomial(2 * w[0] as i64, w[1] as i64)))
}

fn n_r(p: &Profile, i: i64) -> Ratio {
    ratio_int(p.n(i))
}

fn prefactor(p: &Profile) -> Factor {
    factor(
        "root/extremity weight",
        format!("n_0/(n_{} n_{})", p.ell(), p.r()),
        n_r(p, 0) / (n_r(p, p.ell()) * n_r(p, p.r())),
    )
}

/// Factored form of the binary-tree profile count.
pub fn explain_binary_profile(p: &Profile) -> Result<Vec<Factor>> {
    let mut fs = vec![prefactor(p)];
    let (a, b) = (p.n(-1) + p.n(1), p.n(0) as i64 - 1);
    fs.push(factor("root children", format!("C({a},{b})"), ratio_uint(&binomial(a as i64, b))));
    for i in p.abscissas().filter(|&i| i != 0) {
        let a = (p.n(i - 1) + p.n(i + 1)) as i64 - 1;
        let b = p.n(i) as i64 - 1;
        fs.push(factor(&format!("abscissa {i} slots"), format!("C({a},{b})"), ratio_uint(&binomial(a, b))));
    }
    Ok(fs)
}

/// Binary trees with vertical profile `p`.
pub fn count_binary_profile(p: &Profile) -> Result<BigCount> {
    product_of(&explain_binary_profile(p)?, &format!("binary count for {p}"))
}

/// Factored form of the S-embedded Cayley tree count.
pub fn explain_cayley_profile(steps: &StepSet, p: &Profile) -> Result<Vec<Factor>> {
    validate_formula_hypotheses(steps, p)?;
    let n = p.total();
    let mut fs = vec![prefactor(p)];
    let denom = p.abscissas().fold(BigCount::one(), |acc, i| acc * factorial(p.n(i) - 1));
    fs.push(factor(
        "labelings",
        format!("{n}!/prod (n_i-1)!"),
        ratio_uint(&factorial(n)) / ratio_uint(&denom),
    ));
    for i in p.abscissas() {
        let pool = p.parent_pool(steps, i);
        let e = p.n(i) as i64 - 1;
        fs.push(factor(
            &format!("abscissa {i} parents"),
            format!("{pool}^{e}"),
            ratio_pow(&ratio_int(pool), e)?,
        ));
    }
    Ok(fs)
}

/// S-embedded Cayley trees with profile `p`.
pub fn count_cayley_profile(steps: &StepSet, p: &Profile) -> Result<BigCount> {
    product_of(&explain_cayley_profile(steps, p)?, &format!("Cayley count for {p}"))
}

/// Factored form of the S-ary tree count.
pub fn explain_sary_profile(steps: &StepSet, p: &Profile) -> Result<Vec<Factor>> {
    validate_formula_hypotheses(steps, p)?;
    let mut fs = vec![prefactor(p)];
    for i in p.abscissas() {
        let pool = p.parent_pool(steps, i) as i64;
        let (a, b) = if i == 0 { (pool, p.n(0) as i64 - 1) } else { (pool - 1, p.n(i) as i64 - 1) };
        fs.push(factor(&format!("abscissa {i} slots"), format!("C({a},{b})"), ratio_uint(&binomial(a, b))));
    }
    Ok(fs)
}

/// S-ary trees with profile `p`.
pub fn count_sary_profile(steps: &StepSet, p: &Profile) -> Result<BigCount> {
    product_of(&explain_sary_profile(steps, p)?, &format!("S-ary count for {p}"))
}

/// Generating function of Cayley trees with profile `p`, each vertex of out-type
/// `(i; s)` weighted by `x_{i,s}`.
pub fn eval_out_gf(steps: &StepSet, p: &Profile, x: &WeightAssignment) -> Result<Ratio> {
    validate_formula_hypotheses(steps, p)?;
    let n = p.total();
    let mut acc = n_r(p, 0) / (n_r(p, p.ell()) * n_r(p, p.r()));
    acc *= ratio_uint(&factorial(n));
    for i in p.abscissas() {
        acc /= ratio_uint(&factorial(p.n(i) - 1));
        if i < 0 {
            acc *= x.get(i, -1);
        }
        if i > 0 {
            acc *= x.get(i, 1);
        }
        let lin = steps.iter().fold(Ratio::zero(), |s, st| s + n_r(p, i - st) * x.get(i, st));
        acc *= ratio_pow(&lin, p.n(i) as i64 - 1)?;
    }
    Ok(acc)
}

/// `n!/∏ n_i! · ∏_{i=0}^{r−1} n_i · ∏_i (Σ_s n_{i−s})^{n_i−1}`.
fn product_part(steps: &StepSet, p: &Profile) -> Result<Ratio> {
    let mut acc = ratio_uint(&factorial(p.total()));
    for i in p.abscissas() {
        acc /= ratio_uint(&factorial(p.n(i)));
        acc *= ratio_pow(&ratio_int(p.parent_pool(steps, i)), p.n(i) as i64 - 1)?;
    }
    for i in 0..p.r() {
        acc *= n_r(p, i);
    }
    Ok(acc)
}

/// Cayley trees with `ℓ = −1`, valid for any step set with maximum 1.
pub fn count_cayley_profile_ell1(steps: &StepSet, p: &Profile) -> Result<BigCount> {
    if p.ell() != -1 {
        return Err(Error::HypothesisViolation(format!("requires ell = -1, profile has ell = {}", p.ell())));
    }
    let bracket: u64 = steps.iter().filter(|&s| s <= -1).map(|s| p.n(-s - 1)).sum();
    crate::arith::to_count(&(product_part(steps, p)? * ratio_int(bracket)), "ell=-1 count")
}

/// Cayley trees with `ℓ = −2`, valid for any step set with maximum 1.
pub fn count_cayley_profile_ell2(steps: &StepSet, p: &Profile) -> Result<BigCount> {
    if p.ell() != -2 {
        return Err(Error::HypothesisViolation(format!("requires ell = -2, profile has ell = {}", p.ell())));
    }
    let sum = |bound: i64, shift: i64| -> u64 {
        steps.iter().filter(|&s| s <= bound).map(|s| p.n(-s - shift)).sum()
    };
    let bracket = p.n(-2) * sum(-2, 2) + sum(-1, 2) * sum(-1, 1);
    crate::arith::to_count(&(product_part(steps, p)? * ratio_int(bracket)), "ell=-2 count")
}
