use embtree::algebra::cayley_from_spanning;
use embtree::arith::ratio_int;
use embtree::formulas::{count_binary_profile, count_cayley_profile, WeightAssignment};
use embtree::oracle::{count_embedded_cayley_steps, count_sary_steps, EnumerationBudget};
use embtree::{Profile, StepSet};

fn p(x: &str) -> Profile {
    x.parse().unwrap()
}

#[test]
fn small_counts() {
    assert_eq!(count_binary_profile(&p("2;2,1")).unwrap(), 3u32.into());
    assert_eq!(count_cayley_profile(&"-1,1".parse::<StepSet>().unwrap(), &p("2;2,1")).unwrap(), 720u32.into());
    assert_eq!(count_cayley_profile(&"0,1".parse::<StepSet>().unwrap(), &p("3")).unwrap(), 9u32.into());
}

/// Two mirror-image instances outside the formula hypotheses, counted directly.
/// The Cayley count is `7! · 3 · 107 / 2`; the matrix-tree route agrees.
#[test]
fn prime_counts() {
    let b = EnumerationBudget::default();
    for (steps, profile) in [(&[-2, -1, 1][..], "1,1,1,2,1;1"), (&[-1, 1, 2][..], "1,1,2,1,1,1")] {
        assert_eq!(count_sary_steps(steps, &p(profile), &b).unwrap(), 107u32.into());
        assert_eq!(count_embedded_cayley_steps(steps, &p(profile), &b).unwrap(), (5040u32 * 3 * 107 / 2).into());
    }
    let det = cayley_from_spanning(&p("1,1,1,2,1;1"), &"-2,-1,1".parse().unwrap(), &WeightAssignment::ones()).unwrap();
    assert_eq!(det, ratio_int(808_920));
}
