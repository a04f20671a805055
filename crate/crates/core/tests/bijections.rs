use std::collections::HashSet;

use embtree::bijection::*;
use embtree::conditions::check_tree_conditions;
use embtree::formulas::TargetTree;
use embtree::oracle::*;
use embtree::profile::all_profiles;
use embtree::sampler::{sample_embedded_cayley, sample_sary, sample_sfunction};
use embtree::verify::negative_controls;
use embtree::*;
use proptest::prelude::*;

fn s(x: &str) -> StepSet {
    x.parse().unwrap()
}

const STEP_SETS: &[&str] = &["-1,1", "-1,0,1", "0,1", "-2,-1,1", "-2,0,1", "1", "-2,-1,0,1"];

fn forward(f: &SFunction) -> Result<MarkedSTree> {
    match Regime::of(f.profile()) {
        Regime::Nonneg => phi(f),
        Regime::General => psi(f),
    }
}

fn backward(t: &MarkedSTree) -> Result<SFunction> {
    match Regime::of(t.profile()) {
        Regime::Nonneg => phi_inverse(t),
        Regime::General => psi_inverse(t),
    }
}

fn second_stage(t: &MarkedSTree) -> Result<MarkedSTree> {
    match Regime::of(t.profile()) {
        Regime::Nonneg => phi2(t),
        Regime::General => psi2(t),
    }
}

#[test]
fn exhaustive_two_sided_bijections() {
    let b = EnumerationBudget::default();
    for st in STEP_SETS {
        let steps = s(st);
        for n in 1..=5 {
            for q in all_profiles(n) {
                let regime = Regime::of(&q);
                if validate_profile_for(&steps, &q, regime).is_err() {
                    continue;
                }
                let at = format!("S={st} p={q}");
                let fs = enumerate_sfunctions(&steps, &q, regime, &FunctionConstraint::None, &b).unwrap();
                let ts: HashSet<MarkedSTree> = enumerate_marked_strees(&steps, &q, regime, &b).unwrap().into_iter().collect();
                let mut images = HashSet::new();
                for f in &fs {
                    let t = forward(f).unwrap();
                    assert_eq!(&backward(&t).unwrap(), f, "{at}");
                    assert!(ts.contains(&t), "{at} f={}", f.to_json());
                    assert_eq!(f.type_distribution().in_counts, t.type_distribution().in_counts, "{at}");
                    assert_eq!(f.type_distribution().out_counts, t.type_distribution().out_counts, "{at}");
                    images.insert(t);
                }
                assert_eq!(images.len(), ts.len(), "{at}");
                assert_eq!(fs.len(), ts.len(), "{at}");
                for t in &ts {
                    assert_eq!(&forward(&backward(t).unwrap()).unwrap(), t, "{at}");
                    assert_eq!(&second_stage(&second_stage(t).unwrap()).unwrap(), t, "{at}");
                }
            }
        }
    }
}

#[test]
fn frustration_records_and_trivial_second_stage() {
    let b = EnumerationBudget::default();
    for st in STEP_SETS {
        let steps = s(st);
        for n in 1..=5 {
            for q in all_profiles(n).into_iter().filter(|q| q.ell() == 0) {
                if validate_profile_for(&steps, &q, Regime::Nonneg).is_err() {
                    continue;
                }
                for f in enumerate_sfunctions(&steps, &q, Regime::Nonneg, &FunctionConstraint::None, &b).unwrap() {
                    let t1 = phi1(&f).unwrap();
                    assert!(frustration_record(&t1).unwrap().is_well_formed(q.r()), "S={st} f={}", f.to_json());
                    if !steps.contains(0) {
                        let t = phi(&f).unwrap();
                        assert_eq!(t, t1);
                        assert_eq!(t.type_distribution(), f.type_distribution());
                    }
                }
            }
        }
    }
}

#[test]
fn general_cases_match_tree_conditions() {
    let b = EnumerationBudget::default();
    let mut seen = HashSet::new();
    for st in ["-1,1", "-1,0,1"] {
        for q in ["2;2,1", "1;1,2", "1,1;1,1", "2;1,1,1"] {
            let (steps, q): (StepSet, Profile) = (s(st), q.parse().unwrap());
            for f in enumerate_sfunctions(&steps, &q, Regime::General, &FunctionConstraint::None, &b).unwrap() {
                let case = classify_case(&f).unwrap();
                let t = psi(&f).unwrap();
                let rep = check_tree_conditions(&t, Regime::General).unwrap();
                assert_eq!(rep.case(t.vertices().first(0)), Some(case));
                seen.insert(case);
            }
        }
    }
    assert_eq!(seen.len(), 4, "all four cases occur");
}

#[test]
fn traces_end_at_the_image() {
    let f = SFunction::from_pairs(
        "2,1".parse().unwrap(),
        s("-1,1"),
        &[(Vertex::new(1, 1), Vertex::new(0, 1)), (Vertex::new(0, 2), Vertex::new(1, 1))],
    )
    .unwrap();
    let tr = phi_trace(&f).unwrap();
    assert_eq!(tr.tree, phi(&f).unwrap().to_json_value());
    assert_eq!(phi_inverse_trace(&phi(&f).unwrap()).unwrap().function, f.to_json_value());
    let g = sample_sfunction(&s("-1,1"), &"2;2,1".parse().unwrap(), Regime::General, 3).unwrap();
    let tr = psi_trace(&g).unwrap();
    assert_eq!(tr.tree, psi(&g).unwrap().to_json_value());
    assert_eq!(tr.case, classify_case(&g).unwrap());
}

#[test]
fn negative_controls_are_realized() {
    let r = negative_controls(&EnumerationBudget::default()).unwrap();
    assert!(r.all_passed(), "{r}");
}

/// Draws a function, or `None` when no function satisfies (F) on the profile.
fn draw(steps: &StepSet, q: &Profile, seed: u64) -> Option<SFunction> {
    match sample_sfunction(steps, q, Regime::of(q), seed) {
        Err(Error::InfeasibleProfile(_)) => None,
        r => Some(r.unwrap()),
    }
}

fn instance() -> impl Strategy<Value = (StepSet, Profile, u64)> {
    let sets = prop::sample::select(vec!["-1,1", "-1,0,1", "0,1", "-2,-1,1", "-2,0,1", "1"]);
    (sets, 0usize..4, prop::collection::vec(1u64..4, 1..6), any::<u64>()).prop_map(|(st, neg, counts, seed)| {
        let steps = s(st);
        let neg = if StepSet::min(&steps) == -1 { neg.min(counts.len() - 1) } else { 0 };
        (steps, Profile::new(-(neg as i64), counts).unwrap(), seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Random functions at sizes beyond the exhaustive sweeps.
    #[test]
    fn random_round_trips((steps, q, seed) in instance()) {
        let regime = Regime::of(&q);
        let f = draw(&steps, &q, seed);
        prop_assume!(f.is_some());
        let f = f.unwrap();
        let t = forward(&f).unwrap();
        prop_assert!(check_tree_conditions(&t, regime).is_ok());
        prop_assert_eq!(&backward(&t).unwrap(), &f);
        prop_assert_eq!(&second_stage(&second_stage(&t).unwrap()).unwrap(), &t);
        let (df, dt) = (f.type_distribution(), t.type_distribution());
        prop_assert_eq!(df.in_counts, dt.in_counts);
        prop_assert_eq!(df.out_counts, dt.out_counts);
        if regime == Regime::Nonneg {
            for v in 0..f.vertices().len() {
                prop_assert_eq!(f.out_step(v), t.out_step(v));
            }
        }
    }

    #[test]
    fn json_round_trips((steps, q, seed) in instance()) {
        let f = draw(&steps, &q, seed);
        prop_assume!(f.is_some());
        let f = f.unwrap();
        prop_assert_eq!(&SFunction::from_json(&f.to_json()).unwrap(), &f);
        let t = forward(&f).unwrap();
        prop_assert_eq!(&MarkedSTree::from_json(&t.to_json()).unwrap(), &t);
        let c = sample_embedded_cayley(&steps, &q, seed).unwrap();
        prop_assert_eq!(&EmbeddedCayleyTree::from_json(&c.to_json(), steps.clone()).unwrap(), &c);
        if let Ok(a) = sample_sary(&steps, &q, seed) {
            prop_assert_eq!(&SAryTree::from_json(&a.to_json()).unwrap(), &a);
            prop_assert_eq!(a.profile().unwrap(), q.clone());
        }
        let d = t.type_distribution();
        let back: TypeDistribution = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        prop_assert_eq!(back, d);
    }
}

#[test]
fn target_tree_json() {
    let t = TargetTree::new(vec![2, 1, 3], 1, vec![(0, 1), (1, 2)]).unwrap();
    let back: TargetTree = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
    assert!(serde_json::from_str::<TargetTree>(r#"{"counts":[1,1],"root":0,"edges":[]}"#).is_err());
}
