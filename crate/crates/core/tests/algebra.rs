use embtree::algebra::*;
use embtree::arith::ratio_int;
use embtree::formulas::{count_cayley_profile, count_tree_in_tree, eval_out_gf, TargetTree, WeightAssignment};
use embtree::oracle::{count_tree_morphisms, spanning_tree_sum, EnumerationBudget};
use embtree::profile::all_profiles;
use embtree::types::OutCounts;
use embtree::{validate_profile_for, Profile, Ratio, Regime, StepSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s(x: &str) -> StepSet {
    x.parse().unwrap()
}

fn ranges() -> Vec<(StepSet, i64, i64)> {
    let mut out = Vec::new();
    for st in ["-1,1", "-1,0,1", "1", "-2,-1,1"] {
        let steps = s(st);
        let ells: Vec<i64> = if StepSet::min(&steps) == -1 { (-4..=0).collect() } else { vec![0] };
        for &ell in &ells {
            for r in 0..=4 {
                out.push((steps.clone(), ell, r));
            }
        }
    }
    out
}

fn random_ratio(rng: &mut ChaCha8Rng) -> Ratio {
    Ratio::new(rng.gen_range(1..20).into(), rng.gen_range(1..7).into())
}

#[test]
fn cycle_polynomial_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (steps, ell, r) in ranges() {
        let g = CycleGraph::new(ell, r, steps.clone()).unwrap();
        for _ in 0..100 {
            let y: Vec<Ratio> = (ell..=r).map(|_| ratio_int(rng.gen_range(1..50))).collect();
            assert_eq!(eval_p(&g, &y).unwrap(), eval_p_closed(&g, &y).unwrap(), "S={steps} [{ell},{r}]");
        }
    }
}

#[test]
fn refined_polynomial_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (steps, ell, r) in ranges() {
        let g = CycleGraph::new(ell, r, steps.clone()).unwrap();
        for _ in 0..30 {
            let y: Vec<Ratio> = (ell..=r).map(|_| random_ratio(&mut rng)).collect();
            let mut x = WeightAssignment::ones();
            for i in ell..=r {
                for st in steps.iter() {
                    x.set(i, st, random_ratio(&mut rng));
                }
            }
            assert_eq!(eval_p_refined(&g, &y, &x).unwrap(), eval_p_refined_closed(&g, &y, &x).unwrap());
        }
        let y: Vec<Ratio> = (ell..=r).map(|i| ratio_int(i + 10)).collect();
        assert_eq!(eval_p_refined(&g, &y, &WeightAssignment::ones()).unwrap(), eval_p(&g, &y).unwrap());
    }
}

#[test]
fn out_polynomial_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (steps, ell, r) in ranges() {
        let g = CycleGraph::new(ell, r, steps.clone()).unwrap();
        for _ in 0..30 {
            let mut out = OutCounts::new();
            for i in ell..=r {
                for st in steps.iter().filter(|&st| (ell..=r).contains(&(i - st))) {
                    let c = rng.gen_range(0..4);
                    if c > 0 {
                        out.insert((i, st), c);
                    }
                }
            }
            assert_eq!(eval_p_out(&g, &out).unwrap(), eval_p_out_closed(&g, &out).unwrap());
        }
    }
}

#[test]
fn out_of_hypothesis_probe() {
    let g = CycleGraph::new(-2, 1, s("-2,-1,1")).unwrap();
    let y: Vec<Ratio> = [3, 5, 7, 11].iter().map(|&v| ratio_int(v)).collect();
    assert_ne!(eval_p(&g, &y).unwrap(), eval_p_closed(&g, &y).unwrap());
}

fn formula_profiles(max_n: u64) -> Vec<(StepSet, Profile)> {
    let mut out = Vec::new();
    for st in ["-1,1", "-1,0,1", "0,1", "1", "-2,-1,1", "-2,0,1"] {
        let steps = s(st);
        for n in 1..=max_n {
            for p in all_profiles(n) {
                if validate_profile_for(&steps, &p, Regime::of(&p)).is_ok() {
                    out.push((steps.clone(), p));
                }
            }
        }
    }
    out
}

#[test]
fn determinant_matches_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (steps, p) in formula_profiles(8) {
        let mut x = WeightAssignment::ones();
        for i in p.abscissas() {
            for st in steps.iter() {
                x.set(i, st, random_ratio(&mut rng));
            }
        }
        assert_eq!(
            laplacian_minor_det(&p, &steps, &x).unwrap(),
            laplacian_minor_closed(&p, &steps, &x).unwrap(),
            "S={steps} p={p}"
        );
        assert_eq!(cayley_from_spanning(&p, &steps, &x).unwrap(), eval_out_gf(&steps, &p, &x).unwrap());
        let ones = cayley_from_spanning(&p, &steps, &WeightAssignment::ones()).unwrap();
        assert_eq!(ones, Ratio::from_integer(count_cayley_profile(&steps, &p).unwrap().into()));
    }
}

#[test]
fn determinant_matches_spanning_tree_enumeration() {
    let b = EnumerationBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for (steps, p) in formula_profiles(6) {
        let mut x = WeightAssignment::ones();
        for i in p.abscissas() {
            for st in steps.iter() {
                x.set(i, st, ratio_int(rng.gen_range(1..4)));
            }
        }
        let sys = LaplacianSystem::new(&p, &steps, &x).unwrap();
        let direct = spanning_tree_sum(&sys.arcs(), sys.root(), &b).unwrap();
        assert_eq!(bareiss_det(sys.minor()).unwrap(), direct, "S={steps} p={p}");
    }
}

/// Every labeled tree on `k` nodes, as edge lists.
fn labeled_trees(k: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut parent = vec![0usize; k];
    fn rec(v: usize, k: usize, parent: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
        if v == k {
            let mut ok = true;
            for start in 1..k {
                let (mut u, mut steps) = (start, 0);
                while u != 0 && steps <= k {
                    u = parent[u];
                    steps += 1;
                }
                ok &= u == 0;
            }
            if ok {
                out.push((1..k).map(|u| (parent[u], u)).collect());
            }
            return;
        }
        for p in 0..k {
            if p != v {
                parent[v] = p;
                rec(v + 1, k, parent, out);
            }
        }
    }
    rec(1, k, &mut parent, &mut out);
    out
}

fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (1..=total - (parts as u64 - 1))
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

#[test]
fn tree_in_tree_three_ways() {
    let b = EnumerationBudget::default();
    assert_eq!(labeled_trees(4).len(), 16);
    for k in 1..=3usize {
        for edges in labeled_trees(k) {
            for n in k as u64..=6 {
                for counts in compositions(n, k) {
                    let t = TargetTree::new(counts, 0, edges.clone()).unwrap();
                    let formula = count_tree_in_tree(&t).unwrap();
                    assert_eq!(tree_in_tree_det(&t).unwrap(), formula);
                    assert_eq!(count_tree_morphisms(&t, &b).unwrap(), formula, "{t:?}");
                }
            }
        }
    }
}
