#![allow(dead_code)]

use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Upper-tail p-value of Pearson's statistic for uniformity of `draws` over `support`.
/// A draw outside the support fails immediately.
pub fn chi_square_uniform<T: Eq + Hash>(support: &[T], draws: &[T]) -> f64 {
    let mut tally: HashMap<&T, u64> = support.iter().map(|t| (t, 0)).collect();
    assert_eq!(tally.len(), support.len(), "support has duplicates");
    for d in draws {
        *tally.get_mut(d).expect("sample outside the exact support") += 1;
    }
    let expected = draws.len() as f64 / support.len() as f64;
    let stat: f64 = tally.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    if support.len() == 1 {
        return 1.0;
    }
    ChiSquared::new((support.len() - 1) as f64).unwrap().sf(stat)
}

/// Every distinct arrangement of the multiset with `counts[k]` copies of `values[k]`.
pub fn arrangements(values: &[i64], counts: &[u64]) -> Vec<Vec<i64>> {
    fn rec(values: &[i64], left: &mut Vec<u64>, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left.iter().all(|&c| c == 0) {
            out.push(cur.clone());
            return;
        }
        for k in 0..values.len() {
            if left[k] > 0 {
                left[k] -= 1;
                cur.push(values[k]);
                rec(values, left, cur, out);
                cur.pop();
                left[k] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(values, &mut counts.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Every vector `v` with `1 <= v[k] <= bounds[k]`.
pub fn boxes(bounds: &[u64]) -> Vec<Vec<u32>> {
    bounds.iter().fold(vec![Vec::new()], |acc, &b| {
        acc.into_iter()
            .flat_map(|v| {
                (1..=b as u32).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect()
    })
}
