//! Exact determinants.

use num_traits::{One, Zero};

use crate::arith::Ratio;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 60;

/// Determinant by Bareiss elimination with row pivoting. Every division is exact.
pub fn bareiss_det(mut m: Vec<Vec<Ratio>>) -> Result<Ratio> {
    let n = m.len();
    if n > MAX_DIM {
        return Err(Error::BudgetExceeded(format!("{n}x{n} determinant (limit {MAX_DIM})")));
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidStructure("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(Ratio::one());
    }
    let mut negate = false;
    let mut prev = Ratio::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Ratio::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = Ratio::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio_int;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Ratio>> {
        rows.iter().map(|r| r.iter().map(|&x| ratio_int(x)).collect()).collect()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(bareiss_det(vec![]).unwrap(), ratio_int(1));
        assert_eq!(bareiss_det(mat(&[&[2, 1], &[1, 3]])).unwrap(), ratio_int(5));
        assert_eq!(bareiss_det(mat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 4]])).unwrap(), ratio_int(-4));
        assert_eq!(bareiss_det(mat(&[&[1, 2], &[2, 4]])).unwrap(), ratio_int(0));
    }
}
