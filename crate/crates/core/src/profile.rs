use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::steps::StepSet;

/// Vertical profile `(n_ℓ, …, n_{-1}; n_0, …, n_r)` with every entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    ell: i64,
    counts: Vec<u64>,
}

impl Profile {
    pub fn new(ell: i64, counts: Vec<u64>) -> Result<Self> {
        if ell > 0 {
            return Err(Error::InvalidProfile(format!("ell must be <= 0, got {ell}")));
        }
        if (counts.len() as i64) < 1 - ell {
            return Err(Error::InvalidProfile("profile does not reach abscissa 0".into()));
        }
        if let Some(pos) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidProfile(format!(
                "n_{} = 0; every count must be positive",
                ell + pos as i64
            )));
        }
        Ok(Profile { ell, counts })
    }

    /// Profile with `ℓ = 0`.
    pub fn nonneg(counts: Vec<u64>) -> Result<Self> {
        Profile::new(0, counts)
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }

    pub fn r(&self) -> i64 {
        self.ell + self.counts.len() as i64 - 1
    }

    /// `n_i`, zero outside `[ℓ, r]`.
    pub fn n(&self, i: i64) -> u64 {
        if i < self.ell || i > self.r() {
            0
        } else {
            self.counts[(i - self.ell) as usize]
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn abscissas(&self) -> std::ops::RangeInclusive<i64> {
        self.ell..=self.r()
    }

    /// `Σ_{s∈S} n_{i−s}`, the number of possible parents of a vertex at `i`.
    pub fn parent_pool(&self, steps: &StepSet, i: i64) -> u64 {
        steps.iter().map(|s| self.n(i - s)).sum()
    }

    /// The same counts re-indexed so that the leftmost abscissa becomes 0.
    pub fn shifted_to_zero(&self) -> Profile {
        Profile { ell: 0, counts: self.counts.clone() }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let neg = (-self.ell) as usize;
        if neg == 0 {
            f.write_str(&join(&self.counts))
        } else {
            write!(f, "{};{}", join(&self.counts[..neg]), join(&self.counts[neg..]))
        }
    }
}

/// Notation: `"2;2,1"` is `(n_{-1}; n_0, n_1) = (2; 2, 1)`; no semicolon means `ℓ = 0`.
impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let list = |t: &str| -> Result<Vec<u64>> {
            t.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad profile entry {x:?} in {s:?}")))
                })
                .collect()
        };
        match s.trim().split_once(';') {
            Some((neg, nonneg)) => {
                let mut counts = list(neg)?;
                let ell = -(counts.len() as i64);
                counts.extend(list(nonneg)?);
                Profile::new(ell, counts)
            }
            None => Profile::new(0, list(s)?),
        }
    }
}

impl Serialize for Profile {
    fn serialize<Se: Serializer>(&self, ser: Se) -> std::result::Result<Se::Ok, Se::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which of the two bijective settings a profile belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `ℓ = 0`, any step set.
    Nonneg,
    /// `ℓ < 0` with `min S = −1`.
    General,
}

impl Regime {
    /// The regime a profile naturally falls in: nonneg iff `ℓ = 0`.
    pub fn of(profile: &Profile) -> Regime {
        if profile.ell() == 0 {
            Regime::Nonneg
        } else {
            Regime::General
        }
    }
}

/// Checks the hypotheses under which the product formulas and bijections apply.
pub fn validate_profile_for(steps: &StepSet, profile: &Profile, regime: Regime) -> Result<()> {
    if steps.max() != 1 {
        return Err(Error::HypothesisViolation("max S must equal 1".into()));
    }
    match regime {
        Regime::Nonneg if profile.ell() != 0 => Err(Error::HypothesisViolation(format!(
            "non-negative regime requires ell = 0, profile has ell = {}",
            profile.ell()
        ))),
        Regime::General if steps.min() != -1 => Err(Error::HypothesisViolation(format!(
            "general regime requires min S = -1, got min S = {}",
            steps.min()
        ))),
        Regime::General if profile.ell() >= 0 => Err(Error::HypothesisViolation(
            "general regime requires ell < 0".into(),
        )),
        _ => Ok(()),
    }
}

/// Hypothesis shared by all product formulas: `ℓ = 0` or `min S = −1`.
pub fn validate_formula_hypotheses(steps: &StepSet, profile: &Profile) -> Result<()> {
    validate_profile_for(steps, profile, Regime::of(profile))
}

/// Every profile of total size `n`: compositions of `n` with a marked position for abscissa 0.
pub fn all_profiles(n: u64) -> Vec<Profile> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut comps = Vec::new();
    compositions(n, &mut Vec::new(), &mut comps);
    for c in comps {
        for zero in 0..c.len() {
            out.push(Profile::new(-(zero as i64), c.clone()).expect("positive composition"));
        }
    }
    out.sort();
    out
}

fn compositions(rest: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    for k in 1..=rest {
        cur.push(k);
        compositions(rest - k, cur, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: Profile = "2;2,1".parse().unwrap();
        assert_eq!((p.ell(), p.r(), p.n(-1), p.n(0), p.n(1), p.n(2)), (-1, 1, 2, 2, 1, 0));
        assert_eq!(p.to_string(), "2;2,1");
        let q: Profile = "1,1,1,2,1;1".parse().unwrap();
        assert_eq!((q.ell(), q.r(), q.total()), (-5, 0, 7));
        assert_eq!("3".parse::<Profile>().unwrap().to_string(), "3");
        assert!("0,1".parse::<Profile>().is_err());
        assert!("1;".parse::<Profile>().is_err());
    }

    #[test]
    fn hypotheses() {
        let s = |t: &str| t.parse::<StepSet>().unwrap();
        let p = |t: &str| t.parse::<Profile>().unwrap();
        assert!(validate_profile_for(&s("-1,1"), &p("2;2,1"), Regime::General).is_ok());
        assert!(matches!(
            validate_profile_for(&s("-2,-1,1"), &p("1,1,1,2,1;1"), Regime::General),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(validate_profile_for(&s("1"), &p("1,2"), Regime::Nonneg).is_ok());
    }

    #[test]
    fn profile_counts() {
        // 2^{n-1} compositions, each with as many zero positions as parts
        assert_eq!(all_profiles(1).len(), 1);
        assert_eq!(all_profiles(2).len(), 3);
        assert_eq!(all_profiles(3).len(), 8);
    }
}
