use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The set `S` of allowed abscissa increments. Always nonempty with maximum 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepSet {
    steps: Vec<i64>,
}

impl StepSet {
    pub fn new(steps: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut steps: Vec<i64> = steps.into_iter().collect();
        steps.sort_unstable();
        steps.dedup();
        match steps.last() {
            None => Err(Error::InvalidStepSet("step set is empty".into())),
            Some(&max) if max != 1 => {
                Err(Error::InvalidStepSet(format!("max S must be 1, got {max}")))
            }
            _ => Ok(StepSet { steps }),
        }
    }

    /// The interval `⟦m, 1⟧`.
    pub fn interval(m: i64) -> Result<Self> {
        if m > 1 {
            return Err(Error::InvalidStepSet(format!("empty interval {m}..1")));
        }
        StepSet::new(m..=1)
    }

    pub fn steps(&self) -> &[i64] {
        &self.steps
    }

    pub fn min(&self) -> i64 {
        self.steps[0]
    }

    pub fn max(&self) -> i64 {
        1
    }

    pub fn contains(&self, s: i64) -> bool {
        self.steps.binary_search(&s).is_ok()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_interval(&self) -> bool {
        self.steps.len() as i64 == 2 - self.min()
    }

    /// Width of a dense c-vector, indexed by `m..=1`.
    pub fn cvec_len(&self) -> usize {
        (2 - self.min()) as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.steps.iter().copied()
    }
}

impl fmt::Display for StepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Accepts a comma list (`-1,0,1`) or an interval (`-2..1`).
impl FromStr for StepSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad step {t:?} in {s:?}")))
        };
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(Error::Parse(format!("empty step interval {s:?}")));
            }
            return StepSet::new(a..=b);
        }
        let steps = s.split(',').map(parse).collect::<Result<Vec<_>>>()?;
        StepSet::new(steps)
    }
}

impl Serialize for StepSet {
    fn serialize<Se: Serializer>(&self, ser: Se) -> std::result::Result<Se::Ok, Se::Error> {
        self.steps.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StepSet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let steps = Vec::<i64>::deserialize(de)?;
        StepSet::new(steps).map_err(serde::de::Error::custom)
    }
}
