use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::profile::{Profile, Regime};
use crate::steps::StepSet;
use crate::vertex::{Vertex, VertexSet};

/// An S-function `f : V ∖ {0¹} → V`, stored densely: `image[v]` is `None` exactly at `0¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SFunction {
    vertices: Arc<VertexSet>,
    steps: StepSet,
    image: Vec<Option<usize>>,
}

impl SFunction {
    pub fn new(vertices: Arc<VertexSet>, steps: StepSet, image: Vec<Option<usize>>) -> Result<Self> {
        if image.len() != vertices.len() {
            return Err(Error::InvalidStructure(format!(
                "image has {} entries for {} vertices",
                image.len(),
                vertices.len()
            )));
        }
        let root = vertices.first(0);
        for (v, &w) in image.iter().enumerate() {
            match w {
                None if v != root => {
                    return Err(Error::InvalidStructure(format!(
                        "f is undefined at {}",
                        vertices.vertex(v)
                    )))
                }
                Some(_) if v == root => {
                    return Err(Error::InvalidStructure("f must be undefined at 0^1".into()))
                }
                Some(w) => {
                    if w >= vertices.len() {
                        return Err(Error::InvalidStructure(format!("image id {w} out of range")));
                    }
                    let s = vertices.abscissa(v) - vertices.abscissa(w);
                    if !steps.contains(s) {
                        return Err(Error::InvalidStructure(format!(
                            "{} -> {} uses step {s} not in S",
                            vertices.vertex(v),
                            vertices.vertex(w)
                        )));
                    }
                }
                None => {}
            }
        }
        Ok(SFunction { vertices, steps, image })
    }

    pub fn from_pairs(profile: Profile, steps: StepSet, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let vertices = Arc::new(VertexSet::new(profile));
        let mut image = vec![None; vertices.len()];
        for &(a, b) in pairs {
            let (a, b) = (vertices.resolve(a)?, vertices.resolve(b)?);
            if image[a].is_some() {
                return Err(Error::InvalidStructure(format!(
                    "image of {} given twice",
                    vertices.vertex(a)
                )));
            }
            image[a] = Some(b);
        }
        SFunction::new(vertices, steps, image)
    }

    pub fn vertices(&self) -> &Arc<VertexSet> {
        &self.vertices
    }

    pub fn steps(&self) -> &StepSet {
        &self.steps
    }

    pub fn profile(&self) -> &Profile {
        self.vertices.profile()
    }

    pub fn image(&self) -> &[Option<usize>] {
        &self.image
    }

    pub fn apply(&self, v: usize) -> Option<usize> {
        self.image[v]
    }

    /// Step `s` with `f(v) ∈ V_{i−s}`; `None` for `0¹` (the ε out-type).
    pub fn out_step(&self, v: usize) -> Option<i64> {
        self.image[v].map(|w| self.vertices.abscissa(v) - self.vertices.abscissa(w))
    }

    pub fn pairs(&self) -> Vec<(Vertex, Vertex)> {
        self.image
            .iter()
            .enumerate()
            .filter_map(|(v, w)| w.map(|w| (self.vertices.vertex(v), self.vertices.vertex(w))))
            .collect()
    }

    /// Whether `f` is injective on each `V_i`.
    pub fn is_injective_per_level(&self) -> bool {
        let vs = &self.vertices;
        vs.profile().abscissas().all(|i| {
            let mut seen: Vec<usize> = vs.level(i).filter_map(|v| self.image[v]).collect();
            let len = seen.len();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == len
        })
    }

    /// Checks condition (F) for the given regime.
    pub fn check_condition_f(&self, regime: Regime) -> Result<()> {
        let vs = &self.vertices;
        crate::profile::validate_profile_for(&self.steps, vs.profile(), regime)?;
        let fail = |i: i64, want: &str| {
            Err(Error::PreconditionViolated(format!(
                "condition (F) requires f({i}^1) {want}, found {}",
                self.image[vs.first(i)].map(|w| vs.vertex(w).to_string()).unwrap_or("undefined".into())
            )))
        };
        for i in 1..=vs.r() {
            if self.image[vs.first(i)] != Some(vs.first(i - 1)) {
                return fail(i, &format!("= {}^1", i - 1));
            }
        }
        if regime == Regime::General {
            for i in vs.ell()..=-2 {
                if self.image[vs.first(i)] != Some(vs.first(i + 1)) {
                    return fail(i, &format!("= {}^1", i + 1));
                }
            }
            match self.image[vs.first(-1)] {
                Some(w) if vs.abscissa(w) == 0 => {}
                _ => return fail(-1, "in V_0"),
            }
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> Value {
        let image: Vec<[i64; 4]> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| [a.abscissa, a.index as i64, b.abscissa, b.index as i64])
            .collect();
        json!({
            "image": image,
            "profile": self.profile().to_string(),
            "steps": self.steps.steps(),
        })
    }

    /// Canonical JSON: sorted keys, no whitespace, image listed in vertex order.
    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("SFunction JSON: {m}"));
        let profile: Profile = v["profile"].as_str().ok_or_else(|| bad("missing profile"))?.parse()?;
        let steps: StepSet = serde_json::from_value(v["steps"].clone()).map_err(|e| bad(&e.to_string()))?;
        let quads: Vec<[i64; 4]> =
            serde_json::from_value(v["image"].clone()).map_err(|e| bad(&e.to_string()))?;
        let mut pairs = Vec::with_capacity(quads.len());
        for q in quads {
            let a = Vertex::try_from([q[0], q[1]]).map_err(|e| bad(&e))?;
            let b = Vertex::try_from([q[2], q[3]]).map_err(|e| bad(&e))?;
            pairs.push((a, b));
        }
        SFunction::from_pairs(profile, steps, &pairs)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        SFunction::from_json_value(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: i64, k: u32) -> Vertex {
        Vertex::new(i, k)
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let f = SFunction::from_pairs(
            "2,1".parse().unwrap(),
            "-1,1".parse().unwrap(),
            &[(v(1, 1), v(0, 1)), (v(0, 2), v(1, 1))],
        )
        .unwrap();
        let s = f.to_json();
        assert_eq!(s, r#"{"image":[[0,2,1,1],[1,1,0,1]],"profile":"2,1","steps":[-1,1]}"#);
        assert_eq!(SFunction::from_json(&s).unwrap(), f);
    }

    #[test]
    fn rejects_bad_steps_and_missing_images() {
        let p: Profile = "2,1".parse().unwrap();
        let s: StepSet = "-1,1".parse().unwrap();
        assert!(SFunction::from_pairs(p.clone(), s.clone(), &[(v(1, 1), v(0, 1))]).is_err());
        assert!(SFunction::from_pairs(p, s, &[(v(1, 1), v(0, 1)), (v(0, 2), v(0, 1))]).is_err());
    }

    #[test]
    fn condition_f_general() {
        let f = SFunction::from_pairs(
            "1;1".parse().unwrap(),
            "-1,1".parse().unwrap(),
            &[(v(-1, 1), v(0, 1))],
        )
        .unwrap();
        assert!(f.check_condition_f(Regime::General).is_ok());
        assert!(f.check_condition_f(Regime::Nonneg).is_err());
    }
}
