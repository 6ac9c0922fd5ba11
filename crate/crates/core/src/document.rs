//! JSON interchange format for schedules.
//!
//! Rationals travel as strings such as `"7/3"`; unknown fields are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{Rational, RationalError};
use crate::schedule::{Agent, AgentSpec, AgentSpecError, Schedule};
use crate::trajectory::{Breakpoint, Trajectory, TrajectoryError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {found}, expected {FORMAT_VERSION}")]
    Version { found: u32 },
    #[error("{field}: {source}")]
    Rational {
        field: String,
        source: RationalError,
    },
    #[error("agents[{index}]: {source}")]
    Spec {
        index: usize,
        source: AgentSpecError,
    },
    #[error("agents[{index}].breakpoints: {source}")]
    Trajectory {
        index: usize,
        source: TrajectoryError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// How the schedule was produced, e.g. `"build partition"` or `"search"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_denominator: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDocument {
    pub speed: String,
    pub weight: String,
    pub breakpoints: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub format_version: u32,
    pub fence_length: String,
    pub period: String,
    pub agents: Vec<AgentDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn field(value: &str, name: impl FnOnce() -> String) -> Result<Rational, DocumentError> {
    value.parse().map_err(|source| DocumentError::Rational {
        field: name(),
        source,
    })
}

impl ScheduleDocument {
    pub fn from_schedule(s: &Schedule, metadata: Option<Metadata>) -> Self {
        let agents = s
            .agents()
            .iter()
            .map(|a| AgentDocument {
                speed: a.spec.speed().to_string(),
                weight: a.spec.weight().to_string(),
                breakpoints: a
                    .trajectory
                    .breakpoints()
                    .iter()
                    .map(|b| [b.t.to_string(), b.x.to_string()])
                    .collect(),
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            fence_length: s.fence_length().to_string(),
            period: s.period().to_string(),
            agents,
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version {
                found: doc.format_version,
            });
        }
        Ok(doc)
    }

    /// Indented JSON, one breakpoint pair per line, with a trailing newline.
    pub fn to_json(&self) -> String {
        let quote = |v: &str| serde_json::to_string(v).expect("strings serialize");
        let mut out = String::from("{\n");
        out += &format!("  \"format_version\": {},\n", self.format_version);
        out += &format!("  \"fence_length\": {},\n", quote(&self.fence_length));
        out += &format!("  \"period\": {},\n", quote(&self.period));
        out += "  \"agents\": [";
        for (i, a) in self.agents.iter().enumerate() {
            out += if i == 0 { "\n" } else { ",\n" };
            out += "    {\n";
            out += &format!("      \"speed\": {},\n", quote(&a.speed));
            out += &format!("      \"weight\": {},\n", quote(&a.weight));
            out += "      \"breakpoints\": [";
            for (j, [t, x]) in a.breakpoints.iter().enumerate() {
                out += if j == 0 { "\n" } else { ",\n" };
                out += &format!("        [{}, {}]", quote(t), quote(x));
            }
            out += if a.breakpoints.is_empty() { "]\n" } else { "\n      ]\n" };
            out += "    }";
        }
        out += if self.agents.is_empty() { "]" } else { "\n  ]" };
        if let Some(meta) = &self.metadata {
            let body = serde_json::to_string_pretty(meta).expect("metadata serializes");
            out += ",\n  \"metadata\": ";
            out += &body.replace('\n', "\n  ");
        }
        out += "\n}\n";
        out
    }

    /// Builds the schedule. Schedule invariants are not checked here; use
    /// [`Schedule::validate`].
    pub fn to_schedule(&self) -> Result<Schedule, DocumentError> {
        let fence_length = field(&self.fence_length, || "fence_length".into())?;
        let period = field(&self.period, || "period".into())?;
        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, a) in self.agents.iter().enumerate() {
            let speed = field(&a.speed, || format!("agents[{i}].speed"))?;
            let weight = field(&a.weight, || format!("agents[{i}].weight"))?;
            let spec = AgentSpec::new(speed, weight)
                .map_err(|source| DocumentError::Spec { index: i, source })?;
            let points = a
                .breakpoints
                .iter()
                .enumerate()
                .map(|(j, [t, x])| {
                    Ok(Breakpoint::new(
                        field(t, || format!("agents[{i}].breakpoints[{j}][0]"))?,
                        field(x, || format!("agents[{i}].breakpoints[{j}][1]"))?,
                    ))
                })
                .collect::<Result<Vec<_>, DocumentError>>()?;
            let trajectory = Trajectory::new(period.clone(), points)
                .map_err(|source| DocumentError::Trajectory { index: i, source })?;
            agents.push(Agent::new(spec, trajectory));
        }
        Ok(Schedule::new(fence_length, period, agents))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::fig2_schedule;

    #[test]
    fn round_trip() {
        let s = fig2_schedule();
        let meta = Metadata {
            name: Some("fig2".into()),
            ..Metadata::default()
        };
        let doc = ScheduleDocument::from_schedule(&s, Some(meta));
        let text = doc.to_json();
        let back = ScheduleDocument::parse(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_schedule().unwrap(), s);
        assert_eq!(back.to_json(), text);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value, serde_json::to_value(&doc).unwrap());
    }

    #[test]
    fn empty_lists_emit_valid_json() {
        let doc = ScheduleDocument {
            format_version: FORMAT_VERSION,
            fence_length: "1".into(),
            period: "1".into(),
            agents: vec![],
            metadata: Some(Metadata::default()),
        };
        assert_eq!(ScheduleDocument::parse(&doc.to_json()).unwrap(), doc);
    }

    #[test]
    fn errors_name_the_field() {
        let text = r#"{"format_version":1,"fence_length":"1","period":"2","agents":[
            {"speed":"1","weight":"1","breakpoints":[["0","0"],["1","7/0"],["2","0"]]}]}"#;
        let err = ScheduleDocument::parse(text).unwrap().to_schedule().unwrap_err();
        assert_eq!(err.to_string(), "agents[0].breakpoints[1][1]: zero denominator");
    }

    #[test]
    fn strictness() {
        let extra = r#"{"format_version":1,"fence_length":"1","period":"1","agents":[],"colour":"red"}"#;
        assert!(matches!(ScheduleDocument::parse(extra), Err(DocumentError::Json(_))));
        let future = r#"{"format_version":2,"fence_length":"1","period":"1","agents":[]}"#;
        assert!(matches!(
            ScheduleDocument::parse(future),
            Err(DocumentError::Version { found: 2 })
        ));
        let float = r#"{"format_version":1,"fence_length":"0.5","period":"1","agents":[]}"#;
        let err = ScheduleDocument::parse(float).unwrap().to_schedule().unwrap_err();
        assert!(err.to_string().starts_with("fence_length:"));
    }
}
