//! The shared schedule data model.

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentSpecError {
    #[error("agent speed must be positive, got {0}")]
    NonPositiveSpeed(Rational),
    #[error("agent weight must be positive, got {0}")]
    NonPositiveWeight(Rational),
}

/// Maximum speed and idle allowance (weight) of one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentSpec {
    speed: Rational,
    weight: Rational,
}

impl AgentSpec {
    pub fn new(speed: Rational, weight: Rational) -> Result<Self, AgentSpecError> {
        if !speed.is_positive() {
            return Err(AgentSpecError::NonPositiveSpeed(speed));
        }
        if !weight.is_positive() {
            return Err(AgentSpecError::NonPositiveWeight(weight));
        }
        Ok(Self { speed, weight })
    }

    /// Unit-weight agent.
    pub fn with_speed(speed: Rational) -> Result<Self, AgentSpecError> {
        Self::new(speed, Rational::one())
    }

    pub fn speed(&self) -> &Rational {
        &self.speed
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    /// `speed * weight`, the agent's share in proportional splits.
    pub fn weighted_speed(&self) -> Rational {
        &self.speed * &self.weight
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Agent {
    pub spec: AgentSpec,
    pub trajectory: Trajectory,
}

impl Agent {
    pub fn new(spec: AgentSpec, trajectory: Trajectory) -> Self {
        Self { spec, trajectory }
    }
}

/// A periodic multi-agent strategy on the fence `[0, fence_length]`.
///
/// Construction does not enforce the schedule invariants; use
/// [`Schedule::validate`] (or [`validate_schedule`]) before trusting one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    fence_length: Rational,
    period: Rational,
    agents: Vec<Agent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    NonPositiveFenceLength(Rational),
    NonPositivePeriod(Rational),
    NoAgents,
    PeriodMismatch { expected: Rational, found: Rational },
    OutOfRange { x: Rational },
    SpeedExceeded { required: Rational, allowed: Rational },
}

/// One broken schedule invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub agent: Option<usize>,
    /// Breakpoint index for range violations, segment index for speed violations.
    pub segment: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.agent {
            write!(f, "agent {a}")?;
            if let Some(s) = self.segment {
                write!(f, ", segment {s}")?;
            }
            write!(f, ": ")?;
        }
        match &self.kind {
            ViolationKind::NonPositiveFenceLength(l) => {
                write!(f, "fence length must be positive, got {l}")
            }
            ViolationKind::NonPositivePeriod(p) => write!(f, "period must be positive, got {p}"),
            ViolationKind::NoAgents => write!(f, "schedule has no agents"),
            ViolationKind::PeriodMismatch { expected, found } => {
                write!(f, "trajectory period {found} differs from schedule period {expected}")
            }
            ViolationKind::OutOfRange { x } => write!(f, "position {x} is outside the fence"),
            ViolationKind::SpeedExceeded { required, allowed } => {
                write!(f, "segment needs speed {required} but the agent's maximum is {allowed}")
            }
        }
    }
}

impl Schedule {
    pub fn new(fence_length: Rational, period: Rational, agents: Vec<Agent>) -> Self {
        Self {
            fence_length,
            period,
            agents,
        }
    }

    pub fn fence_length(&self) -> &Rational {
        &self.fence_length
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn specs(&self) -> Vec<AgentSpec> {
        self.agents.iter().map(|a| a.spec.clone()).collect()
    }

    pub fn into_agents(self) -> Vec<Agent> {
        self.agents
    }

    pub fn with_fence_length(&self, fence_length: Rational) -> Self {
        Self {
            fence_length,
            ..self.clone()
        }
    }

    /// Common weight when every agent carries the same one.
    pub fn common_weight(&self) -> Option<&Rational> {
        let first = self.agents.first()?.spec.weight();
        self.agents
            .iter()
            .all(|a| a.spec.weight() == first)
            .then_some(first)
    }

    pub fn max_weight(&self) -> Rational {
        self.agents
            .iter()
            .map(|a| a.spec.weight().clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_schedule(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

/// Lists every broken schedule invariant; an empty list means the schedule is valid.
pub fn validate_schedule(s: &Schedule) -> Vec<Violation> {
    let mut out = Vec::new();
    let global = |kind| Violation {
        agent: None,
        segment: None,
        kind,
    };
    if !s.fence_length.is_positive() {
        out.push(global(ViolationKind::NonPositiveFenceLength(
            s.fence_length.clone(),
        )));
    }
    if !s.period.is_positive() {
        out.push(global(ViolationKind::NonPositivePeriod(s.period.clone())));
    }
    if s.agents.is_empty() {
        out.push(global(ViolationKind::NoAgents));
    }
    for (i, agent) in s.agents.iter().enumerate() {
        let traj = &agent.trajectory;
        if traj.period() != &s.period {
            out.push(Violation {
                agent: Some(i),
                segment: None,
                kind: ViolationKind::PeriodMismatch {
                    expected: s.period.clone(),
                    found: traj.period().clone(),
                },
            });
        }
        for (j, bp) in traj.breakpoints().iter().enumerate() {
            if bp.x.is_negative() || bp.x > s.fence_length {
                out.push(Violation {
                    agent: Some(i),
                    segment: Some(j),
                    kind: ViolationKind::OutOfRange { x: bp.x.clone() },
                });
            }
        }
        for (j, seg) in traj.segments().enumerate() {
            let required = seg.slope().abs();
            if &required > agent.spec.speed() {
                out.push(Violation {
                    agent: Some(i),
                    segment: Some(j),
                    kind: ViolationKind::SpeedExceeded {
                        required,
                        allowed: agent.spec.speed().clone(),
                    },
                });
            }
        }
    }
    out
}
