//! Schedule constructors and length bounds.

use thiserror::Error;

use crate::rational::{rational_lcm, rational_lcm_all, Rational, RationalError};
use crate::schedule::{Agent, AgentSpec, Schedule};
use crate::trajectory::{Breakpoint, Trajectory, TrajectoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("at least one agent is required")]
    NoAgents,
    #[error("fence length must be positive, got {0}")]
    NonPositiveLength(Rational),
    #[error("fence length {requested} exceeds the partition bound {bound}")]
    TooLong { requested: Rational, bound: Rational },
    #[error("replica count must be positive")]
    ZeroReplicas,
    #[error("stretch factor must exceed 1, got {0}")]
    BadStretch(Rational),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// Sum of weighted speeds and the two lengths derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    /// `sum(v_i * T_i) / 2`, what the partition strategy patrols.
    pub partition_length: Rational,
    /// `sum(v_i * T_i)`; no schedule patrols a longer fence.
    pub trivial_upper: Rational,
}

impl BoundsReport {
    pub fn ratio_of(&self, l: &Rational) -> Rational {
        l / &self.trivial_upper
    }
}

pub fn bounds(specs: &[AgentSpec]) -> BoundsReport {
    let trivial_upper: Rational = specs.iter().map(AgentSpec::weighted_speed).sum();
    BoundsReport {
        partition_length: &trivial_upper / &Rational::integer(2),
        trivial_upper,
    }
}

/// Fence length over the sum of weighted speeds.
pub fn ratio(s: &Schedule) -> Rational {
    bounds(&s.specs()).ratio_of(s.fence_length())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmentOrder {
    /// Segments tile the fence in the order the agents are given.
    #[default]
    Input,
    /// Slowest agent nearest 0; ties keep input order.
    BySpeed,
}

/// Each agent zigzags at full speed over its own piece of the fence, pieces
/// proportional to `v_i * T_i`.
pub fn partition_schedule(
    specs: &[AgentSpec],
    length: Option<&Rational>,
) -> Result<Schedule, StrategyError> {
    partition_schedule_ordered(specs, length, SegmentOrder::Input)
}

pub fn partition_schedule_ordered(
    specs: &[AgentSpec],
    length: Option<&Rational>,
    order: SegmentOrder,
) -> Result<Schedule, StrategyError> {
    if specs.is_empty() {
        return Err(StrategyError::NoAgents);
    }
    let report = bounds(specs);
    let l = length.cloned().unwrap_or_else(|| report.partition_length.clone());
    if !l.is_positive() {
        return Err(StrategyError::NonPositiveLength(l));
    }
    if l > report.partition_length {
        return Err(StrategyError::TooLong {
            requested: l,
            bound: report.partition_length,
        });
    }
    let mut ordered: Vec<&AgentSpec> = specs.iter().collect();
    if order == SegmentOrder::BySpeed {
        ordered.sort_by(|a, b| a.speed().cmp(b.speed()));
    }
    let scale = &l / &report.trivial_upper;
    let pieces: Vec<Rational> = ordered.iter().map(|s| &s.weighted_speed() * &scale).collect();
    let trips: Vec<Rational> = pieces
        .iter()
        .zip(&ordered)
        .map(|(len, s)| &(len + len) / s.speed())
        .collect();
    let period = rational_lcm_all(&trips)?;
    let mut start = Rational::zero();
    let mut agents = Vec::with_capacity(specs.len());
    for (len, spec) in pieces.iter().zip(ordered) {
        let end = &start + len;
        let traj = Trajectory::zigzag(&start, &end, spec.speed(), &Rational::zero(), &period)?;
        agents.push(Agent::new(spec.clone(), traj));
        start = end;
    }
    Ok(Schedule::new(l, period, agents))
}

/// Partition schedule whose last segment is lengthened so that the fence
/// becomes `factor` times the partition bound.
///
/// The last agent keeps its full-speed zigzag over the longer segment and
/// waits at the segment's left end to line up with the common period, so
/// its far endpoint (the fence end) goes unvisited for longer than its
/// weight.
pub fn stretched_partition(
    specs: &[AgentSpec],
    factor: &Rational,
) -> Result<Schedule, StrategyError> {
    if factor <= &Rational::one() {
        return Err(StrategyError::BadStretch(factor.clone()));
    }
    let base = partition_schedule(specs, None)?;
    let l = base.fence_length();
    let new_l = l * factor;
    let mut agents = base.clone().into_agents();
    let last = agents.pop().expect("non-empty");
    let lo = last.trajectory.min_x().clone();
    let speed = last.spec.speed().clone();
    let trip = &(&(&new_l - &lo) * &Rational::integer(2)) / &speed;
    let old_period = base.period();
    let copies = (&trip / old_period).ceil();
    let period = old_period * &Rational::from(copies);
    let trips = (&period / &trip).floor();
    let leg = &trip / &Rational::integer(2);
    let mut points = Vec::new();
    let mut t = Rational::zero();
    let mut k = num_bigint::BigInt::from(0);
    while k < trips {
        points.push(Breakpoint::new(t.clone(), lo.clone()));
        t += &leg;
        points.push(Breakpoint::new(t.clone(), new_l.clone()));
        t += &leg;
        k += 1;
    }
    points.push(Breakpoint::new(t.clone(), lo.clone()));
    if t < period {
        points.push(Breakpoint::new(period.clone(), lo.clone()));
    }
    let stretched = Trajectory::new(period.clone(), points)?;
    let mut out: Vec<Agent> = agents
        .into_iter()
        .map(|a| -> Result<Agent, StrategyError> {
            Ok(Agent::new(a.spec, a.trajectory.repeat(&period)?))
        })
        .collect::<Result<_, _>>()?;
    out.push(Agent::new(last.spec, stretched));
    Ok(Schedule::new(new_l, period, out))
}

/// Splits one agent into `m` copies of weight `T / m`, copy `j` delayed by
/// `j * T / m`. Together the copies cover exactly what the original covers.
pub fn replicate_shifted(agent: &Agent, m: usize) -> Result<Vec<Agent>, StrategyError> {
    if m == 0 {
        return Err(StrategyError::ZeroReplicas);
    }
    let count = Rational::integer(m as i64);
    let weight = agent.spec.weight() / &count;
    let spec = AgentSpec::new(agent.spec.speed().clone(), weight.clone())
        .expect("positive speed and weight");
    Ok((0..m)
        .map(|j| {
            let delay = &weight * &Rational::integer(j as i64);
            Agent::new(spec.clone(), agent.trajectory.time_shift(&delay))
        })
        .collect())
}

/// Inverse of [`replicate_shifted`]: recognizes `m` equal-speed, equal-weight
/// agents that are consecutive delays of the first by its weight.
pub fn merge_replicas(agents: &[Agent]) -> Option<Agent> {
    let first = agents.first()?;
    let weight = first.spec.weight();
    for (j, a) in agents.iter().enumerate() {
        if a.spec != first.spec {
            return None;
        }
        let delay = weight * &Rational::integer(j as i64);
        if a.trajectory != first.trajectory.time_shift(&delay) {
            return None;
        }
    }
    let total = weight * &Rational::integer(agents.len() as i64);
    let spec = AgentSpec::new(first.spec.speed().clone(), total).ok()?;
    Some(Agent::new(spec, first.trajectory.clone()))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn table(period: &Rational, rows: &[(i64, i64, i64, i64)]) -> Trajectory {
    let points = rows
        .iter()
        .map(|&(tn, td, xn, xd)| Breakpoint::new(q(tn, td), q(xn, xd)))
        .collect();
    Trajectory::new(period.clone(), points).expect("static trajectory table is well formed")
}

fn unit_spec(speed: Rational) -> AgentSpec {
    AgentSpec::with_speed(speed).expect("positive literal speed")
}

fn full_fence_sweeper() -> Agent {
    let traj = Trajectory::zigzag(&q(0, 1), &q(7, 2), &q(1, 1), &q(0, 1), &q(7, 1))
        .expect("7 is one round trip of 7/2 at speed 1");
    Agent::new(AgentSpec::new(q(1, 1), q(4, 1)).expect("positive"), traj)
}

/// Speed 7/3. Sweeps `[0, 7/6]` with round trip 1 during `[4, 6]`, crosses
/// the fence, sweeps `[7/3, 7/2]` during `[1/2, 5/2]`.
fn fig1_fast_agent() -> Agent {
    let traj = table(
        &q(7, 1),
        &[
            (0, 1, 7, 3),
            (1, 2, 7, 2),
            (1, 1, 7, 3),
            (3, 2, 7, 2),
            (2, 1, 7, 3),
            (5, 2, 7, 2),
            (4, 1, 0, 1),
            (9, 2, 7, 6),
            (5, 1, 0, 1),
            (11, 2, 7, 6),
            (6, 1, 0, 1),
            (7, 1, 7, 3),
        ],
    );
    Agent::new(unit_spec(q(7, 3)), traj)
}

/// Speed 1/2. Passes `[2, 7/3]` leftward during `[4/3, 2]` and `[7/6, 3/2]`
/// rightward during `[29/6, 11/2]`, waiting at either end in between.
fn fig1_slow_agent() -> Agent {
    let traj = table(
        &q(7, 1),
        &[
            (0, 1, 9, 4),
            (1, 6, 7, 3),
            (4, 3, 7, 3),
            (11, 3, 7, 6),
            (29, 6, 7, 6),
            (7, 1, 9, 4),
        ],
    );
    Agent::new(unit_spec(q(1, 2)), traj)
}

/// Six agents with speeds 1, 1, 1, 1, 7/3, 1/2 patrolling a fence of length
/// 7/2 with period 7.
///
/// The four unit-speed agents sweep the whole fence and are delays of one
/// another by 1. They leave two triangles uncovered near the ends; the 7/3
/// agent covers all of them except two small triangles, which the 1/2 agent
/// covers.
pub fn fig1_schedule() -> Schedule {
    let mut agents = replicate_shifted(&full_fence_sweeper(), 4).expect("m > 0");
    agents.push(fig1_fast_agent());
    agents.push(fig1_slow_agent());
    Schedule::new(q(7, 2), q(7, 1), agents)
}

/// Three weighted agents `(1, T = 4)`, `(7/3, T = 1)`, `(1/2, T = 1)` on the
/// same fence: [`fig1_schedule`] with its four sweepers merged into one.
pub fn weighted_three_schedule() -> Schedule {
    Schedule::new(
        q(7, 2),
        q(7, 1),
        vec![full_fence_sweeper(), fig1_fast_agent(), fig1_slow_agent()],
    )
}

/// Six agents of speed 5 and three of speed 1 patrolling a fence of length
/// 50/3 with period 10/3.
///
/// The fast agents form two groups of three. The first sweeps `[0, 25/3]`
/// with delays 0, 1, 2; the second is its mirror image on `[25/3, 50/3]`
/// delayed by a further 2/3. Each group misses a triangle at either end of
/// its half, and one slow agent zigzags over each of the three places where
/// these triangles sit.
pub fn fig2_schedule() -> Schedule {
    let period = q(10, 3);
    let l = q(50, 3);
    let fast = unit_spec(q(5, 1));
    let slow = unit_spec(q(1, 1));
    let half = |phase: Rational| {
        Trajectory::zigzag(&q(0, 1), &q(25, 3), &q(5, 1), &phase, &period)
            .expect("10/3 is one round trip of 25/3 at speed 5")
    };
    let end_sweep = |phase: Rational| {
        Trajectory::zigzag(&q(0, 1), &q(5, 3), &q(1, 1), &phase, &period)
            .expect("10/3 is one round trip of 5/3 at speed 1")
    };
    let mut agents = Vec::with_capacity(9);
    for j in 0..3 {
        agents.push(Agent::new(fast.clone(), half(q(j, 1))));
    }
    for j in 0..3 {
        let traj = half(&q(j, 1) + &q(2, 3)).reflect(&l);
        agents.push(Agent::new(fast.clone(), traj));
    }
    agents.push(Agent::new(slow.clone(), end_sweep(q(3, 1))));
    let middle = Trajectory::zigzag(&q(15, 2), &q(55, 6), &q(1, 1), &q(1, 2), &period)
        .expect("10/3 is one round trip of 5/3 at speed 1");
    agents.push(Agent::new(slow.clone(), middle));
    agents.push(Agent::new(slow, end_sweep(q(1, 3)).reflect(&l)));
    Schedule::new(l, period, agents)
}

/// Lengthens the fence by `v * T / 2` and lets a new agent zigzag over the
/// added piece.
pub fn extend_with_agent(s: &Schedule, spec: AgentSpec) -> Result<Schedule, StrategyError> {
    let added = &spec.weighted_speed() / &Rational::integer(2);
    let lo = s.fence_length().clone();
    let hi = &lo + &added;
    let period = rational_lcm(s.period(), spec.weight())?;
    let mut agents: Vec<Agent> = s
        .agents()
        .iter()
        .map(|a| -> Result<Agent, StrategyError> {
            Ok(Agent::new(a.spec.clone(), a.trajectory.repeat(&period)?))
        })
        .collect::<Result<_, _>>()?;
    let traj = Trajectory::zigzag(&lo, &hi, spec.speed(), &Rational::zero(), &period)?;
    agents.push(Agent::new(spec, traj));
    Ok(Schedule::new(hi, period, agents))
}
