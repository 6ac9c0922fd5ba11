//! Exact construction, verification and search of periodic fence-patrolling
//! schedules.
//!
//! A fence `[0, l]` is patrolled by agents with maximum speeds `v_i` and
//! weights `T_i`: every point must be visited by some agent `i` within every
//! window of length `T_i`. All coverage decisions use exact rationals.
// Errors carry the offending exact values.
#![allow(clippy::result_large_err)]


pub mod cli;
pub mod coverage;
pub mod document;
pub mod rational;
pub mod render;
pub mod schedule;
pub mod search;
pub mod strategies;
pub mod trajectory;

pub use coverage::{verify, Status, Verdict};
pub use document::ScheduleDocument;
pub use rational::{rational_lcm, Rational};
pub use render::{render_svg, RenderOptions};
pub use schedule::{validate_schedule, Agent, AgentSpec, Schedule};
pub use search::{search, SearchConfig, SearchOutcome, SearchStatus};
pub use strategies::{bounds, partition_schedule, ratio};
pub use trajectory::{Breakpoint, Trajectory};
