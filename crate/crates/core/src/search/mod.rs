//! Stochastic search for patrolling schedules with exact certification.
//!
//! Candidates are scored by a floating-point mirror of the coverage check.
//! Only [`verify`] decides whether a candidate is reported as certified.

mod candidate;
mod falsify;
mod objective;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coverage::verify;
use crate::rational::{rational_lcm_all, Rational};
use crate::schedule::{AgentSpec, Schedule};
use crate::strategies::bounds;

use candidate::{propose, Candidate, Grid, MoveParams, Mover, Route};
use objective::{score, Samples};

pub use falsify::{
    falsify_bound, falsify_bound_with, improve_ratio, FalsificationReport, RatioOutcome,
    SpeedMode, WeightMode,
};

/// Float objectives at or below this are treated as "looks covered".
const FLOAT_ZERO: f64 = 1e-9;

/// Where the annealing chain starts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum InitialCandidate {
    /// Each agent zigzags over a piece of the target fence proportional to
    /// its weighted speed.
    #[default]
    Proportional,
    /// Random speed-feasible waypoints.
    Random,
    /// A given schedule; positions past the target length are clamped.
    Warm(Schedule),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Number of candidate evaluations.
    pub budget: u64,
    pub waypoints_per_agent: usize,
    /// Breakpoints snap to multiples of `1 / grid_denominator`, refined as
    /// needed to hold the period, the target and the starting schedule.
    pub grid_denominator: u64,
    pub initial_temperature: f64,
    /// Temperature factor applied after every batch.
    pub cooling: f64,
    /// Worker threads used to score a batch. Does not affect results.
    pub workers: usize,
    pub batch_size: usize,
    /// Number of equal cells between float sample positions.
    pub sample_cells: usize,
    /// Common period; derived from the starting candidate when absent.
    pub period: Option<Rational>,
    pub initial: InitialCandidate,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            budget: 10_000,
            waypoints_per_agent: 8,
            grid_denominator: 840,
            initial_temperature: 1e-3,
            cooling: 0.999,
            workers: 1,
            batch_size: 8,
            sample_cells: 64,
            period: None,
            initial: InitialCandidate::Proportional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Certified,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    /// Present only when certified.
    pub best_schedule: Option<Schedule>,
    /// Exact uncovered area of the best candidate seen.
    pub best_uncovered_area: Rational,
    pub evaluations: u64,
    pub period: Rational,
    pub time_grid: u64,
    pub space_grid: u64,
}

impl SearchOutcome {
    pub fn is_certified(&self) -> bool {
        self.status == SearchStatus::Certified
    }
}

pub(crate) type Scorer = dyn Fn(&Candidate, &Grid, &[Mover], &Samples) -> f64 + Sync;

/// Anneals toward a schedule patrolling `[0, target_l]` with the given agents.
pub fn search(specs: &[AgentSpec], target_l: &Rational, cfg: &SearchConfig) -> SearchOutcome {
    run(specs, target_l, cfg, &score)
}

struct Setup {
    grid: Grid,
    movers: Vec<Mover>,
    start: Option<Candidate>,
}

fn natural_period(specs: &[AgentSpec], target: &Rational) -> Option<Rational> {
    let total = bounds(specs).trivial_upper;
    let trips: Vec<Rational> = specs
        .iter()
        .map(|s| &(s.weight() * target) * &(&Rational::integer(2) / &total))
        .collect();
    rational_lcm_all(&trips).ok()
}

fn setup(specs: &[AgentSpec], target: &Rational, cfg: &SearchConfig, rng: &mut ChaCha8Rng) -> Option<Setup> {
    let total = bounds(specs).trivial_upper;
    let warm = match &cfg.initial {
        InitialCandidate::Warm(s) if s.agents().len() == specs.len() => Some(s),
        _ => None,
    };
    let period = match (warm, &cfg.period) {
        (Some(s), _) => s.period().clone(),
        (None, Some(p)) => p.clone(),
        (None, None) => natural_period(specs, target)?,
    };
    let scale = target / &total;
    let mut cut = Rational::zero();
    let mut bounds_x = vec![target.clone()];
    let mut half_trips = Vec::new();
    for s in specs {
        cut += &(&s.weighted_speed() * &scale);
        bounds_x.push(cut.clone());
        half_trips.push(s.weight() * &scale);
    }
    let mut times = vec![period.clone()];
    times.extend(half_trips.iter().cloned());
    let mut positions = bounds_x.clone();
    if let Some(s) = warm {
        for a in s.agents() {
            for b in a.trajectory.breakpoints() {
                times.push(b.t.clone());
                positions.push(b.x.clone());
            }
        }
    }
    let grid = Grid::covering(cfg.grid_denominator, &times, &positions)?.with_extent(&period, target)?;
    let movers: Vec<Mover> = specs.iter().map(Mover::new).collect::<Option<_>>()?;
    if !movers.iter().all(|m| m.fits(&grid)) {
        return None;
    }
    let start = match &cfg.initial {
        InitialCandidate::Warm(_) => Candidate::from_schedule(warm?, &grid, &movers),
        InitialCandidate::Random => Some(Candidate::random(&grid, &movers, cfg.waypoints_per_agent, rng)),
        InitialCandidate::Proportional => {
            let mut lo = 0;
            let mut routes = Vec::with_capacity(specs.len());
            for (cut, half) in bounds_x[1..].iter().zip(&half_trips) {
                let hi = grid.space_units(cut)?;
                let route = grid
                    .time_units(half)
                    .and_then(|h| Candidate::zigzag_route(&grid, lo, hi, h))
                    .unwrap_or_else(|| Route::new(vec![(0, lo), (grid.period, lo)]));
                routes.push(route);
                lo = hi;
            }
            Some(Candidate { routes })
        }
    };
    Some(Setup { grid, movers, start })
}

fn unreachable_outcome(target: &Rational, cfg: &SearchConfig) -> SearchOutcome {
    let period = cfg.period.clone().unwrap_or_else(Rational::one);
    SearchOutcome {
        status: SearchStatus::Exhausted,
        best_schedule: None,
        best_uncovered_area: target * &period,
        evaluations: 0,
        period,
        time_grid: cfg.grid_denominator,
        space_grid: cfg.grid_denominator,
    }
}

pub(crate) fn run(
    specs: &[AgentSpec],
    target: &Rational,
    cfg: &SearchConfig,
    scorer: &Scorer,
) -> SearchOutcome {
    assert!(target.is_positive(), "target length must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let Some(Setup { grid, movers, start }) = (!specs.is_empty())
        .then(|| setup(specs, target, cfg, &mut rng))
        .flatten()
    else {
        return unreachable_outcome(target, cfg);
    };
    let mut cur = start.unwrap_or_else(|| Candidate::random(&grid, &movers, cfg.waypoints_per_agent, &mut rng));
    debug_assert!(cur.is_feasible(&grid, &movers));
    let outcome = |status, best_schedule, area, evaluations| SearchOutcome {
        status,
        best_schedule,
        best_uncovered_area: area,
        evaluations,
        period: grid.time_value(grid.period),
        time_grid: grid.time as u64,
        space_grid: grid.space as u64,
    };
    let params = MoveParams {
        space_step: 0.05,
        time_step: 0.05,
        max_waypoints: cur
            .routes
            .iter()
            .map(|r| r.points.len() - 1)
            .max()
            .unwrap_or(0)
            .max(cfg.waypoints_per_agent),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .expect("thread pool");
    let mut samples = Samples::uniform(&grid, cfg.sample_cells.max(1));
    let mut rejected: Vec<Candidate> = Vec::new();
    let space_grid = grid.space as f64;

    // Exact check of a float-clean candidate; on failure the witness becomes a sample.
    let mut certify = |c: &Candidate, samples: &mut Samples| -> Option<Schedule> {
        if rejected.contains(c) {
            return None;
        }
        let s = c.to_schedule(&grid, &movers);
        let verdict = verify(&s).expect("feasible candidates are valid schedules");
        if verdict.patrols() {
            return Some(s);
        }
        let w = verdict.witness.expect("failing verdict has a witness");
        samples.refine(w.x.to_f64() * space_grid);
        rejected.push(c.clone());
        None
    };

    let mut evaluations = 1;
    let mut cur_obj = scorer(&cur, &grid, &movers, &samples);
    if cur_obj <= FLOAT_ZERO {
        if let Some(s) = certify(&cur, &mut samples) {
            return outcome(SearchStatus::Certified, Some(s), Rational::zero(), evaluations);
        }
        cur_obj = scorer(&cur, &grid, &movers, &samples);
    }
    let mut best = cur.clone();
    let mut best_obj = cur_obj;
    let mut temp = cfg.initial_temperature;
    let batch = cfg.batch_size.max(1) as u64;
    while evaluations < cfg.budget {
        let n = batch.min(cfg.budget - evaluations);
        let proposals: Vec<Candidate> = (0..n)
            .map(|_| propose(&cur, &grid, &movers, &params, &mut rng))
            .collect();
        let scores: Vec<f64> = pool.install(|| {
            proposals
                .par_iter()
                .map(|p| scorer(p, &grid, &movers, &samples))
                .collect()
        });
        evaluations += n;
        let (idx, mut obj) = scores
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("non-empty batch");
        let u: f64 = rng.random();
        if obj <= FLOAT_ZERO {
            if let Some(s) = certify(&proposals[idx], &mut samples) {
                return outcome(SearchStatus::Certified, Some(s), Rational::zero(), evaluations);
            }
            obj = scorer(&proposals[idx], &grid, &movers, &samples);
            cur_obj = scorer(&cur, &grid, &movers, &samples);
            best_obj = scorer(&best, &grid, &movers, &samples);
        }
        if obj <= cur_obj || u < (-(obj - cur_obj) / temp).exp() {
            cur = proposals[idx].clone();
            cur_obj = obj;
        }
        if cur_obj < best_obj {
            best = cur.clone();
            best_obj = cur_obj;
        }
        temp *= cfg.cooling;
    }
    let area = verify(&best.to_schedule(&grid, &movers))
        .expect("feasible candidates are valid schedules")
        .uncovered_area;
    outcome(SearchStatus::Exhausted, None, area, evaluations)
}
