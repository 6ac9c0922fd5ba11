//! Integer-grid encoding of candidate schedules.
//!
//! Times are multiples of `1 / time_grid`, positions multiples of
//! `1 / space_grid`. Every move keeps each agent within the fence and within
//! its speed limit, checked in integer arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::rational::Rational;
use crate::schedule::{Agent, AgentSpec, Schedule};
use crate::trajectory::{Breakpoint, Trajectory};

/// Largest grid denominator accepted; keeps reach computations inside i128.
const GRID_LIMIT: i128 = 1 << 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Grid {
    pub time: i128,
    pub space: i128,
    /// Period in time units.
    pub period: i128,
    /// Fence length in space units.
    pub length: i128,
}

fn big_to_i128(n: &BigInt) -> Option<i128> {
    n.to_i128().filter(|v| v.abs() <= GRID_LIMIT)
}

impl Grid {
    /// Smallest grid refining `1 / base` that holds every listed time and
    /// position exactly.
    pub fn covering<'a, T, X>(base: u64, times: T, positions: X) -> Option<Grid>
    where
        T: IntoIterator<Item = &'a Rational>,
        X: IntoIterator<Item = &'a Rational>,
    {
        let base = BigInt::from(base.max(1));
        let time = times.into_iter().fold(base.clone(), |g, r| g.lcm(r.denom()));
        let space = positions.into_iter().fold(base, |g, r| g.lcm(r.denom()));
        Some(Grid {
            time: big_to_i128(&time)?,
            space: big_to_i128(&space)?,
            period: 0,
            length: 0,
        })
    }

    pub fn with_extent(mut self, period: &Rational, length: &Rational) -> Option<Grid> {
        self.period = self.time_units(period)?;
        self.length = self.space_units(length)?;
        Some(self)
    }

    fn units(r: &Rational, grid: i128) -> Option<i128> {
        let scaled = r * &Rational::from(BigInt::from(grid));
        if !scaled.is_integer() {
            return None;
        }
        big_to_i128(scaled.numer())
    }

    pub fn time_units(&self, t: &Rational) -> Option<i128> {
        Self::units(t, self.time)
    }

    pub fn space_units(&self, x: &Rational) -> Option<i128> {
        Self::units(x, self.space)
    }

    pub fn time_value(&self, n: i128) -> Rational {
        Rational::from_bigints(BigInt::from(n), BigInt::from(self.time)).expect("grid > 0")
    }

    pub fn space_value(&self, n: i128) -> Rational {
        Rational::from_bigints(BigInt::from(n), BigInt::from(self.space)).expect("grid > 0")
    }
}

/// One agent's waypoints. `points[0]` is at time 0 and the last point is at
/// the period with the same position; the agent follows them delayed by
/// `shift` time units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Route {
    pub points: Vec<(i128, i128)>,
    pub shift: i128,
}

impl Route {
    pub fn new(points: Vec<(i128, i128)>) -> Self {
        Self { points, shift: 0 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Mover {
    pub spec: AgentSpec,
    speed_num: i128,
    speed_den: i128,
    pub weight: f64,
}

impl Mover {
    pub fn new(spec: &AgentSpec) -> Option<Self> {
        let v = spec.speed();
        Some(Self {
            speed_num: big_to_i128(v.numer())?,
            speed_den: big_to_i128(v.denom())?,
            weight: spec.weight().to_f64(),
            spec: spec.clone(),
        })
    }

    /// Largest position change (space units) possible in `dt` time units.
    pub fn reach(&self, grid: &Grid, dt: i128) -> i128 {
        (self.speed_num * dt * grid.space).div_euclid(self.speed_den * grid.time)
    }

    /// Least time (time units) needed to move `dx` space units.
    pub fn min_time(&self, grid: &Grid, dx: i128) -> i128 {
        let num = dx.abs() * self.speed_den * grid.time;
        let den = self.speed_num * grid.space;
        num.div_euclid(den) + i128::from(num.rem_euclid(den) != 0)
    }

    /// Whether reach and min_time stay inside i128 on this grid.
    pub fn fits(&self, grid: &Grid) -> bool {
        let a = self
            .speed_num
            .checked_mul(grid.period)
            .and_then(|v| v.checked_mul(grid.space))
            .and_then(|v| v.checked_mul(self.speed_den));
        let b = grid
            .length
            .checked_mul(self.speed_den)
            .and_then(|v| v.checked_mul(grid.time))
            .and_then(|v| v.checked_mul(self.speed_num));
        a.is_some() && b.is_some()
    }

    fn leg_ok(&self, grid: &Grid, a: (i128, i128), b: (i128, i128)) -> bool {
        b.0 > a.0 && (b.1 - a.1).abs() <= self.reach(grid, b.0 - a.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Candidate {
    pub routes: Vec<Route>,
}

fn clamp_window(lo: i128, hi: i128, x: i128) -> i128 {
    x.max(lo).min(hi)
}

fn intersect(a: (i128, i128), b: (i128, i128)) -> Option<(i128, i128)> {
    let lo = a.0.max(b.0);
    let hi = a.1.min(b.1);
    (lo <= hi).then_some((lo, hi))
}

impl Candidate {
    pub fn is_feasible(&self, grid: &Grid, movers: &[Mover]) -> bool {
        self.routes.iter().zip(movers).all(|(r, m)| {
            let p = &r.points;
            p.len() >= 2
                && p[0].0 == 0
                && p[p.len() - 1].0 == grid.period
                && p[0].1 == p[p.len() - 1].1
                && p.iter().all(|&(_, x)| (0..=grid.length).contains(&x))
                && p.windows(2).all(|w| m.leg_ok(grid, w[0], w[1]))
        })
    }

    pub fn to_schedule(&self, grid: &Grid, movers: &[Mover]) -> Schedule {
        let period = grid.time_value(grid.period);
        let agents = self
            .routes
            .iter()
            .zip(movers)
            .map(|(r, m)| {
                let points = r
                    .points
                    .iter()
                    .map(|&(t, x)| Breakpoint::new(grid.time_value(t), grid.space_value(x)))
                    .collect();
                let traj = Trajectory::new(period.clone(), points)
                    .expect("feasible routes form trajectories")
                    .time_shift(&grid.time_value(r.shift));
                Agent::new(m.spec.clone(), traj)
            })
            .collect();
        Schedule::new(grid.space_value(grid.length), period, agents)
    }

    /// Reads a schedule onto the grid. Positions beyond the fence are
    /// clamped; `None` if a breakpoint is off the grid or clamping breaks a
    /// speed limit.
    pub fn from_schedule(s: &Schedule, grid: &Grid, movers: &[Mover]) -> Option<Candidate> {
        if s.period() != &grid.time_value(grid.period) || s.agents().len() != movers.len() {
            return None;
        }
        let routes = s
            .agents()
            .iter()
            .map(|a| {
                let points = a
                    .trajectory
                    .breakpoints()
                    .iter()
                    .map(|b| {
                        Some((
                            grid.time_units(&b.t)?,
                            grid.space_units(&b.x)?.clamp(0, grid.length),
                        ))
                    })
                    .collect::<Option<Vec<_>>>()?;
                Some(Route::new(points))
            })
            .collect::<Option<Vec<_>>>()?;
        let c = Candidate { routes };
        c.is_feasible(grid, movers).then_some(c)
    }

    /// Full-speed zigzag over `[lo, hi]` starting at `lo`, as many round trips
    /// as fit the period. `None` unless the trip divides the period on the grid.
    pub fn zigzag_route(grid: &Grid, lo: i128, hi: i128, half_trip: i128) -> Option<Route> {
        if half_trip <= 0 || grid.period % (2 * half_trip) != 0 {
            return None;
        }
        let legs = grid.period / half_trip;
        let points = (0..=legs)
            .map(|k| (k * half_trip, if k % 2 == 0 { lo } else { hi }))
            .collect();
        Some(Route::new(points))
    }

    pub fn random(
        grid: &Grid,
        movers: &[Mover],
        waypoints: usize,
        rng: &mut ChaCha8Rng,
    ) -> Candidate {
        let routes = movers
            .iter()
            .map(|m| {
                let inner = waypoints.saturating_sub(1).min(grid.period as usize - 1);
                let mut times: Vec<i128> =
                    (0..inner).map(|_| rng.random_range(1..grid.period)).collect();
                times.sort_unstable();
                times.dedup();
                times.push(grid.period);
                let x0 = rng.random_range(0..=grid.length);
                let mut points = vec![(0, x0)];
                for &t in &times[..times.len() - 1] {
                    let (tp, xp) = *points.last().expect("non-empty");
                    let step = m.reach(grid, t - tp);
                    let back = m.reach(grid, grid.period - t);
                    let window = intersect((xp - step, xp + step), (x0 - back, x0 + back))
                        .and_then(|w| intersect(w, (0, grid.length)));
                    if let Some((lo, hi)) = window {
                        points.push((t, rng.random_range(lo..=hi)));
                    }
                }
                points.push((grid.period, x0));
                Route::new(points)
            })
            .collect();
        let c = Candidate { routes };
        debug_assert!(c.is_feasible(grid, movers));
        c
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct MoveParams {
    pub space_step: f64,
    pub time_step: f64,
    pub max_waypoints: usize,
}

/// One random local change. Returns an unchanged copy when the drawn move
/// is infeasible.
pub(crate) fn propose(
    c: &Candidate,
    grid: &Grid,
    movers: &[Mover],
    params: &MoveParams,
    rng: &mut ChaCha8Rng,
) -> Candidate {
    let mut next = c.clone();
    let a = rng.random_range(0..movers.len());
    let m = &movers[a];
    let route = &mut next.routes[a];
    let pts = &mut route.points;
    let n = pts.len();
    // Step sizes spread log-uniformly over two decades below the nominal step.
    let shrink = 10f64.powf(-rng.random_range(0.0..2.0));
    let space_noise = Normal::new(0.0, params.space_step * shrink).expect("finite step");
    let time_noise = Normal::new(0.0, params.time_step * shrink).expect("finite step");
    match rng.random_range(0..12u32) {
        0..=4 => {
            // Position nudge; index 0 stands for the closing point too.
            let j = rng.random_range(0..n - 1);
            let (prev, next_pt) = if j == 0 {
                ((pts[n - 2].0 - grid.period, pts[n - 2].1), pts[1])
            } else {
                (pts[j - 1], pts[j + 1])
            };
            let r1 = m.reach(grid, pts[j].0 - prev.0);
            let r2 = m.reach(grid, next_pt.0 - pts[j].0);
            let window = intersect((prev.1 - r1, prev.1 + r1), (next_pt.1 - r2, next_pt.1 + r2))
                .and_then(|w| intersect(w, (0, grid.length)));
            if let Some((lo, hi)) = window {
                let step = (space_noise.sample(rng) * grid.length as f64).round() as i128;
                let x = clamp_window(lo, hi, pts[j].1 + step);
                pts[j].1 = x;
                if j == 0 {
                    pts[n - 1].1 = x;
                }
            }
        }
        5..=6 if n > 2 => {
            let j = rng.random_range(1..n - 1);
            let lo = pts[j - 1].0 + m.min_time(grid, pts[j].1 - pts[j - 1].1).max(1);
            let hi = pts[j + 1].0 - m.min_time(grid, pts[j + 1].1 - pts[j].1).max(1);
            if lo <= hi {
                let step = (time_noise.sample(rng) * grid.period as f64).round() as i128;
                pts[j].0 = clamp_window(lo, hi, pts[j].0 + step);
            }
        }
        7 if n - 1 < params.max_waypoints => {
            let j = rng.random_range(0..n - 1);
            let (a0, b0) = (pts[j], pts[j + 1]);
            if b0.0 - a0.0 >= 2 {
                let t = rng.random_range(a0.0 + 1..b0.0);
                let r1 = m.reach(grid, t - a0.0);
                let r2 = m.reach(grid, b0.0 - t);
                let window = intersect((a0.1 - r1, a0.1 + r1), (b0.1 - r2, b0.1 + r2))
                    .and_then(|w| intersect(w, (0, grid.length)));
                if let Some((lo, hi)) = window {
                    pts.insert(j + 1, (t, rng.random_range(lo..=hi)));
                }
            }
        }
        8 if n > 2 => {
            let j = rng.random_range(1..n - 1);
            if m.leg_ok(grid, pts[j - 1], pts[j + 1]) {
                pts.remove(j);
            }
        }
        9 if n > 2 => {
            // Same motion, re-based so that waypoint j sits at time 0.
            let j = rng.random_range(1..n - 1);
            let tj = pts[j].0;
            let mut rotated: Vec<(i128, i128)> =
                pts[j..].iter().map(|&(t, x)| (t - tj, x)).collect();
            rotated.extend(pts[1..=j].iter().map(|&(t, x)| (t + grid.period - tj, x)));
            *pts = rotated;
            route.shift = (route.shift + tj).rem_euclid(grid.period);
        }
        10..=11 => {
            let step = (time_noise.sample(rng) * grid.period as f64).round() as i128;
            route.shift = (route.shift + step).rem_euclid(grid.period);
        }
        _ => {}
    }
    next
}
