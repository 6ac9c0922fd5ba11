//! Shared test support: an independent sampling oracle, random schedule
//! generators and schedule transformations.

#![allow(dead_code)]

use fence_patrol::strategies::{partition_schedule, stretched_partition};
use fence_patrol::{Agent, AgentSpec, Breakpoint, Rational, Schedule, Trajectory};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Times at which one agent is at `x` during one period, as closed
/// intervals (points have equal ends). Computed straight from breakpoints.
fn visits(traj: &Trajectory, x: &Rational) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for w in traj.breakpoints().windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.x == b.x {
            if &a.x == x {
                out.push((a.t.clone(), b.t.clone()));
            }
        } else if (&a.x <= x && x <= &b.x) || (&b.x <= x && x <= &a.x) {
            let tau = &a.t + &(&(x - &a.x) * &(&(&b.t - &a.t) / &(&b.x - &a.x)));
            out.push((tau.clone(), tau));
        }
    }
    out
}

/// Whether the instant `t` is covered at `x`: some agent was at `x` at a
/// time in `[t - T, t)`, periodically extended.
pub fn point_covered(s: &Schedule, x: &Rational, t: &Rational) -> bool {
    let p = s.period();
    s.agents().iter().any(|a| {
        visits(&a.trajectory, x).iter().any(|(lo, hi)| {
            // Smallest representative of t - lo in (0, P].
            let mut d = (t - lo).rem_euclid(p);
            if d.is_zero() {
                d = p.clone();
            }
            d <= &(hi - lo) + a.spec.weight()
        })
    })
}

fn to_i128(n: &BigInt) -> i128 {
    n.to_i128().expect("oracle values fit in i128")
}

/// Samples `nx` evenly spaced positions (both fence ends included) and `nt`
/// instants `P * j / nt`. Returns the first uncovered sample, if any.
pub fn grid_uncovered(s: &Schedule, nx: i64, nt: i64) -> Option<(Rational, Rational)> {
    let p = s.period();
    let step_t = p / &Rational::integer(nt);
    for i in 0..nx {
        let x = s.fence_length() * &q(i, nx - 1);
        let mut windows: Vec<(Rational, Rational, Rational)> = Vec::new();
        for a in s.agents() {
            for (lo, hi) in visits(&a.trajectory, &x) {
                windows.push((lo.clone(), &hi - &lo, a.spec.weight().clone()));
            }
        }
        let mut den = step_t.denom().lcm(p.denom());
        for (lo, span, w) in &windows {
            den = den.lcm(lo.denom()).lcm(span.denom()).lcm(w.denom());
        }
        let scale = Rational::from(den);
        let int = |r: &Rational| {
            let v = r * &scale;
            debug_assert!(v.is_integer());
            to_i128(v.numer())
        };
        let pi = int(p);
        let step = int(&step_t);
        let ws: Vec<(i128, i128)> = windows
            .iter()
            .map(|(lo, span, w)| (int(lo), int(span) + int(w)))
            .collect();
        for j in 0..nt {
            let t = step * j as i128;
            let covered = ws.iter().any(|&(lo, reach)| {
                let mut d = (t - lo).rem_euclid(pi);
                if d == 0 {
                    d = pi;
                }
                d <= reach
            });
            if !covered {
                return Some((x, &step_t * &Rational::integer(j)));
            }
        }
    }
    None
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())].clone()
}

pub fn random_speed(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.random_range(1..=9), rng.random_range(1..=3))
}

/// `k` agents with speeds `n/d` (`n <= 9`, `d <= 3`) and weights from
/// `{1/2, 1, 2}` (all 1 unless `weighted`).
pub fn random_specs(rng: &mut ChaCha8Rng, k: usize, weighted: bool) -> Vec<AgentSpec> {
    (0..k)
        .map(|_| {
            let w = if weighted {
                pick(rng, &[q(1, 2), q(1, 1), q(2, 1)])
            } else {
                q(1, 1)
            };
            AgentSpec::new(random_speed(rng), w).unwrap()
        })
        .collect()
}

/// Closed trajectory through random grid points, with a speed that makes it
/// feasible.
fn random_agent(rng: &mut ChaCha8Rng, l: &Rational, p: &Rational, max_points: usize) -> Agent {
    let n = rng.random_range(2..=max_points);
    let mut ticks: Vec<i64> = (0..n - 2).map(|_| rng.random_range(1..12)).collect();
    ticks.sort_unstable();
    ticks.dedup();
    let x0 = l * &q(rng.random_range(0..=6), 6);
    let mut points = vec![Breakpoint::new(Rational::zero(), x0.clone())];
    for t in ticks {
        points.push(Breakpoint::new(p * &q(t, 12), l * &q(rng.random_range(0..=6), 6)));
    }
    points.push(Breakpoint::new(p.clone(), x0));
    let traj = Trajectory::new(p.clone(), points).unwrap();
    let needed = traj.max_speed();
    let speed = if needed.is_zero() {
        q(1, 1)
    } else {
        &needed * &pick(rng, &[q(1, 1), q(3, 2)])
    };
    let weight = p * &pick(rng, &[q(1, 4), q(1, 2), q(1, 1), q(3, 2)]);
    Agent::new(AgentSpec::new(speed, weight).unwrap(), traj)
}

/// Small schedule (k <= 3, at most 6 breakpoints per agent), drawn from a
/// mix of random motions, delayed partitions (which patrol) and stretched
/// partitions (which fail).
pub fn random_small_schedule(rng: &mut ChaCha8Rng) -> Schedule {
    let k = rng.random_range(1..=3);
    match rng.random_range(0..3) {
        0 => {
            let l = pick(rng, &[q(1, 2), q(1, 1), q(3, 2), q(2, 1)]);
            let p = pick(rng, &[q(1, 1), q(2, 1), q(3, 1)]);
            let agents = (0..k).map(|_| random_agent(rng, &l, &p, 6)).collect();
            Schedule::new(l, p, agents)
        }
        1 => {
            let specs = random_specs(rng, k, false);
            let bound = fence_patrol::bounds(&specs).partition_length;
            let l = &bound * &pick(rng, &[q(1, 2), q(3, 4), q(1, 1)]);
            let s = partition_schedule(&specs, Some(&l)).unwrap();
            let p = s.period().clone();
            let agents = s
                .into_agents()
                .into_iter()
                .map(|a| {
                    let delay = &p * &q(rng.random_range(0..12), 12);
                    Agent::new(a.spec, a.trajectory.time_shift(&delay))
                })
                .collect();
            Schedule::new(l, p, agents)
        }
        _ => {
            let specs = random_specs(rng, k, false);
            stretched_partition(&specs, &pick(rng, &[q(101, 100), q(5, 4)])).unwrap()
        }
    }
}

/// Random schedule whose fence is longer than the sum of weighted speeds.
pub fn random_overlong_schedule(rng: &mut ChaCha8Rng) -> Schedule {
    let k = rng.random_range(1..=4);
    let l = pick(rng, &[q(1, 1), q(2, 1), q(3, 1)]);
    let p = pick(rng, &[q(1, 1), q(2, 1), q(3, 1)]);
    let agents: Vec<Agent> = (0..k).map(|_| random_agent(rng, &l, &p, 8)).collect();
    let total: Rational = agents.iter().map(|a| a.spec.weighted_speed()).sum();
    let excess = pick(rng, &[q(1, 1000), q(1, 10), q(1, 1)]);
    // Shrink the speed budget below the fence length by scaling weights down.
    let factor = &l / &(&total * &(&q(1, 1) + &excess));
    let agents = agents
        .into_iter()
        .map(|a| {
            let w = a.spec.weight() * &factor.clone().min(q(1, 1));
            Agent::new(AgentSpec::new(a.spec.speed().clone(), w).unwrap(), a.trajectory)
        })
        .collect();
    Schedule::new(l, p, agents)
}

pub fn reflect(s: &Schedule) -> Schedule {
    let l = s.fence_length();
    let agents = s
        .agents()
        .iter()
        .map(|a| Agent::new(a.spec.clone(), a.trajectory.reflect(l)))
        .collect();
    Schedule::new(l.clone(), s.period().clone(), agents)
}

pub fn delay(s: &Schedule, d: &Rational) -> Schedule {
    let agents = s
        .agents()
        .iter()
        .map(|a| Agent::new(a.spec.clone(), a.trajectory.time_shift(d)))
        .collect();
    Schedule::new(s.fence_length().clone(), s.period().clone(), agents)
}

/// Positions and speeds multiplied by `c`.
pub fn scale_space(s: &Schedule, c: &Rational) -> Schedule {
    let agents = s
        .agents()
        .iter()
        .map(|a| {
            let spec = AgentSpec::new(a.spec.speed() * c, a.spec.weight().clone()).unwrap();
            Agent::new(spec, a.trajectory.scaled(&q(1, 1), c))
        })
        .collect();
    Schedule::new(s.fence_length() * c, s.period().clone(), agents)
}

/// Times, period and weights multiplied by `c`, speeds divided by it.
pub fn scale_time(s: &Schedule, c: &Rational) -> Schedule {
    let agents = s
        .agents()
        .iter()
        .map(|a| {
            let spec = AgentSpec::new(a.spec.speed() / c, a.spec.weight() * c).unwrap();
            Agent::new(spec, a.trajectory.scaled(c, &q(1, 1)))
        })
        .collect();
    Schedule::new(s.fence_length().clone(), s.period() * c, agents)
}
