//! Search harnesses that try to beat the partition bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{search, InitialCandidate, SearchConfig};
use crate::coverage::verify;
use crate::rational::Rational;
use crate::schedule::{AgentSpec, Schedule};
use crate::strategies::{bounds, partition_schedule, ratio};

/// Relative excess over the partition bound that falsification trials target.
pub const FALSIFY_MARGIN: (i64, i64) = (101, 100);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedMode {
    /// Independent speeds `n / d` with `1 <= n <= 9`, `1 <= d <= 3`.
    Random,
    /// One such speed shared by all agents.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Unit,
    /// Weights drawn from `{1/2, 1, 2}`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsificationReport {
    pub k: usize,
    pub trials: usize,
    /// Exactly certified schedules longer than the partition bound.
    pub certified: Vec<Schedule>,
    pub evaluations: u64,
}

impl FalsificationReport {
    pub fn certifications(&self) -> usize {
        self.certified.len()
    }
}

fn draw_speed(rng: &mut ChaCha8Rng) -> Rational {
    Rational::ratio(rng.random_range(1..=9), rng.random_range(1..=3))
}

fn draw_specs(k: usize, speeds: SpeedMode, weights: WeightMode, rng: &mut ChaCha8Rng) -> Vec<AgentSpec> {
    let shared = draw_speed(rng);
    (0..k)
        .map(|_| {
            let v = match speeds {
                SpeedMode::Random => draw_speed(rng),
                SpeedMode::Equal => shared.clone(),
            };
            let w = match weights {
                WeightMode::Unit => Rational::one(),
                WeightMode::Random => [Rational::ratio(1, 2), Rational::one(), Rational::integer(2)]
                    [rng.random_range(0..3)]
                .clone(),
            };
            AgentSpec::new(v, w).expect("positive draws")
        })
        .collect()
}

/// Random-speed trials of [`falsify_bound_with`].
pub fn falsify_bound(
    k: usize,
    weights: WeightMode,
    trials: usize,
    cfg: &SearchConfig,
) -> FalsificationReport {
    falsify_bound_with(k, SpeedMode::Random, weights, trials, cfg)
}

/// Draws `trials` agent sets of size `k` and searches each for a schedule
/// 1% longer than its partition bound.
pub fn falsify_bound_with(
    k: usize,
    speeds: SpeedMode,
    weights: WeightMode,
    trials: usize,
    cfg: &SearchConfig,
) -> FalsificationReport {
    assert!(k >= 1, "need at least one agent");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let margin = Rational::ratio(FALSIFY_MARGIN.0, FALSIFY_MARGIN.1);
    let mut report = FalsificationReport {
        k,
        trials,
        certified: Vec::new(),
        evaluations: 0,
    };
    for _ in 0..trials {
        let specs = draw_specs(k, speeds, weights, &mut rng);
        let target = &bounds(&specs).partition_length * &margin;
        let trial_cfg = SearchConfig {
            seed: rng.random(),
            initial: InitialCandidate::Proportional,
            period: None,
            ..cfg.clone()
        };
        let out = search(&specs, &target, &trial_cfg);
        report.evaluations += out.evaluations;
        if let Some(s) = out.best_schedule {
            report.certified.push(s);
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioOutcome {
    pub ratio: Rational,
    pub schedule: Schedule,
}

const ROUNDS: u64 = 4;

/// Looks for certified schedules with a larger length to weighted-speed-sum
/// ratio than the partition strategy's 1/2.
///
/// With a seed schedule every round searches its agents, warm-started from
/// the best schedule so far; otherwise rounds draw up to `k_max` random
/// agents.
pub fn improve_ratio(k_max: usize, seed: Option<&Schedule>, cfg: &SearchConfig) -> RatioOutcome {
    let one = AgentSpec::with_speed(Rational::one()).expect("positive");
    let mut best = partition_schedule(&[one], None).expect("single zigzag");
    let mut best_ratio = ratio(&best);
    if let Some(s) = seed {
        if verify(s).is_ok_and(|v| v.patrols()) && ratio(s) > best_ratio {
            best_ratio = ratio(s);
            best = s.clone();
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let margin = Rational::ratio(FALSIFY_MARGIN.0, FALSIFY_MARGIN.1);
    let per_round = (cfg.budget / ROUNDS).max(1);
    for _ in 0..ROUNDS {
        let specs = match seed {
            Some(s) => s.specs(),
            None => {
                let k = rng.random_range(1..=k_max.max(1));
                draw_specs(k, SpeedMode::Random, WeightMode::Unit, &mut rng)
            }
        };
        let total = bounds(&specs).trivial_upper;
        let target = &(&best_ratio * &total) * &margin;
        let initial = if best.specs() == specs {
            InitialCandidate::Warm(best.clone())
        } else {
            InitialCandidate::Proportional
        };
        let round_cfg = SearchConfig {
            seed: rng.random(),
            budget: per_round,
            initial,
            period: None,
            ..cfg.clone()
        };
        if let Some(s) = search(&specs, &target, &round_cfg).best_schedule {
            let r = ratio(&s);
            if r > best_ratio {
                best_ratio = r;
                best = s;
            }
        }
    }
    RatioOutcome {
        ratio: best_ratio,
        schedule: best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::fig1_schedule;

    fn small(budget: u64) -> SearchConfig {
        SearchConfig {
            budget,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn equal_speed_draws_share_one_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let specs = draw_specs(4, SpeedMode::Equal, WeightMode::Unit, &mut rng);
        assert!(specs.iter().all(|s| s.speed() == specs[0].speed()));
        assert!(specs.iter().all(|s| s.weight() == &Rational::one()));
    }

    #[test]
    fn small_falsification_run() {
        let report = falsify_bound(2, WeightMode::Unit, 3, &small(300));
        assert_eq!(report.certifications(), 0);
        assert_eq!(report.trials, 3);
        assert!(report.evaluations >= 3 * 300);
    }

    #[test]
    fn ratio_for_one_and_two_agents_is_half() {
        assert_eq!(improve_ratio(1, None, &small(400)).ratio, Rational::ratio(1, 2));
        assert_eq!(improve_ratio(2, None, &small(400)).ratio, Rational::ratio(1, 2));
    }

    #[test]
    fn fig1_seed_keeps_its_ratio() {
        let out = improve_ratio(6, Some(&fig1_schedule()), &small(200));
        assert!(out.ratio >= Rational::ratio(21, 41));
        assert!(verify(&out.schedule).unwrap().patrols());
    }
}
