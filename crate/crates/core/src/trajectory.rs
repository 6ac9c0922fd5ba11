//! Periodic piecewise-linear agent motion.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error("period must be positive, got {0}")]
    NonPositivePeriod(Rational),
    #[error("a trajectory needs at least two breakpoints")]
    TooFewBreakpoints,
    #[error("first breakpoint must be at t = 0, got {0}")]
    FirstTimeNotZero(Rational),
    #[error("last breakpoint must be at t = period ({period}), got {last}")]
    LastTimeNotPeriod { period: Rational, last: Rational },
    #[error("breakpoint times must strictly increase (index {0})")]
    NonIncreasingTimes(usize),
    #[error("trajectory is not closed: x(0) = {start} but x(period) = {end}")]
    NotClosed { start: Rational, end: Rational },
    #[error("zigzag needs 0 <= lo < hi, got lo = {lo}, hi = {hi}")]
    BadExtent { lo: Rational, hi: Rational },
    #[error("speed must be positive, got {0}")]
    NonPositiveSpeed(Rational),
    #[error("period {period} is not a positive integer multiple of {base}")]
    PeriodNotMultiple { period: Rational, base: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Breakpoint {
    pub t: Rational,
    pub x: Rational,
}

impl Breakpoint {
    pub fn new(t: Rational, x: Rational) -> Self {
        Self { t, x }
    }
}

/// One linear piece `[start.t, end.t]` of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Segment<'a> {
    pub start: &'a Breakpoint,
    pub end: &'a Breakpoint,
}

impl Segment<'_> {
    pub fn is_constant(&self) -> bool {
        self.start.x == self.end.x
    }

    pub fn x_range(&self) -> (&Rational, &Rational) {
        if self.start.x <= self.end.x {
            (&self.start.x, &self.end.x)
        } else {
            (&self.end.x, &self.start.x)
        }
    }

    pub fn slope(&self) -> Rational {
        (&self.end.x - &self.start.x) / (&self.end.t - &self.start.t)
    }

    /// Time at which the segment passes `level`; `None` for constant
    /// segments or levels outside the segment's range.
    pub fn crossing_time(&self, level: &Rational) -> Option<Rational> {
        if self.is_constant() {
            return None;
        }
        let (lo, hi) = self.x_range();
        if level < lo || level > hi {
            return None;
        }
        let dt = &self.end.t - &self.start.t;
        let dx = &self.end.x - &self.start.x;
        Some(&self.start.t + &((level - &self.start.x) * dt / dx))
    }
}

/// A closed time interval during which a trajectory sits at a queried level.
///
/// `start` lies in `[0, period)`. An interval straddling the period seam has
/// `end >= period`; a trajectory constant at the level has `[0, period]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    pub start: Rational,
    pub end: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingSet {
    pub period: Rational,
    pub intervals: Vec<Crossing>,
}

impl CrossingSet {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let t = t.rem_euclid(&self.period);
        self.intervals.iter().any(|c| {
            (c.start <= t && t <= c.end) || {
                let shifted = &t + &self.period;
                c.start <= shifted && shifted <= c.end
            }
        })
    }
}

/// Position as a periodic piecewise-linear function of time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trajectory {
    period: Rational,
    points: Vec<Breakpoint>,
}

fn collinear(a: &Breakpoint, b: &Breakpoint, c: &Breakpoint) -> bool {
    (&b.x - &a.x) * (&c.t - &b.t) == (&c.x - &b.x) * (&b.t - &a.t)
}

impl Trajectory {
    pub fn new(period: Rational, points: Vec<Breakpoint>) -> Result<Self, TrajectoryError> {
        if !period.is_positive() {
            return Err(TrajectoryError::NonPositivePeriod(period));
        }
        if points.len() < 2 {
            return Err(TrajectoryError::TooFewBreakpoints);
        }
        if !points[0].t.is_zero() {
            return Err(TrajectoryError::FirstTimeNotZero(points[0].t.clone()));
        }
        let last = points.last().expect("len checked");
        if last.t != period {
            return Err(TrajectoryError::LastTimeNotPeriod {
                period,
                last: last.t.clone(),
            });
        }
        if let Some(i) = points.windows(2).position(|w| w[0].t >= w[1].t) {
            return Err(TrajectoryError::NonIncreasingTimes(i + 1));
        }
        if points[0].x != last.x {
            return Err(TrajectoryError::NotClosed {
                start: points[0].x.clone(),
                end: last.x.clone(),
            });
        }
        Ok(Self::canonical(period, points))
    }

    fn canonical(period: Rational, points: Vec<Breakpoint>) -> Self {
        let n = points.len();
        let mut out: Vec<Breakpoint> = Vec::with_capacity(n);
        // The seam breakpoints at 0 and period always stay.
        for p in points {
            while out.len() >= 2 && {
                let k = out.len();
                collinear(&out[k - 2], &out[k - 1], &p)
            } {
                out.pop();
            }
            out.push(p);
        }
        Self { period, points: out }
    }

    pub fn constant(x: Rational, period: Rational) -> Result<Self, TrajectoryError> {
        Self::new(
            period.clone(),
            vec![
                Breakpoint::new(Rational::zero(), x.clone()),
                Breakpoint::new(period, x),
            ],
        )
    }

    /// Full-speed back-and-forth motion between `lo` and `hi`, at `lo` at
    /// time `phase`.
    pub fn zigzag(
        lo: &Rational,
        hi: &Rational,
        speed: &Rational,
        phase: &Rational,
        period: &Rational,
    ) -> Result<Self, TrajectoryError> {
        if lo.is_negative() || lo >= hi {
            return Err(TrajectoryError::BadExtent {
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        if !speed.is_positive() {
            return Err(TrajectoryError::NonPositiveSpeed(speed.clone()));
        }
        if !period.is_positive() {
            return Err(TrajectoryError::NonPositivePeriod(period.clone()));
        }
        let leg = (hi - lo) / speed;
        let trip = &leg + &leg;
        let trips = period / &trip;
        if !trips.is_integer() || !trips.is_positive() {
            return Err(TrajectoryError::PeriodNotMultiple {
                period: period.clone(),
                base: trip,
            });
        }
        let legs = 2 * trips.numer().to_usize().expect("round-trip count fits in usize");
        let mut points = Vec::with_capacity(legs + 1);
        let mut t = Rational::zero();
        for k in 0..=legs {
            let x = if k % 2 == 0 { lo.clone() } else { hi.clone() };
            points.push(Breakpoint::new(t.clone(), x));
            t += &leg;
        }
        Ok(Self::new(period.clone(), points)?.time_shift(phase))
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.points
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment<'_>> + '_ {
        self.points.windows(2).map(|w| Segment {
            start: &w[0],
            end: &w[1],
        })
    }

    pub fn min_x(&self) -> &Rational {
        self.points.iter().map(|p| &p.x).min().expect("non-empty")
    }

    pub fn max_x(&self) -> &Rational {
        self.points.iter().map(|p| &p.x).max().expect("non-empty")
    }

    /// Largest absolute slope over all segments.
    pub fn max_speed(&self) -> Rational {
        self.segments()
            .map(|s| s.slope().abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn evaluate(&self, t: &Rational) -> Rational {
        let t = t.rem_euclid(&self.period);
        // Index of the last breakpoint with time <= t.
        let i = self.points.partition_point(|p| p.t <= t) - 1;
        let a = &self.points[i];
        match self.points.get(i + 1) {
            None => a.x.clone(),
            Some(b) => &a.x + &((&b.x - &a.x) * (&t - &a.t) / (&b.t - &a.t)),
        }
    }

    /// All times in one period at which the trajectory sits at `level`.
    pub fn crossings(&self, level: &Rational) -> CrossingSet {
        let mut raw: Vec<Crossing> = Vec::new();
        for seg in self.segments() {
            if seg.is_constant() {
                if &seg.start.x == level {
                    raw.push(Crossing {
                        start: seg.start.t.clone(),
                        end: seg.end.t.clone(),
                    });
                }
            } else if let Some(t) = seg.crossing_time(level) {
                raw.push(Crossing {
                    start: t.clone(),
                    end: t,
                });
            }
        }
        let mut merged: Vec<Crossing> = Vec::with_capacity(raw.len());
        for c in raw {
            match merged.last_mut() {
                Some(last) if c.start <= last.end => {
                    if c.end > last.end {
                        last.end = c.end;
                    }
                }
                _ => merged.push(c),
            }
        }
        let period = self.period.clone();
        if merged.len() >= 2 && merged[0].start.is_zero() && merged[merged.len() - 1].end == period
        {
            let first = merged.remove(0);
            let last = merged.pop().expect("len >= 1");
            let wrapped = if last.start == period {
                first
            } else {
                Crossing {
                    start: last.start,
                    end: &first.end + &period,
                }
            };
            if wrapped.start.is_zero() {
                merged.insert(0, wrapped);
            } else {
                merged.push(wrapped);
            }
        }
        CrossingSet {
            period,
            intervals: merged,
        }
    }

    /// The trajectory delayed by `delta`: `result(t) = self(t - delta)`.
    pub fn time_shift(&self, delta: &Rational) -> Self {
        let delta = delta.rem_euclid(&self.period);
        if delta.is_zero() {
            return self.clone();
        }
        let mut times: Vec<Rational> = self.points[..self.points.len() - 1]
            .iter()
            .map(|p| (&p.t + &delta).rem_euclid(&self.period))
            .collect();
        times.push(Rational::zero());
        times.sort();
        times.dedup();
        times.push(self.period.clone());
        let points = times
            .into_iter()
            .map(|t| {
                let x = self.evaluate(&(&t - &delta));
                Breakpoint::new(t, x)
            })
            .collect();
        Self::canonical(self.period.clone(), points)
    }

    /// Mirror image `x -> l - x`.
    pub fn reflect(&self, l: &Rational) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| Breakpoint::new(p.t.clone(), l - &p.x))
            .collect();
        Self {
            period: self.period.clone(),
            points,
        }
    }

    /// The same motion re-expressed on a period that is a multiple of the
    /// current one.
    pub fn repeat(&self, period: &Rational) -> Result<Self, TrajectoryError> {
        let copies = period / &self.period;
        if !copies.is_integer() || !copies.is_positive() {
            return Err(TrajectoryError::PeriodNotMultiple {
                period: period.clone(),
                base: self.period.clone(),
            });
        }
        let copies = copies.numer().to_usize().expect("repeat count fits in usize");
        let mut points = Vec::with_capacity(copies * (self.points.len() - 1) + 1);
        let mut offset = Rational::zero();
        for _ in 0..copies {
            for p in &self.points[..self.points.len() - 1] {
                points.push(Breakpoint::new(&p.t + &offset, p.x.clone()));
            }
            offset += &self.period;
        }
        points.push(Breakpoint::new(period.clone(), self.points[0].x.clone()));
        Ok(Self {
            period: period.clone(),
            points,
        })
    }

    /// Maps every breakpoint through `(t, x) -> (t * time, x * space)`.
    pub fn scaled(&self, time: &Rational, space: &Rational) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| Breakpoint::new(&p.t * time, &p.x * space))
            .collect();
        Self {
            period: &self.period * time,
            points,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn traj(period: Rational, pts: &[(Rational, Rational)]) -> Trajectory {
        Trajectory::new(
            period,
            pts.iter()
                .map(|(t, x)| Breakpoint::new(t.clone(), x.clone()))
                .collect(),
        )
        .unwrap()
    }

    fn pts(t: &Trajectory) -> Vec<(Rational, Rational)> {
        t.breakpoints()
            .iter()
            .map(|b| (b.t.clone(), b.x.clone()))
            .collect()
    }

    fn basic() -> Trajectory {
        traj(q(1, 1), &[(q(0, 1), q(0, 1)), (q(1, 2), q(1, 2)), (q(1, 1), q(0, 1))])
    }

    #[test]
    fn evaluate_interpolates_and_wraps() {
        let z = basic();
        assert_eq!(z.evaluate(&q(1, 4)), q(1, 4));
        assert_eq!(z.evaluate(&q(5, 4)), q(1, 4));
        assert_eq!(z.evaluate(&q(1, 2)), q(1, 2));
        assert_eq!(z.evaluate(&q(-1, 4)), q(1, 4));
        assert_eq!(z.evaluate(&q(1, 1)), q(0, 1));
    }

    #[test]
    fn crossing_examples() {
        let z = basic();
        let c = z.crossings(&q(1, 4));
        assert_eq!(
            c.intervals,
            vec![
                Crossing { start: q(1, 4), end: q(1, 4) },
                Crossing { start: q(3, 4), end: q(3, 4) },
            ]
        );
        let c = z.crossings(&q(1, 2));
        assert_eq!(c.intervals, vec![Crossing { start: q(1, 2), end: q(1, 2) }]);
        let c = z.crossings(&q(0, 1));
        assert_eq!(c.intervals, vec![Crossing { start: q(0, 1), end: q(0, 1) }]);
        assert!(z.crossings(&q(3, 4)).is_empty());

        let plateau = traj(
            q(1, 1),
            &[(q(0, 1), q(0, 1)), (q(1, 4), q(1, 4)), (q(3, 4), q(1, 4)), (q(1, 1), q(0, 1))],
        );
        assert_eq!(
            plateau.crossings(&q(1, 4)).intervals,
            vec![Crossing { start: q(1, 4), end: q(3, 4) }]
        );
    }

    #[test]
    fn plateau_across_the_seam_is_one_interval() {
        let t = traj(
            q(2, 1),
            &[(q(0, 1), q(1, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(0, 1)), (q(3, 2), q(1, 1)), (q(2, 1), q(1, 1))],
        );
        assert_eq!(
            t.crossings(&q(1, 1)).intervals,
            vec![Crossing { start: q(3, 2), end: q(5, 2) }]
        );
        let flat = Trajectory::constant(q(1, 3), q(1, 1)).unwrap();
        assert_eq!(
            flat.crossings(&q(1, 3)).intervals,
            vec![Crossing { start: q(0, 1), end: q(1, 1) }]
        );
    }

    #[test]
    fn zigzag_examples() {
        let z = Trajectory::zigzag(&q(0, 1), &q(1, 2), &q(1, 1), &q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(pts(&z), pts(&basic()));
        let z = Trajectory::zigzag(&q(0, 1), &q(7, 2), &q(1, 1), &q(0, 1), &q(7, 1)).unwrap();
        assert_eq!(
            pts(&z),
            vec![(q(0, 1), q(0, 1)), (q(7, 2), q(7, 2)), (q(7, 1), q(0, 1))]
        );
        let z = Trajectory::zigzag(&q(0, 1), &q(1, 2), &q(1, 1), &q(1, 2), &q(1, 1)).unwrap();
        assert_eq!(
            pts(&z),
            vec![(q(0, 1), q(1, 2)), (q(1, 2), q(0, 1)), (q(1, 1), q(1, 2))]
        );
        assert!(matches!(
            Trajectory::zigzag(&q(0, 1), &q(1, 2), &q(1, 1), &q(0, 1), &q(3, 2)),
            Err(TrajectoryError::PeriodNotMultiple { .. })
        ));
        assert!(Trajectory::zigzag(&q(1, 1), &q(1, 1), &q(1, 1), &q(0, 1), &q(1, 1)).is_err());
        assert!(Trajectory::zigzag(&q(0, 1), &q(1, 1), &q(0, 1), &q(0, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn shift_examples() {
        let z = basic();
        assert_eq!(z.time_shift(&q(1, 1)), z);
        assert_eq!(z.time_shift(&q(0, 1)), z);
        assert_eq!(
            pts(&z.time_shift(&q(1, 2))),
            vec![(q(0, 1), q(1, 2)), (q(1, 2), q(0, 1)), (q(1, 1), q(1, 2))]
        );
        assert_eq!(z.time_shift(&q(1, 4)).time_shift(&q(-1, 4)), z);
    }

    #[test]
    fn reflect_examples() {
        let z = basic();
        let r = z.reflect(&q(1, 2));
        let expected =
            Trajectory::zigzag(&q(0, 1), &q(1, 2), &q(1, 1), &q(1, 2), &q(1, 1)).unwrap();
        assert_eq!(r, expected);
        assert_eq!(r.reflect(&q(1, 2)), z);
        let c = Trajectory::constant(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(c.reflect(&q(1, 1)), Trajectory::constant(q(1, 1), q(1, 1)).unwrap());
    }

    #[test]
    fn construction_errors_and_canonicalization() {
        let bp = |t: Rational, x: Rational| Breakpoint::new(t, x);
        assert!(matches!(
            Trajectory::new(q(1, 1), vec![bp(q(0, 1), q(0, 1)), bp(q(1, 1), q(1, 1))]),
            Err(TrajectoryError::NotClosed { .. })
        ));
        assert!(matches!(
            Trajectory::new(q(1, 1), vec![bp(q(1, 2), q(0, 1)), bp(q(1, 1), q(0, 1))]),
            Err(TrajectoryError::FirstTimeNotZero(_))
        ));
        assert!(matches!(
            Trajectory::new(
                q(1, 1),
                vec![bp(q(0, 1), q(0, 1)), bp(q(0, 1), q(0, 1)), bp(q(1, 1), q(0, 1))]
            ),
            Err(TrajectoryError::NonIncreasingTimes(1))
        ));
        let t = Trajectory::new(
            q(1, 1),
            vec![
                bp(q(0, 1), q(0, 1)),
                bp(q(1, 4), q(1, 4)),
                bp(q(1, 2), q(1, 2)),
                bp(q(1, 1), q(0, 1)),
            ],
        )
        .unwrap();
        assert_eq!(t, basic());
    }

    #[test]
    fn repeat_keeps_values() {
        let z = basic();
        let r = z.repeat(&q(3, 1)).unwrap();
        assert_eq!(r.breakpoints().len(), 7);
        for k in 0..30 {
            let t = q(k, 7);
            assert_eq!(r.evaluate(&t), z.evaluate(&t));
        }
        assert!(z.repeat(&q(3, 2)).is_err());
    }

    fn arb_trajectory() -> impl Strategy<Value = Trajectory> {
        (1usize..7, 1i64..5)
            .prop_flat_map(|(n, p)| {
                (
                    Just(p),
                    proptest::collection::vec((1i64..6, 0i64..9), n),
                    0i64..9,
                )
            })
            .prop_map(|(p, steps, x0)| {
                let total: i64 = steps.iter().map(|(dt, _)| dt).sum::<i64>() + 1;
                let period = q(p, 1);
                let unit = &period / &q(total, 1);
                let mut t = Rational::zero();
                let mut out = vec![Breakpoint::new(t.clone(), q(x0, 4))];
                for (dt, x) in steps {
                    t += &(&unit * &q(dt, 1));
                    out.push(Breakpoint::new(t.clone(), q(x, 4)));
                }
                out.push(Breakpoint::new(period.clone(), q(x0, 4)));
                Trajectory::new(period, out).unwrap()
            })
    }

    proptest! {
        #[test]
        fn crossings_are_exact_solutions(tr in arb_trajectory(), lvl in 0i64..9, probes in proptest::collection::vec((0i64..997, 1i64..997), 50)) {
            let level = q(lvl, 4);
            let cs = tr.crossings(&level);
            for c in &cs.intervals {
                prop_assert_eq!(tr.evaluate(&c.start), level.clone());
                prop_assert_eq!(tr.evaluate(&c.end), level.clone());
                prop_assert_eq!(tr.evaluate(&c.start.midpoint(&c.end)), level.clone());
            }
            for w in cs.intervals.windows(2) {
                prop_assert!(w[0].end < w[1].start);
            }
            for (n, d) in probes {
                let t = tr.period() * &q(n % d, d);
                if !cs.contains(&t) {
                    prop_assert_ne!(tr.evaluate(&t), level.clone());
                } else {
                    prop_assert_eq!(tr.evaluate(&t), level.clone());
                }
            }
        }

        #[test]
        fn shifts_compose_additively(tr in arb_trajectory(), a in -20i64..20, b in -20i64..20, probes in proptest::collection::vec(0i64..200, 20)) {
            let da = q(a, 7);
            let db = q(b, 5);
            let lhs = tr.time_shift(&da).time_shift(&db);
            let rhs = tr.time_shift(&(&da + &db));
            for k in probes {
                let t = q(k, 13);
                prop_assert_eq!(lhs.evaluate(&t), rhs.evaluate(&t));
                prop_assert_eq!(rhs.evaluate(&t), tr.evaluate(&(&t - &(&da + &db))));
            }
        }

        #[test]
        fn evaluation_respects_max_speed(tr in arb_trajectory(), pairs in proptest::collection::vec((0i64..500, 0i64..500), 30)) {
            let v = tr.max_speed();
            for (a, b) in pairs {
                let (t1, t2) = (q(a.min(b), 37), q(a.max(b), 37));
                let d = (tr.evaluate(&t2) - tr.evaluate(&t1)).abs();
                prop_assert!(d <= &v * &(&t2 - &t1));
            }
        }
    }
}
