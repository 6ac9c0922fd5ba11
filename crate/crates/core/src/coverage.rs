//! Exact patrolling verifier.
//!
//! An agent of weight `T` that sits at `x` during `[a, b]` covers the
//! instants `(a, b + T]` at `x`. For a periodic schedule the patrolling
//! condition reduces to: for every `x` in the fence, the union of these arcs
//! taken mod the period is the whole circle.
//!
//! Arc endpoints move linearly in `x` between *critical positions*: the
//! fence ends, every breakpoint position, and every `x` at which two arc
//! endpoints coincide mod the period. Inside an open cell between two
//! consecutive critical positions the cyclic order of all endpoints is
//! fixed, so checking each critical position plus one interior point per
//! cell is exhaustive, and every gap length is linear in `x` across a cell.

use thiserror::Error;

use crate::rational::Rational;
use crate::schedule::{Schedule, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverageError {
    #[error("invalid schedule: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("position {x} lies outside the fence [0, {fence_length}]")]
    OutsideFence { x: Rational, fence_length: Rational },
    #[error("idle time is only defined when all agents share one weight")]
    UnequalWeights,
}

/// Half-open arc `(start, end]` on a circle; `start` in `[0, circumference)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub start: Rational,
    pub end: Rational,
}

impl Arc {
    pub fn length(&self) -> Rational {
        &self.end - &self.start
    }

    pub fn midpoint(&self) -> Rational {
        self.start.midpoint(&self.end)
    }
}

/// Union-normalized set of half-open arcs on a circle of circumference `P`.
///
/// Arcs are sorted by start, pairwise disjoint and never touching; an arc
/// crossing the seam has `end > P`. The whole circle is the `full` flag with
/// no arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSet {
    circumference: Rational,
    full: bool,
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn empty(circumference: Rational) -> Self {
        Self {
            circumference,
            full: false,
            arcs: Vec::new(),
        }
    }

    pub fn full(circumference: Rational) -> Self {
        Self {
            circumference,
            full: true,
            arcs: Vec::new(),
        }
    }

    /// Union of raw arcs `(start, end]` with `start < end`; starts may lie
    /// anywhere on the real line.
    pub fn from_arcs<I>(circumference: Rational, raw: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let p = circumference.clone();
        let mut pieces: Vec<(Rational, Rational)> = Vec::new();
        for (start, end) in raw {
            debug_assert!(start < end);
            if &end - &start >= p {
                return Self::full(circumference);
            }
            let s = start.rem_euclid(&p);
            let e = &end - &(&start - &s);
            if e <= p {
                pieces.push((s, e));
            } else {
                let wrapped = &e - &p;
                pieces.push((s, p.clone()));
                pieces.push((Rational::zero(), wrapped));
            }
        }
        pieces.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len());
        for (s, e) in pieces {
            match merged.last_mut() {
                Some(last) if s <= last.1 => {
                    if e > last.1 {
                        last.1 = e;
                    }
                }
                _ => merged.push((s, e)),
            }
        }
        if merged.len() == 1 && merged[0].0.is_zero() && merged[0].1 == p {
            return Self::full(circumference);
        }
        if merged.len() >= 2 && merged[0].0.is_zero() && merged[merged.len() - 1].1 == p {
            let (_, first_end) = merged.remove(0);
            let last = merged.last_mut().expect("len >= 1");
            last.1 = &first_end + &p;
        }
        Self {
            circumference,
            full: false,
            arcs: merged
                .into_iter()
                .map(|(start, end)| Arc { start, end })
                .collect(),
        }
    }

    pub fn circumference(&self) -> &Rational {
        &self.circumference
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn measure(&self) -> Rational {
        if self.full {
            self.circumference.clone()
        } else {
            self.arcs.iter().map(Arc::length).sum()
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        if self.full {
            return true;
        }
        let t = t.rem_euclid(&self.circumference);
        let t_next = &t + &self.circumference;
        self.arcs.iter().any(|a| {
            (a.start < t && t <= a.end) || (a.start < t_next && t_next <= a.end)
        })
    }

    /// The points of the circle not in `self`, again as half-open arcs.
    pub fn complement(&self) -> ArcSet {
        if self.full {
            return Self::empty(self.circumference.clone());
        }
        if self.arcs.is_empty() {
            return Self::full(self.circumference.clone());
        }
        let p = &self.circumference;
        let n = self.arcs.len();
        let mut gaps: Vec<Arc> = (0..n)
            .map(|i| {
                let next_start = if i + 1 < n {
                    self.arcs[i + 1].start.clone()
                } else {
                    &self.arcs[0].start + p
                };
                let start = self.arcs[i].end.rem_euclid(p);
                let end = &next_start - &(&self.arcs[i].end - &start);
                Arc { start, end }
            })
            .collect();
        gaps.sort_by(|a, b| a.start.cmp(&b.start));
        Self {
            circumference: p.clone(),
            full: false,
            arcs: gaps,
        }
    }

    /// The longest arc; ties go to the earliest start.
    pub fn longest(&self) -> Option<&Arc> {
        self.arcs.iter().fold(None, |best: Option<&Arc>, a| match best {
            Some(b) if b.length() >= a.length() => Some(b),
            _ => Some(a),
        })
    }
}

/// One non-constant trajectory segment as an affine crossing-time function
/// `t(x) = intercept + x * inverse_slope` on `[lo, hi]`.
#[derive(Debug, Clone)]
struct LinearPiece {
    agent: usize,
    lo: Rational,
    hi: Rational,
    intercept: Rational,
    inverse_slope: Rational,
}

#[derive(Debug, Clone)]
struct Plateau {
    agent: usize,
    x: Rational,
    start: Rational,
    end: Rational,
}

/// Precomputed segment geometry for repeated coverage queries.
#[derive(Debug, Clone)]
pub struct CoverageIndex {
    fence_length: Rational,
    period: Rational,
    weights: Vec<Rational>,
    pieces: Vec<LinearPiece>,
    plateaus: Vec<Plateau>,
}

impl CoverageIndex {
    pub fn new(s: &Schedule) -> Self {
        let mut pieces = Vec::new();
        let mut plateaus = Vec::new();
        for (i, agent) in s.agents().iter().enumerate() {
            for seg in agent.trajectory.segments() {
                if seg.is_constant() {
                    plateaus.push(Plateau {
                        agent: i,
                        x: seg.start.x.clone(),
                        start: seg.start.t.clone(),
                        end: seg.end.t.clone(),
                    });
                } else {
                    let inverse_slope =
                        (&seg.end.t - &seg.start.t) / (&seg.end.x - &seg.start.x);
                    let intercept = &seg.start.t - &(&seg.start.x * &inverse_slope);
                    let (lo, hi) = seg.x_range();
                    pieces.push(LinearPiece {
                        agent: i,
                        lo: lo.clone(),
                        hi: hi.clone(),
                        intercept,
                        inverse_slope,
                    });
                }
            }
        }
        Self {
            fence_length: s.fence_length().clone(),
            period: s.period().clone(),
            weights: s.agents().iter().map(|a| a.spec.weight().clone()).collect(),
            pieces,
            plateaus,
        }
    }

    /// Visit intervals `(agent, start, end)` at position `x`, unmerged.
    fn visits(&self, x: &Rational) -> Vec<(usize, Rational, Rational)> {
        let mut out = Vec::new();
        for p in &self.pieces {
            if &p.lo <= x && x <= &p.hi {
                let t = &p.intercept + &(x * &p.inverse_slope);
                out.push((p.agent, t.clone(), t));
            }
        }
        for p in &self.plateaus {
            if &p.x == x {
                out.push((p.agent, p.start.clone(), p.end.clone()));
            }
        }
        out
    }

    pub fn arcs_at(&self, x: &Rational) -> ArcSet {
        let raw = self
            .visits(x)
            .into_iter()
            .map(|(agent, start, end)| {
                let end = &end + &self.weights[agent];
                (start, end)
            });
        ArcSet::from_arcs(self.period.clone(), raw)
    }

    /// Positions at which the combinatorics of the coverage arcs can change.
    pub fn critical_positions(&self) -> Vec<Rational> {
        let l = &self.fence_length;
        let p = &self.period;
        let mut out: Vec<Rational> = vec![Rational::zero(), l.clone()];
        for piece in &self.pieces {
            out.push(piece.lo.clone());
            out.push(piece.hi.clone());
        }
        for plateau in &self.plateaus {
            out.push(plateau.x.clone());
        }
        for (ia, a) in self.pieces.iter().enumerate() {
            let ta = &self.weights[a.agent];
            for b in &self.pieces[ia + 1..] {
                let lo = (&a.lo).max(&b.lo);
                let hi = (&a.hi).min(&b.hi);
                if lo >= hi {
                    continue;
                }
                let beta = &a.inverse_slope - &b.inverse_slope;
                if beta.is_zero() {
                    continue;
                }
                let tb = &self.weights[b.agent];
                let base = &a.intercept - &b.intercept;
                let mut offsets = vec![Rational::zero(), ta.clone(), -tb, ta - tb];
                offsets.sort();
                offsets.dedup();
                for c in offsets {
                    // f(x) = base + c + beta * x must equal n * period.
                    let shift = &base + &c;
                    let f_lo = &shift + &(&beta * lo);
                    let f_hi = &shift + &(&beta * hi);
                    let (f_min, f_max) = if f_lo <= f_hi { (f_lo, f_hi) } else { (f_hi, f_lo) };
                    let n_min = (&f_min / p).ceil();
                    let n_max = (&f_max / p).floor();
                    let mut n = n_min;
                    while n <= n_max {
                        let x = (&(&Rational::from(n.clone()) * p) - &shift) / &beta;
                        out.push(x);
                        n += 1;
                    }
                }
            }
        }
        out.retain(|x| !x.is_negative() && x <= l);
        out.sort();
        out.dedup();
        out
    }
}

pub fn coverage_arcs(s: &Schedule, x: &Rational) -> Result<ArcSet, CoverageError> {
    if x.is_negative() || x > s.fence_length() {
        return Err(CoverageError::OutsideFence {
            x: x.clone(),
            fence_length: s.fence_length().clone(),
        });
    }
    Ok(CoverageIndex::new(s).arcs_at(x))
}

pub fn critical_positions(s: &Schedule) -> Vec<Rational> {
    CoverageIndex::new(s).critical_positions()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Patrols,
    Fails,
}

/// An uncovered point `(x, t_star)`; `t_star >= max weight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub x: Rational,
    pub t_star: Rational,
}

/// Uncovered instants at a sampled position, reported for its whole cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncoveredRegion {
    pub x_lo: Rational,
    pub x_hi: Rational,
    pub sample_x: Rational,
    pub gaps: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub uncovered_area: Rational,
    pub regions: Vec<UncoveredRegion>,
}

impl Verdict {
    pub fn patrols(&self) -> bool {
        self.status == Status::Patrols
    }
}

/// Sweep samples in ascending order: each critical position followed by the
/// midpoint of the open cell to its right.
fn sweep_samples(crit: &[Rational]) -> Vec<(Rational, Rational, Rational)> {
    let mut out = Vec::with_capacity(crit.len() * 2);
    for (i, x) in crit.iter().enumerate() {
        out.push((x.clone(), x.clone(), x.clone()));
        if let Some(next) = crit.get(i + 1) {
            out.push((x.midpoint(next), x.clone(), next.clone()));
        }
    }
    out
}

/// Decides exactly whether `s` patrols its fence.
pub fn verify(s: &Schedule) -> Result<Verdict, CoverageError> {
    let violations = s.validate();
    if !violations.is_empty() {
        return Err(CoverageError::Invalid(violations));
    }
    let index = CoverageIndex::new(s);
    let crit = index.critical_positions();
    let mut regions = Vec::new();
    let mut area = Rational::zero();
    for (x, lo, hi) in sweep_samples(&crit) {
        let gaps = index.arcs_at(&x).complement();
        if gaps.is_empty() {
            continue;
        }
        if lo != hi {
            area += &(&(&hi - &lo) * &gaps.measure());
        }
        let arcs = if gaps.is_full() {
            vec![Arc {
                start: Rational::zero(),
                end: s.period().clone(),
            }]
        } else {
            gaps.arcs().to_vec()
        };
        regions.push(UncoveredRegion {
            x_lo: lo,
            x_hi: hi,
            sample_x: x,
            gaps: arcs,
        });
    }
    let witness = regions.first().map(|r| {
        let widest = r
            .gaps
            .iter()
            .fold(&r.gaps[0], |best, g| if g.length() > best.length() { g } else { best });
        let mid = widest.midpoint().rem_euclid(s.period());
        Witness {
            x: r.sample_x.clone(),
            t_star: lift_past(mid, &s.max_weight(), s.period()),
        }
    });
    let status = if regions.is_empty() {
        Status::Patrols
    } else {
        Status::Fails
    };
    Ok(Verdict {
        status,
        witness,
        uncovered_area: area,
        regions,
    })
}

/// Smallest `t + n * period >= floor` with integer `n >= 0`.
fn lift_past(t: Rational, floor: &Rational, period: &Rational) -> Rational {
    if &t >= floor {
        return t;
    }
    let n = ((floor - &t) / period).ceil();
    &t + &(period * &Rational::from(n))
}

/// Uncovered measure per unit of `x` at one position (test and report helper).
pub fn uncovered_measure_at(s: &Schedule, x: &Rational) -> Result<Rational, CoverageError> {
    Ok(coverage_arcs(s, x)?.complement().measure())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdleCell {
    pub x_lo: Rational,
    pub x_hi: Rational,
    /// Supremum over the cell of the longest wait between visits; `None` when
    /// the cell is never visited.
    pub max_gap: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdleProfile {
    pub cells: Vec<IdleCell>,
    /// `None` when some part of the fence is never visited.
    pub global_max: Option<Rational>,
    pub argmax_x: Option<Rational>,
}

/// Circular gaps between consecutive visits, in visit order.
fn visit_gaps(index: &CoverageIndex, x: &Rational) -> Option<Vec<Rational>> {
    let p = &index.period;
    let mut visits: Vec<(Rational, Rational)> = index
        .visits(x)
        .into_iter()
        .map(|(_, a, b)| {
            let a2 = a.rem_euclid(p);
            let b2 = &b - &(&a - &a2);
            (a2, b2)
        })
        .collect();
    if visits.is_empty() {
        return None;
    }
    visits.sort();
    let mut merged: Vec<(Rational, Rational)> = Vec::new();
    for (a, b) in visits {
        match merged.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => merged.push((a, b)),
        }
    }
    let n = merged.len();
    Some(
        (0..n)
            .map(|i| {
                let next = if i + 1 < n {
                    merged[i + 1].0.clone()
                } else {
                    &merged[0].0 + p
                };
                let g = &next - &merged[i].1;
                if g.is_negative() {
                    Rational::zero()
                } else {
                    g
                }
            })
            .collect(),
    )
}

/// Longest wait between consecutive visits, per critical cell.
pub fn idle_profile(s: &Schedule) -> Result<IdleProfile, CoverageError> {
    let violations = s.validate();
    if !violations.is_empty() {
        return Err(CoverageError::Invalid(violations));
    }
    if s.common_weight().is_none() {
        return Err(CoverageError::UnequalWeights);
    }
    let index = CoverageIndex::new(s);
    let crit = index.critical_positions();
    let third = Rational::ratio(1, 3);
    let mut cells = Vec::with_capacity(crit.len());
    let mut global: Option<(Rational, Rational)> = None;
    let mut unvisited = false;
    for w in crit.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let step = &(hi - lo) * &third;
        let x1 = lo + &step;
        let x2 = &x1 + &step;
        let g1 = visit_gaps(&index, &x1);
        let g2 = visit_gaps(&index, &x2);
        let cell_max = match (g1, g2) {
            (Some(g1), Some(g2)) if g1.len() == g2.len() => {
                // Gap lengths are affine on the cell: extrapolate to both ends.
                let mut best: Option<(Rational, Rational)> = None;
                for (a, b) in g1.iter().zip(&g2) {
                    let at_lo = &(a + a) - b;
                    let at_hi = &(b + b) - a;
                    for (v, x) in [(at_lo, lo), (at_hi, hi)] {
                        if best.as_ref().is_none_or(|(bv, _)| &v > bv) {
                            best = Some((v, x.clone()));
                        }
                    }
                }
                best
            }
            (Some(_), Some(_)) => {
                unreachable!("visit structure changed inside a critical cell")
            }
            _ => None,
        };
        match &cell_max {
            Some((v, x)) => {
                if global.as_ref().is_none_or(|(gv, _)| v > gv) {
                    global = Some((v.clone(), x.clone()));
                }
            }
            None => unvisited = true,
        }
        cells.push(IdleCell {
            x_lo: lo.clone(),
            x_hi: hi.clone(),
            max_gap: cell_max.map(|(v, _)| v),
        });
    }
    let (global_max, argmax_x) = match (unvisited, global) {
        (false, Some((v, x))) => (Some(v), Some(x)),
        _ => (None, None),
    };
    Ok(IdleProfile {
        cells,
        global_max,
        argmax_x,
    })
}

/// Direct point test of the coverage definition; slow, used in reports.
pub fn is_covered(s: &Schedule, x: &Rational, t_star: &Rational) -> bool {
    let p = s.period();
    s.agents().iter().any(|agent| {
        let window_start = t_star - agent.spec.weight();
        agent
            .trajectory
            .crossings(x)
            .intervals
            .iter()
            .any(|c| {
                // Some copy [c.start + kP, c.end + kP] meets [window_start, t_star).
                let k = ((&window_start - &c.end) / p).ceil();
                let shift = p * &Rational::from(k);
                let (a, b) = (&c.start + &shift, &c.end + &shift);
                b >= window_start && &a < t_star
            })
    })
}
