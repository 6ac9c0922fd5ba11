//! Floating-point mirror of the coverage check, used only to rank proposals.

use super::candidate::{Candidate, Grid, Mover};

/// Weight of the longest single gap relative to the mean uncovered measure.
const GAP_PENALTY: f64 = 0.25;

/// Positions (space grid units) at which candidates are scored.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Samples {
    xs: Vec<f64>,
}

impl Samples {
    pub fn uniform(grid: &Grid, cells: usize) -> Self {
        let l = grid.length as f64;
        let xs = (0..=cells).map(|i| l * i as f64 / cells as f64).collect();
        Self { xs }
    }

    /// Adds a position where a float-clean candidate failed exactly.
    pub fn refine(&mut self, x: f64) {
        if !self.xs.contains(&x) {
            self.xs.push(x);
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }
}

/// Mean uncovered fraction of the period over the samples, plus a penalty
/// for the longest gap. Zero exactly when every sample is covered.
pub(crate) fn score(c: &Candidate, grid: &Grid, movers: &[Mover], samples: &Samples) -> f64 {
    let period = grid.period as f64;
    let windows: Vec<f64> = movers
        .iter()
        .map(|m| m.weight * grid.time as f64)
        .collect();
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    for &x in &samples.xs {
        arcs.clear();
        for (route, &w) in c.routes.iter().zip(&windows) {
            let shift = route.shift as f64;
            for seg in route.points.windows(2) {
                let (t0, x0) = (seg[0].0 as f64 + shift, seg[0].1 as f64);
                let (t1, x1) = (seg[1].0 as f64 + shift, seg[1].1 as f64);
                if x0 == x1 {
                    if x0 == x {
                        arcs.push((t0, t1 - t0 + w));
                    }
                } else if x0.min(x1) <= x && x <= x0.max(x1) {
                    let t = t0 + (x - x0) * (t1 - t0) / (x1 - x0);
                    arcs.push((t, w));
                }
            }
        }
        let (uncovered, longest) = circle_gaps(&mut arcs, period);
        total += uncovered;
        worst = worst.max(longest);
    }
    (total / samples.len() as f64 + GAP_PENALTY * worst) / period
}

/// Uncovered measure and longest gap of a union of arcs `(start, length)`
/// on a circle.
fn circle_gaps(arcs: &mut [(f64, f64)], period: f64) -> (f64, f64) {
    if arcs.is_empty() {
        return (period, period);
    }
    if arcs.iter().any(|&(_, len)| len >= period) {
        return (0.0, 0.0);
    }
    for a in arcs.iter_mut() {
        a.0 = a.0.rem_euclid(period);
    }
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Arcs running past the seam cover `[0, wrap]`.
    let wrap = arcs
        .iter()
        .map(|&(start, len)| start + len - period)
        .fold(0.0, f64::max);
    let mut reach = wrap;
    let mut uncovered = 0.0;
    let mut longest: f64 = 0.0;
    let mut head = 0.0;
    for &(start, len) in arcs.iter() {
        if start > reach {
            if reach == 0.0 {
                head = start;
            }
            uncovered += start - reach;
            longest = longest.max(start - reach);
        }
        reach = reach.max(start + len);
    }
    let tail = (period - reach).max(0.0);
    uncovered += tail;
    longest = longest.max(tail + head);
    (uncovered, longest)
}
