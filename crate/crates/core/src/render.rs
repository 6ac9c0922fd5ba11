//! Space-time diagrams as SVG.
//!
//! Position runs left to right and time runs upward. Each agent gets a band:
//! its trajectory swept upward by its weight, i.e. the set of `(x, t)` it
//! covers. Band polygons are clipped to the diagram exactly before being
//! printed with six decimals.

use std::fmt::Write;

use crate::rational::Rational;
use crate::schedule::Schedule;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub periods_shown: u32,
    pub pixels_per_unit_space: f64,
    pub pixels_per_unit_time: f64,
    pub band_opacity: f64,
    /// Fill colours, cycled over agents.
    pub palette: Vec<String>,
    /// Outline every band with a dashed stroke.
    pub show_dotted_union: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            periods_shown: 2,
            pixels_per_unit_space: 100.0,
            pixels_per_unit_time: 40.0,
            band_opacity: 0.35,
            palette: [
                "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948",
                "#9c755f",
            ]
            .map(String::from)
            .to_vec(),
            show_dotted_union: false,
        }
    }
}

/// A polygon in world coordinates `(x, t)`.
pub type Polygon = Vec<(Rational, Rational)>;

/// Keeps the part of `poly` with `t >= bound`, or `t <= bound` when `upper`.
fn clip_time(poly: &[(Rational, Rational)], bound: &Rational, upper: bool) -> Polygon {
    let inside = |p: &(Rational, Rational)| if upper { &p.1 <= bound } else { &p.1 >= bound };
    let mut out = Vec::new();
    for (i, cur) in poly.iter().enumerate() {
        let prev = &poly[(i + poly.len() - 1) % poly.len()];
        let (ci, pi) = (inside(cur), inside(prev));
        if ci != pi {
            let f = &(bound - &prev.1) / &(&cur.1 - &prev.1);
            let x = &prev.0 + &(&f * &(&cur.0 - &prev.0));
            out.push((x, bound.clone()));
        }
        if ci {
            out.push(cur.clone());
        }
    }
    out
}

/// Band pieces of each agent over `periods` periods, one parallelogram per
/// trajectory segment, counter-clockwise, clipped to `0 <= t <= periods * P`.
pub fn band_polygons(s: &Schedule, periods: u32) -> Vec<Vec<Polygon>> {
    let top = s.period() * &Rational::integer(i64::from(periods));
    let zero = Rational::zero();
    s.agents()
        .iter()
        .map(|a| {
            let w = a.spec.weight();
            let mut pieces = Vec::new();
            for k in 0..periods {
                let offset = s.period() * &Rational::integer(i64::from(k));
                for seg in a.trajectory.segments() {
                    let (p, q) = (seg.start, seg.end);
                    if p.x == q.x {
                        continue;
                    }
                    let (t0, t1) = (&p.t + &offset, &q.t + &offset);
                    let mut poly = vec![
                        (p.x.clone(), t0.clone()),
                        (q.x.clone(), t1.clone()),
                        (q.x.clone(), &t1 + w),
                        (p.x.clone(), &t0 + w),
                    ];
                    if q.x < p.x {
                        poly.reverse();
                    }
                    let clipped = clip_time(&clip_time(&poly, &zero, false), &top, true);
                    if clipped.len() >= 3 {
                        pieces.push(clipped);
                    }
                }
            }
            pieces
        })
        .collect()
}

/// Renders `s` as a standalone SVG 1.1 document.
pub fn render_svg(s: &Schedule, opts: &RenderOptions) -> String {
    let sx = opts.pixels_per_unit_space;
    let st = opts.pixels_per_unit_time;
    let width = s.fence_length().to_f64() * sx;
    let height = s.period().to_f64() * f64::from(opts.periods_shown) * st;
    let px = |x: &Rational| x.to_f64() * sx;
    let py = |t: &Rational| height - t.to_f64() * st;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.6}\" height=\"{height:.6}\" viewBox=\"0 0 {width:.6} {height:.6}\">"
    );
    let _ = writeln!(
        out,
        "  <rect class=\"frame\" x=\"0\" y=\"0\" width=\"{width:.6}\" height=\"{height:.6}\" fill=\"white\" stroke=\"black\"/>"
    );
    let bands = band_polygons(s, opts.periods_shown);
    for (i, pieces) in bands.iter().enumerate() {
        let colour = opts
            .palette
            .get(i % opts.palette.len().max(1))
            .map_or("#808080", String::as_str);
        let outline = if opts.show_dotted_union {
            format!(" stroke=\"{colour}\" stroke-width=\"1\" stroke-dasharray=\"2 3\"")
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "  <g class=\"band\" id=\"agent-{i}\" fill=\"{colour}\" fill-opacity=\"{:.6}\"{outline}>",
            opts.band_opacity
        );
        for poly in pieces {
            let points: Vec<String> = poly
                .iter()
                .map(|(x, t)| format!("{:.6},{:.6}", px(x), py(t)))
                .collect();
            let _ = writeln!(out, "    <polygon points=\"{}\"/>", points.join(" "));
        }
        out.push_str("  </g>\n");
    }
    out.push_str("  <g class=\"trajectories\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n");
    for a in s.agents() {
        for k in 0..opts.periods_shown {
            let offset = s.period() * &Rational::integer(i64::from(k));
            let points: Vec<String> = a
                .trajectory
                .breakpoints()
                .iter()
                .map(|b| format!("{:.6},{:.6}", px(&b.x), py(&(&b.t + &offset))))
                .collect();
            let _ = writeln!(out, "    <polyline points=\"{}\"/>", points.join(" "));
        }
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::fig1_schedule;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn clipping_cuts_at_the_bound() {
        let square = vec![(q(0, 1), q(0, 1)), (q(1, 1), q(0, 1)), (q(1, 1), q(2, 1)), (q(0, 1), q(2, 1))];
        let clipped = clip_time(&square, &q(1, 1), true);
        assert_eq!(
            clipped,
            vec![(q(0, 1), q(1, 1)), (q(0, 1), q(0, 1)), (q(1, 1), q(0, 1)), (q(1, 1), q(1, 1))]
        );
    }

    #[test]
    fn pieces_stay_inside_the_diagram() {
        let s = fig1_schedule();
        let top = q(14, 1);
        for pieces in band_polygons(&s, 2) {
            for poly in pieces {
                assert!(poly.iter().all(|(x, t)| x >= &q(0, 1)
                    && x <= s.fence_length()
                    && t >= &q(0, 1)
                    && t <= &top));
            }
        }
    }
}
